//! Scheme-based argument store.
//!
//! Arguments instantiate argumentation schemes against a corpus of sources,
//! statements and testimony. Each scheme carries critical questions; the
//! credibility of an argument is the mean degree of its answerable questions.
//! Arguments are queried with a small conjunctive language whose concept
//! filters expand through taxonomies.

pub mod api;
pub mod corpus;
pub mod credibility;
pub mod fixtures;
pub mod query;
pub mod schemes;
pub mod taxonomy;
