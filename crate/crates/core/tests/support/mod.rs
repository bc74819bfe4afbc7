//! Test-only helpers shared by the integration suites: a slow reference
//! model of the engine and seeded generators for random inputs.
//!
//! Other crates pull this in with `#[path]`, so it depends only on the public
//! `argweave_core` API plus `rand`.

#![allow(dead_code)]

pub mod gen;
pub mod oracle;
