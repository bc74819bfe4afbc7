//! The shipped MMR-vaccine debate scenario.
//!
//! The files under `fixtures/` are embedded so tests and tools can build the
//! scenario corpus without touching the filesystem; [`FIXTURE_DIR`] points at
//! the same files on disk for callers that need real paths.

use std::path::Path;

use crate::corpus::{Corpus, CorpusFile, CorpusLoader};
use crate::schemes::SchemeRegistry;
use crate::taxonomy::Taxonomy;

pub const FIXTURE_DIR: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures");

pub const MMR_DEBATE_JSON: &str = include_str!("../fixtures/mmr_debate.json");
pub const EXPERTISE_TAXONOMY_JSON: &str = include_str!("../fixtures/expertise.json");
pub const LOCATION_TAXONOMY_JSON: &str = include_str!("../fixtures/location.json");
pub const VACCINE_TAXONOMY_JSON: &str = include_str!("../fixtures/vaccine.json");

fn parse_taxonomy(json: &str) -> Taxonomy {
    serde_json::from_str(json).expect("fixture taxonomy is valid")
}

pub fn expertise_taxonomy() -> Taxonomy {
    parse_taxonomy(EXPERTISE_TAXONOMY_JSON)
}

pub fn location_taxonomy() -> Taxonomy {
    parse_taxonomy(LOCATION_TAXONOMY_JSON)
}

pub fn vaccine_taxonomy() -> Taxonomy {
    parse_taxonomy(VACCINE_TAXONOMY_JSON)
}

/// A loader that already carries the three fixture taxonomies.
pub fn loader() -> CorpusLoader {
    CorpusLoader::new(SchemeRegistry::builtin())
        .with_taxonomy(expertise_taxonomy())
        .with_taxonomy(location_taxonomy())
        .with_taxonomy(vaccine_taxonomy())
}

/// The corpus file with its taxonomy paths stripped; pair with [`loader`].
pub fn mmr_file() -> CorpusFile {
    let mut file: CorpusFile =
        serde_json::from_str(MMR_DEBATE_JSON).expect("fixture corpus is valid");
    file.taxonomy_refs.clear();
    file
}

pub fn mmr_corpus() -> Corpus {
    loader()
        .load_file(mmr_file(), Path::new(FIXTURE_DIR))
        .expect("fixture corpus loads")
}
