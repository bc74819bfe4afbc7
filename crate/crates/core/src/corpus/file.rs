use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{Argument, Challenge, Corpus, CorpusError, Source, Statement, TestimonyLink};
use crate::schemes::SchemeRegistry;
use crate::taxonomy::{Taxonomy, TaxonomyFile, TaxonomySet};

/// A taxonomy named by a corpus file: a path relative to the corpus file, or
/// the taxonomy itself.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TaxonomyRef {
    Path(String),
    Inline(TaxonomyFile),
}

/// On-disk corpus layout.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusFile {
    #[serde(default)]
    pub taxonomy_refs: Vec<TaxonomyRef>,
    #[serde(default)]
    pub statements: Vec<Statement>,
    #[serde(default)]
    pub sources: Vec<Source>,
    #[serde(default)]
    pub testimony: Vec<TestimonyLink>,
    #[serde(default)]
    pub arguments: Vec<Argument>,
    #[serde(default)]
    pub challenges: Vec<Challenge>,
}

fn parse_error(path: &str, e: serde_json::Error) -> CorpusError {
    CorpusError::Parse {
        path: path.to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

fn read(path: &Path) -> Result<String, CorpusError> {
    fs::read_to_string(path).map_err(|e| CorpusError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// Reads a standalone taxonomy file.
pub fn load_taxonomy(path: &Path) -> Result<Taxonomy, CorpusError> {
    let text = read(path)?;
    let file: TaxonomyFile =
        serde_json::from_str(&text).map_err(|e| parse_error(&path.display().to_string(), e))?;
    Ok(Taxonomy::try_from(file)?)
}

/// Reads a JSON array of scheme definitions.
pub fn load_schemes(path: &Path) -> Result<SchemeRegistry, CorpusError> {
    let text = read(path)?;
    let defs =
        serde_json::from_str(&text).map_err(|e| parse_error(&path.display().to_string(), e))?;
    Ok(SchemeRegistry::from_definitions(defs)?)
}

/// Builds a [`Corpus`] from a corpus file in one all-or-nothing pass.
#[derive(Debug, Clone)]
pub struct CorpusLoader {
    schemes: SchemeRegistry,
    extra_taxonomies: Vec<Taxonomy>,
}

impl Default for CorpusLoader {
    fn default() -> Self {
        Self::new(SchemeRegistry::builtin())
    }
}

impl CorpusLoader {
    pub fn new(schemes: SchemeRegistry) -> Self {
        Self {
            schemes,
            extra_taxonomies: Vec::new(),
        }
    }

    /// Taxonomies supplied alongside the corpus rather than by it. They are
    /// not written back by [`Corpus::to_file`].
    pub fn with_taxonomy(mut self, tax: Taxonomy) -> Self {
        self.extra_taxonomies.push(tax);
        self
    }

    pub fn with_taxonomy_files(mut self, paths: &[PathBuf]) -> Result<Self, CorpusError> {
        for p in paths {
            self.extra_taxonomies.push(load_taxonomy(p)?);
        }
        Ok(self)
    }

    pub fn load_path(&self, path: &Path) -> Result<Corpus, CorpusError> {
        let text = read(path)?;
        let base = path.parent().unwrap_or(Path::new("."));
        self.load_str(&text, &path.display().to_string(), base)
    }

    /// Parses `text`; relative taxonomy paths resolve against `base`.
    pub fn load_str(&self, text: &str, origin: &str, base: &Path) -> Result<Corpus, CorpusError> {
        let file: CorpusFile = serde_json::from_str(text).map_err(|e| parse_error(origin, e))?;
        self.load_file(file, base)
    }

    pub fn load_file(&self, file: CorpusFile, base: &Path) -> Result<Corpus, CorpusError> {
        let mut owned = TaxonomySet::new();
        for r in file.taxonomy_refs {
            let tax = match r {
                TaxonomyRef::Path(p) => load_taxonomy(&base.join(p))?,
                TaxonomyRef::Inline(f) => Taxonomy::try_from(f)?,
            };
            owned.insert(tax)?;
        }
        let mut all = owned.clone();
        for t in &self.extra_taxonomies {
            all.insert(t.clone())?;
        }

        let mut corpus = Corpus::new(all, self.schemes.clone());
        corpus.owned_taxonomies = owned.iter().map(|t| t.name().to_string()).collect();
        for s in file.statements {
            corpus.add_statement(s)?;
        }
        for s in file.sources {
            corpus.add_source(s)?;
        }
        for l in file.testimony {
            corpus.insert_testimony(l)?;
        }
        for a in file.arguments {
            corpus.add_argument(a)?;
        }
        for ch in file.challenges {
            corpus.insert_challenge(ch)?;
        }
        corpus.set_version(0);
        Ok(corpus)
    }
}

impl Corpus {
    /// Canonical file form: taxonomies that came with the corpus are written
    /// inline, every section sorted by id.
    pub fn to_file(&self) -> CorpusFile {
        CorpusFile {
            taxonomy_refs: self
                .taxonomies
                .iter()
                .filter(|t| self.owned_taxonomies.contains(t.name()))
                .map(|t| TaxonomyRef::Inline(t.to_file()))
                .collect(),
            statements: self.statements.values().cloned().collect(),
            sources: self.sources.values().cloned().collect(),
            testimony: self.testimony.values().cloned().collect(),
            arguments: self.arguments.values().cloned().collect(),
            challenges: self.challenges.values().cloned().collect(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(&self.to_file()).expect("corpus serializes");
        out.push('\n');
        out
    }

    pub fn save(&self, path: &Path) -> Result<(), CorpusError> {
        fs::write(path, self.to_json()).map_err(|e| CorpusError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })
    }
}
