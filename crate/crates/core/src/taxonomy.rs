//! Rooted concept trees.
//!
//! A [`Taxonomy`] stores a single-parent hierarchy of concepts (expertise
//! fields, locations, ontology excerpts). An edge `parent -> child` reads
//! `child ⊑ parent`. Every query here is a walk over the parent map, so
//! subsumption is reflexive and transitive and the root subsumes everything.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Identifier of a concept inside one taxonomy.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct ConceptId(String);

impl ConceptId {
    pub fn new(id: impl Into<String>) -> Result<Self, TaxonomyError> {
        let id = id.into();
        if id.trim().is_empty() {
            return Err(TaxonomyError::InvalidConceptId(id));
        }
        Ok(Self(id))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for ConceptId {
    type Error = TaxonomyError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        Self::new(value)
    }
}

impl TryFrom<&str> for ConceptId {
    type Error = TaxonomyError;

    fn try_from(value: &str) -> Result<Self, Self::Error> {
        Self::new(value)
    }
}

impl From<ConceptId> for String {
    fn from(value: ConceptId) -> Self {
        value.0
    }
}

impl fmt::Display for ConceptId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::borrow::Borrow<str> for ConceptId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TaxonomyError {
    #[error("invalid concept id {0:?}: ids must be non-empty and not whitespace-only")]
    InvalidConceptId(String),
    #[error("taxonomy {taxonomy}: unknown concept {concept}")]
    UnknownConcept { taxonomy: String, concept: String },
    #[error("taxonomy {taxonomy}: unknown parent {parent}")]
    UnknownParent { taxonomy: String, parent: String },
    #[error("taxonomy {taxonomy}: concept {concept} already exists")]
    DuplicateConcept { taxonomy: String, concept: String },
    #[error("taxonomy {taxonomy}: concept {concept} has more than one parent ({first}, {second})")]
    MultipleParents {
        taxonomy: String,
        concept: String,
        first: String,
        second: String,
    },
    #[error("taxonomy {taxonomy}: concept {concept} does not reach the root {root} (cycle or detached subtree)")]
    CycleWouldForm {
        taxonomy: String,
        concept: String,
        root: String,
    },
    #[error("taxonomy {0} is already registered")]
    DuplicateTaxonomy(String),
    #[error("unknown taxonomy {0}")]
    UnknownTaxonomy(String),
}

/// On-disk form of a taxonomy.
///
/// Edges are `[parent, child]` pairs in any order; the loader checks the tree
/// shape after reading all of them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaxonomyFile {
    pub name: String,
    pub root: String,
    #[serde(default)]
    pub edges: Vec<[String; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<BTreeMap<String, String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "TaxonomyFile", into = "TaxonomyFile")]
pub struct Taxonomy {
    name: String,
    root: ConceptId,
    parent: BTreeMap<ConceptId, ConceptId>,
    children: BTreeMap<ConceptId, BTreeSet<ConceptId>>,
    labels: BTreeMap<ConceptId, String>,
}

impl Taxonomy {
    pub fn new(name: impl Into<String>, root: ConceptId) -> Self {
        let mut children = BTreeMap::new();
        children.insert(root.clone(), BTreeSet::new());
        Self {
            name: name.into(),
            root,
            parent: BTreeMap::new(),
            children,
            labels: BTreeMap::new(),
        }
    }

    /// Builds a taxonomy from a root and a chain of `(parent, child)` pairs
    /// given in insertion order. Convenient for tests and fixtures.
    pub fn from_edges<'a>(
        name: &str,
        root: &str,
        edges: impl IntoIterator<Item = (&'a str, &'a str)>,
    ) -> Result<Self, TaxonomyError> {
        let mut tax = Self::new(name, ConceptId::new(root)?);
        for (parent, child) in edges {
            tax.add_concept(ConceptId::new(child)?, &ConceptId::new(parent)?)?;
        }
        Ok(tax)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn root(&self) -> &ConceptId {
        &self.root
    }

    pub fn len(&self) -> usize {
        self.children.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, c: &str) -> bool {
        self.children.contains_key(c)
    }

    pub fn concepts(&self) -> impl Iterator<Item = &ConceptId> {
        self.children.keys()
    }

    pub fn parent_of(&self, c: &str) -> Option<&ConceptId> {
        self.parent.get(c)
    }

    pub fn children_of(&self, c: &str) -> Result<&BTreeSet<ConceptId>, TaxonomyError> {
        self.children.get(c).ok_or_else(|| self.unknown(c))
    }

    pub fn label(&self, c: &str) -> Option<&str> {
        self.labels.get(c).map(String::as_str)
    }

    pub fn set_label(&mut self, c: &str, label: impl Into<String>) -> Result<(), TaxonomyError> {
        let id = self.resolve(c)?.clone();
        self.labels.insert(id, label.into());
        Ok(())
    }

    /// Looks up a concept, returning the stored id.
    pub fn resolve(&self, c: &str) -> Result<&ConceptId, TaxonomyError> {
        self.children
            .get_key_value(c)
            .map(|(k, _)| k)
            .ok_or_else(|| self.unknown(c))
    }

    fn unknown(&self, c: &str) -> TaxonomyError {
        TaxonomyError::UnknownConcept {
            taxonomy: self.name.clone(),
            concept: c.to_string(),
        }
    }

    pub fn add_concept(
        &mut self,
        child: ConceptId,
        parent: &ConceptId,
    ) -> Result<(), TaxonomyError> {
        if self.children.contains_key(&child) {
            return Err(TaxonomyError::DuplicateConcept {
                taxonomy: self.name.clone(),
                concept: child.0,
            });
        }
        let Some(siblings) = self.children.get_mut(parent) else {
            return Err(TaxonomyError::UnknownParent {
                taxonomy: self.name.clone(),
                parent: parent.0.clone(),
            });
        };
        // A fresh leaf under an existing node cannot close a cycle.
        siblings.insert(child.clone());
        self.children.insert(child.clone(), BTreeSet::new());
        self.parent.insert(child, parent.clone());
        Ok(())
    }

    /// Root-first path `[root, ..., c]`.
    pub fn path_to_root(&self, c: &str) -> Result<Vec<&ConceptId>, TaxonomyError> {
        let mut cur = self.resolve(c)?;
        let mut path = vec![cur];
        while let Some(p) = self.parent.get(cur) {
            path.push(p);
            cur = p;
        }
        path.reverse();
        Ok(path)
    }

    pub fn depth(&self, c: &str) -> Result<usize, TaxonomyError> {
        Ok(self.path_to_root(c)?.len() - 1)
    }

    /// `narrow ⊑ broad`; reflexive.
    pub fn is_subsumed_by(&self, narrow: &str, broad: &str) -> Result<bool, TaxonomyError> {
        self.resolve(broad)?;
        let mut cur = self.resolve(narrow)?;
        loop {
            if cur.as_str() == broad {
                return Ok(true);
            }
            match self.parent.get(cur) {
                Some(p) => cur = p,
                None => return Ok(false),
            }
        }
    }

    /// Share of the subject's root path that the expert's root path also
    /// covers: `|path(l) ∩ path(e)| / |path(l)|`, counted in nodes including
    /// the root and both endpoints.
    pub fn field_closeness(
        &self,
        subject: &str,
        expert: &str,
    ) -> Result<Ratio<u64>, TaxonomyError> {
        let subject_path = self.path_to_root(subject)?;
        let expert_path = self.path_to_root(expert)?;
        // Root paths in a tree agree on a common prefix and never meet again.
        let shared = subject_path
            .iter()
            .zip(expert_path.iter())
            .take_while(|(a, b)| a == b)
            .count();
        Ok(Ratio::new(shared as u64, subject_path.len() as u64))
    }

    /// Every concept subsumed by `c`, including `c`.
    pub fn descendants(&self, c: &str) -> Result<BTreeSet<&ConceptId>, TaxonomyError> {
        let start = self.resolve(c)?;
        let mut out = BTreeSet::new();
        let mut queue = VecDeque::from([start]);
        while let Some(n) = queue.pop_front() {
            out.insert(n);
            queue.extend(self.children[n].iter());
        }
        Ok(out)
    }

    pub fn to_file(&self) -> TaxonomyFile {
        let edges = self
            .children
            .iter()
            .flat_map(|(p, cs)| cs.iter().map(move |c| [p.0.clone(), c.0.clone()]))
            .collect();
        let labels = (!self.labels.is_empty()).then(|| {
            self.labels
                .iter()
                .map(|(k, v)| (k.0.clone(), v.clone()))
                .collect()
        });
        TaxonomyFile {
            name: self.name.clone(),
            root: self.root.0.clone(),
            edges,
            labels,
        }
    }
}

impl TryFrom<TaxonomyFile> for Taxonomy {
    type Error = TaxonomyError;

    fn try_from(file: TaxonomyFile) -> Result<Self, Self::Error> {
        let name = file.name;
        let root = ConceptId::new(file.root)?;
        let mut parent_of: BTreeMap<ConceptId, ConceptId> = BTreeMap::new();
        for [p, c] in file.edges {
            let (p, c) = (ConceptId::new(p)?, ConceptId::new(c)?);
            if c == root {
                return Err(TaxonomyError::DuplicateConcept {
                    taxonomy: name,
                    concept: c.0,
                });
            }
            if let Some(prev) = parent_of.get(&c) {
                if *prev == p {
                    continue;
                }
                return Err(TaxonomyError::MultipleParents {
                    taxonomy: name,
                    concept: c.0,
                    first: prev.0.clone(),
                    second: p.0,
                });
            }
            parent_of.insert(c, p);
        }

        let mut by_parent: BTreeMap<&ConceptId, Vec<&ConceptId>> = BTreeMap::new();
        for (c, p) in &parent_of {
            by_parent.entry(p).or_default().push(c);
        }
        let mut tax = Taxonomy::new(name.clone(), root.clone());
        let mut queue = VecDeque::from([&root]);
        while let Some(p) = queue.pop_front() {
            for &c in by_parent.get(p).map(Vec::as_slice).unwrap_or_default() {
                tax.add_concept(c.clone(), p)?;
                queue.push_back(c);
            }
        }
        if let Some(start) = parent_of.keys().find(|c| !tax.contains(c.as_str())) {
            // Walk up: we either fall off at a parent that is never declared,
            // or come back to a concept already seen.
            let mut seen = BTreeSet::new();
            let mut cur = start;
            while seen.insert(cur) {
                match parent_of.get(cur) {
                    Some(p) => cur = p,
                    None => {
                        return Err(TaxonomyError::UnknownParent {
                            taxonomy: name,
                            parent: cur.0.clone(),
                        })
                    }
                }
            }
            return Err(TaxonomyError::CycleWouldForm {
                taxonomy: name,
                concept: cur.0.clone(),
                root: root.0,
            });
        }
        for (c, label) in file.labels.unwrap_or_default() {
            tax.set_label(&c, label)?;
        }
        Ok(tax)
    }
}

impl From<Taxonomy> for TaxonomyFile {
    fn from(value: Taxonomy) -> Self {
        value.to_file()
    }
}

/// Independently named taxonomies, keyed by name.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TaxonomySet {
    by_name: BTreeMap<String, Taxonomy>,
}

impl TaxonomySet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, tax: Taxonomy) -> Result<(), TaxonomyError> {
        if self.by_name.contains_key(tax.name()) {
            return Err(TaxonomyError::DuplicateTaxonomy(tax.name().to_string()));
        }
        self.by_name.insert(tax.name().to_string(), tax);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Result<&Taxonomy, TaxonomyError> {
        self.by_name
            .get(name)
            .ok_or_else(|| TaxonomyError::UnknownTaxonomy(name.to_string()))
    }

    pub fn iter(&self) -> impl Iterator<Item = &Taxonomy> {
        self.by_name.values()
    }

    pub fn len(&self) -> usize {
        self.by_name.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_name.is_empty()
    }

    /// Taxonomies that contain `concept`, in name order.
    pub fn containing<'a>(&'a self, concept: &'a str) -> impl Iterator<Item = &'a Taxonomy> + 'a {
        self.by_name.values().filter(move |t| t.contains(concept))
    }
}
