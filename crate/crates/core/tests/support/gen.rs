//! Seeded generators for random taxonomies, corpora and queries.

use std::collections::{BTreeMap, BTreeSet};

use argweave_core::corpus::{Argument, ConceptRef, Corpus, Polarity, Source, Stance, Statement};
use argweave_core::query::{Filter, OrderBy, Query, Target};
use argweave_core::schemes::SchemeRegistry;
use argweave_core::taxonomy::{ConceptId, Taxonomy, TaxonomySet};
use chrono::{DateTime, Duration, TimeZone, Utc};
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random tree of `1..=max_nodes` concepts named `{prefix}{i}`, where
/// `parents[i] < i` for every non-root node.
#[derive(Debug, Clone)]
pub struct RawTree {
    pub names: Vec<String>,
    pub parents: Vec<Option<usize>>,
}

impl RawTree {
    pub fn random(rng: &mut impl Rng, prefix: &str, max_nodes: usize) -> Self {
        let n = rng.gen_range(1..=max_nodes);
        Self::random_of_size(rng, prefix, n)
    }

    pub fn random_of_size(rng: &mut impl Rng, prefix: &str, n: usize) -> Self {
        let names = (0..n).map(|i| format!("{prefix}{i}")).collect();
        let parents = (0..n)
            .map(|i| (i > 0).then(|| rng.gen_range(0..i)))
            .collect();
        Self { names, parents }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    /// Node indices from `i` up to the root.
    pub fn upward(&self, mut i: usize) -> Vec<usize> {
        let mut out = vec![i];
        while let Some(p) = self.parents[i] {
            out.push(p);
            i = p;
        }
        out
    }

    pub fn build(&self, name: &str) -> Taxonomy {
        let edges: Vec<(&str, &str)> = (1..self.len())
            .map(|i| {
                (
                    self.names[self.parents[i].unwrap()].as_str(),
                    self.names[i].as_str(),
                )
            })
            .collect();
        Taxonomy::from_edges(name, &self.names[0], edges).expect("generated tree is valid")
    }

    pub fn pick<'a>(&'a self, rng: &mut impl Rng) -> &'a str {
        &self.names[rng.gen_range(0..self.len())]
    }
}

pub fn base_time() -> DateTime<Utc> {
    Utc.with_ymd_and_hms(2010, 10, 1, 0, 0, 0).unwrap()
}

pub const AUTHORS: &[&str] = &["Dr. Oz", "Anne Keller", "lee", "M. Duval"];
pub const TEXTS: &[&str] = &[
    "eating meat",
    "Eating  Meat",
    "genetic modified food",
    "vaccines work",
    "x",
];

#[derive(Debug, Clone, Copy)]
pub struct CorpusShape {
    pub max_sources: usize,
    pub max_statements: usize,
    pub max_arguments: usize,
    pub max_expertise_nodes: usize,
}

impl Default for CorpusShape {
    fn default() -> Self {
        Self {
            max_sources: 8,
            max_statements: 6,
            max_arguments: 12,
            max_expertise_nodes: 12,
        }
    }
}

/// A corpus plus the raw trees it was built from.
pub struct Generated {
    pub corpus: Corpus,
    pub expertise: RawTree,
    pub location: RawTree,
    pub topics: RawTree,
}

fn concept(s: &str) -> ConceptId {
    ConceptId::new(s).unwrap()
}

/// A valid random corpus exercising every evaluator branch: sources with no,
/// one or two expertise concepts, flags, mixed testimony, statements with
/// missing or foreign fields, both built-in schemes, and open and resolved
/// challenges.
pub fn corpus(rng: &mut impl Rng, shape: CorpusShape) -> Generated {
    let expertise = RawTree::random(rng, "f", shape.max_expertise_nodes);
    let location = RawTree::random(rng, "loc", 8);
    let topics = RawTree::random(rng, "t", 10);
    let mut set = TaxonomySet::new();
    set.insert(expertise.build("expertise")).unwrap();
    set.insert(location.build("location")).unwrap();
    set.insert(topics.build("topics")).unwrap();
    let mut c = Corpus::new(set, SchemeRegistry::builtin());

    let n_statements = rng.gen_range(1..=shape.max_statements);
    for i in 0..n_statements {
        let field = match rng.gen_range(0..10) {
            0 => None,
            1 => Some(ConceptRef::new("topics", topics.pick(rng)).unwrap()),
            _ => Some(ConceptRef::new("expertise", expertise.pick(rng)).unwrap()),
        };
        c.add_statement(Statement {
            id: format!("s{i}"),
            text: TEXTS.choose(rng).unwrap().to_string(),
            topic_concepts: BTreeSet::new(),
            field,
        })
        .unwrap();
    }

    let n_sources = rng.gen_range(1..=shape.max_sources);
    for i in 0..n_sources {
        let k = rng.gen_range(0..=2);
        let expertise_set = (0..k).map(|_| concept(expertise.pick(rng))).collect();
        let flags = if rng.gen_bool(0.2) {
            vec!["conflict of interest".to_string()]
        } else {
            vec![]
        };
        c.add_source(Source {
            id: format!("p{i}"),
            display_name: format!("Person {i}"),
            expertise: expertise_set,
            location: rng.gen_bool(0.5).then(|| concept(location.pick(rng))),
            unreliable_flags: flags,
        })
        .unwrap();
    }

    for p in 0..n_sources {
        for s in 0..n_statements {
            if rng.gen_bool(0.4) {
                let polarity = if rng.gen_bool(0.6) {
                    Polarity::Supports
                } else {
                    Polarity::Opposes
                };
                c.assert_testimony(&format!("p{p}"), &format!("s{s}"), polarity, base_time())
                    .unwrap();
            }
        }
    }

    let n_args = rng.gen_range(0..=shape.max_arguments);
    let statement = |rng: &mut dyn rand::RngCore| format!("s{}", rng.gen_range(0..n_statements));
    for i in 0..n_args {
        let mut fillers = BTreeMap::new();
        let scheme = if rng.gen_bool(0.75) {
            fillers.insert("expert".into(), format!("p{}", rng.gen_range(0..n_sources)));
            fillers.insert("domain".into(), expertise.pick(rng).to_string());
            fillers.insert("assertion".into(), statement(rng));
            "expert_opinion"
        } else {
            fillers.insert("cause".into(), statement(rng));
            fillers.insert("effect".into(), statement(rng));
            "cause_to_effect"
        };
        let annotations = (0..rng.gen_range(0..=2))
            .map(|_| ConceptRef::new("topics", topics.pick(rng)).unwrap())
            .collect();
        c.add_argument(Argument {
            id: format!("a{i}"),
            scheme: scheme.into(),
            fillers,
            conclusion: statement(rng),
            target_hypothesis: statement(rng),
            stance: if rng.gen_bool(0.5) {
                Stance::Pro
            } else {
                Stance::Con
            },
            author: AUTHORS.choose(rng).unwrap().to_string(),
            author_location: rng.gen_bool(0.7).then(|| concept(location.pick(rng))),
            // Hour granularity over 20 days so posting-time ties happen.
            posted_at: base_time() + Duration::hours(rng.gen_range(0..480)),
            evidence_links: (0..rng.gen_range(0..=2))
                .map(|j| format!("doc {j}"))
                .collect(),
            annotations,
        })
        .unwrap();
    }

    for i in 0..n_args {
        if !rng.gen_bool(0.3) {
            continue;
        }
        let arg = format!("a{i}");
        let cqs: Vec<String> = {
            let a = c.argument(&arg).unwrap();
            c.schemes()
                .get(&a.scheme)
                .unwrap()
                .cqs
                .iter()
                .map(|q| q.cq_id.clone())
                .collect()
        };
        let cq = cqs.choose(rng).unwrap().clone();
        let ch = c.convey_cq(&arg, &cq, "critic", base_time()).unwrap();
        if rng.gen_bool(0.4) {
            c.resolve_cq(&ch.id, Some("answered".into())).unwrap();
        }
    }
    c.audit().expect("generated corpus is consistent");
    Generated {
        corpus: c,
        expertise,
        location,
        topics,
    }
}

/// One statement, one domain and `n` domain experts of whom `backing`
/// support the statement and the rest oppose it. `outsiders` non-experts
/// also testify and must not count.
pub fn consensus_corpus(rng: &mut impl Rng, n: usize, backing: usize, outsiders: usize) -> Corpus {
    let tax = Taxonomy::from_edges(
        "expertise",
        "Science",
        [
            ("Science", "Medicine"),
            ("Medicine", "Pediatrics"),
            ("Science", "Geology"),
        ],
    )
    .unwrap();
    let mut set = TaxonomySet::new();
    set.insert(tax).unwrap();
    set.insert(Taxonomy::from_edges("location", "World", []).unwrap())
        .unwrap();
    let mut c = Corpus::new(set, SchemeRegistry::builtin());
    c.add_statement(Statement {
        id: "claim".into(),
        text: "claim".into(),
        topic_concepts: BTreeSet::new(),
        field: Some(ConceptRef::new("expertise", "Pediatrics").unwrap()),
    })
    .unwrap();
    let mut order: Vec<bool> = (0..n).map(|i| i < backing).collect();
    order.shuffle(rng);
    for (i, supports) in order.into_iter().enumerate() {
        let field = if rng.gen_bool(0.5) {
            "Medicine"
        } else {
            "Pediatrics"
        };
        c.add_source(Source {
            id: format!("e{i}"),
            display_name: format!("Expert {i}"),
            expertise: [concept(field)].into(),
            location: None,
            unreliable_flags: vec![],
        })
        .unwrap();
        let polarity = if supports {
            Polarity::Supports
        } else {
            Polarity::Opposes
        };
        c.assert_testimony(&format!("e{i}"), "claim", polarity, base_time())
            .unwrap();
    }
    for i in 0..outsiders {
        c.add_source(Source {
            id: format!("o{i}"),
            display_name: format!("Outsider {i}"),
            expertise: [concept("Geology")].into(),
            location: None,
            unreliable_flags: vec![],
        })
        .unwrap();
        let polarity = if rng.gen_bool(0.5) {
            Polarity::Supports
        } else {
            Polarity::Opposes
        };
        c.assert_testimony(&format!("o{i}"), "claim", polarity, base_time())
            .unwrap();
    }
    c.add_source(Source {
        id: "speaker".into(),
        display_name: "Speaker".into(),
        expertise: [concept("Geology")].into(),
        location: None,
        unreliable_flags: vec![],
    })
    .unwrap();
    c.add_argument(Argument {
        id: "arg".into(),
        scheme: "expert_opinion".into(),
        fillers: [
            ("expert".to_string(), "speaker".to_string()),
            ("domain".to_string(), "Medicine".to_string()),
            ("assertion".to_string(), "claim".to_string()),
        ]
        .into(),
        conclusion: "claim".into(),
        target_hypothesis: "claim".into(),
        stance: Stance::Pro,
        author: "Speaker".into(),
        author_location: None,
        posted_at: base_time(),
        evidence_links: vec![],
        annotations: BTreeSet::new(),
    })
    .unwrap();
    c
}

/// A random query whose concept and scheme references exist in `g`.
pub fn query_for(rng: &mut impl Rng, g: &Generated) -> Query {
    let mut filters = Vec::new();
    let mut maybe = |p: f64, rng: &mut ChaCha8Rng, f: &dyn Fn(&mut ChaCha8Rng) -> Filter| {
        if rng.gen_bool(p) {
            filters.push(f(rng));
        }
    };
    let mut r = ChaCha8Rng::seed_from_u64(rng.gen());
    let n_statements = g.corpus.statements().count();
    maybe(0.3, &mut r, &|r| {
        Filter::Scheme(
            if r.gen_bool(0.7) {
                "expert_opinion"
            } else {
                "cause_to_effect"
            }
            .into(),
        )
    });
    maybe(0.4, &mut r, &|r| {
        Filter::Stance(if r.gen_bool(0.5) {
            Stance::Pro
        } else {
            Stance::Con
        })
    });
    maybe(0.3, &mut r, &|r| {
        if r.gen_bool(0.5) {
            Filter::Target(Target::Id(format!("s{}", r.gen_range(0..n_statements))))
        } else {
            Filter::Target(Target::Text(TEXTS.choose(r).unwrap().to_uppercase()))
        }
    });
    maybe(0.3, &mut r, &|r| {
        Filter::Author(AUTHORS.choose(r).unwrap().to_string())
    });
    maybe(0.4, &mut r, &|r| {
        Filter::LocationWithin(concept(g.location.pick(r)))
    });
    maybe(0.3, &mut r, &|r| {
        Filter::PostedFrom(base_time() + Duration::hours(r.gen_range(0..480)))
    });
    maybe(0.3, &mut r, &|r| {
        Filter::PostedBefore(base_time() + Duration::hours(r.gen_range(0..480)))
    });
    maybe(0.4, &mut r, &|r| {
        Filter::AnnotatedWith(concept(g.topics.pick(r)))
    });
    if filters.is_empty() {
        filters.push(Filter::Stance(Stance::Pro));
    }
    filters.shuffle(&mut r);
    Query {
        filters,
        order_by: if r.gen_bool(0.5) {
            OrderBy::CredibilityDesc
        } else {
            OrderBy::PostedDesc
        },
        limit: r.gen_bool(0.2).then(|| r.gen_range(1..10)),
    }
}

const FREE_CHARS: &[char] = &[
    'a', 'Z', '0', ' ', '"', '\\', '_', '-', '.', ':', '+', 'é', '=', '<', '\t',
];
const WORD_CHARS: &[char] = &['a', 'Z', '0', '_', '-', '.', ':', '+', 'é'];

fn text<R: Rng + ?Sized>(rng: &mut R, alphabet: &[char], min: usize) -> String {
    let n = rng.gen_range(min..=8);
    (0..n).map(|_| *alphabet.choose(rng).unwrap()).collect()
}

/// A random syntactically valid query with arbitrary (not necessarily
/// existing) values, for print/parse round trips.
pub fn any_query(rng: &mut impl Rng) -> Query {
    let mut filters = Vec::new();
    let dt = |rng: &mut dyn rand::RngCore| {
        let t = base_time() + Duration::seconds(rng.gen_range(-10_000_000..10_000_000));
        if rng.gen_bool(0.5) {
            t.date_naive().and_hms_opt(0, 0, 0).unwrap().and_utc()
        } else {
            t
        }
    };
    if rng.gen_bool(0.5) {
        filters.push(Filter::Scheme(text(rng, FREE_CHARS, 0)));
    }
    if rng.gen_bool(0.5) {
        filters.push(Filter::Stance(if rng.gen_bool(0.5) {
            Stance::Pro
        } else {
            Stance::Con
        }));
    }
    if rng.gen_bool(0.5) {
        filters.push(Filter::Target(if rng.gen_bool(0.5) {
            Target::Id(text(rng, WORD_CHARS, 1))
        } else {
            Target::Text(text(rng, FREE_CHARS, 0))
        }));
    }
    if rng.gen_bool(0.5) {
        filters.push(Filter::Author(text(rng, FREE_CHARS, 0)));
    }
    let concept_text = |rng: &mut dyn rand::RngCore| loop {
        if let Ok(c) = ConceptId::new(text(rng, FREE_CHARS, 1)) {
            return c;
        }
    };
    if rng.gen_bool(0.5) {
        filters.push(Filter::LocationWithin(concept_text(rng)));
    }
    if rng.gen_bool(0.5) {
        filters.push(Filter::PostedFrom(dt(rng)));
    }
    if rng.gen_bool(0.5) {
        filters.push(Filter::PostedBefore(dt(rng)));
    }
    if rng.gen_bool(0.5) {
        filters.push(Filter::AnnotatedWith(concept_text(rng)));
    }
    if filters.is_empty() {
        filters.push(Filter::Author(text(rng, FREE_CHARS, 0)));
    }
    filters.shuffle(rng);
    Query {
        filters,
        order_by: if rng.gen_bool(0.5) {
            OrderBy::CredibilityDesc
        } else {
            OrderBy::PostedDesc
        },
        limit: rng.gen_bool(0.3).then(|| rng.gen_range(1..u64::MAX)),
    }
}
