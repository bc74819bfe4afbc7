//! Critical-question evaluation and credibility aggregation.
//!
//! Each critical question of an argument is scored to a degree in `[0, 1]`
//! (1 = the premise survives the question) by the evaluator its scheme names,
//! or marked not evaluable when the corpus holds no facts for it. An open
//! challenge on a question forces its degree to 0. Credibility is the
//! arithmetic mean of the evaluable degrees.
//!
//! CQ1, CQ2 and CQ5 follow the rule forms of the expert-opinion scheme; the
//! CQ3, CQ4 and CQ6 evaluators are presence checks over explicit corpus facts
//! added by this crate.

mod degree;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::corpus::{Argument, Corpus, CorpusError, Polarity, EXPERTISE_TAXONOMY};
use crate::schemes::{CriticalQuestion, EvaluatorKind, SchemeDefinition, SlotKind};
use crate::taxonomy::Taxonomy;

pub use degree::{decimal6, display as display_degree, json_number, Degree};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Basis {
    Rule,
    ChallengeOverride,
    NotEvaluable,
}

impl Basis {
    pub fn as_str(&self) -> &'static str {
        match self {
            Basis::Rule => "rule",
            Basis::ChallengeOverride => "challenge-override",
            Basis::NotEvaluable => "not-evaluable",
        }
    }
}

/// What one evaluator concluded, before challenge overrides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Evaluation {
    pub degree: Option<Degree>,
    pub trace: Vec<String>,
}

impl Evaluation {
    fn rated(degree: Degree, trace: Vec<String>) -> Self {
        Self {
            degree: Some(degree),
            trace,
        }
    }

    fn one(trace: Vec<String>) -> Self {
        Self::rated(Ratio::from_integer(1), trace)
    }

    fn zero(trace: Vec<String>) -> Self {
        Self::rated(Ratio::from_integer(0), trace)
    }

    fn unrated(reason: impl Into<String>) -> Self {
        Self {
            degree: None,
            trace: vec![reason.into()],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CqDegree {
    pub cq_id: String,
    pub degree: Option<Degree>,
    pub basis: Basis,
    pub trace: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CredibilityReport {
    pub argument: String,
    pub corpus_version: u64,
    /// In scheme CQ order.
    pub cq_degrees: Vec<CqDegree>,
    pub credibility: Option<Degree>,
}

impl CredibilityReport {
    pub fn evaluable(&self) -> impl Iterator<Item = &Degree> {
        self.cq_degrees.iter().filter_map(|q| q.degree.as_ref())
    }

    pub fn cq(&self, cq_id: &str) -> Option<&CqDegree> {
        self.cq_degrees.iter().find(|q| q.cq_id == cq_id)
    }

    pub fn to_view(&self) -> ReportView {
        ReportView {
            argument: self.argument.clone(),
            corpus_version: self.corpus_version,
            credibility: self.credibility.as_ref().map(json_number),
            cqs: self
                .cq_degrees
                .iter()
                .map(|q| CqView {
                    cq_id: q.cq_id.clone(),
                    degree: q.degree.as_ref().map(json_number),
                    basis: q.basis,
                    trace: q.trace.clone(),
                })
                .collect(),
        }
    }

    /// Pretty JSON with a trailing newline; the same bytes go to the CLI and
    /// the HTTP API.
    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(&self.to_view()).expect("report serializes");
        out.push('\n');
        out
    }
}

/// Wire form of a [`CredibilityReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportView {
    pub argument: String,
    pub corpus_version: u64,
    pub credibility: Option<f64>,
    pub cqs: Vec<CqView>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CqView {
    pub cq_id: String,
    pub degree: Option<f64>,
    pub basis: Basis,
    pub trace: Vec<String>,
}

/// Slot fillers the evaluators read, located by slot kind.
struct Parts<'a> {
    source: Option<&'a str>,
    domain: Option<&'a str>,
    assertion: Option<&'a str>,
}

fn parts<'a>(arg: &'a Argument, scheme: &SchemeDefinition) -> Parts<'a> {
    let filler = |kind| {
        scheme
            .first_slot_of(kind)
            .and_then(|slot| arg.fillers.get(&slot.name))
            .map(String::as_str)
    };
    Parts {
        source: filler(SlotKind::SourceRef),
        domain: filler(SlotKind::ConceptRef),
        assertion: filler(SlotKind::StatementRef),
    }
}

fn context<'a>(arg: &'a Argument, corpus: &'a Corpus) -> Option<(Parts<'a>, &'a Taxonomy)> {
    let scheme = corpus.schemes().get(&arg.scheme)?;
    Some((parts(arg, scheme), corpus.expertise()?))
}

/// Does the source hold expertise in the domain or one of its descendants?
fn expert_in(tax: &Taxonomy, expertise: &[&str], domain: &str) -> Option<String> {
    if expertise.contains(&domain) {
        return Some(domain.to_string());
    }
    expertise
        .iter()
        .find(|e| tax.is_subsumed_by(e, domain).unwrap_or(false))
        .map(|e| e.to_string())
}

/// CQ1: is the source an expert in the argument's domain? Falls back to the
/// closest expertise field by root-path overlap.
pub fn eval_cq_expertise(arg: &Argument, corpus: &Corpus) -> Evaluation {
    let Some((parts, tax)) = context(arg, corpus) else {
        return Evaluation::unrated("no expertise taxonomy or scheme for this argument");
    };
    let (Some(source_id), Some(domain)) = (parts.source, parts.domain) else {
        return Evaluation::unrated("scheme has no source or domain slot");
    };
    let Some(source) = corpus.source(source_id) else {
        return Evaluation::zero(vec![format!("unknown source {source_id}")]);
    };
    let expertise: Vec<&str> = source.expertise.iter().map(|e| e.as_str()).collect();
    if expertise.is_empty() {
        return Evaluation::zero(vec![format!("no recorded expertise for {source_id}")]);
    }
    if let Some(field) = expert_in(tax, &expertise, domain) {
        let mut trace = vec![format!("isExpertIn({source_id}, {field})")];
        if field != domain {
            trace.push(format!("{field} ⊑ {domain}"));
        }
        return Evaluation::one(trace);
    }
    let mut best: Option<(Degree, &str)> = None;
    for e in &expertise {
        let Ok(c) = tax.field_closeness(domain, e) else {
            continue;
        };
        if best.is_none_or(|(b, _)| c > b) {
            best = Some((c, e));
        }
    }
    match best {
        Some((c, e)) => Evaluation::rated(
            c,
            vec![
                format!("isExpertIn({source_id}, {e})"),
                format!("fieldCloseness({domain}, {e}) = {}", display_degree(&c)),
            ],
        ),
        None => Evaluation::zero(vec![format!(
            "no expertise of {source_id} lies in the domain taxonomy"
        )]),
    }
}

/// CQ2: is the asserted statement part of the argument's domain?
pub fn eval_cq_field(arg: &Argument, corpus: &Corpus) -> Evaluation {
    let Some((parts, tax)) = context(arg, corpus) else {
        return Evaluation::unrated("no expertise taxonomy or scheme for this argument");
    };
    let (Some(statement_id), Some(domain)) = (parts.assertion, parts.domain) else {
        return Evaluation::unrated("scheme has no assertion or domain slot");
    };
    let field = corpus
        .statement(statement_id)
        .and_then(|s| s.field.as_ref());
    let Some(field) = field else {
        return Evaluation::zero(vec![format!(
            "no field recorded for statement {statement_id}"
        )]);
    };
    if field.taxonomy != EXPERTISE_TAXONOMY {
        return Evaluation::zero(vec![format!(
            "field {field} of statement {statement_id} is outside the expertise taxonomy"
        )]);
    }
    let concept = field.concept.as_str();
    let part_of = format!("isPartOf({statement_id}, {concept})");
    if tax.is_subsumed_by(concept, domain).unwrap_or(false) {
        let mut trace = vec![part_of];
        if concept != domain {
            trace.push(format!("{concept} ⊑ {domain}"));
        }
        Evaluation::one(trace)
    } else {
        Evaluation::zero(vec![part_of, format!("{concept} ⋢ {domain}")])
    }
}

fn testimony_fact(polarity: Polarity, source: &str, statement: &str) -> String {
    match polarity {
        Polarity::Supports => format!("supportsProposition({source}, {statement})"),
        Polarity::Opposes => format!("opposesProposition({source}, {statement})"),
    }
}

/// CQ3: does the source's recorded testimony back the assertion?
pub fn eval_cq_opinion(arg: &Argument, corpus: &Corpus) -> Evaluation {
    let Some(scheme) = corpus.schemes().get(&arg.scheme) else {
        return Evaluation::unrated("unknown scheme");
    };
    let parts = parts(arg, scheme);
    let (Some(source), Some(statement)) = (parts.source, parts.assertion) else {
        return Evaluation::unrated("scheme has no source or assertion slot");
    };
    match corpus.testimony(source, statement) {
        Some(link) => {
            let fact = testimony_fact(link.polarity, source, statement);
            match link.polarity {
                Polarity::Supports => Evaluation::one(vec![fact]),
                Polarity::Opposes => Evaluation::zero(vec![fact]),
            }
        }
        None => Evaluation::unrated(format!("no testimony from {source} on {statement}")),
    }
}

/// CQ4: is the source free of reliability flags?
pub fn eval_cq_trustworthiness(arg: &Argument, corpus: &Corpus) -> Evaluation {
    let Some(scheme) = corpus.schemes().get(&arg.scheme) else {
        return Evaluation::unrated("unknown scheme");
    };
    let Some(source_id) = parts(arg, scheme).source else {
        return Evaluation::unrated("scheme has no source slot");
    };
    let Some(source) = corpus.source(source_id) else {
        return Evaluation::zero(vec![format!("unknown source {source_id}")]);
    };
    if source.unreliable_flags.is_empty() {
        Evaluation::one(vec![format!("no unreliability flags on {source_id}")])
    } else {
        Evaluation::zero(
            source
                .unreliable_flags
                .iter()
                .map(|f| format!("unreliable({source_id}): {f}"))
                .collect(),
        )
    }
}

/// CQ5: share of domain experts on record who support the assertion.
///
/// The population is every source with an expertise concept equal to or
/// below the argument's domain that holds a testimony link on the assertion,
/// the asserting source included.
pub fn eval_cq_consistency(arg: &Argument, corpus: &Corpus) -> Evaluation {
    let Some((parts, tax)) = context(arg, corpus) else {
        return Evaluation::unrated("no expertise taxonomy or scheme for this argument");
    };
    let (Some(statement), Some(domain)) = (parts.assertion, parts.domain) else {
        return Evaluation::unrated("scheme has no assertion or domain slot");
    };
    let mut total = 0u64;
    let mut supporting = 0u64;
    let mut trace = Vec::new();
    for link in corpus.testimony_on(statement) {
        let Some(source) = corpus.source(&link.source) else {
            continue;
        };
        let expertise: Vec<&str> = source.expertise.iter().map(|e| e.as_str()).collect();
        let Some(field) = expert_in(tax, &expertise, domain) else {
            continue;
        };
        total += 1;
        if link.polarity == Polarity::Supports {
            supporting += 1;
        }
        trace.push(format!("isExpertIn({}, {field})", link.source));
        trace.push(testimony_fact(link.polarity, &link.source, statement));
    }
    if total == 0 {
        return Evaluation::unrated(format!("no {domain} expert testimony on {statement}"));
    }
    trace.push(format!(
        "{supporting} of {total} {domain} experts support {statement}"
    ));
    Evaluation::rated(Ratio::new(supporting, total), trace)
}

/// CQ6: does the argument cite any evidence?
pub fn eval_cq_backup_evidence(arg: &Argument, _corpus: &Corpus) -> Evaluation {
    if arg.evidence_links.is_empty() {
        Evaluation::zero(vec!["no evidence links".to_string()])
    } else {
        Evaluation::one(
            arg.evidence_links
                .iter()
                .map(|l| format!("evidence: {l}"))
                .collect(),
        )
    }
}

pub fn evaluate(kind: EvaluatorKind, arg: &Argument, corpus: &Corpus) -> Evaluation {
    match kind {
        EvaluatorKind::Expertise => eval_cq_expertise(arg, corpus),
        EvaluatorKind::Field => eval_cq_field(arg, corpus),
        EvaluatorKind::Opinion => eval_cq_opinion(arg, corpus),
        EvaluatorKind::Trustworthiness => eval_cq_trustworthiness(arg, corpus),
        EvaluatorKind::Consistency => eval_cq_consistency(arg, corpus),
        EvaluatorKind::BackupEvidence => eval_cq_backup_evidence(arg, corpus),
        EvaluatorKind::Manual => {
            Evaluation::unrated("manual question; scored only through challenges")
        }
    }
}

fn score_cq(arg: &Argument, cq: &CriticalQuestion, corpus: &Corpus) -> CqDegree {
    let eval = evaluate(cq.evaluator, arg, corpus);
    if let Some(ch) = corpus.open_challenge(&arg.id, &cq.cq_id) {
        let mut trace = vec![format!(
            "challenged by {} ({}, raised {})",
            ch.raised_by,
            ch.id,
            ch.raised_at
                .to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
        )];
        trace.extend(eval.trace);
        return CqDegree {
            cq_id: cq.cq_id.clone(),
            degree: Some(Ratio::from_integer(0)),
            basis: Basis::ChallengeOverride,
            trace,
        };
    }
    CqDegree {
        cq_id: cq.cq_id.clone(),
        basis: if eval.degree.is_some() {
            Basis::Rule
        } else {
            Basis::NotEvaluable
        },
        degree: eval.degree,
        trace: eval.trace,
    }
}

/// Arithmetic mean of the evaluable degrees, `None` if there are none.
pub fn mean<'a>(degrees: impl IntoIterator<Item = &'a Degree>) -> Option<Degree> {
    let mut sum = Ratio::from_integer(0u64);
    let mut n = 0u64;
    for d in degrees {
        sum += *d;
        n += 1;
    }
    (n > 0).then(|| sum / n)
}

pub fn credibility(argument: &str, corpus: &Corpus) -> Result<CredibilityReport, CorpusError> {
    let arg = corpus
        .argument(argument)
        .ok_or_else(|| CorpusError::UnknownArgument(argument.to_string()))?;
    let scheme = corpus.schemes().require(&arg.scheme)?;
    let cq_degrees: Vec<CqDegree> = scheme
        .cqs
        .iter()
        .map(|cq| score_cq(arg, cq, corpus))
        .collect();
    let credibility = mean(cq_degrees.iter().filter_map(|q| q.degree.as_ref()));
    Ok(CredibilityReport {
        argument: arg.id.clone(),
        corpus_version: corpus.version(),
        cq_degrees,
        credibility,
    })
}

/// Plain-text trace of a report. Deterministic for a given report.
pub fn explain(report: &CredibilityReport) -> String {
    let mut out = String::new();
    let count = report.evaluable().count();
    match &report.credibility {
        Some(c) => out.push_str(&format!(
            "{}: credibility {} (mean of {count} evaluable of {} critical questions, corpus version {})\n",
            report.argument,
            display_degree(c),
            report.cq_degrees.len(),
            report.corpus_version
        )),
        None => out.push_str(&format!(
            "{}: credibility unrated (not evaluable: none of {} critical questions could be scored, corpus version {})\n",
            report.argument,
            report.cq_degrees.len(),
            report.corpus_version
        )),
    }
    for q in &report.cq_degrees {
        let degree = q
            .degree
            .as_ref()
            .map_or_else(|| "unrated".to_string(), display_degree);
        out.push_str(&format!(
            "  {}={} [{}]\n",
            q.cq_id,
            degree,
            q.basis.as_str()
        ));
        for fact in &q.trace {
            out.push_str(&format!("    {fact}\n"));
        }
    }
    out
}
