//! Deterministic protocol selection. The pipeline per module: extract
//! evidence, map it onto requirements, filter protocols by hard
//! constraints, then narrow by a fixed three-stage priority (identity and
//! confidentiality, operation semantics, interaction). Remaining ties fall
//! to the prior ranking when one is configured, otherwise to the earliest
//! narrative anchor, otherwise to the stable fallback order. No randomness
//! anywhere: the same inputs always produce byte-identical decisions.

use std::collections::BTreeMap;

use agentwire_core::Protocol;
use serde::{Deserialize, Serialize};

use crate::cfm::{Capability, CapabilityModel, Facet};
use crate::error::RouterError;
use crate::lexicon::{extract_evidence_spans, find_bounded, map_spans_to_cfm, RequirementSet};
use crate::prior::{tie_break_with_prior, PriorTable};

/// True when the protocol satisfies every hard requirement and carries no
/// excluded capability.
pub fn is_protocol_compatible(
    cfm: &CapabilityModel,
    protocol: Protocol,
    req: &RequirementSet,
) -> bool {
    req.required.iter().all(|&c| cfm.supports(protocol, c))
        && req.excluded.iter().all(|&c| !cfm.supports(protocol, c))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decision {
    One(Protocol),
    Tied(Vec<Protocol>),
}

const STAGES: [Facet; 3] =
    [Facet::IdentityConfidentiality, Facet::OperationSemantics, Facet::Interaction];

/// Applies the fixed priority stages. Each stage keeps the candidates
/// matching the most cues of that stage's facet; a stage with no cues, or
/// where no candidate matches any cue, is uninformative and skipped.
pub fn priority_decide(
    cfm: &CapabilityModel,
    candidates: &[Protocol],
    req: &RequirementSet,
) -> Decision {
    priority_decide_traced(cfm, candidates, req).0
}

fn priority_decide_traced(
    cfm: &CapabilityModel,
    candidates: &[Protocol],
    req: &RequirementSet,
) -> (Decision, Option<Facet>) {
    let cues: Vec<Capability> =
        req.required.iter().copied().chain(req.preferred.iter().copied()).collect();
    let mut pool: Vec<Protocol> = candidates.to_vec();
    let mut decisive = None;
    for facet in STAGES {
        if pool.len() <= 1 {
            break;
        }
        let stage_cues: Vec<Capability> =
            cues.iter().copied().filter(|c| c.facet() == Some(facet)).collect();
        if stage_cues.is_empty() {
            continue;
        }
        let scores: Vec<usize> = pool
            .iter()
            .map(|&p| stage_cues.iter().filter(|&&c| cfm.supports(p, c)).count())
            .collect();
        let best = *scores.iter().max().expect("pool nonempty");
        if best == 0 {
            continue;
        }
        pool = pool
            .iter()
            .zip(&scores)
            .filter(|&(_, &s)| s == best)
            .map(|(&p, _)| p)
            .collect();
        if pool.len() == 1 {
            decisive = Some(facet);
        }
    }
    match pool.as_slice() {
        [single] => (Decision::One(*single), decisive),
        _ => (Decision::Tied(pool), None),
    }
}

/// Narrative anchors: phrases that name a protocol's defining capability.
/// A tie goes to the tied protocol whose anchor appears earliest in the
/// text; with no anchors at all the stable fallback order decides.
const NARRATIVE_ANCHORS: &[(Protocol, &[(&str, bool)])] = &[
    (
        Protocol::A2a,
        &[("agent-to-agent", false), ("multimodal", false), ("enterprise", false)],
    ),
    (
        Protocol::Acp,
        &[("REST", true), ("idempotent", false), ("job status", false), ("resource", false)],
    ),
    (
        Protocol::Anp,
        &[
            ("DID", true),
            ("E2E", true),
            ("end-to-end encryption", false),
            ("decentralized identity", false),
        ],
    ),
    (
        Protocol::Agora,
        &[
            ("routine", false),
            ("routines", false),
            ("governance", false),
            ("auditable", false),
            ("audit", false),
        ],
    ),
];

pub fn pick_by_narrative(text: &str, tied: &[Protocol]) -> Protocol {
    narrative_choice(text, tied).0
}

fn narrative_choice(text: &str, tied: &[Protocol]) -> (Protocol, bool) {
    let mut best: Option<(usize, Protocol)> = None;
    for &p in tied {
        let anchors = NARRATIVE_ANCHORS
            .iter()
            .find(|(q, _)| *q == p)
            .map(|(_, a)| *a)
            .unwrap_or(&[]);
        let earliest =
            anchors.iter().filter_map(|&(phrase, cs)| find_bounded(text, phrase, cs)).min();
        if let Some(at) = earliest {
            if best.is_none_or(|(b, _)| at < b) {
                best = Some((at, p));
            }
        }
    }
    if let Some((_, p)) = best {
        return (p, true);
    }
    let fallback = *Protocol::FALLBACK_ORDER
        .iter()
        .find(|p| tied.contains(p))
        .expect("tie list drawn from the four protocols");
    (fallback, false)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecisionRecord {
    pub module_id: String,
    pub selected_protocol: Protocol,
    pub evidence_spans: Vec<String>,
    pub rationale: String,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub infeasible: bool,
}

/// Rationales are audit text, not data: any numeric token in them means a
/// metric or identifier leaked in, so the linter rejects all ASCII digits.
pub fn rationale_lint(rationale: &str) -> Result<(), RouterError> {
    if rationale.chars().any(|c| c.is_ascii_digit()) {
        return Err(RouterError::Rationale(format!(
            "numeric token in rationale: {rationale:?}"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RouterMode {
    SpecOnly,
    SpecPerf,
}

#[derive(Debug, Clone)]
pub struct Router {
    cfm: CapabilityModel,
    mode: RouterMode,
    prior: Option<PriorTable>,
}

impl Router {
    pub fn spec_only() -> Router {
        Router { cfm: CapabilityModel::standard(), mode: RouterMode::SpecOnly, prior: None }
    }

    pub fn spec_perf(prior: PriorTable) -> Router {
        Router {
            cfm: CapabilityModel::standard(),
            mode: RouterMode::SpecPerf,
            prior: Some(prior),
        }
    }

    pub fn cfm(&self) -> &CapabilityModel {
        &self.cfm
    }

    pub fn mode(&self) -> RouterMode {
        self.mode
    }

    pub fn decide(&self, module_id: &str, text: &str) -> DecisionRecord {
        let spans = extract_evidence_spans(text);
        let req = map_spans_to_cfm(&spans);
        let candidates: Vec<Protocol> = Protocol::ALL
            .into_iter()
            .filter(|&p| is_protocol_compatible(&self.cfm, p, &req))
            .collect();

        let (selected, rationale, infeasible) = if candidates.is_empty() {
            // Fall back to the first protocol in stable order that violates
            // no exclusion; the decision stays flagged for review.
            let fallback = Protocol::FALLBACK_ORDER
                .into_iter()
                .find(|&p| req.excluded.iter().all(|&c| !self.cfm.supports(p, c)))
                .unwrap_or(Protocol::FALLBACK_ORDER[0]);
            (
                fallback,
                "hard constraints eliminated every protocol; stable fallback applied and the decision flagged infeasible",
                true,
            )
        } else {
            match priority_decide_traced(&self.cfm, &candidates, &req) {
                (Decision::One(p), Some(Facet::IdentityConfidentiality)) => {
                    (p, "identity and confidentiality requirements were decisive under the fixed priority", false)
                }
                (Decision::One(p), Some(Facet::OperationSemantics)) => {
                    (p, "operation semantics cues were decisive under the fixed priority", false)
                }
                (Decision::One(p), Some(Facet::Interaction)) => {
                    (p, "interaction preferences were decisive under the fixed priority", false)
                }
                (Decision::One(p), None) => {
                    (p, "sole protocol compatible with the stated constraints", false)
                }
                (Decision::Tied(tied), _) => match (&self.mode, &self.prior) {
                    (RouterMode::SpecPerf, Some(prior)) => (
                        tie_break_with_prior(&tied, prior),
                        "capability tie resolved by the scenario-agnostic prior ranking",
                        false,
                    ),
                    _ => {
                        let (p, anchored) = narrative_choice(text, &tied);
                        if anchored {
                            (p, "capability tie resolved by the earliest narrative anchor", false)
                        } else {
                            (p, "no distinguishing evidence; stable fallback order applied", false)
                        }
                    }
                },
            }
        };

        let record = DecisionRecord {
            module_id: module_id.to_string(),
            selected_protocol: selected,
            evidence_spans: spans.into_iter().map(|s| s.text).collect(),
            rationale: rationale.to_string(),
            infeasible,
        };
        rationale_lint(&record.rationale).expect("rationale templates carry no digits");
        record
    }
}

/// One module of a scenario: its identifier, its own requirement text, and
/// the modules it talks to.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleSpec {
    pub id: String,
    pub text: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub neighbors: Vec<String>,
}

fn route_with(
    router: &Router,
    spec_text: &str,
    modules: &[ModuleSpec],
) -> BTreeMap<String, DecisionRecord> {
    modules
        .iter()
        .map(|m| {
            // A module without its own text is judged on the scenario text.
            let text = if m.text.trim().is_empty() { spec_text } else { m.text.as_str() };
            (m.id.clone(), router.decide(&m.id, text))
        })
        .collect()
}

pub fn route_spec_only(
    spec_text: &str,
    modules: &[ModuleSpec],
) -> BTreeMap<String, DecisionRecord> {
    route_with(&Router::spec_only(), spec_text, modules)
}

pub fn route_spec_perf(
    spec_text: &str,
    modules: &[ModuleSpec],
    prior: &PriorTable,
) -> BTreeMap<String, DecisionRecord> {
    route_with(&Router::spec_perf(prior.clone()), spec_text, modules)
}
