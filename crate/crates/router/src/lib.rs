//! Deterministic protocol router. Given module requirement text, the
//! router extracts lexical evidence, maps it onto a fixed capability
//! model, filters protocols by hard constraints, and narrows the rest
//! through a fixed priority with deterministic tie-breaking. Every
//! decision ships its verbatim evidence spans and a digit-free rationale.
//! The optional Thompson bandit is the sole stochastic piece and takes an
//! explicit seeded generator.

pub mod bandit;
pub mod builder;
pub mod cfm;
pub mod decide;
pub mod error;
pub mod lexicon;
pub mod prior;

pub use bandit::{bandit_select, Posterior};
pub use builder::apply_router_decisions;
pub use cfm::{Capability, CapabilityModel, Facet};
pub use decide::{
    is_protocol_compatible, pick_by_narrative, priority_decide, rationale_lint, route_spec_only,
    route_spec_perf, Decision, DecisionRecord, ModuleSpec, Router, RouterMode,
};
pub use error::RouterError;
pub use lexicon::{extract_evidence_spans, map_spans_to_cfm, EvidenceSpan, RequirementSet};
pub use prior::{tie_break_with_prior, PriorTable};
