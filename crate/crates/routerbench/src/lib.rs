//! Router benchmark: corpus loading with list-wise exclusion of malformed
//! scenarios, a deterministic synthetic corpus generator, evaluation in
//! spec-only and spec+perf modes, and scoring with scenario accuracy,
//! module accuracy, macro-F1 over the four protocol classes, and a
//! confusion matrix.

pub mod corpus;
pub mod error;
pub mod eval;
pub mod score;
pub mod synth;

pub use corpus::{
    load_corpus, parse_corpus, parse_label, parse_scenario_id, Corpus, ExcludedScenario,
    ModuleRecord, ScenarioRecord,
};
pub use error::BenchError;
pub use eval::{decide_corpus, predictions, run_eval, EvalMode};
pub use score::{score, ClassScore, ScoreReport, CLASSES};
pub use synth::{
    generate_ambiguity_set, generate_synthetic_corpus, AmbiguitySet,
    DEFAULT_SCENARIOS_PER_LEVEL,
};
