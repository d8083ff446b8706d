//! Evaluation driver: routes every module of a corpus independently in
//! the requested mode and scores the predictions. Spec+perf requires a
//! prior table; there is no silent default ranking.

use std::collections::BTreeMap;

use agentwire_core::Protocol;
use agentwire_router::{DecisionRecord, PriorTable, Router};
use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::error::BenchError;
use crate::score::{score, ScoreReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalMode {
    SpecOnly,
    SpecPerf,
}

fn router_for(mode: EvalMode, prior: Option<&PriorTable>) -> Result<Router, BenchError> {
    match (mode, prior) {
        (EvalMode::SpecOnly, _) => Ok(Router::spec_only()),
        (EvalMode::SpecPerf, Some(p)) => Ok(Router::spec_perf(p.clone())),
        (EvalMode::SpecPerf, None) => {
            Err(BenchError::Config("spec+perf mode requires a prior table".into()))
        }
    }
}

/// Full decision records per module, keyed by module id. Modules are
/// judged strictly independently on their own text.
pub fn decide_corpus(
    corpus: &Corpus,
    mode: EvalMode,
    prior: Option<&PriorTable>,
) -> Result<BTreeMap<String, DecisionRecord>, BenchError> {
    let router = router_for(mode, prior)?;
    Ok(corpus
        .scenarios
        .iter()
        .flat_map(|s| s.modules.iter())
        .map(|m| (m.module_id.clone(), router.decide(&m.module_id, &m.text)))
        .collect())
}

pub fn predictions(
    corpus: &Corpus,
    mode: EvalMode,
    prior: Option<&PriorTable>,
) -> Result<BTreeMap<String, Protocol>, BenchError> {
    Ok(decide_corpus(corpus, mode, prior)?
        .into_iter()
        .map(|(id, d)| (id, d.selected_protocol))
        .collect())
}

pub fn run_eval(
    corpus: &Corpus,
    mode: EvalMode,
    prior: Option<&PriorTable>,
) -> Result<ScoreReport, BenchError> {
    let preds = predictions(corpus, mode, prior)?;
    Ok(score(&preds, corpus))
}
