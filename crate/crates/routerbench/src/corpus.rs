//! Scenario corpus: line-delimited JSON records, one scenario per line.
//! Loading validates each record against the schema and the naming
//! conventions; a malformed scenario is recorded for list-wise exclusion
//! with its reason, never zero-filled and never fatal for the rest of the
//! file. Only an unreadable file is an error.

use std::fs;
use std::path::Path;

use agentwire_core::Protocol;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::BenchError;

/// Protocol labels in corpus files use display casing (A2A, ACP, Agora,
/// ANP), unlike the lowercase wire names used on envelopes.
pub fn parse_label(s: &str) -> Option<Protocol> {
    Protocol::ALL.into_iter().find(|p| p.label() == s)
}

mod label_serde {
    use super::*;
    use serde::de::Error;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(p: &Protocol, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(p.label())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Protocol, D::Error> {
        let s = String::deserialize(de)?;
        parse_label(&s).ok_or_else(|| D::Error::custom(format!("unknown protocol label {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleRecord {
    pub module_id: String,
    pub text: String,
    #[serde(with = "label_serde")]
    pub label: Protocol,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub locks: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub excludes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioRecord {
    pub scenario_id: String,
    pub level: u8,
    pub modules: Vec<ModuleRecord>,
}

/// Parses "RB-L{level}-{idx}" into (level, idx).
pub fn parse_scenario_id(id: &str) -> Option<(u8, u32)> {
    let rest = id.strip_prefix("RB-L")?;
    let (level_part, idx_part) = rest.split_once('-')?;
    let level: u8 = level_part.parse().ok()?;
    if !(1..=5).contains(&level) || idx_part.is_empty() {
        return None;
    }
    let idx: u32 = idx_part.parse().ok()?;
    Some((level, idx))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExcludedScenario {
    /// Scenario id when one could be read, otherwise "line-{n}".
    pub scenario_id: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Corpus {
    pub scenarios: Vec<ScenarioRecord>,
    pub excluded: Vec<ExcludedScenario>,
}

impl Corpus {
    pub fn from_scenarios(scenarios: Vec<ScenarioRecord>) -> Corpus {
        Corpus { scenarios, excluded: Vec::new() }
    }

    pub fn module_count(&self) -> usize {
        self.scenarios.iter().map(|s| s.modules.len()).sum()
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for s in &self.scenarios {
            out.push_str(&serde_json::to_string(s).expect("scenario serializes"));
            out.push('\n');
        }
        out
    }
}

/// Validates one parsed scenario line. The level may be explicit or
/// derived from the id; either way module count must equal it and module
/// ids must be "{scenario_id}-M{m}" numbered from one.
fn validate_scenario(value: Value) -> Result<ScenarioRecord, (Option<String>, String)> {
    let id = value
        .get("scenario_id")
        .and_then(Value::as_str)
        .map(str::to_string)
        .ok_or((None, "missing scenario_id".to_string()))?;
    let fail = |reason: String| (Some(id.clone()), reason);

    let (id_level, _idx) = parse_scenario_id(&id)
        .ok_or_else(|| fail(format!("scenario_id {id:?} does not match RB-L{{level}}-{{idx}}")))?;
    let level = match value.get("level") {
        None => id_level,
        Some(v) => {
            let lv = v.as_u64().ok_or_else(|| fail("level is not an integer".into()))?;
            if lv != u64::from(id_level) {
                return Err(fail(format!("level {lv} disagrees with id level {id_level}")));
            }
            id_level
        }
    };

    let modules_value = value
        .get("modules")
        .and_then(Value::as_array)
        .cloned()
        .ok_or_else(|| fail("missing modules array".into()))?;
    if modules_value.len() != usize::from(level) {
        return Err(fail(format!(
            "level L{level} requires exactly {level} modules, found {}",
            modules_value.len()
        )));
    }

    let mut modules = Vec::with_capacity(modules_value.len());
    for (i, mv) in modules_value.into_iter().enumerate() {
        let module: ModuleRecord = serde_json::from_value(mv)
            .map_err(|e| fail(format!("module {} malformed: {e}", i + 1)))?;
        let expected = format!("{id}-M{}", i + 1);
        if module.module_id != expected {
            return Err(fail(format!(
                "module id {:?} should be {expected:?}",
                module.module_id
            )));
        }
        modules.push(module);
    }
    Ok(ScenarioRecord { scenario_id: id, level, modules })
}

/// Parses a corpus from JSONL text. Every line must hold one scenario;
/// blank lines are skipped. Malformed scenarios land in `excluded`.
pub fn parse_corpus(text: &str) -> Corpus {
    let mut corpus = Corpus::default();
    for (n, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fallback_id = format!("line-{}", n + 1);
        match serde_json::from_str::<Value>(line) {
            Err(e) => {
                log::warn!("corpus line {} excluded: {e}", n + 1);
                corpus.excluded.push(ExcludedScenario {
                    scenario_id: fallback_id,
                    reason: format!("unparseable JSON: {e}"),
                });
            }
            Ok(value) => match validate_scenario(value) {
                Ok(s) => corpus.scenarios.push(s),
                Err((sid, reason)) => {
                    let scenario_id = sid.unwrap_or(fallback_id);
                    log::warn!("scenario {scenario_id} excluded: {reason}");
                    corpus.excluded.push(ExcludedScenario { scenario_id, reason });
                }
            },
        }
    }
    corpus
}

pub fn load_corpus(path: &Path) -> Result<Corpus, BenchError> {
    Ok(parse_corpus(&fs::read_to_string(path)?))
}
