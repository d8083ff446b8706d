//! Scoring: scenario accuracy (all modules correct), module accuracy,
//! macro-F1 over exactly the four protocol classes (a class absent from
//! both truth and prediction scores zero), and a 4x4 confusion matrix in
//! label order A2A, ACP, ANP, Agora. A scenario missing any prediction is
//! list-wise excluded and logged, mirroring the corpus loader's rule.

use std::collections::BTreeMap;

use agentwire_core::Protocol;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, ExcludedScenario};

pub const CLASSES: [Protocol; 4] =
    [Protocol::A2a, Protocol::Acp, Protocol::Anp, Protocol::Agora];

fn class_index(p: Protocol) -> usize {
    CLASSES.iter().position(|&q| q == p).expect("all protocols are classes")
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ClassScore {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub scenario_accuracy: f64,
    pub module_accuracy: f64,
    pub macro_f1: f64,
    /// Keyed by display label, one entry per class even at zero support.
    pub per_class: BTreeMap<String, ClassScore>,
    /// Rows are truth, columns are predictions, both in `classes` order.
    pub classes: Vec<String>,
    pub confusion: Vec<Vec<u64>>,
    pub included_scenarios: usize,
    pub included_modules: usize,
    pub excluded_scenarios: Vec<ExcludedScenario>,
}

impl ScoreReport {
    pub fn confusion_csv(&self) -> String {
        let mut out = String::from("truth\\predicted");
        for c in &self.classes {
            out.push(',');
            out.push_str(c);
        }
        out.push('\n');
        for (i, row) in self.confusion.iter().enumerate() {
            out.push_str(&self.classes[i]);
            for n in row {
                out.push(',');
                out.push_str(&n.to_string());
            }
            out.push('\n');
        }
        out
    }
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Scores module-level predictions against the corpus. Predictions are
/// keyed by module id; the corpus's own exclusions are carried into the
/// report and scenarios with any missing prediction join them.
pub fn score(predictions: &BTreeMap<String, Protocol>, corpus: &Corpus) -> ScoreReport {
    let mut excluded = corpus.excluded.clone();
    let mut confusion = [[0u64; 4]; 4];
    let mut scenarios_total = 0u64;
    let mut scenarios_correct = 0u64;
    let mut modules_total = 0u64;
    let mut modules_correct = 0u64;

    for scenario in &corpus.scenarios {
        let missing: Vec<&str> = scenario
            .modules
            .iter()
            .filter(|m| !predictions.contains_key(&m.module_id))
            .map(|m| m.module_id.as_str())
            .collect();
        if !missing.is_empty() {
            let reason = format!("missing predictions for {}", missing.join(", "));
            log::warn!("scenario {} excluded from scoring: {reason}", scenario.scenario_id);
            excluded.push(ExcludedScenario {
                scenario_id: scenario.scenario_id.clone(),
                reason,
            });
            continue;
        }
        scenarios_total += 1;
        let mut all_correct = true;
        for m in &scenario.modules {
            let predicted = predictions[&m.module_id];
            confusion[class_index(m.label)][class_index(predicted)] += 1;
            modules_total += 1;
            if predicted == m.label {
                modules_correct += 1;
            } else {
                all_correct = false;
            }
        }
        if all_correct {
            scenarios_correct += 1;
        }
    }

    let mut per_class = BTreeMap::new();
    let mut f1_sum = 0.0;
    for (i, class) in CLASSES.into_iter().enumerate() {
        let truth_total: u64 = confusion[i].iter().sum();
        let predicted_total: u64 = confusion.iter().map(|row| row[i]).sum();
        let hit = confusion[i][i];
        let precision = ratio(hit, predicted_total);
        let recall = ratio(hit, truth_total);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        f1_sum += f1;
        per_class.insert(class.label().to_string(), ClassScore { precision, recall, f1 });
    }

    ScoreReport {
        scenario_accuracy: ratio(scenarios_correct, scenarios_total),
        module_accuracy: ratio(modules_correct, modules_total),
        macro_f1: f1_sum / CLASSES.len() as f64,
        per_class,
        classes: CLASSES.iter().map(|c| c.label().to_string()).collect(),
        confusion: confusion.iter().map(|row| row.to_vec()).collect(),
        included_scenarios: scenarios_total as usize,
        included_modules: modules_total as usize,
        excluded_scenarios: excluded,
    }
}
