//! Scenario-agnostic prior ranking. In spec+perf mode a capability tie is
//! resolved by this fixed preference order instead of narrative anchors.
//! The table may rank only a subset; protocols absent from it sort after
//! every ranked one and keep their tie order among themselves.

use std::collections::BTreeSet;

use agentwire_core::Protocol;
use serde::{Deserialize, Serialize};

use crate::error::RouterError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PriorTable {
    ranking: Vec<Protocol>,
}

impl PriorTable {
    pub fn new(ranking: Vec<Protocol>) -> Result<PriorTable, RouterError> {
        let mut seen = BTreeSet::new();
        for p in &ranking {
            if !seen.insert(*p) {
                return Err(RouterError::Config(format!(
                    "duplicate protocol in prior ranking: {}",
                    p.label()
                )));
            }
        }
        Ok(PriorTable { ranking })
    }

    pub fn ranking(&self) -> &[Protocol] {
        &self.ranking
    }

    /// Position in the ranking; absent protocols rank one past the end.
    pub fn rank(&self, p: Protocol) -> usize {
        self.ranking.iter().position(|&q| q == p).unwrap_or(self.ranking.len())
    }
}

/// Picks the best-ranked protocol from a tie. Stable: among protocols the
/// table does not rank, the incoming tie order decides.
pub fn tie_break_with_prior(tied: &[Protocol], prior: &PriorTable) -> Protocol {
    let mut ranked = tied.to_vec();
    ranked.sort_by_key(|&p| prior.rank(p));
    *ranked.first().expect("tie list is nonempty")
}
