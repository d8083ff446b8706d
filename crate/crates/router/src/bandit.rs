//! Thompson sampling over feasible protocols. The bandit is the only
//! stochastic router component and takes its generator explicitly, so a
//! seeded run is reproducible end to end. Selection draws one Beta sample
//! per feasible protocol and takes the highest draw, breaking exact ties
//! by protocol label.

use std::collections::BTreeMap;

use agentwire_core::Protocol;
use rand::Rng;
use rand_distr::{Beta, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::RouterError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Posterior {
    params: BTreeMap<Protocol, (f64, f64)>,
}

impl Posterior {
    /// Uninformative start: Beta(1, 1) for all four protocols.
    pub fn uniform() -> Posterior {
        Posterior {
            params: Protocol::ALL.into_iter().map(|p| (p, (1.0, 1.0))).collect(),
        }
    }

    pub fn with_params(
        params: BTreeMap<Protocol, (f64, f64)>,
    ) -> Result<Posterior, RouterError> {
        for (p, &(a, b)) in &params {
            if !(a > 0.0 && b > 0.0) {
                return Err(RouterError::Config(format!(
                    "posterior for {} must have positive parameters, got ({a}, {b})",
                    p.label()
                )));
            }
        }
        Ok(Posterior { params })
    }

    pub fn params(&self, p: Protocol) -> (f64, f64) {
        self.params.get(&p).copied().unwrap_or((1.0, 1.0))
    }

    /// Records one observed outcome: success bumps alpha, failure beta.
    pub fn update(&mut self, p: Protocol, success: bool) {
        let entry = self.params.entry(p).or_insert((1.0, 1.0));
        if success {
            entry.0 += 1.0;
        } else {
            entry.1 += 1.0;
        }
    }
}

/// One Thompson round: a Beta draw per feasible protocol, highest draw
/// wins, label order breaks exact ties.
pub fn bandit_select<R: Rng>(
    feasible: &[Protocol],
    posterior: &Posterior,
    rng: &mut R,
) -> Protocol {
    assert!(!feasible.is_empty(), "bandit needs at least one feasible protocol");
    let mut draws: Vec<(Protocol, f64)> = feasible
        .iter()
        .map(|&p| {
            let (a, b) = posterior.params(p);
            let beta = Beta::new(a, b).expect("posterior parameters are positive");
            (p, beta.sample(rng))
        })
        .collect();
    draws.sort_by(|x, y| {
        y.1.partial_cmp(&x.1)
            .expect("beta draws are finite")
            .then_with(|| x.0.label().cmp(y.0.label()))
    });
    draws[0].0
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn update_moves_the_right_parameter() {
        let mut post = Posterior::uniform();
        post.update(Protocol::Acp, true);
        post.update(Protocol::Acp, true);
        post.update(Protocol::Acp, false);
        assert_eq!(post.params(Protocol::Acp), (3.0, 2.0));
        assert_eq!(post.params(Protocol::A2a), (1.0, 1.0));
    }

    #[test]
    fn nonpositive_parameters_are_rejected() {
        let params = BTreeMap::from([(Protocol::A2a, (0.0, 1.0))]);
        assert!(Posterior::with_params(params).is_err());
    }

    #[test]
    fn seeded_selection_is_reproducible() {
        let post = Posterior::uniform();
        let pick = |seed| {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            (0..50)
                .map(|_| bandit_select(&Protocol::ALL, &post, &mut rng))
                .collect::<Vec<_>>()
        };
        assert_eq!(pick(7), pick(7));
        assert_ne!(pick(7), pick(8), "different seeds should differ somewhere");
    }

    #[test]
    fn posterior_mass_dominates_selection() {
        let params = BTreeMap::from([
            (Protocol::A2a, (50.0, 2.0)),
            (Protocol::Acp, (2.0, 50.0)),
            (Protocol::Anp, (2.0, 50.0)),
            (Protocol::Agora, (2.0, 50.0)),
        ]);
        let post = Posterior::with_params(params).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(0);
        let wins = (0..200)
            .filter(|_| bandit_select(&Protocol::ALL, &post, &mut rng) == Protocol::A2a)
            .count();
        assert!(wins >= 190, "strong posterior should dominate, won {wins}/200");
    }

    #[test]
    fn singleton_feasible_set_short_circuits_nothing() {
        let post = Posterior::uniform();
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        assert_eq!(bandit_select(&[Protocol::Agora], &post, &mut rng), Protocol::Agora);
    }
}
