//! Synthetic corpus generator. The real sixty-scenario benchmark is
//! human-curated and not shipped, so this generator produces a clearly
//! synthetic stand-in: templated module texts whose lock and exclude
//! phrases force exactly one feasible protocol under the router's own
//! lexicon. It validates the machinery, not published accuracy numbers.
//! Everything is a pure function of the seed.

use agentwire_core::Protocol;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use agentwire_router::PriorTable;

use crate::corpus::{Corpus, ModuleRecord, ScenarioRecord};
use crate::score::CLASSES;

struct Template {
    pattern: &'static str,
    locks: &'static [&'static str],
    excludes: &'static [&'static str],
}

const fn template(
    pattern: &'static str,
    locks: &'static [&'static str],
    excludes: &'static [&'static str],
) -> Template {
    Template { pattern, locks, excludes }
}

const A2A_TEMPLATES: &[Template] = &[
    template(
        "The {role} coordinates conversational turn-taking over {payload} behind enterprise authentication.",
        &["conversational", "enterprise authentication"],
        &[],
    ),
    template(
        "Agent-to-agent {payload} exchanges use enterprise authentication with streaming updates and multimodal turns.",
        &["enterprise authentication", "streaming", "multimodal"],
        &[],
    ),
    template(
        "The {role} streams multimodal replies with server-sent increments; enterprise authentication guards access; no end-to-end encryption is needed.",
        &["enterprise authentication", "server-sent"],
        &["end-to-end encryption"],
    ),
];

const ACP_TEMPLATES: &[Template] = &[
    template(
        "The {role} exposes {payload} as REST resources with idempotent batch updates.",
        &["REST", "idempotent", "batch"],
        &[],
    ),
    template(
        "Long-running {payload} jobs report job status and resume after interruption; operations are idempotent.",
        &["long-running", "job status", "idempotent"],
        &[],
    ),
    template(
        "The {role} performs archival batch processing through REST endpoints; tasks are resumable and idempotent.",
        &["archival", "REST", "idempotent"],
        &[],
    ),
];

const ANP_TEMPLATES: &[Template] = &[
    template(
        "The {role} moves {payload} across partner boundaries and must use end-to-end encryption with DID identity.",
        &["end-to-end encryption", "DID"],
        &[],
    ),
    template(
        "The {role} keeps {payload} confidential end to end; verifiable identity is mandatory for every peer.",
        &["confidential", "verifiable identity"],
        &[],
    ),
    template(
        "A persistent session carries {payload} with ordered delivery and end-to-end encryption.",
        &["persistent session", "ordered delivery", "end-to-end encryption"],
        &[],
    ),
];

const AGORA_TEMPLATES: &[Template] = &[
    template(
        "The {role} executes a versioned routine under governance; every step leaves an audit trail; avoid resource/state-machine semantics.",
        &["versioned routine", "governance", "audit trail"],
        &["resource"],
    ),
    template(
        "{payload} handling follows an auditable procedure with versioned routines and governance sign-off.",
        &["auditable procedure", "versioned routines", "governance"],
        &[],
    ),
    template(
        "The {role} applies a routine from the shared catalog; changes are auditable and governance-reviewed; avoid resource/state-machine semantics.",
        &["routine", "governance"],
        &["resource"],
    ),
];

/// Filler vocabulary, checked against the router lexicon so substitutions
/// never add or remove cues.
const ROLES: &[&str] = &[
    "intake desk",
    "triage unit",
    "dispatch planner",
    "summary writer",
    "catalog keeper",
    "ledger clerk",
    "field relay",
    "inbox monitor",
];

const PAYLOADS: &[&str] = &[
    "case notes",
    "shipment manifests",
    "telemetry bundles",
    "draft contracts",
    "inventory counts",
    "meeting minutes",
    "claim forms",
    "survey replies",
];

fn templates_for(label: Protocol) -> &'static [Template] {
    match label {
        Protocol::A2a => A2A_TEMPLATES,
        Protocol::Acp => ACP_TEMPLATES,
        Protocol::Anp => ANP_TEMPLATES,
        Protocol::Agora => AGORA_TEMPLATES,
    }
}

fn instantiate(label: Protocol, rng: &mut ChaCha20Rng) -> (String, Vec<String>, Vec<String>) {
    let pool = templates_for(label);
    let t = &pool[rng.random_range(0..pool.len())];
    // Both fillers are always drawn so the random stream does not depend
    // on which slots a template happens to use.
    let role = ROLES[rng.random_range(0..ROLES.len())];
    let payload = PAYLOADS[rng.random_range(0..PAYLOADS.len())];
    let text = t.pattern.replace("{role}", role).replace("{payload}", payload);
    (
        text,
        t.locks.iter().map(|s| s.to_string()).collect(),
        t.excludes.iter().map(|s| s.to_string()).collect(),
    )
}

/// Generates the full synthetic corpus: `n_per_level` scenarios per level,
/// level Li carrying exactly i modules. The default twelve per level gives
/// sixty scenarios and one hundred eighty modules.
pub fn generate_synthetic_corpus(seed: u64, n_per_level: usize) -> Corpus {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut scenarios = Vec::new();
    for level in 1..=5u8 {
        for idx in 1..=n_per_level {
            let scenario_id = format!("RB-L{level}-{idx:02}");
            let mut modules = Vec::with_capacity(usize::from(level));
            for m in 1..=level {
                let label = CLASSES[rng.random_range(0..CLASSES.len())];
                let (text, locks, excludes) = instantiate(label, &mut rng);
                modules.push(ModuleRecord {
                    module_id: format!("{scenario_id}-M{m}"),
                    text,
                    label,
                    locks,
                    excludes,
                });
            }
            scenarios.push(ScenarioRecord { scenario_id, level, modules });
        }
    }
    Corpus::from_scenarios(scenarios)
}

pub const DEFAULT_SCENARIOS_PER_LEVEL: usize = 12;

/// An ambiguity suite: modules whose cues (streaming, negated end-to-end
/// encryption) leave A2A and ACP capability-tied. Spec-only resolves the
/// tie by stable fallback to A2A; with the bundled prior ranking ACP
/// first, spec+perf resolves to ACP. Labels carry the prior-resolved
/// answer, so the suite scores perfectly only in spec+perf mode.
#[derive(Debug, Clone)]
pub struct AmbiguitySet {
    pub corpus: Corpus,
    pub prior: PriorTable,
    pub spec_only_pick: Protocol,
    pub prior_pick: Protocol,
}

const AMBIGUOUS_PATTERNS: &[&str] = &[
    "The {role} pushes streaming updates to subscribers; no end-to-end encryption is needed for this internal fan-out.",
    "Subscribers receive streaming increments from the {role}; no end-to-end encryption is required on this internal path.",
];

pub fn generate_ambiguity_set(seed: u64, count: usize) -> AmbiguitySet {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let prior = PriorTable::new(vec![
        Protocol::Acp,
        Protocol::A2a,
        Protocol::Anp,
        Protocol::Agora,
    ])
    .expect("fixed ranking has no duplicates");
    let mut scenarios = Vec::with_capacity(count);
    for i in 0..count {
        let scenario_id = format!("RB-L1-{:02}", 51 + i);
        let pattern = AMBIGUOUS_PATTERNS[rng.random_range(0..AMBIGUOUS_PATTERNS.len())];
        let role = ROLES[rng.random_range(0..ROLES.len())];
        scenarios.push(ScenarioRecord {
            scenario_id: scenario_id.clone(),
            level: 1,
            modules: vec![ModuleRecord {
                module_id: format!("{scenario_id}-M1"),
                text: pattern.replace("{role}", role),
                label: Protocol::Acp,
                locks: vec!["streaming".into()],
                excludes: vec!["end-to-end encryption".into()],
            }],
        });
    }
    AmbiguitySet {
        corpus: Corpus::from_scenarios(scenarios),
        prior,
        spec_only_pick: Protocol::A2a,
        prior_pick: Protocol::Acp,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    #[test]
    fn seed_zero_yields_sixty_scenarios_and_one_eighty_modules() {
        let corpus = generate_synthetic_corpus(0, DEFAULT_SCENARIOS_PER_LEVEL);
        assert_eq!(corpus.scenarios.len(), 60);
        assert_eq!(corpus.module_count(), 180);
    }

    #[test]
    fn level_histogram_matches_construction() {
        let corpus = generate_synthetic_corpus(0, DEFAULT_SCENARIOS_PER_LEVEL);
        let mut per_level: BTreeMap<u8, (usize, usize)> = BTreeMap::new();
        for s in &corpus.scenarios {
            let e = per_level.entry(s.level).or_default();
            e.0 += 1;
            e.1 += s.modules.len();
        }
        for level in 1..=5u8 {
            let (scenarios, modules) = per_level[&level];
            assert_eq!(scenarios, 12);
            assert_eq!(modules, 12 * usize::from(level));
        }
    }

    #[test]
    fn generation_is_deterministic_per_seed() {
        let a = generate_synthetic_corpus(0, 12).to_jsonl();
        let b = generate_synthetic_corpus(0, 12).to_jsonl();
        let c = generate_synthetic_corpus(1, 12).to_jsonl();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn all_four_labels_appear_with_locks() {
        let corpus = generate_synthetic_corpus(0, DEFAULT_SCENARIOS_PER_LEVEL);
        let mut seen = BTreeMap::new();
        for s in &corpus.scenarios {
            for m in &s.modules {
                *seen.entry(m.label).or_insert(0usize) += 1;
                assert!(!m.locks.is_empty(), "{} has no lock phrases", m.module_id);
                for lock in &m.locks {
                    assert!(
                        m.text.to_ascii_lowercase().contains(&lock.to_ascii_lowercase()),
                        "{}: lock {lock:?} missing from text {:?}",
                        m.module_id,
                        m.text
                    );
                }
            }
        }
        assert_eq!(seen.len(), 4, "labels seen: {seen:?}");
    }

    #[test]
    fn generated_corpus_survives_its_own_loader() {
        let corpus = generate_synthetic_corpus(0, DEFAULT_SCENARIOS_PER_LEVEL);
        let reloaded = crate::corpus::parse_corpus(&corpus.to_jsonl());
        assert_eq!(reloaded, corpus);
    }

    #[test]
    fn ambiguity_set_is_shaped_like_level_one_scenarios() {
        let set = generate_ambiguity_set(0, 6);
        assert_eq!(set.corpus.scenarios.len(), 6);
        for s in &set.corpus.scenarios {
            assert_eq!(s.level, 1);
            assert_eq!(s.modules[0].label, set.prior_pick);
        }
        let reloaded = crate::corpus::parse_corpus(&set.corpus.to_jsonl());
        assert!(reloaded.excluded.is_empty());
    }
}
