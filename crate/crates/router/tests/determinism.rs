//! Router guarantees that downstream components lean on: repeated routing
//! is byte-identical, selections never violate their own requirement set,
//! and the two fallback laws (no evidence, end-to-end encryption) hold
//! under arbitrary surrounding text.

use agentwire_core::Protocol;
use agentwire_router::{
    extract_evidence_spans, is_protocol_compatible, map_spans_to_cfm, rationale_lint,
    route_spec_only, route_spec_perf, CapabilityModel, ModuleSpec, PriorTable, Router,
};
use proptest::prelude::*;

fn corpus() -> Vec<ModuleSpec> {
    let texts = [
        ("m01", "patient exchange must use end-to-end encryption and DID identity"),
        ("m02", "REST resource updates with idempotent batch operations"),
        ("m03", "a versioned routine under governance with an audit trail"),
        ("m04", "conversational multimodal turn-taking with enterprise authentication"),
        ("m05", "streaming updates; no end-to-end encryption is needed"),
        ("m06", ""),
        ("m07", "verifiable identity with a DID, but without end-to-end encryption"),
        ("m08", "long-running job status polling over REST"),
        ("m09", "persistent session with ordered delivery and confidentiality"),
        ("m10", "the routine catalog is exported over REST for partners"),
    ];
    texts
        .into_iter()
        .map(|(id, text)| ModuleSpec { id: id.into(), text: text.into(), neighbors: vec![] })
        .collect()
}

#[test]
fn repeated_routing_is_byte_identical() {
    let modules = corpus();
    let prior = PriorTable::new(vec![
        Protocol::Acp,
        Protocol::Anp,
        Protocol::A2a,
        Protocol::Agora,
    ])
    .unwrap();

    let spec_only_bytes = serde_json::to_string(&route_spec_only("", &modules)).unwrap();
    let spec_perf_bytes =
        serde_json::to_string(&route_spec_perf("", &modules, &prior)).unwrap();
    for _ in 0..1000 {
        let again = serde_json::to_string(&route_spec_only("", &modules)).unwrap();
        assert_eq!(again, spec_only_bytes);
        let again = serde_json::to_string(&route_spec_perf("", &modules, &prior)).unwrap();
        assert_eq!(again, spec_perf_bytes);
    }
}

#[test]
fn corpus_decisions_are_sound_and_lint_clean() {
    let cfm = CapabilityModel::standard();
    for (id, record) in route_spec_only("", &corpus()) {
        let module = corpus().into_iter().find(|m| m.id == id).unwrap();
        let req = map_spans_to_cfm(&extract_evidence_spans(&module.text));
        if !record.infeasible {
            assert!(
                is_protocol_compatible(&cfm, record.selected_protocol, &req),
                "{id}: {record:?} violates {req:?}"
            );
        }
        rationale_lint(&record.rationale).unwrap();
    }
}

/// Filler vocabulary with no lexicon hits and no negation markers, so it
/// can surround cue phrases without changing their meaning.
const FILLER: &[&str] = &[
    "the", "modules", "exchange", "messages", "across", "internal", "boundaries", "while",
    "operators", "watch", "dashboards", "and", "teams", "ship", "updates", "frequently",
];

const CUES: &[&str] = &[
    "end-to-end encryption",
    "DID",
    "REST",
    "idempotent",
    "streaming",
    "job status",
    "routine",
    "governance",
    "persistent session",
    "enterprise authentication",
    "artifact",
    "replay protection",
];

fn arb_soup() -> impl Strategy<Value = String> {
    let word = prop_oneof![
        3 => proptest::sample::select(FILLER).prop_map(str::to_string),
        2 => proptest::sample::select(CUES).prop_map(str::to_string),
        1 => proptest::sample::select(&["no", "without", "avoid"][..])
            .prop_map(str::to_string),
    ];
    proptest::collection::vec(word, 0..24).prop_map(|w| w.join(" "))
}

proptest! {
    #[test]
    fn selections_satisfy_their_own_requirements(text in arb_soup()) {
        let cfm = CapabilityModel::standard();
        let record = Router::spec_only().decide("m", &text);
        let req = map_spans_to_cfm(&extract_evidence_spans(&text));
        if !record.infeasible {
            prop_assert!(
                is_protocol_compatible(&cfm, record.selected_protocol, &req),
                "{record:?} violates {req:?} for {text:?}"
            );
        }
        rationale_lint(&record.rationale).unwrap();
    }

    #[test]
    fn arbitrary_text_never_panics_and_spans_are_verbatim(text in ".{0,200}") {
        let record = Router::spec_only().decide("m", &text);
        for span in extract_evidence_spans(&text) {
            let end = span.start + span.text.len();
            prop_assert_eq!(&text[span.start..end], span.text.as_str());
        }
        rationale_lint(&record.rationale).unwrap();
    }

    #[test]
    fn unnegated_e2e_requirement_always_lands_on_anp(
        prefix in proptest::collection::vec(proptest::sample::select(FILLER), 0..8),
        suffix in proptest::collection::vec(proptest::sample::select(FILLER), 0..8),
    ) {
        let text = format!(
            "{} end-to-end encryption {}",
            prefix.join(" "),
            suffix.join(" ")
        );
        let record = Router::spec_only().decide("m", &text);
        prop_assert_eq!(record.selected_protocol, Protocol::Anp);
        prop_assert!(!record.infeasible);
    }

    #[test]
    fn text_without_cues_always_falls_back_to_a2a(
        words in proptest::collection::vec(proptest::sample::select(FILLER), 0..20),
    ) {
        let record = Router::spec_only().decide("m", &words.join(" "));
        prop_assert_eq!(record.selected_protocol, Protocol::A2a);
        prop_assert!(record.evidence_spans.is_empty());
    }
}
