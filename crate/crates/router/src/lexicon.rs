//! Fixed cue lexicon and evidence extraction. Routing is lexical on
//! purpose: a closed phrase table keyed to capability flags, matched with
//! word boundaries, scanning each phrase for its first occurrence. Spans
//! are verbatim substrings of the input so a reviewer can check every
//! decision against the text. Negation markers directly in front of a
//! phrase flip its flags into the excluded set and are kept inside the
//! reported span.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::cfm::{Capability, Facet};

pub struct LexiconEntry {
    pub phrase: &'static str,
    /// Acronyms match case-sensitively so prose words never trigger them.
    pub case_sensitive: bool,
    pub flags: &'static [Capability],
}

const fn entry(
    phrase: &'static str,
    case_sensitive: bool,
    flags: &'static [Capability],
) -> LexiconEntry {
    LexiconEntry { phrase, case_sensitive, flags }
}

use Capability::*;

pub const LEXICON: &[LexiconEntry] = &[
    // identity and confidentiality
    entry("end-to-end encryption", false, &[E2eEncryption]),
    entry("end-to-end encrypted", false, &[E2eEncryption]),
    entry("E2E", true, &[E2eEncryption]),
    entry("confidentiality", false, &[E2eEncryption]),
    entry("confidential", false, &[E2eEncryption]),
    entry("DID", true, &[DidIdentity]),
    entry("decentralized identity", false, &[DidIdentity]),
    entry("decentralized identifier", false, &[DidIdentity]),
    entry("verifiable identity", false, &[DidIdentity]),
    entry("enterprise authentication", false, &[EnterpriseAuth]),
    entry("enterprise auth", false, &[EnterpriseAuth]),
    entry("single sign-on", false, &[EnterpriseAuth]),
    // operation semantics
    entry("REST", true, &[RestResource]),
    entry("resource", false, &[RestResource]),
    entry("state-machine", false, &[RestResource]),
    entry("batch", false, &[RestResource]),
    entry("archival", false, &[RestResource]),
    entry("idempotent", false, &[IdempotentOps]),
    entry("auditable procedure", false, &[RoutineGovernance]),
    entry("routine", false, &[RoutineGovernance]),
    entry("routines", false, &[RoutineGovernance]),
    entry("governance", false, &[RoutineGovernance]),
    entry("version", false, &[RoutineGovernance]),
    entry("versioned routines", false, &[VersionedRoutines, RoutineGovernance]),
    entry("versioned routine", false, &[VersionedRoutines, RoutineGovernance]),
    entry("conversational", false, &[Conversational]),
    entry("multi-turn", false, &[Conversational]),
    entry("turn-taking", false, &[Conversational]),
    entry("multimodal", false, &[Conversational]),
    // interaction
    entry("streaming", false, &[Streaming]),
    entry("server-sent", false, &[Streaming]),
    entry("real-time updates", false, &[Streaming]),
    entry("SSE", true, &[Streaming]),
    entry("long-running", false, &[JobStatus]),
    entry("job status", false, &[JobStatus]),
    entry("resumable", false, &[JobStatus]),
    entry("resume", false, &[JobStatus]),
    entry("persistent session", false, &[PersistentSession]),
    entry("persistent connection", false, &[PersistentSession]),
    entry("session continuity", false, &[PersistentSession]),
    entry("request/response", false, &[RequestResponse]),
    entry("request-response", false, &[RequestResponse]),
    entry("async-first", false, &[AsyncFirst]),
    entry("asynchronous", false, &[AsyncFirst]),
    entry("artifact", false, &[ArtifactRefs]),
    entry("artifacts", false, &[ArtifactRefs]),
    // delivery and replay (hard constraints only, no priority weight)
    entry("idempotency key", false, &[Idempotency]),
    entry("deduplication", false, &[Idempotency]),
    entry("at-least-once", false, &[Idempotency]),
    entry("exactly-once", false, &[Idempotency]),
    entry("replay window", false, &[ReplayWindow]),
    entry("replay protection", false, &[ReplayWindow]),
    entry("ordered delivery", false, &[Ordering]),
    entry("strict ordering", false, &[Ordering]),
    entry("in-order", false, &[Ordering]),
    // trust and governance
    entry("audit trail", false, &[Audit]),
    entry("auditable", false, &[Audit]),
    entry("audit", false, &[Audit]),
];

const NEGATION_MARKERS: &[&str] = &["no", "not", "avoid", "without", "never"];

/// How many whitespace tokens before a phrase are searched for a negation
/// marker. Sentence punctuation inside a token closes the window early.
const NEGATION_WINDOW_TOKENS: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvidenceSpan {
    /// Verbatim substring of the source text, marker included when negated.
    pub text: String,
    /// Byte offset of the span in the source text.
    pub start: usize,
    pub flags: Vec<Capability>,
    pub negated: bool,
}

fn is_word_byte(b: u8) -> bool {
    b.is_ascii_alphanumeric()
}

/// First word-bounded occurrence of `phrase` in `text`, as a byte offset.
/// Case-insensitive matching lowercases only ASCII, which preserves byte
/// offsets into the original text.
pub(crate) fn find_bounded(text: &str, phrase: &str, case_sensitive: bool) -> Option<usize> {
    let (hay, needle) = if case_sensitive {
        (text.to_string(), phrase.to_string())
    } else {
        (text.to_ascii_lowercase(), phrase.to_ascii_lowercase())
    };
    let bytes = hay.as_bytes();
    let mut from = 0;
    while let Some(rel) = hay.get(from..).and_then(|h| h.find(&needle)) {
        let at = from + rel;
        let end = at + needle.len();
        let open = at == 0 || !is_word_byte(bytes[at - 1]);
        let close = end == bytes.len() || !is_word_byte(bytes[end]);
        if open && close {
            return Some(at);
        }
        from = at + 1;
    }
    None
}

/// If a negation marker sits within the token window before `phrase_start`,
/// returns the marker's byte offset so the span can include it.
fn negation_start(text: &str, phrase_start: usize) -> Option<usize> {
    let before = text[..phrase_start].as_bytes();
    let mut idx = before.len();
    for _ in 0..NEGATION_WINDOW_TOKENS {
        while idx > 0 && before[idx - 1].is_ascii_whitespace() {
            idx -= 1;
        }
        if idx == 0 {
            return None;
        }
        let end = idx;
        while idx > 0 && !before[idx - 1].is_ascii_whitespace() {
            idx -= 1;
        }
        let token = &text[idx..end];
        if token.contains(['.', ',', ';', ':', '!', '?']) {
            return None;
        }
        let word: String = token
            .trim_matches(|c: char| !c.is_ascii_alphanumeric())
            .to_ascii_lowercase();
        if NEGATION_MARKERS.contains(&word.as_str()) {
            return Some(idx);
        }
    }
    None
}

/// Extracts evidence spans: each lexicon phrase at its first word-bounded
/// occurrence, spans contained in a longer match suppressed, output ordered
/// by position and deduplicated on verbatim text.
pub fn extract_evidence_spans(text: &str) -> Vec<EvidenceSpan> {
    let mut matches: Vec<(usize, usize, &LexiconEntry)> = LEXICON
        .iter()
        .filter_map(|e| {
            find_bounded(text, e.phrase, e.case_sensitive).map(|at| (at, at + e.phrase.len(), e))
        })
        .collect();
    matches.sort_by_key(|&(s, e, _)| (s, std::cmp::Reverse(e)));

    let mut kept: Vec<(usize, usize, &LexiconEntry)> = Vec::new();
    for (s, e, entry) in matches {
        let shadowed = kept.iter().any(|&(ks, ke, _)| ks <= s && e <= ke && (ks, ke) != (s, e));
        if !shadowed {
            kept.push((s, e, entry));
        }
    }

    let mut spans: Vec<EvidenceSpan> = kept
        .into_iter()
        .map(|(s, e, entry)| {
            let (start, negated) = match negation_start(text, s) {
                Some(m) => (m, true),
                None => (s, false),
            };
            EvidenceSpan {
                text: text[start..e].to_string(),
                start,
                flags: entry.flags.to_vec(),
                negated,
            }
        })
        .collect();
    spans.sort_by(|a, b| a.start.cmp(&b.start).then(a.text.cmp(&b.text)));
    let mut seen = BTreeSet::new();
    spans.retain(|sp| seen.insert(sp.text.clone()));
    spans
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RequirementSet {
    /// Hard constraints: every selected protocol must support all of these.
    pub required: BTreeSet<Capability>,
    /// Soft cues in first-evidence order, deduplicated.
    pub preferred: Vec<Capability>,
    /// Hard exclusions: a protocol natively carrying any of these is out.
    pub excluded: BTreeSet<Capability>,
}

/// Maps spans onto the capability model. Negated spans exclude their flags.
/// Identity and confidentiality cues are hard requirements; everything else
/// is a preference. On contradictory text the explicit negation wins, which
/// keeps required and excluded disjoint.
pub fn map_spans_to_cfm(spans: &[EvidenceSpan]) -> RequirementSet {
    let mut req = RequirementSet::default();
    for sp in spans {
        for &flag in &sp.flags {
            if sp.negated {
                req.excluded.insert(flag);
            } else if flag.facet() == Some(Facet::IdentityConfidentiality) {
                req.required.insert(flag);
            } else if !req.preferred.contains(&flag) {
                req.preferred.push(flag);
            }
        }
    }
    req.required.retain(|f| !req.excluded.contains(f));
    req.preferred.retain(|f| !req.excluded.contains(f));
    req
}
