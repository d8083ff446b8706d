//! Canonical feature model: which capabilities each protocol natively
//! supports, organized into six facet groups. This table is the router's
//! single source of truth; selection never consults anything else.

use std::collections::BTreeSet;

use agentwire_core::Protocol;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Capability {
    // transport and interaction
    Streaming,
    PersistentSession,
    RequestResponse,
    AsyncFirst,
    // long-running work and artifacts
    JobStatus,
    ArtifactRefs,
    // identity and confidentiality
    DidIdentity,
    E2eEncryption,
    EnterpriseAuth,
    // delivery and replay
    Idempotency,
    ReplayWindow,
    Ordering,
    // operation semantics
    RestResource,
    IdempotentOps,
    RoutineGovernance,
    Conversational,
    // trust and governance
    VersionedRoutines,
    Audit,
}

impl Capability {
    pub fn name(self) -> &'static str {
        match self {
            Capability::Streaming => "streaming",
            Capability::PersistentSession => "persistent_session",
            Capability::RequestResponse => "request_response",
            Capability::AsyncFirst => "async_first",
            Capability::JobStatus => "job_status",
            Capability::ArtifactRefs => "artifact_refs",
            Capability::DidIdentity => "did_identity",
            Capability::E2eEncryption => "e2e_encryption",
            Capability::EnterpriseAuth => "enterprise_auth",
            Capability::Idempotency => "idempotency",
            Capability::ReplayWindow => "replay_window",
            Capability::Ordering => "ordering",
            Capability::RestResource => "rest_resource",
            Capability::IdempotentOps => "idempotent_ops",
            Capability::RoutineGovernance => "routine_governance",
            Capability::Conversational => "conversational",
            Capability::VersionedRoutines => "versioned_routines",
            Capability::Audit => "audit",
        }
    }
}

/// The three stages of the fixed decision priority.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Facet {
    IdentityConfidentiality,
    OperationSemantics,
    Interaction,
}

impl Capability {
    /// Which priority stage this capability's cue feeds, if any. Delivery
    /// and replay flags act only as hard constraints, never as priorities.
    pub fn facet(self) -> Option<Facet> {
        use Capability::*;
        match self {
            DidIdentity | E2eEncryption | EnterpriseAuth => {
                Some(Facet::IdentityConfidentiality)
            }
            RestResource | IdempotentOps | RoutineGovernance | Conversational => {
                Some(Facet::OperationSemantics)
            }
            Streaming | PersistentSession | RequestResponse | AsyncFirst | JobStatus
            | ArtifactRefs => Some(Facet::Interaction),
            Idempotency | ReplayWindow | Ordering | VersionedRoutines | Audit => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CapabilityModel {
    a2a: BTreeSet<Capability>,
    acp: BTreeSet<Capability>,
    anp: BTreeSet<Capability>,
    agora: BTreeSet<Capability>,
}

impl CapabilityModel {
    /// The fixed table. A2A is enterprise-flavored conversation without
    /// native end-to-end encryption; ACP is REST-first with a real job
    /// status surface; ANP is the identity and confidentiality substrate;
    /// Agora is routine governance over a minimal wrapper.
    pub fn standard() -> CapabilityModel {
        use Capability::*;
        CapabilityModel {
            a2a: [
                Streaming,
                RequestResponse,
                ArtifactRefs,
                EnterpriseAuth,
                Conversational,
                Idempotency,
                ReplayWindow,
            ]
            .into(),
            acp: [
                RestResource,
                IdempotentOps,
                JobStatus,
                Streaming,
                AsyncFirst,
                RequestResponse,
                ArtifactRefs,
                Idempotency,
                ReplayWindow,
            ]
            .into(),
            anp: [
                DidIdentity,
                E2eEncryption,
                PersistentSession,
                Ordering,
                Streaming,
                RequestResponse,
                Idempotency,
                ReplayWindow,
            ]
            .into(),
            agora: [
                RoutineGovernance,
                VersionedRoutines,
                Audit,
                Conversational,
                RequestResponse,
                Idempotency,
                ReplayWindow,
            ]
            .into(),
        }
    }

    pub fn capabilities(&self, p: Protocol) -> &BTreeSet<Capability> {
        match p {
            Protocol::A2a => &self.a2a,
            Protocol::Acp => &self.acp,
            Protocol::Anp => &self.anp,
            Protocol::Agora => &self.agora,
        }
    }

    pub fn supports(&self, p: Protocol, cap: Capability) -> bool {
        self.capabilities(p).contains(&cap)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Capability::*;

    #[test]
    fn table_invariants_hold() {
        let cfm = CapabilityModel::standard();
        assert!(!cfm.supports(Protocol::A2a, E2eEncryption));
        assert!(cfm.supports(Protocol::Anp, DidIdentity));
        assert!(cfm.supports(Protocol::Anp, E2eEncryption));
        assert!(cfm.supports(Protocol::Acp, RestResource));
        assert!(cfm.supports(Protocol::Acp, JobStatus));
        assert!(cfm.supports(Protocol::Agora, RoutineGovernance));
        assert!(cfm.supports(Protocol::Agora, VersionedRoutines));
    }

    #[test]
    fn only_acp_has_rest_resource() {
        let cfm = CapabilityModel::standard();
        let holders: Vec<_> =
            Protocol::ALL.into_iter().filter(|&p| cfm.supports(p, RestResource)).collect();
        assert_eq!(holders, vec![Protocol::Acp]);
    }

    #[test]
    fn everyone_speaks_request_response_with_idempotency() {
        let cfm = CapabilityModel::standard();
        for p in Protocol::ALL {
            assert!(cfm.supports(p, RequestResponse), "{p}");
            assert!(cfm.supports(p, Idempotency), "{p}");
            assert!(cfm.supports(p, ReplayWindow), "{p}");
        }
    }

    #[test]
    fn capability_names_are_snake_case() {
        assert_eq!(E2eEncryption.name(), "e2e_encryption");
        let v = serde_json::to_value(DidIdentity).unwrap();
        assert_eq!(v, "did_identity");
    }
}
