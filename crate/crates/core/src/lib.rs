//! Core building blocks for the agentwire stack: the transport-neutral
//! envelope, the per-protocol wire codecs, the secure session layer, the
//! stateless bridges between protocols, and the accounting primitives
//! (wire tap, byte meters, event log) every scenario and probe reads from.
//!
//! Everything here is transport-agnostic. The HTTP/socket bindings live in
//! `agentwire-net`; the deterministic scenario scheduler lives in
//! `agentwire-harness`.

pub mod anp;
pub mod bridge;
pub mod clock;
pub mod codec;
pub mod envelope;
pub mod error;
pub mod eventlog;
pub mod id;
pub mod meter;
pub mod plan;
pub mod protocol;
pub mod tap;

pub use envelope::{validate, Envelope, EnvelopeFactory, EnvelopeOptions, Violation, DEFAULT_TTL_MS};
pub use error::{normalize_error, ErrorKind, PalError, RawFailure};
pub use plan::{BridgePlan, LinkPlan, NetworkPlan, NodePlan};
pub use protocol::Protocol;
