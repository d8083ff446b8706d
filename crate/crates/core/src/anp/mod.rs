//! Secure agent sessions: local DID identities, a three-message
//! authenticated key agreement, and AEAD-sealed frames with per-direction
//! replay windows. The state machines here are sans-IO; `agentwire-net`
//! moves their frames over a socket and the harness moves them in-process.

mod frame;
mod handshake;
mod identity;
mod session;

pub use frame::{FrameType, SecureFrame, MAX_FRAME_BODY};
pub use handshake::{ClientHandshake, ServerHandshake, ServerPending};
pub use identity::{create_identity, Identity, IdentityDoc, Resolver};
pub use session::{Liveness, SecureSession, SessionRole, DEFAULT_HEARTBEAT_INTERVAL_SECS, DEFAULT_HEARTBEAT_TIMEOUT_SECS};
