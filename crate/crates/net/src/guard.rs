//! Request vetting shared by every server: session-token checks for the
//! hijack probes and a clock-skew acceptance window on wire timestamps.

use agentwire_core::Protocol;
use serde_json::Value;

/// Forged-token prefixes the hijack probe presents. Any session id with one
/// of these prefixes is denied outright.
pub const FORGED_ADMIN_PREFIX: &str = "admin_session_";
pub const EXPIRED_SESSION_PREFIX: &str = "expired_session_";

pub const DEFAULT_SKEW_ACCEPT_SECS: f64 = 30.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SessionVerdict {
    Accepted,
    Denied(&'static str),
}

/// Message endpoints accept arbitrary application session ids; only the
/// forged-token shapes are denied. Privileged lookups (job status,
/// conversation threads) 404 on ids they do not know about.
pub fn vet_session(session_id: Option<&str>) -> SessionVerdict {
    match session_id {
        Some(s) if s.starts_with(FORGED_ADMIN_PREFIX) => {
            SessionVerdict::Denied("forged admin session token")
        }
        Some(s) if s.starts_with(EXPIRED_SESSION_PREFIX) => {
            SessionVerdict::Denied("expired session token")
        }
        _ => SessionVerdict::Accepted,
    }
}

/// Where each wire format carries the session id in its request document.
pub fn session_id_in(doc: &Value, protocol: Protocol) -> Option<&str> {
    let v = match protocol {
        Protocol::A2a => doc.get("params")?.get("context")?.get("session_id")?,
        Protocol::Acp | Protocol::Agora => doc.get("metadata")?.get("session_id")?,
        Protocol::Anp => doc.get("payload")?.get("context")?.get("session_id")?,
    };
    v.as_str()
}

/// Top-level wire timestamp, if the document carries one.
pub fn timestamp_in(doc: &Value) -> Option<f64> {
    doc.get("timestamp").and_then(Value::as_f64)
}

/// Accepts a timestamp within `accept_window` seconds of server time.
/// Absent or zero timestamps pass: zero means the sender runs on logical
/// time and there is no wall-clock relation to check. Returns the observed
/// skew on rejection.
pub fn vet_timestamp(ts: Option<f64>, now: f64, accept_window: f64) -> Result<(), f64> {
    match ts {
        None => Ok(()),
        Some(t) if t == 0.0 => Ok(()),
        Some(t) => {
            let skew = t - now;
            if skew.abs() <= accept_window {
                Ok(())
            } else {
                Err(skew)
            }
        }
    }
}
