//! Normalized error taxonomy. Every transport- or protocol-level failure in
//! the stack collapses into one of seven stable codes so callers never
//! branch on library-specific error types.

use serde::{Deserialize, Serialize};
use std::fmt;

/// Stable error codes. `Http` carries the status separately in
/// [`PalError::http_status`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ErrorKind {
    #[serde(rename = "E_TIMEOUT")]
    Timeout,
    #[serde(rename = "E_HTTP")]
    Http,
    #[serde(rename = "E_CONN")]
    Conn,
    #[serde(rename = "E_PROTOCOL")]
    Protocol,
    #[serde(rename = "E_ENCODE")]
    Encode,
    #[serde(rename = "E_DECODE")]
    Decode,
    #[serde(rename = "E_UNSUPPORTED")]
    Unsupported,
}

impl ErrorKind {
    pub fn code(self) -> &'static str {
        match self {
            ErrorKind::Timeout => "E_TIMEOUT",
            ErrorKind::Http => "E_HTTP",
            ErrorKind::Conn => "E_CONN",
            ErrorKind::Protocol => "E_PROTOCOL",
            ErrorKind::Encode => "E_ENCODE",
            ErrorKind::Decode => "E_DECODE",
            ErrorKind::Unsupported => "E_UNSUPPORTED",
        }
    }
}

/// Normalized failure. `http_status` is set exactly when `kind` is
/// [`ErrorKind::Http`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, thiserror::Error)]
pub struct PalError {
    pub kind: ErrorKind,
    pub detail: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub http_status: Option<u16>,
}

impl fmt::Display for PalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.http_status {
            Some(status) => write!(f, "{}({}): {}", self.kind.code(), status, self.detail),
            None => write!(f, "{}: {}", self.kind.code(), self.detail),
        }
    }
}

impl PalError {
    fn new(kind: ErrorKind, detail: impl Into<String>) -> Self {
        PalError { kind, detail: detail.into(), http_status: None }
    }

    pub fn timeout(detail: impl Into<String>) -> Self {
        Self::new(ErrorKind::Timeout, detail)
    }

    pub fn http(status: u16, detail: impl Into<String>) -> Self {
        PalError { kind: ErrorKind::Http, detail: detail.into(), http_status: Some(status) }
    }

    pub fn conn(detail: impl Into<String>) -> Self {
        Self::new(ErrorKind::Conn, detail)
    }

    pub fn protocol(detail: impl Into<String>) -> Self {
        Self::new(ErrorKind::Protocol, detail)
    }

    pub fn encode(detail: impl Into<String>) -> Self {
        Self::new(ErrorKind::Encode, detail)
    }

    pub fn decode(detail: impl Into<String>) -> Self {
        Self::new(ErrorKind::Decode, detail)
    }

    pub fn unsupported(detail: impl Into<String>) -> Self {
        Self::new(ErrorKind::Unsupported, detail)
    }
}

/// A failure as the transport layer saw it, before normalization.
#[derive(Clone, Debug, PartialEq)]
pub enum RawFailure {
    /// No response within the deadline.
    Timeout { after_ms: u64 },
    /// Completed HTTP exchange with a non-success status.
    HttpStatus { status: u16, detail: String },
    /// Could not reach the peer (refused, reset, unresolvable).
    ConnectFailed { detail: String },
    /// Transport reached the peer but the security handshake failed.
    HandshakeFailed { detail: String },
    /// Peer violated the protocol state machine (bad frame, replayed
    /// sequence, error-status response body).
    ProtocolViolation { detail: String },
    /// Local serialization failed.
    EncodeFailed { detail: String },
    /// Peer bytes arrived but did not parse as the expected document.
    DecodeFailed { detail: String },
    /// The operation asks for a capability this edge does not have.
    Unsupported { detail: String },
}

/// Total, deterministic mapping from raw transport failures onto the
/// normalized taxonomy.
pub fn normalize_error(raw: &RawFailure) -> PalError {
    match raw {
        RawFailure::Timeout { after_ms } => {
            PalError::timeout(format!("no response after {after_ms} ms"))
        }
        RawFailure::HttpStatus { status, detail } => PalError::http(*status, detail.clone()),
        RawFailure::ConnectFailed { detail } => PalError::conn(detail.clone()),
        RawFailure::HandshakeFailed { detail } => {
            PalError::conn(format!("handshake failed: {detail}"))
        }
        RawFailure::ProtocolViolation { detail } => PalError::protocol(detail.clone()),
        RawFailure::EncodeFailed { detail } => PalError::encode(detail.clone()),
        RawFailure::DecodeFailed { detail } => PalError::decode(detail.clone()),
        RawFailure::Unsupported { detail } => PalError::unsupported(detail.clone()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn http_503_maps_to_e_http_with_status() {
        let e = normalize_error(&RawFailure::HttpStatus { status: 503, detail: "busy".into() });
        assert_eq!(e.kind, ErrorKind::Http);
        assert_eq!(e.http_status, Some(503));
        assert_eq!(e.to_string(), "E_HTTP(503): busy");
    }

    #[test]
    fn parse_failure_maps_to_e_decode() {
        let e = normalize_error(&RawFailure::DecodeFailed { detail: "not json".into() });
        assert_eq!(e.kind, ErrorKind::Decode);
        assert_eq!(e.http_status, None);
    }

    #[test]
    fn handshake_failure_maps_to_e_conn() {
        let e = normalize_error(&RawFailure::HandshakeFailed { detail: "bad key".into() });
        assert_eq!(e.kind, ErrorKind::Conn);
    }

    #[test]
    fn codes_serialize_as_stable_strings() {
        let e = PalError::unsupported("x");
        let v = serde_json::to_value(&e).unwrap();
        assert_eq!(v["kind"], "E_UNSUPPORTED");
    }
}
