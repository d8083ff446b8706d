//! Application callback invoked by servers for each decoded request. The
//! handler sees a normalized envelope regardless of which wire format
//! delivered it; returning an error surfaces to HTTP clients as the error
//! status (or 500) and to socket clients as an error document.

use agentwire_core::{Envelope, PalError};
use serde_json::Value;

pub trait AgentHandler: Send + Sync {
    /// One application effect for one request; returns the reply content.
    fn handle(&self, request: &Envelope) -> Result<Value, PalError>;

    /// Ordered reply fragments for a streaming request. The default wraps
    /// the unary reply in a single fragment.
    fn stream(&self, request: &Envelope) -> Result<Vec<Value>, PalError> {
        self.handle(request).map(|v| vec![v])
    }
}

/// Replies with the request content unchanged.
pub struct EchoHandler;

impl AgentHandler for EchoHandler {
    fn handle(&self, request: &Envelope) -> Result<Value, PalError> {
        Ok(request.content.clone())
    }
}
