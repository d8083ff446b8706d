//! Stateless cross-protocol translation. A bridge decodes a source-protocol
//! document into the envelope, records the hop in the parent lineage, and
//! re-encodes for the destination protocol. Translation is purely syntactic;
//! business content is never touched.
//!
//! Security boundary: a bridge whose source is ANP would re-emit formerly
//! sealed content in plaintext. That is refused with E_UNSUPPORTED unless the
//! link is explicitly marked insecure.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::codec::CodecRegistry;
use crate::envelope::Envelope;
use crate::error::PalError;
use crate::plan::{parse_decode_name, parse_encode_name, NetworkPlan};
use crate::protocol::Protocol;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BridgeSpec {
    pub src_module: String,
    pub dst_module: String,
    pub decode_from: Protocol,
    pub encode_to: Protocol,
    /// Always true; bridges retain no session state between translations.
    pub stateless: bool,
    /// Permits re-emitting content from a secure source protocol in
    /// plaintext. Off by default.
    #[serde(default)]
    pub allow_insecure: bool,
}

impl BridgeSpec {
    pub fn new(
        src_module: impl Into<String>,
        dst_module: impl Into<String>,
        decode_from: Protocol,
        encode_to: Protocol,
    ) -> BridgeSpec {
        BridgeSpec {
            src_module: src_module.into(),
            dst_module: dst_module.into(),
            decode_from,
            encode_to,
            stateless: true,
            allow_insecure: false,
        }
    }

    pub fn allow_insecure(mut self) -> BridgeSpec {
        self.allow_insecure = true;
        self
    }
}

/// Envelope-level half of a bridge hop: capability checks plus lineage.
/// The stream flag travels with the envelope, not the wire body (every
/// protocol signals streaming at the transport layer), so this is where a
/// stream-into-non-streaming mismatch is caught.
pub fn bridge_envelope(spec: &BridgeSpec, envelope: &Envelope) -> Result<Envelope, PalError> {
    if spec.decode_from == Protocol::Anp
        && spec.encode_to != Protocol::Anp
        && !spec.allow_insecure
    {
        return Err(PalError::unsupported(format!(
            "refusing to downgrade sealed anp content to {} without allow_insecure",
            spec.encode_to.wire_name()
        )));
    }
    if envelope.context.stream && !spec.encode_to.supports_streaming() {
        return Err(PalError::unsupported(format!(
            "{} has no streaming path for a stream-flagged envelope",
            spec.encode_to.wire_name()
        )));
    }
    let mut out = envelope.clone();
    out.context.parent_id = Some(envelope.id.clone());
    out.meta.protocol_hint = Some(spec.encode_to);
    Ok(out)
}

/// Decodes `wire_in` under `spec.decode_from`, re-encodes under
/// `spec.encode_to`. Returns the translated document and the intermediate
/// envelope (whose parent_id records the bridged hop).
pub fn bridge_translate(
    registry: &CodecRegistry,
    spec: &BridgeSpec,
    wire_in: &Value,
) -> Result<(Value, Envelope), PalError> {
    let decoded = registry.get(spec.decode_from)?.decode(wire_in)?;
    let envelope = bridge_envelope(spec, &decoded)?;
    let out = registry.get(spec.encode_to)?.encode(&envelope)?;
    Ok((out, envelope))
}

/// One active bridge per heterogeneous link in the plan; homogeneous links
/// get none. The plan's own bridge section is advisory; the links decide.
pub fn install_bridges(plan: &NetworkPlan) -> Vec<BridgeSpec> {
    plan.links
        .iter()
        .filter(|l| l.is_heterogeneous())
        .map(|l| BridgeSpec::new(&l.src, &l.dst, l.protocol.0, l.protocol.1))
        .collect()
}

/// Runtime spec from a plan bridge entry, for plans produced elsewhere.
pub fn spec_from_plan_entry(
    entry: &crate::plan::BridgePlan,
) -> Result<BridgeSpec, PalError> {
    let encode_to = parse_encode_name(&entry.encode)
        .ok_or_else(|| PalError::unsupported(format!("unknown encode '{}'", entry.encode)))?;
    let decode_from = parse_decode_name(&entry.decode)
        .ok_or_else(|| PalError::unsupported(format!("unknown decode '{}'", entry.decode)))?;
    Ok(BridgeSpec::new(&entry.src, &entry.dst, decode_from, encode_to))
}
