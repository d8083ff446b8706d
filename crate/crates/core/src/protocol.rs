//! Protocol identifiers.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::PalError;

/// The four wire protocols an edge can speak.
///
/// The serde form is the lowercase wire name (`"a2a"`, `"acp"`, `"anp"`,
/// `"agora"`), used in plans, configs, and codec lookups. The display form
/// is the conventional label (`A2A`, `ACP`, `ANP`, `Agora`) used in decision
/// records and benchmark corpora.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Protocol {
    A2a,
    Acp,
    Anp,
    Agora,
}

impl Protocol {
    pub const ALL: [Protocol; 4] = [Protocol::A2a, Protocol::Acp, Protocol::Anp, Protocol::Agora];

    /// Stable fallback order applied when no evidence distinguishes
    /// candidates: A2A, ACP, Agora, ANP.
    pub const FALLBACK_ORDER: [Protocol; 4] =
        [Protocol::A2a, Protocol::Acp, Protocol::Agora, Protocol::Anp];

    pub fn wire_name(self) -> &'static str {
        match self {
            Protocol::A2a => "a2a",
            Protocol::Acp => "acp",
            Protocol::Anp => "anp",
            Protocol::Agora => "agora",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Protocol::A2a => "A2A",
            Protocol::Acp => "ACP",
            Protocol::Anp => "ANP",
            Protocol::Agora => "Agora",
        }
    }

    /// Case-insensitive parse of either the label or the wire name.
    pub fn parse(s: &str) -> Result<Protocol, PalError> {
        match s.to_ascii_lowercase().as_str() {
            "a2a" => Ok(Protocol::A2a),
            "acp" => Ok(Protocol::Acp),
            "anp" => Ok(Protocol::Anp),
            "agora" => Ok(Protocol::Agora),
            other => Err(PalError::unsupported(format!("unknown protocol '{other}'"))),
        }
    }

    /// Whether the protocol's message path can deliver fragmented responses.
    /// The simple Agora endpoint is single-shot request/response.
    pub fn supports_streaming(self) -> bool {
        !matches!(self, Protocol::Agora)
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Protocol {
    type Err = PalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Protocol::parse(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_accepts_labels_and_wire_names() {
        assert_eq!(Protocol::parse("Agora").unwrap(), Protocol::Agora);
        assert_eq!(Protocol::parse("ANP").unwrap(), Protocol::Anp);
        assert_eq!(Protocol::parse("a2a").unwrap(), Protocol::A2a);
        assert!(Protocol::parse("mqtt").is_err());
    }

    #[test]
    fn serde_uses_wire_names() {
        assert_eq!(serde_json::to_string(&Protocol::Agora).unwrap(), "\"agora\"");
        let p: Protocol = serde_json::from_str("\"anp\"").unwrap();
        assert_eq!(p, Protocol::Anp);
    }
}
