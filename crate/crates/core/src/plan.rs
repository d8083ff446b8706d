//! Network plan document: the router's output and the harness's input.
//! Nodes carry their selected protocol and enabled native features, links
//! carry the protocol pair of their endpoints, and every heterogeneous link
//! gets one stateless bridge entry.

use serde::{Deserialize, Serialize};

use crate::protocol::Protocol;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodePlan {
    pub id: String,
    pub protocol: Protocol,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub features: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkPlan {
    pub src: String,
    pub dst: String,
    /// (source protocol, destination protocol).
    pub protocol: (Protocol, Protocol),
}

impl LinkPlan {
    pub fn is_heterogeneous(&self) -> bool {
        self.protocol.0 != self.protocol.1
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BridgePlan {
    pub src: String,
    pub dst: String,
    pub encode: String,
    pub decode: String,
    pub stateless: bool,
}

impl BridgePlan {
    /// Bridge entry for a heterogeneous link; None when the endpoints speak
    /// the same protocol.
    pub fn for_link(link: &LinkPlan) -> Option<BridgePlan> {
        if !link.is_heterogeneous() {
            return None;
        }
        Some(BridgePlan {
            src: link.src.clone(),
            dst: link.dst.clone(),
            encode: encode_name(link.protocol.1),
            decode: decode_name(link.protocol.0),
            stateless: true,
        })
    }
}

pub fn encode_name(p: Protocol) -> String {
    format!("encode_to_{}", p.wire_name())
}

pub fn decode_name(p: Protocol) -> String {
    format!("decode_from_{}", p.wire_name())
}

pub fn parse_encode_name(name: &str) -> Option<Protocol> {
    Protocol::parse(name.strip_prefix("encode_to_")?).ok()
}

pub fn parse_decode_name(name: &str) -> Option<Protocol> {
    Protocol::parse(name.strip_prefix("decode_from_")?).ok()
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkPlan {
    pub nodes: Vec<NodePlan>,
    pub links: Vec<LinkPlan>,
    pub bridges: Vec<BridgePlan>,
}

impl NetworkPlan {
    pub fn node(&self, id: &str) -> Option<&NodePlan> {
        self.nodes.iter().find(|n| n.id == id)
    }

    /// Recomputes the bridge section from the links: exactly one bridge per
    /// heterogeneous link, none for homogeneous ones.
    pub fn derive_bridges(&mut self) {
        self.bridges = self.links.iter().filter_map(BridgePlan::for_link).collect();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn link(src: &str, dst: &str, p: Protocol, q: Protocol) -> LinkPlan {
        LinkPlan { src: src.into(), dst: dst.into(), protocol: (p, q) }
    }

    #[test]
    fn heterogeneous_link_gets_named_bridge() {
        let b = BridgePlan::for_link(&link("m1", "m2", Protocol::Agora, Protocol::Acp)).unwrap();
        assert_eq!(b.encode, "encode_to_acp");
        assert_eq!(b.decode, "decode_from_agora");
        assert!(b.stateless);
    }

    #[test]
    fn homogeneous_link_gets_none() {
        assert!(BridgePlan::for_link(&link("a", "b", Protocol::A2a, Protocol::A2a)).is_none());
    }

    #[test]
    fn derive_bridges_counts_heterogeneous_edges() {
        let mut plan = NetworkPlan {
            nodes: vec![],
            links: vec![
                link("a", "b", Protocol::A2a, Protocol::Acp),
                link("b", "c", Protocol::Acp, Protocol::Acp),
                link("c", "d", Protocol::Acp, Protocol::Anp),
                link("d", "a", Protocol::Anp, Protocol::A2a),
            ],
            bridges: vec![],
        };
        plan.derive_bridges();
        assert_eq!(plan.bridges.len(), 3);
    }

    #[test]
    fn bridge_names_parse_back() {
        for p in Protocol::ALL {
            assert_eq!(parse_encode_name(&encode_name(p)), Some(p));
            assert_eq!(parse_decode_name(&decode_name(p)), Some(p));
        }
        assert_eq!(parse_encode_name("decode_from_acp"), None);
        assert_eq!(parse_decode_name("decode_from_xmpp"), None);
    }

    #[test]
    fn plan_serializes_with_lowercase_protocols() {
        let plan = NetworkPlan {
            nodes: vec![NodePlan {
                id: "m1".into(),
                protocol: Protocol::Anp,
                features: vec!["e2e_encryption".into()],
            }],
            links: vec![link("m1", "m1", Protocol::Anp, Protocol::Anp)],
            bridges: vec![],
        };
        let v = serde_json::to_value(&plan).unwrap();
        assert_eq!(v["nodes"][0]["protocol"], "anp");
        assert_eq!(v["links"][0]["protocol"][0], "anp");
        let back: NetworkPlan = serde_json::from_value(v).unwrap();
        assert_eq!(back, plan);
    }
}
