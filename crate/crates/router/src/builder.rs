//! Turns a decision map into a network plan: one node per module with its
//! enabled native features, one link per declared neighbor edge, and one
//! stateless bridge per heterogeneous link. A module without a decision is
//! a configuration error, never a silent default.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use agentwire_core::{BridgePlan, LinkPlan, NetworkPlan, NodePlan, Protocol};

use crate::cfm::CapabilityModel;
use crate::decide::{DecisionRecord, ModuleSpec};
use crate::error::RouterError;
use crate::lexicon::{extract_evidence_spans, map_spans_to_cfm};

pub fn apply_router_decisions(
    cfm: &CapabilityModel,
    modules: &[ModuleSpec],
    decisions: &BTreeMap<String, DecisionRecord>,
) -> Result<NetworkPlan, RouterError> {
    let mut selected: BTreeMap<&str, Protocol> = BTreeMap::new();
    for m in modules {
        let d = decisions.get(&m.id).ok_or_else(|| {
            RouterError::Config(format!("no routing decision for module {}", m.id))
        })?;
        selected.insert(m.id.as_str(), d.selected_protocol);
    }

    let mut nodes = Vec::with_capacity(modules.len());
    for m in modules {
        let protocol = selected[m.id.as_str()];
        // Features are the requested capabilities the protocol natively
        // carries; the harness activates exactly these primitives.
        let req = map_spans_to_cfm(&extract_evidence_spans(&m.text));
        let features: Vec<String> = req
            .required
            .iter()
            .chain(req.preferred.iter())
            .filter(|&&c| cfm.supports(protocol, c))
            .map(|c| c.name().to_string())
            .collect::<BTreeSet<String>>()
            .into_iter()
            .collect();
        nodes.push(NodePlan { id: m.id.clone(), protocol, features });
    }

    let mut links = Vec::new();
    for m in modules {
        for nbr in &m.neighbors {
            let dst_protocol = *selected.get(nbr.as_str()).ok_or_else(|| {
                RouterError::Config(format!("module {} links to unknown module {nbr}", m.id))
            })?;
            links.push(LinkPlan {
                src: m.id.clone(),
                dst: nbr.clone(),
                protocol: (selected[m.id.as_str()], dst_protocol),
            });
        }
    }

    let bridges = links.iter().filter_map(BridgePlan::for_link).collect();
    Ok(NetworkPlan { nodes, links, bridges })
}
