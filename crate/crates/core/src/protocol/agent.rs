use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use super::tree::{NegotiationTree, NodeId};
use super::ProtocolError;
use crate::cpnet::{CpNet, DominanceCache, PrefRelation};
use crate::domain::Outcome;

/// One agent's private negotiation state.
///
/// Nothing in here is ever handed to the other agent. The protocol driver
/// only sees node ids, single revealed outcomes and the agent's yes/no
/// answers.
#[derive(Debug, Clone)]
pub struct AgentSession {
    id: usize,
    net: Arc<CpNet>,
    /// Unproposed leaves, no member strictly beaten by a later one.
    fringe: Vec<NodeId>,
    proposed: HashSet<NodeId>,
    bpa_cache: HashMap<NodeId, Outcome>,
    seen: HashSet<Outcome>,
    dominance: DominanceCache,
}

impl AgentSession {
    pub fn new(id: usize, net: Arc<CpNet>, exact_bound: u64) -> Self {
        Self {
            id,
            net,
            fringe: Vec::new(),
            proposed: HashSet::new(),
            bpa_cache: HashMap::new(),
            seen: HashSet::new(),
            dominance: DominanceCache::new(exact_bound),
        }
    }

    pub fn id(&self) -> usize {
        self.id
    }

    pub fn net(&self) -> &CpNet {
        &self.net
    }

    pub fn fringe(&self) -> &[NodeId] {
        &self.fringe
    }

    pub fn has_proposed(&self, node: NodeId) -> bool {
        self.proposed.contains(&node)
    }

    /// Dominance queries answered so far (cache misses).
    pub fn queries(&self) -> u64 {
        self.dominance.queries()
    }

    /// Distinct outcomes that have come up as a BPA.
    pub fn distinct_outcomes(&self) -> u64 {
        self.seen.len() as u64
    }

    pub fn cached_bpa(&self, node: NodeId) -> Option<&Outcome> {
        self.bpa_cache.get(&node)
    }

    /// Best completion of the node's path under this agent's net.
    pub fn bpa(&mut self, tree: &NegotiationTree, node: NodeId) -> Result<Outcome, ProtocolError> {
        if let Some(o) = self.bpa_cache.get(&node) {
            return Ok(o.clone());
        }
        let n = tree
            .get(node)
            .ok_or_else(|| ProtocolError::Internal(format!("no node {node}")))?;
        let o = self.net.optimal_completion(&n.path)?;
        self.seen.insert(o.clone());
        self.bpa_cache.insert(node, o.clone());
        Ok(o)
    }

    fn compare(&mut self, o: &Outcome, other: &Outcome) -> Result<PrefRelation, ProtocolError> {
        Ok(self.dominance.compare(&self.net, o, other)?)
    }

    /// Places `node` before the first member whose BPA it strictly beats,
    /// after every member it does not beat. The fringe stays a linear
    /// extension of the agent's order: a later member beating `node` would
    /// also beat that first member.
    pub fn fringe_insert(&mut self, tree: &NegotiationTree, node: NodeId) -> Result<(), ProtocolError> {
        let leaf = tree.get(node).is_some_and(|n| n.is_leaf());
        if !leaf || self.proposed.contains(&node) || self.fringe.contains(&node) {
            return Err(ProtocolError::Internal(format!(
                "agent {} cannot take {node} into its fringe",
                self.id + 1
            )));
        }
        let new_bpa = self.bpa(tree, node)?;
        let mut at = self.fringe.len();
        for i in 0..self.fringe.len() {
            let member_bpa = self.bpa(tree, self.fringe[i])?;
            if self.compare(&new_bpa, &member_bpa)? == PrefRelation::Better {
                at = i;
                break;
            }
        }
        self.fringe.insert(at, node);
        Ok(())
    }

    /// Pops the fringe head, or `None` (a pass) when the fringe is empty.
    pub fn select_proposal(&mut self) -> Option<NodeId> {
        if self.fringe.is_empty() {
            return None;
        }
        let head = self.fringe.remove(0);
        self.proposed.insert(head);
        Some(head)
    }

    /// Step-3 reveal of this agent's BPA for `node`.
    pub fn reveal_bpa(&mut self, tree: &NegotiationTree, node: NodeId) -> Result<Outcome, ProtocolError> {
        self.bpa(tree, node)
    }

    /// Whether this agent would take `offered` alongside or instead of
    /// `agreement`: only when `agreement` is not strictly preferred to it.
    pub fn accepts(&mut self, agreement: &Outcome, offered: &Outcome) -> Result<bool, ProtocolError> {
        Ok(self.compare(agreement, offered)?.not_better())
    }

    /// BPAs of fringe nodes that are the same as or incomparable with
    /// `agreement`, deduplicated, in fringe order.
    pub fn theta(&mut self, tree: &NegotiationTree, agreement: &Outcome) -> Result<Vec<Outcome>, ProtocolError> {
        let mut out: Vec<Outcome> = Vec::new();
        for node in self.fringe.clone() {
            let b = self.bpa(tree, node)?;
            let rel = self.compare(&b, agreement)?;
            if matches!(rel, PrefRelation::Same | PrefRelation::Incomparable) && !out.contains(&b) {
                out.push(b);
            }
        }
        Ok(out)
    }

    /// Best acceptable replacement for `agreement` among `candidates`.
    /// Among maximal acceptable candidates the canonically smallest wins.
    pub fn pick(&mut self, agreement: &Outcome, candidates: &[Outcome]) -> Result<Option<Outcome>, ProtocolError> {
        let mut acceptable = Vec::new();
        for c in candidates {
            if self.accepts(agreement, c)? {
                acceptable.push(c.clone());
            }
        }
        let mut best: Option<Outcome> = None;
        for (i, c) in acceptable.iter().enumerate() {
            let mut beaten = false;
            for (j, d) in acceptable.iter().enumerate() {
                if i != j && self.compare(d, c)? == PrefRelation::Better {
                    beaten = true;
                    break;
                }
            }
            if !beaten && best.as_ref().is_none_or(|b| c < b) {
                best = Some(c.clone());
            }
        }
        Ok(best)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::CpNetDef;

    /// Two independent binary attributes: `ab~` and `a~b` are incomparable.
    fn independent() -> Arc<CpNet> {
        let def = CpNetDef::new()
            .attr("A", &["a", "a~"])
            .attr("B", &["b", "b~"])
            .row("A", &[], &["a", "a~"])
            .row("B", &[], &["b", "b~"]);
        Arc::new(CpNet::from_def(&def).unwrap())
    }

    #[test]
    fn incomparable_members_keep_their_place() {
        let net = independent();
        let mut tree = NegotiationTree::new(net.shared_space().clone(), vec![0, 1]).unwrap();
        let mut agent = AgentSession::new(0, net, 1 << 4);
        agent.fringe_insert(&tree, NodeId(1)).unwrap();
        agent.fringe_insert(&tree, NodeId(2)).unwrap();
        assert_eq!(agent.select_proposal(), Some(NodeId(1)));
        tree.record_proposal(0, NodeId(1));
        tree.record_proposal(1, NodeId(1));
        let kids = tree.expand(NodeId(1)).unwrap();
        for &k in &kids {
            agent.fringe_insert(&tree, k).unwrap();
        }
        // ab beats a~b; ab~ is beaten by ab and incomparable with a~b
        assert_eq!(agent.fringe(), &[NodeId(3), NodeId(2), NodeId(4)]);
    }

    #[test]
    fn fringe_head_is_never_beaten() {
        let net = independent();
        let tree = NegotiationTree::new(net.shared_space().clone(), vec![1, 0]).unwrap();
        let mut agent = AgentSession::new(0, net, 1 << 4);
        // depth-1 nodes b (bpa ab) and b~ (bpa ab~), inserted worst first
        agent.fringe_insert(&tree, NodeId(2)).unwrap();
        agent.fringe_insert(&tree, NodeId(1)).unwrap();
        assert_eq!(agent.fringe(), &[NodeId(1), NodeId(2)]);
        assert_eq!(agent.queries(), 1);
        assert!(agent.fringe_insert(&tree, NodeId(1)).is_err());
    }

    #[test]
    fn picks_maximal_acceptable_candidate() {
        let net = independent();
        let space = net.shared_space().clone();
        let mut agent = AgentSession::new(0, net, 1 << 4);
        let o = |l: &[&str]| space.outcome_from_labels(l).unwrap();
        let agreement = o(&["a~", "b"]);
        let offered = vec![o(&["a~", "b~"]), o(&["a", "b~"]), o(&["a", "b"])];
        assert_eq!(agent.pick(&agreement, &offered).unwrap(), Some(o(&["a", "b"])));
        // a~b~ is worse than the agreement, so it alone is refused
        assert_eq!(agent.pick(&agreement, &offered[..1]).unwrap(), None);
    }
}
