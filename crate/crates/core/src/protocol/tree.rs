use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::ProtocolError;
use crate::domain::{AttrIx, OutcomeSpace, PartialAssignment, ValueIx};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NodeId(pub usize);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

#[derive(Debug, Clone)]
pub struct TreeNode {
    pub id: NodeId,
    pub depth: usize,
    pub parent: Option<NodeId>,
    /// Value given to the attribute at position `depth - 1` of the order.
    pub branch: Option<ValueIx>,
    pub path: PartialAssignment,
    pub proposed: [bool; 2],
    pub children: Vec<NodeId>,
}

impl TreeNode {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    pub fn is_expanded(&self) -> bool {
        !self.children.is_empty()
    }

    /// A leaf both agents have proposed at some point.
    pub fn is_open(&self) -> bool {
        self.is_leaf() && self.proposed.iter().all(|&p| p)
    }
}

/// The k-ary tree of partial assignments built during the first phase.
/// Node ids are creation indices, so id order is creation order.
#[derive(Debug, Clone)]
pub struct NegotiationTree {
    space: Arc<OutcomeSpace>,
    order: Vec<AttrIx>,
    nodes: Vec<TreeNode>,
}

impl NegotiationTree {
    /// Root plus one depth-1 child per value of the first attribute in `order`.
    pub fn new(space: Arc<OutcomeSpace>, order: Vec<AttrIx>) -> Result<Self, ProtocolError> {
        let m = space.len();
        if m == 0 {
            return Err(ProtocolError::Config("outcome space has no attributes".into()));
        }
        let mut seen = vec![false; m];
        let is_perm = order.len() == m && order.iter().all(|&a| a < m && !std::mem::replace(&mut seen[a], true));
        if !is_perm {
            return Err(ProtocolError::Config(format!(
                "attribute order {order:?} is not a permutation of the {m} attributes"
            )));
        }
        let root = TreeNode {
            id: NodeId(0),
            depth: 0,
            parent: None,
            branch: None,
            path: space.empty_assignment(),
            proposed: [false; 2],
            children: Vec::new(),
        };
        let mut tree = Self {
            space,
            order,
            nodes: vec![root],
        };
        tree.expand(NodeId(0))?;
        Ok(tree)
    }

    pub fn space(&self) -> &OutcomeSpace {
        &self.space
    }

    pub fn order(&self) -> &[AttrIx] {
        &self.order
    }

    /// Depth of the complete tree, `m`.
    pub fn max_depth(&self) -> usize {
        self.order.len()
    }

    pub fn root(&self) -> NodeId {
        NodeId(0)
    }

    pub fn node(&self, id: NodeId) -> &TreeNode {
        &self.nodes[id.0]
    }

    pub fn get(&self, id: NodeId) -> Option<&TreeNode> {
        self.nodes.get(id.0)
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn leaves(&self) -> impl Iterator<Item = &TreeNode> {
        self.nodes.iter().filter(|n| n.is_leaf())
    }

    /// Adds one child per value of the next attribute in the order.
    pub fn expand(&mut self, id: NodeId) -> Result<Vec<NodeId>, ProtocolError> {
        let node = self
            .get(id)
            .ok_or_else(|| ProtocolError::Internal(format!("no node {id}")))?;
        if node.depth >= self.max_depth() {
            return Err(ProtocolError::Internal(format!("{id} is at full depth")));
        }
        if node.is_expanded() {
            return Err(ProtocolError::Internal(format!("{id} is already expanded")));
        }
        let attr = self.order[node.depth];
        let depth = node.depth + 1;
        let path = node.path.clone();
        let first = self.nodes.len();
        let ids: Vec<NodeId> = (0..self.space.domain_size(attr)).map(|k| NodeId(first + k)).collect();
        for (k, &child) in ids.iter().enumerate() {
            let v = k as ValueIx;
            self.nodes.push(TreeNode {
                id: child,
                depth,
                parent: Some(id),
                branch: Some(v),
                path: path.with(attr, v),
                proposed: [false; 2],
                children: Vec::new(),
            });
        }
        self.nodes[id.0].children = ids.clone();
        Ok(ids)
    }

    pub(crate) fn record_proposal(&mut self, agent: usize, id: NodeId) {
        self.nodes[id.0].proposed[agent] = true;
    }

    /// Node count of the fully expanded tree for this space and order.
    pub fn full_size(&self) -> u128 {
        full_tree_size(&self.space, &self.order)
    }
}

/// `1 + |D(σ1)| + |D(σ1)||D(σ2)| + ...`, saturating.
pub fn full_tree_size(space: &OutcomeSpace, order: &[AttrIx]) -> u128 {
    let mut level = 1u128;
    let mut total = 1u128;
    for &a in order {
        level = level.saturating_mul(space.domain_size(a) as u128);
        total = total.saturating_add(level);
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Attribute;

    #[test]
    fn init_creates_root_and_first_level() {
        let space = Arc::new(OutcomeSpace::binary(&["A", "B", "C"]));
        let tree = NegotiationTree::new(space.clone(), vec![0, 1, 2]).unwrap();
        assert_eq!(tree.len(), 3);
        let kids = &tree.node(tree.root()).children;
        assert_eq!(kids, &[NodeId(1), NodeId(2)]);
        assert_eq!(tree.node(NodeId(1)).path, space.assignment([("A", "a")]).unwrap());
        assert_eq!(tree.node(NodeId(2)).path, space.assignment([("A", "a~")]).unwrap());
        assert!(tree.nodes().iter().all(|n| n.proposed == [false; 2]));
        assert_eq!(tree.full_size(), 15);
    }

    #[test]
    fn single_ternary_attribute() {
        let space = Arc::new(OutcomeSpace::new(vec![Attribute::new("X", ["x1", "x2", "x3"])]).unwrap());
        let mut tree = NegotiationTree::new(space, vec![0]).unwrap();
        assert_eq!(tree.len(), 4);
        assert!(tree.expand(NodeId(1)).is_err());
    }

    #[test]
    fn order_must_be_permutation() {
        let space = Arc::new(OutcomeSpace::binary(&["A", "B", "C"]));
        for order in [vec![0, 1], vec![0, 1, 1], vec![0, 1, 3]] {
            assert!(matches!(
                NegotiationTree::new(space.clone(), order),
                Err(ProtocolError::Config(_))
            ));
        }
    }

    #[test]
    fn child_paths_extend_parent() {
        let space = Arc::new(OutcomeSpace::binary(&["A", "B", "C"]));
        let mut tree = NegotiationTree::new(space.clone(), vec![2, 0, 1]).unwrap();
        let kids = tree.expand(NodeId(2)).unwrap();
        for k in kids {
            let n = tree.node(k);
            let parent = tree.node(n.parent.unwrap());
            let step = PartialAssignment::empty(3).with(0, n.branch.unwrap());
            assert_eq!(parent.path.combine(&step, &space).unwrap(), n.path);
        }
    }
}
