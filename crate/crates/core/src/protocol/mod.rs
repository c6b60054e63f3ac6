//! The two-phase bilateral negotiation protocol.
//!
//! Phase 1 grows a negotiation tree: each iteration both agents propose the
//! head of their private fringe simultaneously, leaves proposed by both
//! become open, and open nodes short of full depth are expanded. It stops
//! as soon as an open node reaches full depth. Step 3 settles the initial
//! agreement set, and phase 2 lets each agent offer outcomes it is
//! indifferent to so the other can swap in something it prefers.

mod agent;
mod tree;

use std::sync::Arc;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use agent::AgentSession;
pub use tree::{full_tree_size, NegotiationTree, NodeId, TreeNode};

use crate::cpnet::{CpNet, CpNetError, DEFAULT_EXACT_BOUND};
use crate::domain::{AttrIx, Outcome};
use crate::stats::RunStats;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProtocolError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("deadlock in iteration {0}: both agents passed with nothing open")]
    Deadlock(u32),
    #[error("no agreement node at the end of phase 1")]
    NoAgreement,
    #[error("deadline passed after {0} phase-1 iterations")]
    DeadlineExceeded(u32),
    #[error("internal invariant violated: {0}")]
    Internal(String),
    #[error(transparent)]
    CpNet(#[from] CpNetError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TraceKind {
    Propose,
    Pass,
    Open,
    Expand,
    Reveal,
    Include,
    Replace,
    Final,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEvent {
    pub iteration: u32,
    /// 0-based agent index.
    pub agent: Option<usize>,
    pub kind: TraceKind,
    pub node: Option<NodeId>,
    pub outcome: Option<Outcome>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProtocolOptions {
    /// Outcome-space bound for exact dominance queries.
    pub exact_bound: u64,
    /// Run the enhancement phase. Disabling it is only useful for checking
    /// that the Pareto oracle notices the difference.
    pub phase2: bool,
    /// Abandon phase 1 once this instant has passed.
    pub deadline: Option<Instant>,
}

impl Default for ProtocolOptions {
    fn default() -> Self {
        Self {
            exact_bound: DEFAULT_EXACT_BOUND,
            phase2: true,
            deadline: None,
        }
    }
}

/// What one phase-1 iteration did.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IterationOutcome {
    pub iteration: u32,
    pub proposals: [Option<NodeId>; 2],
    /// Nodes opened in this iteration, ascending.
    pub opened: Vec<NodeId>,
    /// Set when an opened node is at full depth; phase 1 is over.
    pub agreement_reached: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Phase1Result {
    pub iterations: u32,
    /// Open set of the final iteration.
    pub q: Vec<NodeId>,
    /// Members of `q` at full depth.
    pub agreement_nodes: Vec<NodeId>,
    pub final_proposals: [Option<NodeId>; 2],
    pub residual_fringes: [Vec<NodeId>; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AgreementSource {
    /// Path of an agreement node.
    AgreementNode(NodeId),
    /// BPA revealed in step 3 by `agent` for its last open node.
    Revealed { agent: usize, node: NodeId },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InitialAgreement {
    pub outcome: Outcome,
    pub source: AgreementSource,
}

#[derive(Debug, Clone)]
pub struct FinalResult {
    pub order: Vec<AttrIx>,
    pub phase1: Phase1Result,
    pub initial: Vec<InitialAgreement>,
    /// Final agreement set `F`, first-occurrence order.
    pub agreements: Vec<Outcome>,
    pub chosen: Outcome,
    pub stats: RunStats,
    pub trace: Vec<TraceEvent>,
    pub tree_size: usize,
}

/// A single bilateral negotiation run, stepped phase by phase.
#[derive(Debug)]
pub struct Negotiation {
    tree: NegotiationTree,
    agents: [AgentSession; 2],
    trace: Vec<TraceEvent>,
    iteration: u32,
    options: ProtocolOptions,
}

impl Negotiation {
    /// Sets up the tree for `order` and seeds both fringes with the
    /// first-level nodes.
    pub fn new(nets: [Arc<CpNet>; 2], order: Vec<AttrIx>, options: ProtocolOptions) -> Result<Self, ProtocolError> {
        if nets[0].space() != nets[1].space() {
            return Err(CpNetError::SpaceMismatch.into());
        }
        let space = nets[0].shared_space().clone();
        let tree = NegotiationTree::new(space, order)?;
        let [n0, n1] = nets;
        let mut agents = [
            AgentSession::new(0, n0, options.exact_bound),
            AgentSession::new(1, n1, options.exact_bound),
        ];
        let first = tree.node(tree.root()).children.clone();
        for agent in &mut agents {
            for &node in &first {
                agent.fringe_insert(&tree, node)?;
            }
        }
        Ok(Self {
            tree,
            agents,
            trace: Vec::new(),
            iteration: 0,
            options,
        })
    }

    pub fn tree(&self) -> &NegotiationTree {
        &self.tree
    }

    pub fn agent(&self, i: usize) -> &AgentSession {
        &self.agents[i]
    }

    pub fn trace(&self) -> &[TraceEvent] {
        &self.trace
    }

    pub fn iteration(&self) -> u32 {
        self.iteration
    }

    fn log(&mut self, agent: Option<usize>, kind: TraceKind, node: Option<NodeId>, outcome: Option<Outcome>) {
        self.trace.push(TraceEvent {
            iteration: self.iteration,
            agent,
            kind,
            node,
            outcome,
        });
    }

    /// One simultaneous round of proposals. Both selections are made before
    /// either is recorded on the tree.
    pub fn step(&mut self) -> Result<IterationOutcome, ProtocolError> {
        self.iteration += 1;
        let proposals = [self.agents[0].select_proposal(), self.agents[1].select_proposal()];
        for (i, p) in proposals.iter().enumerate() {
            match p {
                Some(node) => {
                    self.tree.record_proposal(i, *node);
                    self.log(Some(i), TraceKind::Propose, Some(*node), None);
                }
                None => self.log(Some(i), TraceKind::Pass, None, None),
            }
        }
        let mut opened: Vec<NodeId> = proposals
            .iter()
            .flatten()
            .copied()
            .filter(|&n| self.tree.node(n).is_open())
            .collect();
        opened.sort();
        opened.dedup();
        if opened.is_empty() && proposals.iter().all(Option::is_none) {
            return Err(ProtocolError::Deadlock(self.iteration));
        }
        if opened.len() > 2 {
            return Err(ProtocolError::Internal(format!("{} nodes opened at once", opened.len())));
        }
        for &n in &opened {
            self.log(None, TraceKind::Open, Some(n), None);
        }
        let m = self.tree.max_depth();
        let agreement_reached = opened.iter().any(|&n| self.tree.node(n).depth == m);
        if !agreement_reached {
            let mut created = Vec::new();
            for &n in &opened {
                created.extend(self.tree.expand(n)?);
                self.log(None, TraceKind::Expand, Some(n), None);
            }
            for agent in &mut self.agents {
                for &c in &created {
                    agent.fringe_insert(&self.tree, c)?;
                }
            }
        }
        Ok(IterationOutcome {
            iteration: self.iteration,
            proposals,
            opened,
            agreement_reached,
        })
    }

    /// Iterates until an agreement node is opened.
    pub fn phase1(&mut self) -> Result<Phase1Result, ProtocolError> {
        let cap = self.tree.full_size();
        loop {
            let it = self.step()?;
            if it.agreement_reached {
                let m = self.tree.max_depth();
                let agreement_nodes = it.opened.iter().copied().filter(|&n| self.tree.node(n).depth == m).collect();
                return Ok(Phase1Result {
                    iterations: it.iteration,
                    q: it.opened,
                    agreement_nodes,
                    final_proposals: it.proposals,
                    residual_fringes: [self.agents[0].fringe().to_vec(), self.agents[1].fringe().to_vec()],
                });
            }
            if self.options.deadline.is_some_and(|d| Instant::now() >= d) {
                return Err(ProtocolError::DeadlineExceeded(it.iteration));
            }
            if it.iteration as u128 > cap {
                return Err(ProtocolError::Internal(format!(
                    "phase 1 exceeded {cap} iterations"
                )));
            }
        }
    }

    /// Initial agreements: agreement-node paths, plus the BPA revealed for
    /// the other open node when the last iteration opened one short of
    /// full depth and the non-revealing agent does not strictly prefer the
    /// agreement to it.
    pub fn step3(&mut self, p1: &Phase1Result) -> Result<Vec<InitialAgreement>, ProtocolError> {
        let Some(&star) = p1.agreement_nodes.first() else {
            return Err(ProtocolError::NoAgreement);
        };
        let mut initial = Vec::new();
        for &n in &p1.agreement_nodes {
            let o = self
                .tree
                .node(n)
                .path
                .to_outcome()
                .ok_or_else(|| ProtocolError::Internal(format!("agreement node {n} is not complete")))?;
            self.log(None, TraceKind::Include, Some(n), Some(o.clone()));
            initial.push(InitialAgreement {
                outcome: o,
                source: AgreementSource::AgreementNode(n),
            });
        }
        let partial: Vec<NodeId> = p1.q.iter().copied().filter(|n| !p1.agreement_nodes.contains(n)).collect();
        if let Some(&open) = partial.first() {
            let j = p1
                .final_proposals
                .iter()
                .position(|&p| p == Some(open))
                .ok_or_else(|| ProtocolError::Internal(format!("nobody proposed {open} last")))?;
            let i = 1 - j;
            let star_outcome = self.tree.node(star).path.to_outcome().expect("complete");
            let revealed = self.agents[j].reveal_bpa(&self.tree, open)?;
            self.log(Some(j), TraceKind::Reveal, Some(open), Some(revealed.clone()));
            if self.agents[i].accepts(&star_outcome, &revealed)?
                && initial.iter().all(|a| a.outcome != revealed)
            {
                self.log(Some(i), TraceKind::Include, Some(open), Some(revealed.clone()));
                initial.push(InitialAgreement {
                    outcome: revealed,
                    source: AgreementSource::Revealed { agent: j, node: open },
                });
            }
        }
        Ok(initial)
    }

    /// Enhancement: replaces each initial agreement by the outcomes the
    /// agents pick from each other's indifferent/incomparable BPAs.
    pub fn phase2(&mut self, initial: &[InitialAgreement]) -> Result<Vec<Outcome>, ProtocolError> {
        let mut finals: Vec<Outcome> = Vec::new();
        for agreement in initial {
            let star = &agreement.outcome;
            let mut phi: Vec<Outcome> = Vec::new();
            for (giver, picker) in [(0usize, 1usize), (1, 0)] {
                let theta = self.agents[giver].theta(&self.tree, star)?;
                if theta.is_empty() {
                    continue;
                }
                if let Some(pick) = self.agents[picker].pick(star, &theta)? {
                    if !phi.contains(&pick) {
                        phi.push(pick);
                    }
                }
            }
            if phi.is_empty() {
                finals.push(star.clone());
            } else {
                for o in phi {
                    self.log(None, TraceKind::Replace, None, Some(o.clone()));
                    finals.push(o);
                }
            }
        }
        let mut seen = std::collections::HashSet::new();
        finals.retain(|o| seen.insert(o.clone()));
        Ok(finals)
    }

    fn stats(&self, elapsed: f64) -> RunStats {
        let space = self.tree.space();
        RunStats {
            s_attr: space.len(),
            s_os: space.outcome_count(),
            s_out: [self.agents[0].distinct_outcomes(), self.agents[1].distinct_outcomes()],
            s_dq: [self.agents[0].queries(), self.agents[1].queries()],
            s_iter: self.iteration,
            s_time: elapsed,
        }
    }
}

/// Random attribute order for the negotiation tree.
pub fn draw_order(attrs: usize, rng: &mut impl Rng) -> Vec<AttrIx> {
    let mut order: Vec<AttrIx> = (0..attrs).collect();
    order.shuffle(rng);
    order
}

/// Full run with the attribute order drawn from `seed`.
pub fn negotiate(nets: [Arc<CpNet>; 2], seed: u64, options: ProtocolOptions) -> Result<FinalResult, ProtocolError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let order = draw_order(nets[0].space().len(), &mut rng);
    run(nets, order, rng, options)
}

/// Full run with a fixed attribute order; `seed` only drives the final pick.
pub fn negotiate_with_order(
    nets: [Arc<CpNet>; 2],
    order: Vec<AttrIx>,
    seed: u64,
    options: ProtocolOptions,
) -> Result<FinalResult, ProtocolError> {
    run(nets, order, ChaCha8Rng::seed_from_u64(seed), options)
}

fn run(
    nets: [Arc<CpNet>; 2],
    order: Vec<AttrIx>,
    mut rng: ChaCha8Rng,
    options: ProtocolOptions,
) -> Result<FinalResult, ProtocolError> {
    let start = Instant::now();
    let mut neg = Negotiation::new(nets, order.clone(), options)?;
    let phase1 = neg.phase1()?;
    let initial = neg.step3(&phase1)?;
    let agreements = if neg.options.phase2 {
        neg.phase2(&initial)?
    } else {
        let mut out: Vec<Outcome> = Vec::new();
        for a in &initial {
            if !out.contains(&a.outcome) {
                out.push(a.outcome.clone());
            }
        }
        out
    };
    let chosen = agreements[rng.gen_range(0..agreements.len())].clone();
    let elapsed = start.elapsed().as_secs_f64();
    neg.log(None, TraceKind::Final, None, Some(chosen.clone()));
    Ok(FinalResult {
        order,
        stats: neg.stats(elapsed),
        tree_size: neg.tree.len(),
        phase1,
        initial,
        agreements,
        chosen,
        trace: neg.trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn worked() -> Negotiation {
        let (n1, n2) = fixtures::worked_example();
        Negotiation::new([Arc::new(n1), Arc::new(n2)], vec![0, 1, 2], ProtocolOptions::default()).unwrap()
    }

    fn ids(v: &[NodeId]) -> Vec<usize> {
        v.iter().map(|n| n.0).collect()
    }

    #[test]
    fn worked_example_fringes_follow_the_illustration() {
        let mut neg = worked();
        assert_eq!(ids(neg.agent(0).fringe()), [1, 2]);
        assert_eq!(ids(neg.agent(1).fringe()), [1, 2]);
        // (proposals, opened, fringe of agent 1, fringe of agent 2) per iteration
        let expected: [([usize; 2], Vec<usize>, Vec<usize>, Vec<usize>); 5] = [
            ([1, 1], vec![1], vec![3, 4, 2], vec![4, 2, 3]),
            ([3, 4], vec![], vec![4, 2], vec![2, 3]),
            ([4, 2], vec![4], vec![5, 2, 6], vec![6, 5, 3]),
            ([5, 6], vec![], vec![2, 6], vec![5, 3]),
            ([2, 5], vec![2, 5], vec![6], vec![3]),
        ];
        for (props, opened, f1, f2) in expected {
            let it = neg.step().unwrap();
            assert_eq!(it.proposals.map(|p| p.unwrap().0), props, "iteration {}", it.iteration);
            assert_eq!(ids(&it.opened), opened);
            assert_eq!(ids(neg.agent(0).fringe()), f1);
            assert_eq!(ids(neg.agent(1).fringe()), f2);
        }
    }

    #[test]
    fn worked_example_step3_and_phase2() {
        let mut neg = worked();
        let p1 = neg.phase1().unwrap();
        assert_eq!(p1.iterations, 5);
        assert_eq!(ids(&p1.q), [2, 5]);
        assert_eq!(ids(&p1.agreement_nodes), [5]);
        let initial = neg.step3(&p1).unwrap();
        let space = neg.tree().space().clone();
        let shown: Vec<String> = initial.iter().map(|a| space.display(&a.outcome)).collect();
        assert_eq!(shown, ["ab~c", "a~b~c"]);
        assert_eq!(
            initial[1].source,
            AgreementSource::Revealed {
                agent: 0,
                node: NodeId(2)
            }
        );
        let finals = neg.phase2(&initial).unwrap();
        assert_eq!(finals, initial.iter().map(|a| a.outcome.clone()).collect::<Vec<_>>());
    }

    #[test]
    fn bpa_of_root_is_global_optimum_and_leaf_is_its_path() {
        let (n1, n2) = fixtures::worked_example();
        let mut neg = worked();
        let root = neg.tree().root();
        let tree = neg.tree.clone();
        assert_eq!(neg.agents[0].bpa(&tree, root).unwrap(), n1.optimum());
        assert_eq!(neg.agents[1].bpa(&tree, root).unwrap(), n2.optimum());
        neg.phase1().unwrap();
        let tree = neg.tree.clone();
        for node in tree.nodes().iter().filter(|n| n.depth == 3) {
            let o = node.path.to_outcome().unwrap();
            assert_eq!(neg.agents[0].bpa(&tree, node.id).unwrap(), o);
        }
    }

    #[test]
    fn empty_fringe_passes() {
        let (n1, _) = fixtures::worked_example();
        let mut agent = AgentSession::new(0, Arc::new(n1), DEFAULT_EXACT_BOUND);
        assert_eq!(agent.select_proposal(), None);
    }

    #[test]
    fn duplicate_fringe_insert_is_rejected() {
        let mut neg = worked();
        let tree = neg.tree.clone();
        let err = neg.agents[0].fringe_insert(&tree, NodeId(1)).unwrap_err();
        assert!(matches!(err, ProtocolError::Internal(_)));
        // the root is not a leaf
        assert!(neg.agents[0].fringe_insert(&tree, NodeId(0)).is_err());
    }

    #[test]
    fn identical_nets_descend_straight_to_the_optimum() {
        let (n1, _) = fixtures::worked_example();
        let net = Arc::new(n1);
        let r = negotiate([net.clone(), net.clone()], 7, ProtocolOptions::default()).unwrap();
        assert_eq!(r.chosen, net.optimum());
        assert_eq!(r.stats.s_iter, 3);
        assert_eq!(r.agreements.len(), 1);
    }

    #[test]
    fn phase2_disabled_keeps_initial_set() {
        let (n1, n2) = fixtures::worked_example();
        let opts = ProtocolOptions {
            phase2: false,
            ..Default::default()
        };
        let r = negotiate_with_order([Arc::new(n1), Arc::new(n2)], vec![0, 1, 2], 1, opts).unwrap();
        assert_eq!(r.agreements.len(), 2);
    }
}
