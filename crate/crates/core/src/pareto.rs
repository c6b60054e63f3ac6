//! Brute-force Pareto ground truth over small outcome spaces.

use std::collections::BTreeSet;

use crate::cpnet::{CpNet, CpNetError, DominanceMatrix, PrefRelation};
use crate::domain::Outcome;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Frontier {
    pub po: BTreeSet<Outcome>,
    pub wpo: BTreeSet<Outcome>,
}

/// Induced orders of every agent, materialized once and queried many times.
#[derive(Debug, Clone)]
pub struct ParetoOracle<'a> {
    nets: Vec<&'a CpNet>,
    orders: Vec<DominanceMatrix>,
}

impl<'a> ParetoOracle<'a> {
    pub fn new(nets: &[&'a CpNet], bound: u64) -> Result<Self, CpNetError> {
        if nets.windows(2).any(|w| w[0].space() != w[1].space()) {
            return Err(CpNetError::SpaceMismatch);
        }
        let orders = nets.iter().map(|n| n.induced_order(bound)).collect::<Result<_, _>>()?;
        Ok(Self {
            nets: nets.to_vec(),
            orders,
        })
    }

    fn index(&self, o: &Outcome) -> usize {
        self.nets[0].space().index_of(o) as usize
    }

    fn size(&self) -> usize {
        self.orders.first().map_or(0, DominanceMatrix::len)
    }

    /// No other outcome is strictly preferred by every agent.
    pub fn is_wpo(&self, o: &Outcome) -> bool {
        let j = self.index(o);
        !(0..self.size()).any(|i| i != j && self.orders.iter().all(|m| m.better(i, j)))
    }

    /// No other outcome is better, same or incomparable for every agent
    /// while strictly better for at least one.
    pub fn is_po(&self, o: &Outcome) -> bool {
        let j = self.index(o);
        !(0..self.size()).any(|i| {
            i != j
                && self.orders.iter().all(|m| m.relation(i, j) != PrefRelation::Worse)
                && self.orders.iter().any(|m| m.better(i, j))
        })
    }

    pub fn frontier(&self) -> Frontier {
        let space = self.nets[0].space();
        let mut f = Frontier::default();
        for o in space.outcomes() {
            if self.is_wpo(&o) {
                if self.is_po(&o) {
                    f.po.insert(o.clone());
                }
                f.wpo.insert(o);
            }
        }
        f
    }
}

pub fn is_wpo(o: &Outcome, nets: &[&CpNet], bound: u64) -> Result<bool, CpNetError> {
    Ok(ParetoOracle::new(nets, bound)?.is_wpo(o))
}

pub fn is_po(o: &Outcome, nets: &[&CpNet], bound: u64) -> Result<bool, CpNetError> {
    Ok(ParetoOracle::new(nets, bound)?.is_po(o))
}

pub fn frontier(nets: &[&CpNet], bound: u64) -> Result<Frontier, CpNetError> {
    Ok(ParetoOracle::new(nets, bound)?.frontier())
}
