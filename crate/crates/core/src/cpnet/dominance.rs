use std::collections::{HashMap, HashSet};

use super::{CpNet, CpNetError, PrefRelation};
use crate::domain::{AttrIx, Outcome};

/// Largest outcome space on which dominance is answered exactly by default.
pub const DEFAULT_EXACT_BOUND: u64 = 1 << 14;

pub(super) fn check_bound(net: &CpNet, bound: u64) -> Result<(), CpNetError> {
    match net.space().outcome_count() {
        Some(n) if n <= bound as u128 => Ok(()),
        outcomes => Err(CpNetError::ExactModeExceeded { outcomes, bound }),
    }
}

pub(super) fn compare(net: &CpNet, o: &Outcome, other: &Outcome, bound: u64) -> Result<PrefRelation, CpNetError> {
    check_bound(net, bound)?;
    net.space().check_outcome(o)?;
    net.space().check_outcome(other)?;
    if o == other {
        return Ok(PrefRelation::Same);
    }
    if reaches(net, other, o) {
        Ok(PrefRelation::Better)
    } else if reaches(net, o, other) {
        Ok(PrefRelation::Worse)
    } else {
        Ok(PrefRelation::Incomparable)
    }
}

/// Whether `to` can be reached from `from` by a sequence of improving flips.
///
/// Only attributes that are ancestors (or members) of the set where the two
/// outcomes differ are ever flipped. Any flip on an attribute outside that
/// set can be dropped from a witnessing sequence: the set is closed under
/// parents, so the remaining flips keep their contexts, and the dropped
/// attributes already hold their target values.
fn reaches(net: &CpNet, from: &Outcome, to: &Outcome) -> bool {
    let space = net.space();
    let m = space.len();
    let mut relevant = vec![false; m];
    let mut stack: Vec<AttrIx> = (0..m).filter(|&a| from.get(a) != to.get(a)).collect();
    for &a in &stack {
        relevant[a] = true;
    }
    while let Some(a) = stack.pop() {
        for &p in net.parents(a) {
            if !relevant[p] {
                relevant[p] = true;
                stack.push(p);
            }
        }
    }
    let attrs: Vec<AttrIx> = net
        .topological_order()
        .iter()
        .copied()
        .filter(|&a| relevant[a])
        .collect();

    // Flips strictly lower the penalty, so states at or below the target's
    // penalty cannot lead to it.
    let floor = net.penalty(to);
    if net.penalty(from) <= floor {
        return false;
    }
    let target = space.index_of(to);
    let mut seen: HashSet<u64> = HashSet::from([space.index_of(from)]);
    let mut frontier = vec![from.clone()];
    let mut toward = Vec::new();
    while let Some(cur) = frontier.pop() {
        for &a in &attrs {
            for &v in net.improving_values(&cur, a) {
                let next = cur.with(a, v);
                let code = space.index_of(&next);
                if code == target {
                    return true;
                }
                if net.penalty(&next) <= floor || !seen.insert(code) {
                    continue;
                }
                // flips that match the target are explored first
                if v == to.get(a) {
                    toward.push(next);
                } else {
                    frontier.push(next);
                }
            }
        }
        frontier.append(&mut toward);
    }
    false
}

/// Per-agent memo of dominance answers. Every cache miss is one dominance
/// query; hits and comparisons of an outcome with itself are free.
#[derive(Debug, Clone)]
pub struct DominanceCache {
    bound: u64,
    memo: HashMap<(Outcome, Outcome), PrefRelation>,
    queries: u64,
}

impl DominanceCache {
    pub fn new(bound: u64) -> Self {
        Self {
            bound,
            memo: HashMap::new(),
            queries: 0,
        }
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn queries(&self) -> u64 {
        self.queries
    }

    pub fn compare(&mut self, net: &CpNet, o: &Outcome, other: &Outcome) -> Result<PrefRelation, CpNetError> {
        if o == other {
            return Ok(PrefRelation::Same);
        }
        let (key, flipped) = if o < other {
            ((o.clone(), other.clone()), false)
        } else {
            ((other.clone(), o.clone()), true)
        };
        let rel = match self.memo.get(&key) {
            Some(&rel) => rel,
            None => {
                let rel = compare(net, &key.0, &key.1, self.bound)?;
                self.queries += 1;
                self.memo.insert(key, rel);
                rel
            }
        };
        Ok(if flipped { rel.reverse() } else { rel })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn cache_counts_misses_only() {
        let (n1, _) = fixtures::worked_example();
        let space = n1.space();
        let a = space.outcome_from_labels(&["a", "b", "c"]).unwrap();
        let b = space.outcome_from_labels(&["a~", "b~", "c~"]).unwrap();
        let mut cache = DominanceCache::new(DEFAULT_EXACT_BOUND);
        let r1 = cache.compare(&n1, &a, &b).unwrap();
        let r2 = cache.compare(&n1, &b, &a).unwrap();
        assert_eq!(r1, r2.reverse());
        assert_eq!(cache.compare(&n1, &a, &a).unwrap(), PrefRelation::Same);
        assert_eq!(cache.queries(), 1);
    }

    #[test]
    fn bound_is_a_hard_error() {
        let (n1, _) = fixtures::worked_example();
        let o = n1.optimum();
        let err = n1.compare(&o, &o, 4).unwrap_err();
        assert_eq!(
            err,
            CpNetError::ExactModeExceeded {
                outcomes: Some(8),
                bound: 4
            }
        );
    }
}
