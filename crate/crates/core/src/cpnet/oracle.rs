use super::dominance::check_bound;
use super::{CpNet, CpNetError, PrefRelation};
use crate::domain::Outcome;

/// Full dominance relation of one CP-net, indexed by canonical outcome
/// index. Built by transitive closure of the single-flip digraph over the
/// whole outcome space, with no pruning.
#[derive(Debug, Clone)]
pub struct DominanceMatrix {
    n: usize,
    words: usize,
    /// Row `j` holds every outcome strictly preferred to outcome `j`.
    above: Vec<u64>,
}

impl DominanceMatrix {
    pub(super) fn build(net: &CpNet, bound: u64) -> Result<Self, CpNetError> {
        check_bound(net, bound)?;
        let space = net.space();
        let n = space.outcome_count().expect("bounded") as usize;
        let words = n.div_ceil(64);

        let succ: Vec<Vec<usize>> = (0..n)
            .map(|j| {
                let o = space.outcome_at(j as u64);
                let mut out = Vec::new();
                for a in 0..space.len() {
                    for &v in net.improving_values(&o, a) {
                        out.push(space.index_of(&o.with(a, v)) as usize);
                    }
                }
                out
            })
            .collect();

        // postorder DFS so every successor's row is final before its use
        let mut above = vec![0u64; n * words];
        let mut state = vec![0u8; n];
        for root in 0..n {
            if state[root] != 0 {
                continue;
            }
            let mut stack = vec![(root, 0usize)];
            state[root] = 1;
            while let Some(&mut (v, ref mut i)) = stack.last_mut() {
                if let Some(&s) = succ[v].get(*i) {
                    *i += 1;
                    match state[s] {
                        0 => {
                            state[s] = 1;
                            stack.push((s, 0));
                        }
                        1 => unreachable!("improving-flip digraph of an acyclic CP-net has a cycle"),
                        _ => {}
                    }
                } else {
                    stack.pop();
                    state[v] = 2;
                    for &s in &succ[v] {
                        let (dst, src) = if v < s {
                            let (lo, hi) = above.split_at_mut(s * words);
                            (&mut lo[v * words..(v + 1) * words], &hi[..words])
                        } else {
                            let (lo, hi) = above.split_at_mut(v * words);
                            (&mut hi[..words], &lo[s * words..(s + 1) * words])
                        };
                        for (d, s) in dst.iter_mut().zip(src) {
                            *d |= s;
                        }
                        above[v * words + s / 64] |= 1 << (s % 64);
                    }
                }
            }
        }
        Ok(Self { n, words, above })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Whether outcome `i` is strictly preferred to outcome `j`.
    pub fn better(&self, i: usize, j: usize) -> bool {
        self.above[j * self.words + i / 64] >> (i % 64) & 1 == 1
    }

    pub fn relation(&self, i: usize, j: usize) -> PrefRelation {
        if i == j {
            PrefRelation::Same
        } else if self.better(i, j) {
            PrefRelation::Better
        } else if self.better(j, i) {
            PrefRelation::Worse
        } else {
            PrefRelation::Incomparable
        }
    }

    pub fn relation_of(&self, net: &CpNet, o: &Outcome, other: &Outcome) -> PrefRelation {
        let space = net.space();
        self.relation(space.index_of(o) as usize, space.index_of(other) as usize)
    }

    /// Outcomes with nothing strictly above them.
    pub fn maximal(&self) -> Vec<usize> {
        (0..self.n)
            .filter(|&j| self.above[j * self.words..(j + 1) * self.words].iter().all(|&w| w == 0))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::OutcomeSpace;
    use crate::io::CpNetDef;

    #[test]
    fn single_attribute_net() {
        let def = CpNetDef::new().attr("X", &["x", "x~"]).row("X", &[], &["x", "x~"]);
        let net = CpNet::from_def(&def).unwrap();
        let m = net.induced_order(16).unwrap();
        assert_eq!(m.relation(0, 1), PrefRelation::Better);
        assert_eq!(m.relation(1, 0), PrefRelation::Worse);
        assert_eq!(m.maximal(), vec![0]);
    }

    #[test]
    fn worked_example_agent1_has_unique_top() {
        let (n1, n2) = crate::fixtures::worked_example();
        let space: &OutcomeSpace = n1.space();
        let m = n1.induced_order(1 << 14).unwrap();
        let tops: Vec<String> = m.maximal().into_iter().map(|i| space.display(&space.outcome_at(i as u64))).collect();
        assert_eq!(tops, ["abc"]);
        // agent 2's order is total
        let m2 = n2.induced_order(1 << 14).unwrap();
        for i in 0..8 {
            for j in 0..8 {
                assert_ne!(m2.relation(i, j), PrefRelation::Incomparable);
            }
        }
    }
}
