//! Seeded random CP-net instances: directed-path singly connected graphs
//! with bounded in-degree and uniformly random CPT rows.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::cpnet::CpNet;
use crate::domain::{AttrIx, Attribute, OutcomeSpace, ValueIx};

pub const MAX_IN_DEGREE: usize = 5;
pub const MAX_DOMAIN_SIZE: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("invalid generator configuration: {0}")]
    Config(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainRule {
    Binary,
    /// Every attribute has exactly this many values.
    Fixed(usize),
    /// Each attribute draws its size uniformly from `2..=max`.
    Uniform { max: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenConfig {
    pub attrs: usize,
    pub domain: DomainRule,
    pub max_in_degree: usize,
    /// Chance that a candidate edge is proposed at all.
    pub edge_probability: f64,
}

impl GenConfig {
    pub fn binary(attrs: usize) -> Self {
        Self {
            attrs,
            domain: DomainRule::Binary,
            max_in_degree: MAX_IN_DEGREE,
            edge_probability: 0.5,
        }
    }

    pub fn validate(&self) -> Result<(), GenError> {
        if self.attrs == 0 {
            return Err(GenError::Config("need at least one attribute".into()));
        }
        if self.max_in_degree > MAX_IN_DEGREE {
            return Err(GenError::Config(format!("max in-degree is capped at {MAX_IN_DEGREE}")));
        }
        let size = match self.domain {
            DomainRule::Binary => 2,
            DomainRule::Fixed(k) => k,
            DomainRule::Uniform { max } => max,
        };
        if !(2..=MAX_DOMAIN_SIZE).contains(&size) {
            return Err(GenError::Config(format!(
                "domain size {size} outside 2..={MAX_DOMAIN_SIZE}"
            )));
        }
        if !(0.0..=1.0).contains(&self.edge_probability) {
            return Err(GenError::Config("edge probability must lie in [0, 1]".into()));
        }
        Ok(())
    }
}

/// Attributes `X1..Xm`; binary values are `x1`/`x1~`, larger domains
/// `x1_1..x1_k`.
pub fn random_space(cfg: &GenConfig, rng: &mut impl Rng) -> Result<OutcomeSpace, GenError> {
    cfg.validate()?;
    let attributes = (1..=cfg.attrs)
        .map(|i| {
            let k = match cfg.domain {
                DomainRule::Binary => 2,
                DomainRule::Fixed(k) => k,
                DomainRule::Uniform { max } => rng.gen_range(2..=max),
            };
            let name = format!("X{i}");
            let values: Vec<String> = if k == 2 {
                vec![format!("x{i}"), format!("x{i}~")]
            } else {
                (1..=k).map(|v| format!("x{i}_{v}")).collect()
            };
            Attribute::new(name, values)
        })
        .collect();
    OutcomeSpace::new(attributes).map_err(|e| GenError::Config(e.to_string()))
}

/// Random net over `space`. Candidate edges follow a random topological
/// order, are visited in random order and are each proposed with
/// `edge_probability`; an edge is kept only if the child's in-degree stays
/// within bounds and no ordered pair gains a second directed path.
pub fn random_cpnet(cfg: &GenConfig, space: Arc<OutcomeSpace>, rng: &mut impl Rng) -> Result<CpNet, GenError> {
    cfg.validate()?;
    let m = space.len();
    let mut order: Vec<AttrIx> = (0..m).collect();
    order.shuffle(rng);

    let mut pairs: Vec<(AttrIx, AttrIx)> = Vec::with_capacity(m * m.saturating_sub(1) / 2);
    for i in 0..m {
        for j in i + 1..m {
            pairs.push((order[i], order[j]));
        }
    }
    pairs.shuffle(rng);

    let mut parents: Vec<Vec<AttrIx>> = vec![Vec::new(); m];
    // reach[a][b]: a directed path a -> b exists
    let mut reach = vec![vec![false; m]; m];
    for (u, v) in pairs {
        if !rng.gen_bool(cfg.edge_probability) {
            continue;
        }
        if parents[v].len() >= cfg.max_in_degree {
            continue;
        }
        let sources: Vec<AttrIx> = (0..m).filter(|&a| a == u || reach[a][u]).collect();
        let sinks: Vec<AttrIx> = (0..m).filter(|&b| b == v || reach[v][b]).collect();
        if sources.iter().any(|&a| sinks.iter().any(|&b| reach[a][b])) {
            continue;
        }
        parents[v].push(u);
        for &a in &sources {
            for &b in &sinks {
                reach[a][b] = true;
            }
        }
    }
    for ps in &mut parents {
        ps.sort_unstable();
    }

    let rows: Vec<Vec<Vec<ValueIx>>> = (0..m)
        .map(|x| {
            let contexts: usize = parents[x].iter().map(|&p| space.domain_size(p)).product();
            (0..contexts)
                .map(|_| {
                    let mut row: Vec<ValueIx> = (0..space.domain_size(x) as ValueIx).collect();
                    row.shuffle(rng);
                    row
                })
                .collect()
        })
        .collect();
    CpNet::new(space, parents, rows).map_err(|e| GenError::Config(format!("generated an invalid net: {e}")))
}

/// Two agents' nets over one freshly drawn space, deterministic in `seed`.
pub fn random_instance(cfg: &GenConfig, seed: u64) -> Result<[CpNet; 2], GenError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let space = Arc::new(random_space(cfg, &mut rng)?);
    let a = random_cpnet(cfg, space.clone(), &mut rng)?;
    let b = random_cpnet(cfg, space, &mut rng)?;
    Ok([a, b])
}

/// Largest number of distinct directed paths between any ordered pair of
/// attributes.
pub fn max_path_count(net: &CpNet) -> u64 {
    let m = net.space().len();
    let topo = net.topological_order();
    let mut worst = 0;
    for s in 0..m {
        let mut paths = vec![0u64; m];
        paths[s] = 1;
        for &x in topo {
            if x == s {
                continue;
            }
            paths[x] = net.parents(x).iter().map(|&p| paths[p]).fold(0u64, u64::saturating_add);
        }
        worst = (0..m).filter(|&t| t != s).map(|t| paths[t]).fold(worst, u64::max);
    }
    worst
}
