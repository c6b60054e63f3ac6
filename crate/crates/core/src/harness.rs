//! Batch experiments and oracle verification over generated instances.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::cpnet::{CpNet, CpNetError};
use crate::generator::{random_instance, GenConfig, GenError};
use crate::io::trace_to_string;
use crate::pareto::ParetoOracle;
use crate::protocol::{negotiate, AgreementSource, FinalResult, ProtocolError, ProtocolOptions};
use crate::stats::{BatchSummary, RunStats};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("round with seed {seed} failed: {source}")]
    Run {
        seed: u64,
        #[source]
        source: ProtocolError,
    },
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error(
        "outcome space of {outcomes} exceeds the oracle bound of {bound}; shrink --attrs or --domain-max, or raise --oracle-bound"
    )]
    OracleBound { outcomes: String, bound: u64 },
    #[error("rounds must be at least 1")]
    NoRounds,
    #[error("failed writing counterexample: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BatchConfig {
    pub gen: GenConfig,
    pub rounds: usize,
    pub seed: u64,
    pub options: ProtocolOptions,
}

/// Per-round seeds drawn from one master stream.
pub fn round_seeds(seed: u64, rounds: usize) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..rounds).map(|_| rng.gen()).collect()
}

/// Generates the instance for `seed` and negotiates it with the same seed.
pub fn run_round(gen: &GenConfig, seed: u64, options: ProtocolOptions) -> Result<([Arc<CpNet>; 2], FinalResult), HarnessError> {
    let [a, b] = random_instance(gen, seed)?;
    let nets = [Arc::new(a), Arc::new(b)];
    let result = negotiate(nets.clone(), seed, options).map_err(|source| HarnessError::Run { seed, source })?;
    Ok((nets, result))
}

/// Runs every round (in parallel) and returns per-round stats in round order.
pub fn batch_runs(cfg: &BatchConfig) -> Result<Vec<RunStats>, HarnessError> {
    if cfg.rounds == 0 {
        return Err(HarnessError::NoRounds);
    }
    cfg.gen.validate()?;
    round_seeds(cfg.seed, cfg.rounds)
        .into_par_iter()
        .map(|seed| run_round(&cfg.gen, seed, cfg.options).map(|(_, r)| r.stats))
        .collect()
}

pub fn batch(cfg: &BatchConfig) -> Result<BatchSummary, HarnessError> {
    Ok(BatchSummary::from_runs(&batch_runs(cfg)?))
}

/// One round that failed an oracle check.
#[derive(Debug, Clone)]
pub struct Counterexample {
    pub seed: u64,
    pub chosen_po: bool,
    pub agreements_wpo: bool,
    pub nets: [String; 2],
    pub trace: String,
}

#[derive(Debug, Clone, Default)]
pub struct VerifyReport {
    pub rounds: usize,
    /// Rounds whose chosen outcome is Pareto-optimal.
    pub po_pass: usize,
    /// Rounds where every agreement-node outcome is weakly Pareto-optimal.
    pub wpo_pass: usize,
    /// Rounds where every member of the final set is Pareto-optimal.
    pub final_set_po_pass: usize,
    /// Rounds whose phase-1 iteration count stayed within the full tree size.
    pub within_iteration_bound: usize,
    pub counterexamples: Vec<Counterexample>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.po_pass == self.rounds && self.wpo_pass == self.rounds
    }
}

struct RoundCheck {
    chosen_po: bool,
    final_po: bool,
    wpo: bool,
    bounded: bool,
    example: Option<Counterexample>,
}

/// Checks each round's outcomes against the brute-force Pareto frontier.
pub fn verify(cfg: &BatchConfig, oracle_bound: u64) -> Result<VerifyReport, HarnessError> {
    if cfg.rounds == 0 {
        return Err(HarnessError::NoRounds);
    }
    cfg.gen.validate()?;
    let checks: Vec<RoundCheck> = round_seeds(cfg.seed, cfg.rounds)
        .into_par_iter()
        .map(|seed| check_round(&cfg.gen, seed, cfg.options, oracle_bound))
        .collect::<Result<_, _>>()?;
    let mut report = VerifyReport {
        rounds: cfg.rounds,
        ..Default::default()
    };
    for c in checks {
        report.po_pass += c.chosen_po as usize;
        report.final_set_po_pass += c.final_po as usize;
        report.wpo_pass += c.wpo as usize;
        report.within_iteration_bound += c.bounded as usize;
        report.counterexamples.extend(c.example);
    }
    Ok(report)
}

fn check_round(gen: &GenConfig, seed: u64, options: ProtocolOptions, oracle_bound: u64) -> Result<RoundCheck, HarnessError> {
    let (nets, result) = run_round(gen, seed, options)?;
    let oracle = ParetoOracle::new(&[&nets[0], &nets[1]], oracle_bound).map_err(|e| match e {
        CpNetError::ExactModeExceeded { outcomes, bound } => HarnessError::OracleBound {
            outcomes: outcomes.map_or_else(|| "more than 2^128".into(), |n| n.to_string()),
            bound,
        },
        other => HarnessError::Run {
            seed,
            source: other.into(),
        },
    })?;
    let chosen_po = oracle.is_po(&result.chosen);
    let final_po = result.agreements.iter().all(|o| oracle.is_po(o));
    let wpo = result
        .initial
        .iter()
        .filter(|a| matches!(a.source, AgreementSource::AgreementNode(_)))
        .all(|a| oracle.is_wpo(&a.outcome));
    let space = nets[0].space();
    let bounded = (result.stats.s_iter as u128) <= crate::protocol::full_tree_size(space, &result.order);
    let example = (!chosen_po || !wpo).then(|| Counterexample {
        seed,
        chosen_po,
        agreements_wpo: wpo,
        nets: [nets[0].to_def().to_json(), nets[1].to_def().to_json()],
        trace: trace_to_string(&result.trace, space),
    });
    Ok(RoundCheck {
        chosen_po,
        final_po,
        wpo,
        bounded,
        example,
    })
}

/// Writes `seed-<seed>-agent{1,2}.json` and `seed-<seed>.trace.ndjson`.
pub fn dump_counterexample(dir: &Path, cx: &Counterexample) -> std::io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for (i, net) in cx.nets.iter().enumerate() {
        let p = dir.join(format!("seed-{}-agent{}.json", cx.seed, i + 1));
        fs::write(&p, net)?;
        written.push(p);
    }
    let p = dir.join(format!("seed-{}.trace.ndjson", cx.seed));
    fs::write(&p, &cx.trace)?;
    written.push(p);
    Ok(written)
}
