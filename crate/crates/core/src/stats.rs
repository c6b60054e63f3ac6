//! Per-run metrics and their batch aggregates.

use serde::Serialize;

/// Metrics of one negotiation. Per-agent counters are indexed by agent.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunStats {
    pub s_attr: usize,
    /// `None` when the outcome count overflows `u128`.
    pub s_os: Option<u128>,
    /// Distinct BPA outcomes each agent considered.
    pub s_out: [u64; 2],
    /// Dominance queries (cache misses) each agent answered.
    pub s_dq: [u64; 2],
    pub s_iter: u32,
    /// Wall-clock seconds spent in the negotiation itself.
    pub s_time: f64,
}

impl RunStats {
    pub fn mean_out(&self) -> f64 {
        (self.s_out[0] + self.s_out[1]) as f64 / 2.0
    }

    pub fn mean_dq(&self) -> f64 {
        (self.s_dq[0] + self.s_dq[1]) as f64 / 2.0
    }

    /// Everything except timing, for determinism checks.
    pub fn without_time(&self) -> Self {
        Self { s_time: 0.0, ..self.clone() }
    }
}

/// Means over a batch of runs sharing one configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatchSummary {
    pub rounds: usize,
    pub s_attr: usize,
    /// Exact when every run had the same outcome-space size, otherwise the
    /// floor of the mean.
    pub s_os: u128,
    pub s_out: f64,
    pub s_dq: f64,
    pub s_iter: f64,
    pub s_time_sec: f64,
}

impl BatchSummary {
    /// Sums in slice order, so the result does not depend on how the runs
    /// were scheduled. Panics on an empty slice.
    pub fn from_runs(runs: &[RunStats]) -> Self {
        assert!(!runs.is_empty(), "cannot summarize zero runs");
        let n = runs.len() as f64;
        let mean = |f: &dyn Fn(&RunStats) -> f64| runs.iter().map(f).sum::<f64>() / n;
        let os_sum = runs
            .iter()
            .map(|r| r.s_os.unwrap_or(u128::MAX))
            .fold(0u128, u128::saturating_add);
        Self {
            rounds: runs.len(),
            s_attr: runs[0].s_attr,
            s_os: os_sum / runs.len() as u128,
            s_out: mean(&|r| r.mean_out()),
            s_dq: mean(&|r| r.mean_dq()),
            s_iter: mean(&|r| r.s_iter as f64),
            s_time_sec: mean(&|r| r.s_time),
        }
    }
}
