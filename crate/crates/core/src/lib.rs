//! Bilateral negotiation over combinatorial domains where each agent's
//! preferences are a private acyclic CP-net.
//!
//! - [`domain`]: outcome spaces and (partial) assignments.
//! - [`cpnet`]: CP-nets, optimal completion and exact dominance.
//! - [`protocol`]: the negotiation-tree protocol and its enhancement phase.
//! - [`pareto`]: brute-force weak/strict Pareto checks.
//! - [`generator`]: seeded random instances.
//! - [`harness`], [`stats`], [`io`]: batch runs, metrics and file formats.

pub mod cpnet;
pub mod domain;
pub mod fixtures;
pub mod generator;
pub mod harness;
pub mod io;
pub mod pareto;
pub mod protocol;
pub mod stats;

pub use cpnet::{CpNet, CpNetError, PrefRelation};
pub use domain::{Outcome, OutcomeSpace, PartialAssignment};
pub use protocol::{negotiate, negotiate_with_order, FinalResult, ProtocolOptions};
