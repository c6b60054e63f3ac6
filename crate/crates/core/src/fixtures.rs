//! The two three-attribute CP-nets of the worked negotiation example.
//!
//! Agent 1: `C -> A`, `C -> B`, `A -> B`; `c` is unconditionally preferred.
//! Agent 2: `B -> C`, `B -> A`, `C -> A`; its induced order is total.
//! With the attribute order `A > B > C` the negotiation takes five
//! iterations and ends with two final agreements, `ab~c` and `a~b~c`.

use std::sync::Arc;

use crate::cpnet::CpNet;
use crate::domain::OutcomeSpace;
use crate::io::CpNetDef;

fn abc() -> CpNetDef {
    CpNetDef::new()
        .attr("A", &["a", "a~"])
        .attr("B", &["b", "b~"])
        .attr("C", &["c", "c~"])
}

pub fn agent1_def() -> CpNetDef {
    abc()
        .edge("C", "A")
        .edge("C", "B")
        .edge("A", "B")
        .row("C", &[], &["c", "c~"])
        .row("A", &[("C", "c")], &["a", "a~"])
        .row("A", &[("C", "c~")], &["a~", "a"])
        .row("B", &[("A", "a"), ("C", "c")], &["b", "b~"])
        .row("B", &[("A", "a"), ("C", "c~")], &["b~", "b"])
        .row("B", &[("A", "a~"), ("C", "c")], &["b~", "b"])
        .row("B", &[("A", "a~"), ("C", "c~")], &["b", "b~"])
}

pub fn agent2_def() -> CpNetDef {
    abc()
        .edge("B", "C")
        .edge("B", "A")
        .edge("C", "A")
        .row("B", &[], &["b~", "b"])
        .row("C", &[("B", "b")], &["c", "c~"])
        .row("C", &[("B", "b~")], &["c~", "c"])
        .row("A", &[("B", "b"), ("C", "c")], &["a", "a~"])
        .row("A", &[("B", "b"), ("C", "c~")], &["a~", "a"])
        .row("A", &[("B", "b~"), ("C", "c")], &["a~", "a"])
        .row("A", &[("B", "b~"), ("C", "c~")], &["a", "a~"])
}

/// Both nets over one shared space.
pub fn worked_example() -> (CpNet, CpNet) {
    let space = Arc::new(OutcomeSpace::binary(&["A", "B", "C"]));
    let n1 = CpNet::from_def_in(&agent1_def(), space.clone()).expect("agent 1 net is valid");
    let n2 = CpNet::from_def_in(&agent2_def(), space).expect("agent 2 net is valid");
    (n1, n2)
}
