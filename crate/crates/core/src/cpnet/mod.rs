//! Acyclic CP-nets: validation, constrained optimization and exact dominance
//! testing over the induced strict partial order.

mod dominance;
mod oracle;

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::domain::{AttrIx, Attribute, DomainError, Outcome, OutcomeSpace, PartialAssignment, ValueIx};
use crate::io::{CptRowDef, CpNetDef};

pub use dominance::{DominanceCache, DEFAULT_EXACT_BOUND};
pub use oracle::DominanceMatrix;

/// Result of a dominance query `compare(o, o')`, read as "o is ... o'".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PrefRelation {
    Better,
    Worse,
    Incomparable,
    Same,
}

impl PrefRelation {
    pub fn reverse(self) -> Self {
        match self {
            Self::Better => Self::Worse,
            Self::Worse => Self::Better,
            other => other,
        }
    }

    /// `o ⋡ o'`: the first outcome is not strictly preferred to the second.
    pub fn not_better(self) -> bool {
        matches!(self, Self::Worse | Self::Incomparable)
    }
}

/// A structural problem found while validating a CP-net.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    InvalidDomain(String),
    UnknownAttribute(String),
    UnknownValue { attr: String, value: String },
    SelfLoop(String),
    DuplicateEdge { parent: String, child: String },
    Cycle(Vec<String>),
    MissingTable(String),
    ContextMismatch { attr: String, detail: String },
    DuplicateContext { attr: String, context: String },
    MissingContext { attr: String, context: String },
    RowNotTotal { attr: String, context: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::InvalidDomain(msg) => write!(f, "invalid domain: {msg}"),
            Self::UnknownAttribute(a) => write!(f, "unknown attribute `{a}`"),
            Self::UnknownValue { attr, value } => write!(f, "unknown value `{value}` for attribute `{attr}`"),
            Self::SelfLoop(a) => write!(f, "cycle: self-loop on `{a}`"),
            Self::DuplicateEdge { parent, child } => write!(f, "duplicate edge {parent} -> {child}"),
            Self::Cycle(attrs) => write!(f, "cycle through {}", attrs.join(" -> ")),
            Self::MissingTable(a) => write!(f, "incomplete CPT: no table for `{a}`"),
            Self::ContextMismatch { attr, detail } => write!(f, "CPT row for `{attr}`: {detail}"),
            Self::DuplicateContext { attr, context } => {
                write!(f, "CPT for `{attr}` repeats context {{{context}}}")
            }
            Self::MissingContext { attr, context } => {
                write!(f, "incomplete CPT: `{attr}` has no row for context {{{context}}}")
            }
            Self::RowNotTotal { attr, context } => write!(
                f,
                "CPT row for `{attr}` under {{{context}}} is not a strict total order over its domain"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CpNetError {
    #[error("invalid CP-net: {}", join_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("outcome space of {} outcomes exceeds the exact-mode bound of {bound}", fmt_count(*.outcomes))]
    ExactModeExceeded { outcomes: Option<u128>, bound: u64 },
    #[error("CP-nets are defined over different outcome spaces")]
    SpaceMismatch,
    #[error(transparent)]
    Domain(#[from] DomainError),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

fn fmt_count(n: Option<u128>) -> String {
    n.map_or_else(|| "more than 2^128".to_string(), |n| n.to_string())
}

/// An acyclic CP-net over a shared outcome space. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CpNet {
    space: Arc<OutcomeSpace>,
    parents: Vec<Vec<AttrIx>>,
    children: Vec<Vec<AttrIx>>,
    /// `rows[x][ctx]`: values of `x` from best to worst under parent context `ctx`.
    rows: Vec<Vec<Vec<ValueIx>>>,
    /// `ranks[x][ctx][v]`: position of `v` in `rows[x][ctx]`.
    ranks: Vec<Vec<Vec<u16>>>,
    topo: Vec<AttrIx>,
    /// Penalty weight per attribute; see [`CpNet::penalty`].
    weights: Vec<u128>,
}

impl CpNet {
    /// Builds a net from index-level parts. `parents[x]` is sorted and
    /// deduplicated here; `rows[x]` is indexed by parent context, with the
    /// first parent (in canonical order) most significant.
    pub fn new(
        space: Arc<OutcomeSpace>,
        parents: Vec<Vec<AttrIx>>,
        rows: Vec<Vec<Vec<ValueIx>>>,
    ) -> Result<Self, CpNetError> {
        let m = space.len();
        let name = |a: AttrIx| space.attribute(a).name.clone();
        let mut violations = Vec::new();
        if parents.len() != m || rows.len() != m {
            return Err(CpNetError::Invalid(vec![Violation::ContextMismatch {
                attr: "*".into(),
                detail: format!("expected {m} parent lists and tables"),
            }]));
        }
        let mut parents = parents;
        for (x, ps) in parents.iter_mut().enumerate() {
            ps.sort_unstable();
            let before = ps.len();
            ps.dedup();
            if ps.len() != before {
                violations.push(Violation::DuplicateEdge {
                    parent: "?".into(),
                    child: name(x),
                });
            }
            for &p in ps.iter() {
                if p >= m {
                    violations.push(Violation::UnknownAttribute(format!("#{p}")));
                } else if p == x {
                    violations.push(Violation::SelfLoop(name(x)));
                }
            }
        }
        if !violations.is_empty() {
            return Err(CpNetError::Invalid(violations));
        }
        let topo = match topological_order(&parents) {
            Ok(t) => t,
            Err(cycle) => {
                return Err(CpNetError::Invalid(vec![Violation::Cycle(
                    cycle.into_iter().map(name).collect(),
                )]))
            }
        };
        for x in 0..m {
            let k = space.domain_size(x);
            let contexts: usize = parents[x].iter().map(|&p| space.domain_size(p)).product();
            if rows[x].len() != contexts {
                violations.push(Violation::ContextMismatch {
                    attr: name(x),
                    detail: format!("expected {contexts} rows, found {}", rows[x].len()),
                });
                continue;
            }
            for (ctx, row) in rows[x].iter().enumerate() {
                if !is_permutation(row, k) {
                    violations.push(Violation::RowNotTotal {
                        attr: name(x),
                        context: context_label(&space, &parents[x], ctx),
                    });
                }
            }
        }
        if !violations.is_empty() {
            return Err(CpNetError::Invalid(violations));
        }
        let ranks = rows
            .iter()
            .enumerate()
            .map(|(x, table)| {
                table
                    .iter()
                    .map(|row| {
                        let mut rank = vec![0u16; space.domain_size(x)];
                        for (pos, &v) in row.iter().enumerate() {
                            rank[v as usize] = pos as u16;
                        }
                        rank
                    })
                    .collect()
            })
            .collect();
        let mut children = vec![Vec::new(); m];
        for (x, ps) in parents.iter().enumerate() {
            for &p in ps {
                children[p].push(x);
            }
        }
        let mut weights = vec![0u128; m];
        for &x in topo.iter().rev() {
            weights[x] = children[x].iter().fold(1u128, |w, &c| {
                w.saturating_add(weights[c].saturating_mul(space.domain_size(c) as u128 - 1))
            });
        }
        Ok(Self {
            space,
            parents,
            children,
            rows,
            ranks,
            topo,
            weights,
        })
    }

    /// Lowers a file-level definition, collecting every violation found.
    pub fn from_def(def: &CpNetDef) -> Result<Self, CpNetError> {
        lower(def, None)
    }

    /// Like [`CpNet::from_def`], but shares `space` (which must match the
    /// definition's attributes exactly).
    pub fn from_def_in(def: &CpNetDef, space: Arc<OutcomeSpace>) -> Result<Self, CpNetError> {
        lower(def, Some(space))
    }

    pub fn to_def(&self) -> CpNetDef {
        let space = &self.space;
        let mut def = CpNetDef {
            attributes: space
                .attributes()
                .iter()
                .map(|a| crate::io::AttributeDef {
                    name: a.name.clone(),
                    values: a.values.clone(),
                })
                .collect(),
            edges: Vec::new(),
            cpt: BTreeMap::new(),
        };
        for x in 0..space.len() {
            for &p in &self.parents[x] {
                def.edges.push((space.attribute(p).name.clone(), space.attribute(x).name.clone()));
            }
            let table = self.rows[x]
                .iter()
                .enumerate()
                .map(|(ctx, row)| CptRowDef {
                    given: self
                        .decode_context(x, ctx)
                        .into_iter()
                        .map(|(p, v)| {
                            let a = space.attribute(p);
                            (a.name.clone(), a.values[v as usize].clone())
                        })
                        .collect(),
                    order: row
                        .iter()
                        .map(|&v| space.attribute(x).values[v as usize].clone())
                        .collect(),
                })
                .collect();
            def.cpt.insert(space.attribute(x).name.clone(), table);
        }
        def
    }

    pub fn space(&self) -> &OutcomeSpace {
        &self.space
    }

    pub fn shared_space(&self) -> &Arc<OutcomeSpace> {
        &self.space
    }

    pub fn parents(&self, attr: AttrIx) -> &[AttrIx] {
        &self.parents[attr]
    }

    pub fn children(&self, attr: AttrIx) -> &[AttrIx] {
        &self.children[attr]
    }

    /// Topological order of the dependency graph, roots first, ties broken by
    /// canonical attribute order.
    pub fn topological_order(&self) -> &[AttrIx] {
        &self.topo
    }

    pub fn edge_count(&self) -> usize {
        self.parents.iter().map(Vec::len).sum()
    }

    /// Row of `attr` selected by the parent values found in `value_of`.
    pub fn context_index(&self, attr: AttrIx, value_of: impl Fn(AttrIx) -> ValueIx) -> usize {
        self.parents[attr].iter().fold(0usize, |acc, &p| {
            acc * self.space.domain_size(p) + value_of(p) as usize
        })
    }

    fn decode_context(&self, attr: AttrIx, mut ctx: usize) -> Vec<(AttrIx, ValueIx)> {
        let mut out = Vec::with_capacity(self.parents[attr].len());
        for &p in self.parents[attr].iter().rev() {
            let k = self.space.domain_size(p);
            out.push((p, (ctx % k) as ValueIx));
            ctx /= k;
        }
        out.reverse();
        out
    }

    /// Preference order of `attr`'s values under context `ctx`, best first.
    pub fn row(&self, attr: AttrIx, ctx: usize) -> &[ValueIx] {
        &self.rows[attr][ctx]
    }

    pub fn rank(&self, attr: AttrIx, ctx: usize, value: ValueIx) -> u16 {
        self.ranks[attr][ctx][value as usize]
    }

    /// Weighted sum of each attribute's rank in its row under `o`, with
    /// weights `w(x) = 1 + sum over children c of w(c) * (|D(c)| - 1)`.
    /// Every improving flip lowers it by at least one.
    pub fn penalty(&self, o: &Outcome) -> u128 {
        (0..self.space.len())
            .map(|x| {
                let ctx = self.context_index(x, |p| o.get(p));
                self.weights[x].saturating_mul(self.ranks[x][ctx][o.get(x) as usize] as u128)
            })
            .fold(0u128, u128::saturating_add)
    }

    /// Values `attr` could be flipped to from its value in `o` that are
    /// strictly better under `o`'s parent context.
    pub fn improving_values<'a>(&'a self, o: &Outcome, attr: AttrIx) -> &'a [ValueIx] {
        let ctx = self.context_index(attr, |p| o.get(p));
        let rank = self.ranks[attr][ctx][o.get(attr) as usize] as usize;
        &self.rows[attr][ctx][..rank]
    }

    /// Best outcome among the completions of `x`: a sweep in topological
    /// order binding each free attribute to its top value given its parents.
    pub fn optimal_completion(&self, x: &PartialAssignment) -> Result<Outcome, CpNetError> {
        self.space.check_assignment(x)?;
        let mut values: Vec<ValueIx> = x.slots().iter().map(|v| v.unwrap_or(0)).collect();
        for &attr in &self.topo {
            if !x.is_bound(attr) {
                let ctx = self.context_index(attr, |p| values[p]);
                values[attr] = self.rows[attr][ctx][0];
            }
        }
        Ok(Outcome::new(values))
    }

    /// Global optimum of the net.
    pub fn optimum(&self) -> Outcome {
        self.optimal_completion(&self.space.empty_assignment())
            .expect("empty assignment is always valid")
    }

    /// True when `o` admits no improving flip.
    pub fn is_undominated(&self, o: &Outcome) -> bool {
        (0..self.space.len()).all(|a| self.improving_values(o, a).is_empty())
    }

    /// Exact dominance query, uncached. Fails when `|O|` exceeds `bound`.
    pub fn compare(&self, o: &Outcome, other: &Outcome, bound: u64) -> Result<PrefRelation, CpNetError> {
        dominance::compare(self, o, other, bound)
    }

    /// Materializes the whole induced order by reachability over the full
    /// improving-flip digraph.
    pub fn induced_order(&self, bound: u64) -> Result<DominanceMatrix, CpNetError> {
        DominanceMatrix::build(self, bound)
    }
}

/// Every violation in `def`; empty when the net is valid.
pub fn validate(def: &CpNetDef) -> Vec<Violation> {
    match lower(def, None) {
        Ok(_) => Vec::new(),
        Err(CpNetError::Invalid(v)) => v,
        Err(other) => vec![Violation::InvalidDomain(other.to_string())],
    }
}

fn is_permutation(row: &[ValueIx], k: usize) -> bool {
    if row.len() != k {
        return false;
    }
    let mut seen = vec![false; k];
    row.iter().all(|&v| {
        let v = v as usize;
        v < k && !std::mem::replace(&mut seen[v], true)
    })
}

fn context_label(space: &OutcomeSpace, parents: &[AttrIx], mut ctx: usize) -> String {
    let mut parts = Vec::with_capacity(parents.len());
    for &p in parents.iter().rev() {
        let k = space.domain_size(p);
        let a = space.attribute(p);
        parts.push(format!("{}={}", a.name, a.values[ctx % k]));
        ctx /= k;
    }
    parts.reverse();
    parts.join(",")
}

/// Kahn's algorithm with a min-heap on attribute index. On failure returns
/// the attributes left on some cycle.
fn topological_order(parents: &[Vec<AttrIx>]) -> Result<Vec<AttrIx>, Vec<AttrIx>> {
    use std::cmp::Reverse;
    use std::collections::BinaryHeap;

    let m = parents.len();
    let mut indegree: Vec<usize> = parents.iter().map(Vec::len).collect();
    let mut children = vec![Vec::new(); m];
    for (x, ps) in parents.iter().enumerate() {
        for &p in ps {
            children[p].push(x);
        }
    }
    let mut ready: BinaryHeap<Reverse<AttrIx>> = (0..m).filter(|&x| indegree[x] == 0).map(Reverse).collect();
    let mut order = Vec::with_capacity(m);
    while let Some(Reverse(x)) = ready.pop() {
        order.push(x);
        for &c in &children[x] {
            indegree[c] -= 1;
            if indegree[c] == 0 {
                ready.push(Reverse(c));
            }
        }
    }
    if order.len() == m {
        return Ok(order);
    }
    // walk parent links among the leftovers until a node repeats
    let left: HashSet<AttrIx> = (0..m).filter(|x| indegree[*x] > 0).collect();
    let start = *left.iter().min().expect("leftover nodes exist");
    let mut path = vec![start];
    let mut on_path = HashSet::from([start]);
    let mut cur = start;
    loop {
        let next = *parents[cur]
            .iter()
            .find(|p| left.contains(p))
            .expect("every leftover node has a leftover parent");
        if on_path.contains(&next) {
            let from = path.iter().position(|&x| x == next).unwrap();
            let mut cycle: Vec<AttrIx> = path[from..].to_vec();
            cycle.reverse();
            cycle.push(cycle[0]);
            return Err(cycle);
        }
        path.push(next);
        on_path.insert(next);
        cur = next;
    }
}

fn lower(def: &CpNetDef, shared: Option<Arc<OutcomeSpace>>) -> Result<CpNet, CpNetError> {
    let attributes: Vec<Attribute> = def
        .attributes
        .iter()
        .map(|a| Attribute::new(a.name.clone(), a.values.clone()))
        .collect();
    let space = match shared {
        Some(space) => {
            if space.attributes() != attributes.as_slice() {
                return Err(CpNetError::SpaceMismatch);
            }
            space
        }
        None => match OutcomeSpace::new(attributes) {
            Ok(s) => Arc::new(s),
            Err(e) => return Err(CpNetError::Invalid(vec![Violation::InvalidDomain(e.to_string())])),
        },
    };
    let m = space.len();
    let mut violations = Vec::new();

    let mut parents: Vec<BTreeSet<AttrIx>> = vec![BTreeSet::new(); m];
    for (p, c) in &def.edges {
        let (pi, ci) = (space.attr_index(p), space.attr_index(c));
        match (pi, ci) {
            (Some(pi), Some(ci)) => {
                if pi == ci {
                    violations.push(Violation::SelfLoop(p.clone()));
                } else if !parents[ci].insert(pi) {
                    violations.push(Violation::DuplicateEdge {
                        parent: p.clone(),
                        child: c.clone(),
                    });
                }
            }
            _ => {
                for (name, ix) in [(p, pi), (c, ci)] {
                    if ix.is_none() {
                        violations.push(Violation::UnknownAttribute(name.clone()));
                    }
                }
            }
        }
    }
    let parents: Vec<Vec<AttrIx>> = parents.into_iter().map(|s| s.into_iter().collect()).collect();
    if violations.iter().all(|v| !matches!(v, Violation::SelfLoop(_))) {
        if let Err(cycle) = topological_order(&parents) {
            violations.push(Violation::Cycle(
                cycle.into_iter().map(|a| space.attribute(a).name.clone()).collect(),
            ));
        }
    }

    for name in def.cpt.keys() {
        if space.attr_index(name).is_none() {
            violations.push(Violation::UnknownAttribute(name.clone()));
        }
    }

    let mut rows: Vec<Vec<Vec<ValueIx>>> = Vec::with_capacity(m);
    for x in 0..m {
        let attr = space.attribute(x);
        let contexts: usize = parents[x].iter().map(|&p| space.domain_size(p)).product();
        let Some(table) = def.cpt.get(&attr.name) else {
            violations.push(Violation::MissingTable(attr.name.clone()));
            rows.push(Vec::new());
            continue;
        };
        let mut slots: Vec<Option<Vec<ValueIx>>> = vec![None; contexts];
        for row in table {
            let Some(ctx) = row_context(&space, &parents[x], x, row, &mut violations) else {
                continue;
            };
            let label = context_label(&space, &parents[x], ctx);
            if slots[ctx].is_some() {
                violations.push(Violation::DuplicateContext {
                    attr: attr.name.clone(),
                    context: label,
                });
                continue;
            }
            let mut order = Vec::with_capacity(row.order.len());
            let mut ok = true;
            for v in &row.order {
                match space.value_index(x, v) {
                    Some(v) => order.push(v),
                    None => {
                        ok = false;
                        violations.push(Violation::UnknownValue {
                            attr: attr.name.clone(),
                            value: v.clone(),
                        });
                    }
                }
            }
            if ok && !is_permutation(&order, attr.domain_size()) {
                violations.push(Violation::RowNotTotal {
                    attr: attr.name.clone(),
                    context: label,
                });
                ok = false;
            }
            slots[ctx] = Some(if ok { order } else { Vec::new() });
        }
        for (ctx, slot) in slots.iter().enumerate() {
            if slot.is_none() {
                violations.push(Violation::MissingContext {
                    attr: attr.name.clone(),
                    context: context_label(&space, &parents[x], ctx),
                });
            }
        }
        rows.push(slots.into_iter().map(Option::unwrap_or_default).collect());
    }

    if !violations.is_empty() {
        return Err(CpNetError::Invalid(violations));
    }
    CpNet::new(space, parents, rows)
}

fn row_context(
    space: &OutcomeSpace,
    parents: &[AttrIx],
    x: AttrIx,
    row: &CptRowDef,
    violations: &mut Vec<Violation>,
) -> Option<usize> {
    let attr = &space.attribute(x).name;
    let expected: BTreeSet<&str> = parents.iter().map(|&p| space.attribute(p).name.as_str()).collect();
    let given: BTreeSet<&str> = row.given.keys().map(String::as_str).collect();
    if expected != given {
        violations.push(Violation::ContextMismatch {
            attr: attr.clone(),
            detail: format!(
                "context binds {{{}}} but parents are {{{}}}",
                given.into_iter().collect::<Vec<_>>().join(","),
                expected.into_iter().collect::<Vec<_>>().join(",")
            ),
        });
        return None;
    }
    let mut ctx = 0usize;
    for &p in parents {
        let pa = space.attribute(p);
        let label = &row.given[&pa.name];
        let Some(v) = space.value_index(p, label) else {
            violations.push(Violation::UnknownValue {
                attr: pa.name.clone(),
                value: label.clone(),
            });
            return None;
        };
        ctx = ctx * pa.domain_size() + v as usize;
    }
    Some(ctx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn worked_example_nets_validate() {
        assert!(validate(&fixtures::agent1_def()).is_empty());
        assert!(validate(&fixtures::agent2_def()).is_empty());
        let n1 = CpNet::from_def(&fixtures::agent1_def()).unwrap();
        // C, A, B
        assert_eq!(n1.topological_order(), &[2, 0, 1]);
        assert_eq!(n1.parents(1), &[0, 2]);
    }

    #[test]
    fn self_loop_is_a_cycle_violation() {
        let def = CpNetDef::new()
            .attr("A", &["a", "a~"])
            .edge("A", "A")
            .row("A", &[("A", "a")], &["a", "a~"])
            .row("A", &[("A", "a~")], &["a", "a~"]);
        let v = validate(&def);
        assert!(v.iter().any(|v| matches!(v, Violation::SelfLoop(a) if a == "A")), "{v:?}");
    }

    #[test]
    fn longer_cycle_is_reported() {
        let def = CpNetDef::new()
            .attr("A", &["a", "a~"])
            .attr("B", &["b", "b~"])
            .edge("A", "B")
            .edge("B", "A")
            .row("A", &[("B", "b")], &["a", "a~"])
            .row("A", &[("B", "b~")], &["a", "a~"])
            .row("B", &[("A", "a")], &["b", "b~"])
            .row("B", &[("A", "a~")], &["b", "b~"]);
        let v = validate(&def);
        assert!(v.iter().any(|v| matches!(v, Violation::Cycle(c) if c.len() == 3)), "{v:?}");
    }

    #[test]
    fn missing_context_is_reported() {
        let mut def = fixtures::agent1_def();
        def.cpt
            .get_mut("B")
            .unwrap()
            .retain(|r| !(r.given["A"] == "a" && r.given["C"] == "c~"));
        let v = validate(&def);
        assert_eq!(
            v,
            vec![Violation::MissingContext {
                attr: "B".into(),
                context: "A=a,C=c~".into()
            }]
        );
        assert!(v[0].to_string().contains("incomplete CPT"));
    }

    #[test]
    fn non_total_row_and_unknown_names() {
        let def = CpNetDef::new()
            .attr("A", &["a1", "a2", "a3"])
            .edge("Z", "A")
            .row("A", &[], &["a1", "a2"]);
        let v = validate(&def);
        assert!(v.contains(&Violation::UnknownAttribute("Z".into())));
        assert!(v.iter().any(|v| matches!(v, Violation::RowNotTotal { .. })));
    }

    #[test]
    fn optimal_completion_matches_worked_example() {
        let (n1, n2) = fixtures::worked_example();
        let space = n1.space();
        let x = space.assignment([("A", "a")]).unwrap();
        assert_eq!(space.display(&n1.optimal_completion(&x).unwrap()), "abc");
        assert_eq!(space.display(&n2.optimal_completion(&x).unwrap()), "ab~c~");
        let o = space.outcome_from_labels(&["a~", "b", "c~"]).unwrap();
        assert_eq!(n1.optimal_completion(&PartialAssignment::from(&o)).unwrap(), o);
    }

    #[test]
    fn single_flip_dominance() {
        let (n1, _) = fixtures::worked_example();
        let space = n1.space();
        let abc = space.outcome_from_labels(&["a", "b", "c"]).unwrap();
        let abc_ = space.outcome_from_labels(&["a", "b", "c~"]).unwrap();
        assert_eq!(n1.compare(&abc, &abc_, 1 << 14).unwrap(), PrefRelation::Better);
        assert_eq!(n1.compare(&abc_, &abc, 1 << 14).unwrap(), PrefRelation::Worse);
        assert_eq!(n1.compare(&abc, &abc, 1 << 14).unwrap(), PrefRelation::Same);
    }

    #[test]
    fn def_roundtrip_preserves_net() {
        let (n1, n2) = fixtures::worked_example();
        for n in [n1, n2] {
            let back = CpNet::from_def(&n.to_def()).unwrap();
            assert_eq!(back, n);
        }
    }
}
