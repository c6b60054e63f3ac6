//! Combinatorial outcome spaces: attributes with finite domains, partial
//! assignments over them, and complete assignments (outcomes).
//!
//! Attributes and values are addressed by index. The attribute order of an
//! [`OutcomeSpace`] is its canonical order, and outcomes compare
//! lexicographically by value index in that order. That ordering is the
//! deterministic tie-break used everywhere downstream.

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

/// Index of an attribute within its [`OutcomeSpace`].
pub type AttrIx = usize;
/// Index of a value within an attribute's domain.
pub type ValueIx = u16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DomainError {
    #[error("assignments overlap on attribute `{0}`")]
    DisjointnessViolation(String),
    #[error("attribute `{0}` is not bound by the assignment")]
    ScopeViolation(String),
    #[error("attribute index {0} is out of range")]
    UnknownAttribute(AttrIx),
    #[error("value index {value} is outside the domain of `{attr}`")]
    ValueOutOfDomain { attr: String, value: ValueIx },
    #[error("assignment has {got} slots, space has {expected} attributes")]
    ArityMismatch { expected: usize, got: usize },
    #[error("invalid outcome space: {0}")]
    InvalidSpace(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Attribute {
    pub name: String,
    pub values: Vec<String>,
}

impl Attribute {
    pub fn new(name: impl Into<String>, values: impl IntoIterator<Item = impl Into<String>>) -> Self {
        Self {
            name: name.into(),
            values: values.into_iter().map(Into::into).collect(),
        }
    }

    pub fn domain_size(&self) -> usize {
        self.values.len()
    }
}

/// The attribute set together with every attribute's domain.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OutcomeSpace {
    attributes: Vec<Attribute>,
}

impl OutcomeSpace {
    /// Every attribute needs a unique name and at least two distinct values.
    pub fn new(attributes: Vec<Attribute>) -> Result<Self, DomainError> {
        let mut names = HashSet::new();
        for attr in &attributes {
            if !names.insert(attr.name.as_str()) {
                return Err(DomainError::InvalidSpace(format!(
                    "duplicate attribute `{}`",
                    attr.name
                )));
            }
            if attr.values.len() < 2 {
                return Err(DomainError::InvalidSpace(format!(
                    "attribute `{}` needs at least two values",
                    attr.name
                )));
            }
            if attr.values.len() > ValueIx::MAX as usize {
                return Err(DomainError::InvalidSpace(format!(
                    "attribute `{}` has too many values",
                    attr.name
                )));
            }
            let mut seen = HashSet::new();
            for v in &attr.values {
                if !seen.insert(v.as_str()) {
                    return Err(DomainError::InvalidSpace(format!(
                        "attribute `{}` repeats value `{v}`",
                        attr.name
                    )));
                }
            }
        }
        Ok(Self { attributes })
    }

    /// Binary space with attributes named by `names`; the values of `X` are
    /// `x` and `x~` (lower-cased name, bar written as a trailing tilde).
    pub fn binary<S: AsRef<str>>(names: &[S]) -> Self {
        let attributes = names
            .iter()
            .map(|n| {
                let n = n.as_ref();
                let v = n.to_lowercase();
                Attribute::new(n, [v.clone(), format!("{v}~")])
            })
            .collect();
        Self::new(attributes).expect("binary space with distinct names")
    }

    pub fn attributes(&self) -> &[Attribute] {
        &self.attributes
    }

    pub fn attribute(&self, attr: AttrIx) -> &Attribute {
        &self.attributes[attr]
    }

    pub fn len(&self) -> usize {
        self.attributes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.attributes.is_empty()
    }

    pub fn domain_size(&self, attr: AttrIx) -> usize {
        self.attributes[attr].values.len()
    }

    /// Largest domain size (the branching factor of a negotiation tree).
    pub fn max_domain_size(&self) -> usize {
        self.attributes.iter().map(Attribute::domain_size).max().unwrap_or(0)
    }

    pub fn attr_index(&self, name: &str) -> Option<AttrIx> {
        self.attributes.iter().position(|a| a.name == name)
    }

    pub fn value_index(&self, attr: AttrIx, value: &str) -> Option<ValueIx> {
        self.attributes[attr]
            .values
            .iter()
            .position(|v| v == value)
            .map(|i| i as ValueIx)
    }

    /// `|O|`, or `None` when it does not fit in a `u128`.
    pub fn outcome_count(&self) -> Option<u128> {
        self.attributes
            .iter()
            .try_fold(1u128, |acc, a| acc.checked_mul(a.domain_size() as u128))
    }

    /// Position of `o` in the canonical enumeration (first attribute most
    /// significant). Only meaningful when `|O|` fits in a `u64`.
    pub fn index_of(&self, o: &Outcome) -> u64 {
        o.values()
            .iter()
            .zip(&self.attributes)
            .fold(0u64, |acc, (&v, a)| acc * a.domain_size() as u64 + v as u64)
    }

    pub fn outcome_at(&self, mut index: u64) -> Outcome {
        let mut values = vec![0; self.len()];
        for (slot, a) in values.iter_mut().zip(&self.attributes).rev() {
            let k = a.domain_size() as u64;
            *slot = (index % k) as ValueIx;
            index /= k;
        }
        Outcome(values)
    }

    /// All outcomes in canonical order.
    pub fn outcomes(&self) -> impl Iterator<Item = Outcome> + '_ {
        let total = self.outcome_count().map_or(u64::MAX, |n| n.min(u64::MAX as u128) as u64);
        (0..total).map(move |i| self.outcome_at(i))
    }

    pub fn empty_assignment(&self) -> PartialAssignment {
        PartialAssignment::empty(self.len())
    }

    pub fn check_assignment(&self, x: &PartialAssignment) -> Result<(), DomainError> {
        check_slots(self, &x.0)
    }

    pub fn check_outcome(&self, o: &Outcome) -> Result<(), DomainError> {
        if o.0.len() != self.len() {
            return Err(DomainError::ArityMismatch {
                expected: self.len(),
                got: o.0.len(),
            });
        }
        for (attr, &v) in o.0.iter().enumerate() {
            if v as usize >= self.domain_size(attr) {
                return Err(DomainError::ValueOutOfDomain {
                    attr: self.attributes[attr].name.clone(),
                    value: v,
                });
            }
        }
        Ok(())
    }

    /// Parses an assignment written as `name=value` pairs.
    pub fn assignment<'a>(
        &self,
        pairs: impl IntoIterator<Item = (&'a str, &'a str)>,
    ) -> Result<PartialAssignment, DomainError> {
        let mut x = self.empty_assignment();
        for (name, value) in pairs {
            let attr = self
                .attr_index(name)
                .ok_or_else(|| DomainError::InvalidSpace(format!("unknown attribute `{name}`")))?;
            let v = self.value_index(attr, value).ok_or_else(|| {
                DomainError::InvalidSpace(format!("unknown value `{value}` for `{name}`"))
            })?;
            if x.get(attr).is_some() {
                return Err(DomainError::DisjointnessViolation(name.to_string()));
            }
            x.0[attr] = Some(v);
        }
        Ok(x)
    }

    /// Parses an outcome given by value labels in canonical attribute order.
    pub fn outcome_from_labels<S: AsRef<str>>(&self, labels: &[S]) -> Result<Outcome, DomainError> {
        if labels.len() != self.len() {
            return Err(DomainError::ArityMismatch {
                expected: self.len(),
                got: labels.len(),
            });
        }
        let values = labels
            .iter()
            .enumerate()
            .map(|(attr, l)| {
                self.value_index(attr, l.as_ref()).ok_or_else(|| {
                    DomainError::InvalidSpace(format!(
                        "unknown value `{}` for `{}`",
                        l.as_ref(),
                        self.attributes[attr].name
                    ))
                })
            })
            .collect::<Result<_, _>>()?;
        Ok(Outcome(values))
    }

    pub fn labels(&self, o: &Outcome) -> Vec<String> {
        o.0.iter()
            .zip(&self.attributes)
            .map(|(&v, a)| a.values[v as usize].clone())
            .collect()
    }

    /// Concatenated value labels, e.g. `ab~c`.
    pub fn display(&self, o: &Outcome) -> String {
        self.labels(o).concat()
    }

    /// `Comp(x)` in canonical order.
    pub fn completions<'a>(&'a self, x: &'a PartialAssignment) -> Completions<'a> {
        Completions::new(self, x)
    }
}

fn check_slots(space: &OutcomeSpace, slots: &[Option<ValueIx>]) -> Result<(), DomainError> {
    if slots.len() != space.len() {
        return Err(DomainError::ArityMismatch {
            expected: space.len(),
            got: slots.len(),
        });
    }
    for (attr, v) in slots.iter().enumerate() {
        if let Some(v) = *v {
            if v as usize >= space.domain_size(attr) {
                return Err(DomainError::ValueOutOfDomain {
                    attr: space.attributes[attr].name.clone(),
                    value: v,
                });
            }
        }
    }
    Ok(())
}

/// An assignment of values to some subset of the attributes. Slot `i` holds
/// the value of attribute `i`, or `None` when unbound.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartialAssignment(Vec<Option<ValueIx>>);

impl PartialAssignment {
    pub fn empty(attrs: usize) -> Self {
        Self(vec![None; attrs])
    }

    pub fn from_slots(slots: Vec<Option<ValueIx>>) -> Self {
        Self(slots)
    }

    pub fn slots(&self) -> &[Option<ValueIx>] {
        &self.0
    }

    pub fn get(&self, attr: AttrIx) -> Option<ValueIx> {
        self.0.get(attr).copied().flatten()
    }

    pub fn is_bound(&self, attr: AttrIx) -> bool {
        self.get(attr).is_some()
    }

    /// Bound attributes in canonical order.
    pub fn scope(&self) -> impl Iterator<Item = AttrIx> + '_ {
        self.0.iter().enumerate().filter_map(|(i, v)| v.map(|_| i))
    }

    pub fn scope_len(&self) -> usize {
        self.0.iter().filter(|v| v.is_some()).count()
    }

    pub fn is_complete(&self) -> bool {
        self.0.iter().all(Option::is_some)
    }

    pub fn to_outcome(&self) -> Option<Outcome> {
        self.0.iter().copied().collect::<Option<Vec<_>>>().map(Outcome)
    }

    /// Copy with `attr` bound to `value`, overwriting any existing binding.
    pub fn with(&self, attr: AttrIx, value: ValueIx) -> Self {
        let mut next = self.clone();
        next.0[attr] = Some(value);
        next
    }

    /// `xy`: union of two assignments over disjoint scopes.
    pub fn combine(&self, other: &Self, space: &OutcomeSpace) -> Result<Self, DomainError> {
        check_slots(space, &self.0)?;
        check_slots(space, &other.0)?;
        let mut slots = self.0.clone();
        for (attr, v) in other.0.iter().enumerate() {
            if let Some(v) = *v {
                if slots[attr].is_some() {
                    return Err(DomainError::DisjointnessViolation(space.attributes[attr].name.clone()));
                }
                slots[attr] = Some(v);
            }
        }
        Ok(Self(slots))
    }

    /// `x[W]`: restriction to `attrs`, all of which must be bound.
    pub fn project(&self, attrs: &[AttrIx], space: &OutcomeSpace) -> Result<Self, DomainError> {
        check_slots(space, &self.0)?;
        let mut slots = vec![None; self.0.len()];
        for &attr in attrs {
            if attr >= self.0.len() {
                return Err(DomainError::UnknownAttribute(attr));
            }
            match self.0[attr] {
                Some(v) => slots[attr] = Some(v),
                None => return Err(DomainError::ScopeViolation(space.attributes[attr].name.clone())),
            }
        }
        Ok(Self(slots))
    }

    /// True when `o` agrees with every binding of `self`.
    pub fn is_extended_by(&self, o: &Outcome) -> bool {
        self.0
            .iter()
            .zip(o.values())
            .all(|(x, &v)| x.is_none_or(|x| x == v))
    }
}

impl From<&Outcome> for PartialAssignment {
    fn from(o: &Outcome) -> Self {
        Self(o.0.iter().map(|&v| Some(v)).collect())
    }
}

/// A complete assignment. Ordering is the canonical outcome order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Outcome(Vec<ValueIx>);

impl Outcome {
    pub fn new(values: Vec<ValueIx>) -> Self {
        Self(values)
    }

    pub fn values(&self) -> &[ValueIx] {
        &self.0
    }

    pub fn get(&self, attr: AttrIx) -> ValueIx {
        self.0[attr]
    }

    pub fn with(&self, attr: AttrIx, value: ValueIx) -> Self {
        let mut next = self.clone();
        next.0[attr] = value;
        next
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// Iterator over `Comp(x)`: an odometer over the unbound attributes.
pub struct Completions<'a> {
    space: &'a OutcomeSpace,
    free: Vec<AttrIx>,
    current: Option<Vec<ValueIx>>,
}

impl<'a> Completions<'a> {
    fn new(space: &'a OutcomeSpace, x: &PartialAssignment) -> Self {
        let free = (0..space.len()).filter(|&a| !x.is_bound(a)).collect();
        let current = Some(x.0.iter().map(|v| v.unwrap_or(0)).collect());
        Self { space, free, current }
    }
}

impl Iterator for Completions<'_> {
    type Item = Outcome;

    fn next(&mut self) -> Option<Outcome> {
        let current = self.current.as_mut()?;
        let out = Outcome(current.clone());
        // advance, last free attribute fastest
        let mut done = true;
        for &attr in self.free.iter().rev() {
            current[attr] += 1;
            if (current[attr] as usize) < self.space.domain_size(attr) {
                done = false;
                break;
            }
            current[attr] = 0;
        }
        if done {
            self.current = None;
        }
        Some(out)
    }
}
