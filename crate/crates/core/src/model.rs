//! Propositional spaces, joint distributions, events and problems.
//!
//! A space of `k` binary attributes has `2^k` world states. State indices use
//! attribute 0 as the most significant bit, with `true` encoded as 1, so for
//! attributes `[h, a, b]` the state `(h=T, a=T, b=F)` has index `0b110 = 6`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{sum, Scalar};

/// Largest supported number of attributes (2^20 table entries).
pub const MAX_ATTRIBUTES: usize = 20;
/// A space needs a hypothesis and at least one piece of evidence.
pub const MIN_ATTRIBUTES: usize = 2;

/// Entries below zero by at most this much are treated as rounding noise.
pub const NEGATIVE_SLACK: f64 = 1e-15;
/// Raw tables whose mass is within this of 1 are renormalized; others are rejected.
pub const RENORMALIZE_WINDOW: f64 = 1e-9;

/// Ordered, uniquely named binary attributes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PropositionalSpace {
    names: Vec<String>,
}

impl PropositionalSpace {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.len() > MAX_ATTRIBUTES {
            return Err(Error::SpaceTooLarge {
                attrs: names.len(),
                max: MAX_ATTRIBUTES,
            });
        }
        if names.len() < MIN_ATTRIBUTES {
            return Err(Error::InvalidSpace(format!(
                "need at least {MIN_ATTRIBUTES} attributes, got {}",
                names.len()
            )));
        }
        for (i, name) in names.iter().enumerate() {
            if name.trim().is_empty() {
                return Err(Error::InvalidSpace(format!("attribute {i} has an empty name")));
            }
            if names[..i].contains(name) {
                return Err(Error::InvalidSpace(format!("duplicate attribute name `{name}`")));
            }
        }
        Ok(Self { names })
    }

    /// Number of attributes.
    pub fn k(&self) -> usize {
        self.names.len()
    }

    pub fn num_states(&self) -> usize {
        1 << self.k()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, attr: usize) -> &str {
        &self.names[attr]
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownAttribute(name.to_string()))
    }

    /// Bit mask of `attr` inside a state index.
    pub fn bit(&self, attr: usize) -> usize {
        1 << (self.k() - 1 - attr)
    }

    pub fn check_attr(&self, attr: usize) -> Result<()> {
        if attr < self.k() {
            Ok(())
        } else {
            Err(Error::AttributeOutOfRange { attr, k: self.k() })
        }
    }

    /// Index of a full assignment, one truth value per attribute in order.
    pub fn state_index(&self, assignment: &[bool]) -> Result<usize> {
        if assignment.len() != self.k() {
            return Err(Error::LengthMismatch {
                expected: self.k(),
                actual: assignment.len(),
            });
        }
        Ok(assignment
            .iter()
            .fold(0usize, |idx, &bit| (idx << 1) | usize::from(bit)))
    }

    /// Inverse of [`state_index`](Self::state_index).
    pub fn assignment_of(&self, index: usize) -> Vec<bool> {
        (0..self.k()).map(|a| index & self.bit(a) != 0).collect()
    }

    /// All state indices consistent with `event`, ascending.
    pub fn event_states(&self, event: &Event) -> Result<Vec<usize>> {
        let (care, value) = event.masks(self)?;
        Ok((0..self.num_states()).filter(|s| s & care == value).collect())
    }
}

/// A single attribute fixed to a truth value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Literal {
    pub attr: usize,
    pub value: bool,
}

impl Literal {
    pub fn new(attr: usize, value: bool) -> Self {
        Self { attr, value }
    }

    pub fn negated(self) -> Self {
        Self {
            attr: self.attr,
            value: !self.value,
        }
    }
}

/// A conjunction of literals over distinct attributes. The empty event is
/// the sure event.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Event {
    literals: Vec<Literal>,
}

impl Event {
    pub fn new(literals: impl IntoIterator<Item = Literal>) -> Result<Self> {
        let mut literals: Vec<Literal> = literals.into_iter().collect();
        literals.sort_by_key(|l| l.attr);
        if let Some(w) = literals.windows(2).find(|w| w[0].attr == w[1].attr) {
            return Err(Error::DuplicateAttribute(w[0].attr));
        }
        Ok(Self { literals })
    }

    /// The sure event.
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn single(literal: Literal) -> Self {
        Self {
            literals: vec![literal],
        }
    }

    pub fn literals(&self) -> &[Literal] {
        &self.literals
    }

    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }

    pub fn attrs(&self) -> impl Iterator<Item = usize> + '_ {
        self.literals.iter().map(|l| l.attr)
    }

    /// Conjunction of two events; fails if they share an attribute.
    pub fn and(&self, other: &Event) -> Result<Event> {
        Event::new(self.literals.iter().chain(&other.literals).copied())
    }

    pub fn with(&self, literal: Literal) -> Result<Event> {
        Event::new(self.literals.iter().copied().chain(std::iter::once(literal)))
    }

    /// `(care, value)` masks: a state `s` lies in the event iff `s & care == value`.
    pub fn masks(&self, space: &PropositionalSpace) -> Result<(usize, usize)> {
        let mut care = 0;
        let mut value = 0;
        for lit in &self.literals {
            space.check_attr(lit.attr)?;
            let bit = space.bit(lit.attr);
            care |= bit;
            if lit.value {
                value |= bit;
            }
        }
        Ok((care, value))
    }
}

/// The three-valued observation alphabet. `Unknown` is not a world state; it
/// marginalizes the attribute out of every conditioning event.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Observation {
    True,
    False,
    Unknown,
}

impl From<bool> for Observation {
    fn from(b: bool) -> Self {
        if b {
            Observation::True
        } else {
            Observation::False
        }
    }
}

/// A subjective instantiation: one hypothesis attribute, the rest evidence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Problem {
    space: PropositionalSpace,
    hypothesis: usize,
    evidence: Vec<usize>,
}

impl Problem {
    pub fn new(space: &PropositionalSpace, hypothesis: usize) -> Result<Self> {
        space.check_attr(hypothesis)?;
        let evidence = (0..space.k()).filter(|&a| a != hypothesis).collect();
        Ok(Self {
            space: space.clone(),
            hypothesis,
            evidence,
        })
    }

    pub fn by_name(space: &PropositionalSpace, hypothesis: &str) -> Result<Self> {
        Self::new(space, space.index_of(hypothesis)?)
    }

    pub fn space(&self) -> &PropositionalSpace {
        &self.space
    }

    pub fn hypothesis(&self) -> usize {
        self.hypothesis
    }

    /// `h = value`.
    pub fn hypothesis_literal(&self, value: bool) -> Literal {
        Literal::new(self.hypothesis, value)
    }

    pub fn evidence(&self) -> &[usize] {
        &self.evidence
    }

    pub fn is_evidence(&self, attr: usize) -> bool {
        attr != self.hypothesis && attr < self.space.k()
    }

    /// Number of full true/false evidence assignments, `2^n`.
    pub fn num_full_assignments(&self) -> usize {
        1 << self.evidence.len()
    }

    /// The `code`-th full evidence assignment as a literal list in evidence
    /// order. The first evidence attribute is the most significant bit of
    /// `code`.
    pub fn full_assignment(&self, code: usize) -> Vec<Literal> {
        let n = self.evidence.len();
        self.evidence
            .iter()
            .enumerate()
            .map(|(j, &attr)| Literal::new(attr, code & (1 << (n - 1 - j)) != 0))
            .collect()
    }

    /// Every full evidence assignment, in code order.
    pub fn full_assignments(&self) -> impl Iterator<Item = Vec<Literal>> + '_ {
        (0..self.num_full_assignments()).map(|c| self.full_assignment(c))
    }

    /// State index of the full world obtained from a full evidence assignment
    /// and a hypothesis value.
    pub(crate) fn state_of(&self, evidence: &[Literal], h: bool) -> usize {
        let mut idx = if h { self.space.bit(self.hypothesis) } else { 0 };
        for lit in evidence {
            if lit.value {
                idx |= self.space.bit(lit.attr);
            }
        }
        idx
    }

    pub(crate) fn check_evidence_event(&self, event: &Event) -> Result<()> {
        for attr in event.attrs() {
            self.space.check_attr(attr)?;
            if attr == self.hypothesis {
                return Err(Error::NotEvidence(attr));
            }
        }
        Ok(())
    }
}

/// An observation for every evidence attribute of a problem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvidenceAssignment {
    observations: BTreeMap<usize, Observation>,
}

impl EvidenceAssignment {
    pub fn new(problem: &Problem, observations: BTreeMap<usize, Observation>) -> Result<Self> {
        for &attr in observations.keys() {
            if !problem.is_evidence(attr) {
                return Err(Error::NotEvidence(attr));
            }
        }
        if let Some(&missing) = problem.evidence().iter().find(|a| !observations.contains_key(a)) {
            return Err(Error::MissingObservation(missing));
        }
        Ok(Self { observations })
    }

    /// Every evidence attribute unobserved.
    pub fn all_unknown(problem: &Problem) -> Self {
        Self {
            observations: problem.evidence().iter().map(|&a| (a, Observation::Unknown)).collect(),
        }
    }

    /// Observed literals; attributes not listed are unknown.
    pub fn from_literals(problem: &Problem, literals: &[Literal]) -> Result<Self> {
        let mut obs: BTreeMap<usize, Observation> =
            problem.evidence().iter().map(|&a| (a, Observation::Unknown)).collect();
        let mut seen = Vec::with_capacity(literals.len());
        for lit in literals {
            if !problem.is_evidence(lit.attr) {
                return Err(Error::NotEvidence(lit.attr));
            }
            if seen.contains(&lit.attr) {
                return Err(Error::DuplicateAttribute(lit.attr));
            }
            seen.push(lit.attr);
            obs.insert(lit.attr, lit.value.into());
        }
        Ok(Self { observations: obs })
    }

    pub fn get(&self, attr: usize) -> Option<Observation> {
        self.observations.get(&attr).copied()
    }

    pub fn observations(&self) -> &BTreeMap<usize, Observation> {
        &self.observations
    }

    /// Literals for the attributes that were actually observed.
    pub fn observed_literals(&self) -> Vec<Literal> {
        self.observations
            .iter()
            .filter_map(|(&attr, obs)| match obs {
                Observation::True => Some(Literal::new(attr, true)),
                Observation::False => Some(Literal::new(attr, false)),
                Observation::Unknown => None,
            })
            .collect()
    }

    /// Conjunction of the observed literals.
    pub fn observed_event(&self) -> Event {
        Event {
            literals: self.observed_literals(),
        }
    }
}

/// A validated probability table over a propositional space.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution<T> {
    space: PropositionalSpace,
    probs: Vec<T>,
}

impl<T: Scalar> JointDistribution<T> {
    /// Validates a raw table. Entries within `NEGATIVE_SLACK` below zero are
    /// clamped; a total within `RENORMALIZE_WINDOW` of 1 is renormalized.
    pub fn validate<S: Into<String>>(names: impl IntoIterator<Item = S>, raw: Vec<T>) -> Result<Self> {
        let space = PropositionalSpace::new(names)?;
        Self::with_space(space, raw)
    }

    pub fn with_space(space: PropositionalSpace, raw: Vec<T>) -> Result<Self> {
        if raw.len() != space.num_states() {
            return Err(Error::LengthMismatch {
                expected: space.num_states(),
                actual: raw.len(),
            });
        }
        let zero = T::zero();
        let slack = -T::lit(NEGATIVE_SLACK);
        let mut probs = Vec::with_capacity(raw.len());
        for (index, p) in raw.into_iter().enumerate() {
            if !p.to_f64_lossy().is_finite() {
                return Err(Error::NonFiniteMass { index });
            }
            if p < slack {
                return Err(Error::NegativeMass {
                    index,
                    value: p.to_f64_lossy(),
                });
            }
            probs.push(if p < zero { zero.clone() } else { p });
        }
        let total = sum(&probs);
        if (total.clone() - T::one()).abs() > T::lit(RENORMALIZE_WINDOW) {
            return Err(Error::MassNotOne {
                sum: total.to_f64_lossy(),
            });
        }
        if !total.is_one() {
            for p in &mut probs {
                *p = p.clone() / total.clone();
            }
        }
        Ok(Self { space, probs })
    }

    pub fn space(&self) -> &PropositionalSpace {
        &self.space
    }

    pub fn k(&self) -> usize {
        self.space.k()
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn prob(&self, state: usize) -> &T {
        &self.probs[state]
    }

    /// Re-expresses the table in another scalar type and revalidates it.
    pub fn cast<U: Scalar>(&self) -> Result<JointDistribution<U>> {
        let raw = self.probs.iter().map(|p| U::lit(p.to_f64_lossy())).collect();
        JointDistribution::with_space(self.space.clone(), raw)
    }

    /// Same table under a permutation of attributes: attribute `i` of the
    /// result is attribute `order[i]` of `self`.
    pub fn reorder(&self, order: &[usize]) -> Result<Self> {
        let k = self.k();
        let mut sorted = order.to_vec();
        sorted.sort_unstable();
        if sorted != (0..k).collect::<Vec<_>>() {
            return Err(Error::InvalidConfig(format!(
                "{order:?} is not a permutation of 0..{k}"
            )));
        }
        let names: Vec<String> = order.iter().map(|&i| self.space.name(i).to_string()).collect();
        let space = PropositionalSpace::new(names)?;
        let mut probs = vec![T::zero(); self.probs.len()];
        for (old, p) in self.probs.iter().enumerate() {
            let bits = self.space.assignment_of(old);
            let reordered: Vec<bool> = order.iter().map(|&i| bits[i]).collect();
            probs[space.state_index(&reordered)?] = p.clone();
        }
        Ok(Self { space, probs })
    }

    pub fn to_file(&self) -> DistributionFile {
        DistributionFile {
            attributes: self.space.names().to_vec(),
            probabilities: self.probs.iter().map(|p| p.to_f64_lossy()).collect(),
        }
    }

    pub fn from_file(file: DistributionFile) -> Result<Self> {
        let raw = file.probabilities.into_iter().map(T::lit).collect();
        Self::validate(file.attributes, raw)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let file: DistributionFile = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_file(file)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("distribution file serializes")
    }

    pub fn read_json(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json_string() + "\n")?;
        Ok(())
    }
}

impl<T: Scalar> fmt::Display for JointDistribution<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.space.names().join(" "))?;
        for (i, p) in self.probs.iter().enumerate() {
            let bits: String = self
                .space
                .assignment_of(i)
                .iter()
                .map(|&b| if b { 'T' } else { 'F' })
                .collect();
            writeln!(f, "{bits} {p}")?;
        }
        Ok(())
    }
}

/// On-disk JSON form: `{"attributes": [...], "probabilities": [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistributionFile {
    pub attributes: Vec<String>,
    pub probabilities: Vec<f64>,
}
