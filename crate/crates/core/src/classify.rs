//! Decomposability taxonomy.
//!
//! A problem is weakly decomposable when the evidence is conditionally
//! independent given the hypothesis, decomposable when in addition the
//! evidence is marginally independent, and holistic otherwise. Deviations are
//! measured as the largest absolute factorization error over full evidence
//! assignments, with each factor taken at the polarity the assignment gives.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Event, JointDistribution, Literal, Problem};
use crate::oracle::{self, ZERO_MASS};
use crate::scalar::{max_of, FloatScalar, Scalar};

/// Default classification tolerance for exact families.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Which hypothesis values the conditional factorization must hold for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IndependenceVariant {
    /// Given `h = true` only; the literal reading of the definition.
    #[serde(rename = "strict")]
    HTrue,
    #[serde(rename = "h-false")]
    HFalse,
    /// Given both `h = true` and `h = false`.
    #[serde(rename = "symmetric")]
    Symmetric,
}

impl IndependenceVariant {
    pub const ALL: [IndependenceVariant; 3] = [Self::HTrue, Self::HFalse, Self::Symmetric];

    pub fn h_values(self) -> &'static [bool] {
        match self {
            Self::HTrue => &[true],
            Self::HFalse => &[false],
            Self::Symmetric => &[true, false],
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::HTrue => "strict",
            Self::HFalse => "h-false",
            Self::Symmetric => "symmetric",
        }
    }
}

impl fmt::Display for IndependenceVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for IndependenceVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "strict" | "h-true" | "htrue" => Ok(Self::HTrue),
            "h-false" | "hfalse" => Ok(Self::HFalse),
            "symmetric" => Ok(Self::Symmetric),
            other => Err(Error::InvalidConfig(format!("unknown independence variant `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ProblemClass {
    Decomposable,
    WeaklyDecomposable,
    Holistic,
}

impl ProblemClass {
    pub const ALL: [ProblemClass; 3] = [Self::Decomposable, Self::WeaklyDecomposable, Self::Holistic];

    /// Class from the two deviations at a tolerance.
    pub fn from_gaps<T: Scalar>(ci_gap: &T, marginal_gap: &T, tol: &T) -> Self {
        match (ci_gap <= tol, marginal_gap <= tol) {
            (true, true) => Self::Decomposable,
            (true, false) => Self::WeaklyDecomposable,
            (false, _) => Self::Holistic,
        }
    }

    /// Passes the weak-decomposability test.
    pub fn is_weakly_decomposable(self) -> bool {
        !matches!(self, Self::Holistic)
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::Decomposable => "Decomposable",
            Self::WeaklyDecomposable => "WeaklyDecomposable",
            Self::Holistic => "Holistic",
        }
    }
}

impl fmt::Display for ProblemClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationReport<T> {
    pub class: ProblemClass,
    pub variant: IndependenceVariant,
    pub ci_gap: T,
    pub marginal_gap: T,
    pub tolerance: T,
}

fn positive_mass<T: Scalar>(p: T) -> Result<T> {
    if p <= T::lit(ZERO_MASS) {
        Err(Error::ZeroProbabilityEvidence)
    } else {
        Ok(p)
    }
}

fn product_of<T: Scalar>(table: &[[T; 2]], assignment: &[Literal]) -> T {
    table.iter().zip(assignment).fold(T::one(), |acc, (probs, lit)| {
        acc * probs[usize::from(lit.value)].clone()
    })
}

/// Largest |P(E | h=v) - prod_i P(e_i | h=v)| over full evidence assignments
/// `E` and the hypothesis values the variant requires.
pub fn conditional_independence_gap<T: Scalar>(
    dist: &JointDistribution<T>,
    problem: &Problem,
    variant: IndependenceVariant,
) -> Result<T> {
    let mut gap = T::zero();
    for &v in variant.h_values() {
        let p_h = positive_mass(oracle::marginal(dist, &Event::single(problem.hypothesis_literal(v)))?)?;
        let likelihoods = oracle::literal_likelihoods(dist, problem, v)?;
        for assignment in problem.full_assignments() {
            let joint = dist.prob(problem.state_of(&assignment, v)).clone() / p_h.clone();
            let product = product_of(&likelihoods, &assignment);
            gap = max_of(gap, (joint - product).abs());
        }
    }
    Ok(gap)
}

/// Largest |P(E) - prod_i P(e_i)| over full evidence assignments.
pub fn marginal_independence_gap<T: Scalar>(dist: &JointDistribution<T>, problem: &Problem) -> Result<T> {
    let marginals = problem
        .evidence()
        .iter()
        .map(|&attr| {
            let t = oracle::marginal(dist, &Event::single(Literal::new(attr, true)))?;
            Ok([T::one() - t.clone(), t])
        })
        .collect::<Result<Vec<_>>>()?;
    let mut gap = T::zero();
    for assignment in problem.full_assignments() {
        let joint = dist.prob(problem.state_of(&assignment, false)).clone()
            + dist.prob(problem.state_of(&assignment, true)).clone();
        gap = max_of(gap, (joint - product_of(&marginals, &assignment)).abs());
    }
    Ok(gap)
}

pub fn classify<T: Scalar>(
    dist: &JointDistribution<T>,
    problem: &Problem,
    variant: IndependenceVariant,
    tol: T,
) -> Result<ClassificationReport<T>> {
    if tol <= T::zero() {
        return Err(Error::InvalidConfig("tolerance must be positive".into()));
    }
    let ci_gap = conditional_independence_gap(dist, problem, variant)?;
    let marginal_gap = marginal_independence_gap(dist, problem)?;
    Ok(ClassificationReport {
        class: ProblemClass::from_gaps(&ci_gap, &marginal_gap, &tol),
        variant,
        ci_gap,
        marginal_gap,
        tolerance: tol,
    })
}

/// I(e_i; e_j | h) in nats, averaged over both hypothesis values.
pub fn conditional_mutual_information<T: FloatScalar>(
    dist: &JointDistribution<T>,
    problem: &Problem,
    attr_i: usize,
    attr_j: usize,
) -> Result<T> {
    for attr in [attr_i, attr_j] {
        if !problem.is_evidence(attr) {
            return Err(Error::NotEvidence(attr));
        }
    }
    if attr_i == attr_j {
        return Err(Error::DuplicateAttribute(attr_i));
    }
    let mut total = T::zero();
    for v in [false, true] {
        let h = Event::single(problem.hypothesis_literal(v));
        let p_h = positive_mass(oracle::marginal(dist, &h)?)?;
        let cond = |lits: &[Literal]| -> Result<T> {
            let joint = h.and(&Event::new(lits.iter().copied())?)?;
            Ok(oracle::marginal(dist, &joint)? / p_h)
        };
        let mut inner = T::zero();
        for xi in [false, true] {
            let p_i = cond(&[Literal::new(attr_i, xi)])?;
            for xj in [false, true] {
                let p_ij = cond(&[Literal::new(attr_i, xi), Literal::new(attr_j, xj)])?;
                if p_ij > T::zero() {
                    let p_j = cond(&[Literal::new(attr_j, xj)])?;
                    inner = inner + p_ij * (p_ij / (p_i * p_j)).ln();
                }
            }
        }
        total = total + p_h * inner;
    }
    Ok(total)
}
