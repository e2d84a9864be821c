//! The certainty-factor language.
//!
//! Probabilities map to a measure of increased belief (MB) and of increased
//! disbelief (MD) relative to the prior, and CF = MB - MD. Parallel evidence
//! is combined stream by stream with the probabilistic sum
//! `x + y(1 - x)`; the certainty caps are resolved once, after both streams
//! have been combined.

use std::fmt;

use crate::error::{Error, Result};
use crate::model::{Event, JointDistribution, Problem};
use crate::oracle;
use crate::scalar::{max_of, min_of, Scalar};

/// An (MB, MD, CF) triple with `cf == mb - md`.
#[derive(Debug, Clone, PartialEq)]
pub struct BeliefMeasures<T> {
    mb: T,
    md: T,
    cf: T,
}

impl<T: Scalar> BeliefMeasures<T> {
    pub fn new(mb: T, md: T) -> Result<Self> {
        let unit = |x: &T| *x >= T::zero() && *x <= T::one();
        if !unit(&mb) || !unit(&md) {
            return Err(Error::InvalidMeasure {
                mb: mb.to_f64_lossy(),
                md: md.to_f64_lossy(),
            });
        }
        Ok(Self::from_parts(mb, md))
    }

    fn from_parts(mb: T, md: T) -> Self {
        let cf = mb.clone() - md.clone();
        Self { mb, md, cf }
    }

    /// No change in belief; the identity of [`combine`].
    pub fn neutral() -> Self {
        Self::from_parts(T::zero(), T::zero())
    }

    pub fn mb(&self) -> &T {
        &self.mb
    }

    pub fn md(&self) -> &T {
        &self.md
    }

    pub fn cf(&self) -> &T {
        &self.cf
    }

    pub fn to_f64(&self) -> BeliefMeasures<f64> {
        BeliefMeasures::from_parts(self.mb.to_f64_lossy(), self.md.to_f64_lossy())
    }
}

impl<T: Scalar> fmt::Display for BeliefMeasures<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(mb {}, md {}, cf {})", self.mb, self.md, self.cf)
    }
}

/// MB from a prior P(h) and posterior P(h|e).
pub fn mb_of<T: Scalar>(prior: &T, posterior: &T) -> T {
    if prior.is_one() {
        return T::one();
    }
    (max_of(posterior.clone(), prior.clone()) - prior.clone()) / (T::one() - prior.clone())
}

/// MD from a prior P(h) and posterior P(h|e).
pub fn md_of<T: Scalar>(prior: &T, posterior: &T) -> T {
    if prior.is_zero() {
        return T::one();
    }
    (prior.clone() - min_of(posterior.clone(), prior.clone())) / prior.clone()
}

/// Measures for a (prior, posterior) pair.
pub fn measures_of<T: Scalar>(prior: &T, posterior: &T) -> BeliefMeasures<T> {
    BeliefMeasures::from_parts(mb_of(prior, posterior), md_of(prior, posterior))
}

/// Measures of `h = true` given an evidence event, read directly off the
/// distribution.
pub fn cf_direct<T: Scalar>(
    dist: &JointDistribution<T>,
    problem: &Problem,
    evidence_event: &Event,
) -> Result<BeliefMeasures<T>> {
    let prior = oracle::hypothesis_prior(dist, problem)?;
    let post = oracle::posterior(dist, problem, evidence_event)?;
    Ok(measures_of(&prior, &post))
}

/// Probabilistic sum of two MB values.
pub fn combine_mb<T: Scalar>(mb_a: &T, mb_b: &T) -> T {
    mb_a.clone() + mb_b.clone() * (T::one() - mb_a.clone())
}

/// Probabilistic sum of two MD values.
pub fn combine_md<T: Scalar>(md_a: &T, md_b: &T) -> T {
    md_a.clone() + md_b.clone() * (T::one() - md_a.clone())
}

fn resolve_caps<T: Scalar>(mb: T, md: T) -> Result<BeliefMeasures<T>> {
    match (mb.is_one(), md.is_one()) {
        (true, true) => Err(Error::ContradictoryCertainty),
        (false, true) => Ok(BeliefMeasures::from_parts(T::zero(), T::one())),
        (true, false) => Ok(BeliefMeasures::from_parts(T::one(), T::zero())),
        (false, false) => Ok(BeliefMeasures::from_parts(mb, md)),
    }
}

/// Parallel combination of two pieces of evidence.
pub fn combine<T: Scalar>(a: &BeliefMeasures<T>, b: &BeliefMeasures<T>) -> Result<BeliefMeasures<T>> {
    resolve_caps(combine_mb(&a.mb, &b.mb), combine_md(&a.md, &b.md))
}

/// Parallel combination of any number of pieces of evidence. Caps apply once
/// to the folded streams, so the result does not depend on input order.
pub fn fold_combine<'a, T: Scalar + 'a>(
    items: impl IntoIterator<Item = &'a BeliefMeasures<T>>,
) -> Result<BeliefMeasures<T>> {
    let mut iter = items.into_iter();
    let first = iter.next().ok_or(Error::EmptyCombination)?;
    let (mb, md) = iter.fold((first.mb.clone(), first.md.clone()), |(mb, md), m| {
        (combine_mb(&mb, &m.mb), combine_md(&md, &m.md))
    });
    resolve_caps(mb, md)
}
