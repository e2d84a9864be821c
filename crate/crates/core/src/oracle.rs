//! Exact probabilistic queries by enumeration of the full table.

use crate::error::{Error, Result};
use crate::model::{Event, EvidenceAssignment, JointDistribution, Literal, Problem};
use crate::scalar::Scalar;

/// Conditioning events with at most this much mass are treated as impossible.
pub const ZERO_MASS: f64 = 1e-15;

/// P(event). The empty event has probability 1.
pub fn marginal<T: Scalar>(dist: &JointDistribution<T>, event: &Event) -> Result<T> {
    let (care, value) = event.masks(dist.space())?;
    Ok(dist
        .probs()
        .iter()
        .enumerate()
        .filter(|(s, _)| s & care == value)
        .fold(T::zero(), |acc, (_, p)| acc + p.clone()))
}

/// P(target | given). `target` and `given` must mention disjoint attributes.
pub fn conditional<T: Scalar>(dist: &JointDistribution<T>, target: &Event, given: &Event) -> Result<T> {
    let joint = target.and(given)?;
    let denom = marginal(dist, given)?;
    if denom <= T::lit(ZERO_MASS) {
        return Err(Error::ZeroProbabilityEvidence);
    }
    Ok(marginal(dist, &joint)? / denom)
}

/// P(h = true).
pub fn hypothesis_prior<T: Scalar>(dist: &JointDistribution<T>, problem: &Problem) -> Result<T> {
    marginal(dist, &Event::single(problem.hypothesis_literal(true)))
}

/// P(h = true | evidence_event).
pub fn posterior<T: Scalar>(dist: &JointDistribution<T>, problem: &Problem, evidence_event: &Event) -> Result<T> {
    problem.check_evidence_event(evidence_event)?;
    conditional(dist, &Event::single(problem.hypothesis_literal(true)), evidence_event)
}

/// The predictive solution P(h = true | observed evidence). Unknown
/// observations are marginalized out; with nothing observed this is the prior.
pub fn predictive_solution<T: Scalar>(
    dist: &JointDistribution<T>,
    problem: &Problem,
    assignment: &EvidenceAssignment,
) -> Result<T> {
    posterior(dist, problem, &assignment.observed_event())
}

/// Diagnostic probability P(evidence_event | h = h_value).
pub fn diagnostic_probability<T: Scalar>(
    dist: &JointDistribution<T>,
    problem: &Problem,
    evidence_event: &Event,
    h_value: bool,
) -> Result<T> {
    problem.check_evidence_event(evidence_event)?;
    conditional(
        dist,
        evidence_event,
        &Event::single(problem.hypothesis_literal(h_value)),
    )
}

/// P(lit | h = v) for each evidence attribute at both polarities, indexed as
/// `[position in problem.evidence()][value as usize]`.
pub(crate) fn literal_likelihoods<T: Scalar>(
    dist: &JointDistribution<T>,
    problem: &Problem,
    h_value: bool,
) -> Result<Vec<[T; 2]>> {
    problem
        .evidence()
        .iter()
        .map(|&attr| {
            let p_true = diagnostic_probability(dist, problem, &Event::single(Literal::new(attr, true)), h_value)?;
            let p_false = diagnostic_probability(dist, problem, &Event::single(Literal::new(attr, false)), h_value)?;
            Ok([p_false, p_true])
        })
        .collect()
}
