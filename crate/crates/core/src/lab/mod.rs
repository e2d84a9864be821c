//! Consistency gaps between the combination calculus and the probability
//! mapping, plus the sampling audit built on them.
//!
//! For an evidence assignment the *direct* side maps P(h | whole event)
//! through the MB/MD mapping; the *combined* side maps each single literal
//! separately and folds the results with the combination rules. The gaps are
//! the absolute differences of MB, MD and CF between the two sides.

mod audit;
mod sample;

pub use audit::{
    audit, AuditConfig, AuditReport, AuditRow, Lemma, SummaryRow, DEFAULT_TOLERANCE_GRID, ROWS_FILE, SUMMARY_FILE,
};
pub use sample::{sample_distribution, Family, AUDIT_MAX_ATTRIBUTES};

use std::collections::BTreeSet;

use crate::cf::{self, BeliefMeasures};
use crate::error::{Error, Result};
use crate::model::{Event, JointDistribution, Literal, Problem};
use crate::oracle::{self, ZERO_MASS};
use crate::scalar::{max_of, Scalar};

/// Direct and combined measures for one evidence assignment.
#[derive(Debug, Clone, PartialEq)]
pub struct GapRecord<T> {
    pub literals: Vec<Literal>,
    pub direct: BeliefMeasures<T>,
    pub combined: BeliefMeasures<T>,
    pub m1_gap: T,
    pub m2_gap: T,
    pub cf_gap: T,
}

impl<T: Scalar> GapRecord<T> {
    fn from_sides(literals: Vec<Literal>, direct: BeliefMeasures<T>, combined: BeliefMeasures<T>) -> Self {
        let m1_gap = (direct.mb().clone() - combined.mb().clone()).abs();
        let m2_gap = (direct.md().clone() - combined.md().clone()).abs();
        let cf_gap = (direct.cf().clone() - combined.cf().clone()).abs();
        Self {
            literals,
            direct,
            combined,
            m1_gap,
            m2_gap,
            cf_gap,
        }
    }
}

/// Gap record for any conjunction of evidence literals. With no literals
/// both sides are neutral.
pub fn gap_for_literals<T: Scalar>(
    dist: &JointDistribution<T>,
    problem: &Problem,
    literals: &[Literal],
) -> Result<GapRecord<T>> {
    let event = Event::new(literals.iter().copied())?;
    problem.check_evidence_event(&event)?;
    let direct = cf::cf_direct(dist, problem, &event)?;
    let singles = literals
        .iter()
        .map(|&l| cf::cf_direct(dist, problem, &Event::single(l)))
        .collect::<Result<Vec<_>>>()?;
    let combined = if singles.is_empty() {
        BeliefMeasures::neutral()
    } else {
        cf::fold_combine(&singles)?
    };
    Ok(GapRecord::from_sides(event.literals().to_vec(), direct, combined))
}

/// Gap record for a full true/false assignment of the evidence.
pub fn gap_record<T: Scalar>(
    dist: &JointDistribution<T>,
    problem: &Problem,
    assignment: &[Literal],
) -> Result<GapRecord<T>> {
    let covered: BTreeSet<usize> = assignment.iter().map(|l| l.attr).collect();
    if let Some(&missing) = problem.evidence().iter().find(|a| !covered.contains(a)) {
        return Err(Error::MissingObservation(missing));
    }
    gap_for_literals(dist, problem, assignment)
}

/// Max and mean gaps over every evaluable full evidence assignment.
#[derive(Debug, Clone, PartialEq)]
pub struct LemmaGaps<T> {
    pub m1_max: T,
    pub m1_mean: T,
    pub m2_max: T,
    pub m2_mean: T,
    pub cf_max: T,
    pub cf_mean: T,
    pub evaluated: usize,
    /// Assignments with zero probability (or contradictory certainty).
    pub skipped: usize,
}

pub fn lemma_gaps<T: Scalar>(dist: &JointDistribution<T>, problem: &Problem) -> Result<LemmaGaps<T>> {
    let prior = oracle::hypothesis_prior(dist, problem)?;
    // Single-literal measures at both polarities, by evidence position.
    let singles: Vec<[Result<BeliefMeasures<T>>; 2]> = problem
        .evidence()
        .iter()
        .map(|&attr| [false, true].map(|v| cf::cf_direct(dist, problem, &Event::single(Literal::new(attr, v)))))
        .collect();

    let zero_mass = T::lit(ZERO_MASS);
    let (mut m1_max, mut m2_max, mut cf_max) = (T::zero(), T::zero(), T::zero());
    let (mut m1_sum, mut m2_sum, mut cf_sum) = (T::zero(), T::zero(), T::zero());
    let mut evaluated = 0usize;
    let mut skipped = 0usize;

    for assignment in problem.full_assignments() {
        let with_h = dist.prob(problem.state_of(&assignment, true)).clone();
        let mass = with_h.clone() + dist.prob(problem.state_of(&assignment, false)).clone();
        if mass <= zero_mass {
            skipped += 1;
            continue;
        }
        let direct = cf::measures_of(&prior, &(with_h / mass));
        let parts: Result<Vec<&BeliefMeasures<T>>> = assignment
            .iter()
            .enumerate()
            .map(|(j, lit)| singles[j][usize::from(lit.value)].as_ref().map_err(Clone::clone))
            .collect();
        let combined = match parts.and_then(|p| cf::fold_combine(p)) {
            Ok(c) => c,
            Err(Error::ZeroProbabilityEvidence | Error::ContradictoryCertainty) => {
                skipped += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        let rec = GapRecord::from_sides(assignment, direct, combined);
        m1_sum = m1_sum + rec.m1_gap.clone();
        m2_sum = m2_sum + rec.m2_gap.clone();
        cf_sum = cf_sum + rec.cf_gap.clone();
        m1_max = max_of(m1_max, rec.m1_gap);
        m2_max = max_of(m2_max, rec.m2_gap);
        cf_max = max_of(cf_max, rec.cf_gap);
        evaluated += 1;
    }
    if evaluated == 0 {
        return Err(Error::EverythingSkipped);
    }
    let n = T::from_usize(evaluated).expect("count fits the scalar");
    Ok(LemmaGaps {
        m1_max,
        m1_mean: m1_sum / n.clone(),
        m2_max,
        m2_mean: m2_sum / n.clone(),
        cf_max,
        cf_mean: cf_sum / n,
        evaluated,
        skipped,
    })
}

/// Which combination stream a product condition checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GapBranch {
    Mb,
    Md,
}

/// Direction of a literal's effect on the hypothesis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Confirms,
    Disconfirms,
    Neutral,
}

pub fn direction<T: Scalar>(dist: &JointDistribution<T>, problem: &Problem, literal: Literal) -> Result<Direction> {
    let prior = oracle::hypothesis_prior(dist, problem)?;
    let post = oracle::posterior(dist, problem, &Event::single(literal))?;
    Ok(if post > prior {
        Direction::Confirms
    } else if post < prior {
        Direction::Disconfirms
    } else {
        Direction::Neutral
    })
}

/// Algebraic form of pairwise consistency for two literals pulling the same
/// way. For two confirming literals the combined MB equals the direct MB iff
/// `P(¬h|ab) P(¬h) = P(¬h|a) P(¬h|b)`; for two disconfirming literals the MD
/// streams agree iff `P(h|ab) P(h) = P(h|a) P(h|b)`. Returns the absolute
/// difference of the two sides.
pub fn product_condition_gap<T: Scalar>(
    dist: &JointDistribution<T>,
    problem: &Problem,
    a: Literal,
    b: Literal,
    branch: GapBranch,
) -> Result<T> {
    let want = match branch {
        GapBranch::Mb => Direction::Confirms,
        GapBranch::Md => Direction::Disconfirms,
    };
    if direction(dist, problem, a)? != want || direction(dist, problem, b)? != want {
        return Err(Error::NotSameDirection);
    }
    let h_value = branch == GapBranch::Md;
    let target = Event::single(problem.hypothesis_literal(h_value));
    let p = |given: &Event| oracle::conditional(dist, &target, given);
    let ab = Event::new([a, b])?;
    let lhs = p(&ab)? * p(&Event::empty())?;
    let rhs = p(&Event::single(a))? * p(&Event::single(b))?;
    Ok((lhs - rhs).abs())
}

/// Outcome of comparing a pairwise gap with its product condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Agreement {
    /// Both at most `agree_tol`, or both above it.
    Agree,
    /// The sides disagree, but the larger one is below `hard_tol`.
    Borderline,
    /// One side is zero (to `zero_tol`) and the other exceeds `hard_tol`.
    Hard,
    /// Disagreement that is neither borderline nor hard.
    Soft,
}

/// One pair of same-direction literals checked both ways.
#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceCheck {
    pub a: Literal,
    pub b: Literal,
    pub branch: GapBranch,
    pub pairwise_gap: f64,
    pub product_gap: f64,
    pub agreement: Agreement,
}

/// Thresholds for [`equivalence_checks`].
#[derive(Debug, Clone, Copy)]
pub struct EquivalenceTolerances {
    pub agree: f64,
    pub hard: f64,
    pub zero: f64,
}

impl Default for EquivalenceTolerances {
    fn default() -> Self {
        Self {
            agree: 1e-9,
            hard: 1e-6,
            zero: 1e-12,
        }
    }
}

fn judge(pairwise: f64, product: f64, tol: EquivalenceTolerances) -> Agreement {
    if (pairwise <= tol.agree) == (product <= tol.agree) {
        return Agreement::Agree;
    }
    let (lo, hi) = if pairwise < product {
        (pairwise, product)
    } else {
        (product, pairwise)
    };
    if lo <= tol.zero && hi > tol.hard {
        Agreement::Hard
    } else if hi < tol.hard {
        Agreement::Borderline
    } else {
        Agreement::Soft
    }
}

/// Compares pairwise MB/MD gaps with their product conditions for every
/// pair of evidence attributes, every polarity and each branch whose
/// direction requirement holds. Pairs with zero joint probability are left
/// out.
pub fn equivalence_checks<T: Scalar>(
    dist: &JointDistribution<T>,
    problem: &Problem,
    tol: EquivalenceTolerances,
) -> Result<Vec<EquivalenceCheck>> {
    let mut out = Vec::new();
    let ev = problem.evidence();
    for (i, &x) in ev.iter().enumerate() {
        for &y in &ev[i + 1..] {
            for (vx, vy) in [(true, true), (true, false), (false, true), (false, false)] {
                let (a, b) = (Literal::new(x, vx), Literal::new(y, vy));
                let rec = match gap_for_literals(dist, problem, &[a, b]) {
                    Ok(r) => r,
                    Err(Error::ZeroProbabilityEvidence | Error::ContradictoryCertainty) => continue,
                    Err(e) => return Err(e),
                };
                for branch in [GapBranch::Mb, GapBranch::Md] {
                    let product = match product_condition_gap(dist, problem, a, b, branch) {
                        Ok(g) => g.to_f64_lossy(),
                        Err(Error::NotSameDirection | Error::ZeroProbabilityEvidence) => continue,
                        Err(e) => return Err(e),
                    };
                    let pairwise = match branch {
                        GapBranch::Mb => rec.m1_gap.to_f64_lossy(),
                        GapBranch::Md => rec.m2_gap.to_f64_lossy(),
                    };
                    out.push(EquivalenceCheck {
                        a,
                        b,
                        branch,
                        pairwise_gap: pairwise,
                        product_gap: product,
                        agreement: judge(pairwise, product, tol),
                    });
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use num_rational::BigRational;
    use num_traits::Zero;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn lits(a: bool, b: bool) -> Vec<Literal> {
        vec![Literal::new(1, a), Literal::new(2, b)]
    }

    fn problem() -> Problem {
        Problem::new(fixtures::nb1::<f64>().space(), 0).unwrap()
    }

    #[test]
    fn gap_record_examples_exact() {
        let p = problem();
        let nb1 = fixtures::nb1::<BigRational>();
        let r = gap_record(&nb1, &p, &lits(true, true)).unwrap();
        assert_eq!(*r.direct.mb(), q(5, 7));
        assert_eq!(*r.combined.mb(), q(2, 3));
        assert_eq!(r.m1_gap, q(1, 21));
        assert!(r.m2_gap.is_zero());
        assert_eq!(r.cf_gap, q(1, 21));

        let r = gap_record(&nb1, &p, &lits(true, false)).unwrap();
        assert!(r.direct.cf().is_zero());
        assert!(r.combined.cf().is_zero());
        assert!(r.cf_gap.is_zero());

        let r = gap_record(&nb1, &p, &lits(false, false)).unwrap();
        assert_eq!(r.m2_gap, q(1, 21));

        let m = fixtures::m1x1::<BigRational>();
        let r = gap_record(&m, &p, &lits(true, true)).unwrap();
        assert!(r.m1_gap.is_zero());

        let d = fixtures::dstrict1::<BigRational>();
        let r = gap_record(&d, &p, &lits(true, true)).unwrap();
        assert_eq!(*r.direct.mb(), q(1, 1));
        assert_eq!(r.m1_gap, q(1, 3));
    }

    #[test]
    fn gap_record_requires_full_assignment() {
        let p = problem();
        let nb1 = fixtures::nb1::<f64>();
        assert_eq!(
            gap_record(&nb1, &p, &[Literal::new(1, true)]),
            Err(Error::MissingObservation(2))
        );
        let xor1 = fixtures::xor1::<f64>();
        let err = gap_record(&xor1, &p, &lits(true, true)).unwrap();
        assert_eq!(*err.direct.md(), 1.0);
    }

    #[test]
    fn lemma_gap_examples() {
        let p = problem();
        let g = lemma_gaps(&fixtures::pr1::<BigRational>(), &p).unwrap();
        assert!(g.m1_max.is_zero() && g.m2_max.is_zero() && g.cf_max.is_zero());
        assert_eq!(g.skipped, 0);
        let g = lemma_gaps(&fixtures::xor1::<BigRational>(), &p).unwrap();
        assert_eq!(g.cf_max, q(1, 1));
        let g = lemma_gaps(&fixtures::nb1::<BigRational>(), &p).unwrap();
        assert_eq!(g.cf_max, q(1, 21));
        // The mixed assignments move both streams: (a=F,b=T) has direct
        // (0, 0) against combined (1/2, 1/2).
        assert_eq!(g.m1_max, q(1, 2));
        assert_eq!(g.m2_max, q(1, 2));
        assert_eq!(g.evaluated, 4);
    }

    #[test]
    fn lemma_gaps_match_gap_records() {
        let p = problem();
        for (_, d) in fixtures::all::<BigRational>().unwrap() {
            let agg = lemma_gaps(&d, &p).unwrap();
            let recs: Vec<_> = p
                .full_assignments()
                .filter_map(|a| gap_record(&d, &p, &a).ok())
                .collect();
            assert_eq!(recs.len(), agg.evaluated);
            let max = recs.iter().map(|r| r.m1_gap.clone()).fold(q(0, 1), max_of);
            assert_eq!(max, agg.m1_max);
            let max = recs.iter().map(|r| r.cf_gap.clone()).fold(q(0, 1), max_of);
            assert_eq!(max, agg.cf_max);
        }
    }

    #[test]
    fn lemma_gaps_skip_zero_mass() {
        let p = problem();
        let d = fixtures::dstrict1::<f64>();
        let g = lemma_gaps(&d, &p).unwrap();
        assert_eq!(g.skipped, 0);
        // Only (a=T,b=T) and (a=F,b=F) carry mass.
        let raw = vec![0.3, 0.0, 0.0, 0.2, 0.1, 0.0, 0.0, 0.4];
        let d = JointDistribution::validate(["h", "a", "b"], raw).unwrap();
        let g = lemma_gaps(&d, &p).unwrap();
        assert_eq!((g.evaluated, g.skipped), (2, 2));
    }

    #[test]
    fn product_condition_examples() {
        let p = problem();
        let (a, b) = (Literal::new(1, true), Literal::new(2, true));
        let m = fixtures::m1x1::<BigRational>();
        assert!(product_condition_gap(&m, &p, a, b, GapBranch::Mb).unwrap().is_zero());
        let nb1 = fixtures::nb1::<BigRational>();
        assert_eq!(product_condition_gap(&nb1, &p, a, b, GapBranch::Mb).unwrap(), q(1, 84));
        assert_eq!(
            product_condition_gap(&nb1, &p, a.negated(), b.negated(), GapBranch::Md).unwrap(),
            q(1, 84)
        );
        assert_eq!(
            product_condition_gap(&nb1, &p, a, b.negated(), GapBranch::Mb),
            Err(Error::NotSameDirection)
        );
        assert_eq!(
            product_condition_gap(&nb1, &p, a, b, GapBranch::Md),
            Err(Error::NotSameDirection)
        );
    }

    #[test]
    fn equivalence_on_fixtures() {
        let p = problem();
        for (_, d) in fixtures::all::<f64>().unwrap() {
            for c in equivalence_checks(&d, &p, EquivalenceTolerances::default()).unwrap() {
                assert_eq!(c.agreement, Agreement::Agree, "{c:?}");
            }
        }
    }

    #[test]
    fn judge_categories() {
        let t = EquivalenceTolerances::default();
        assert_eq!(judge(0.0, 0.0, t), Agreement::Agree);
        assert_eq!(judge(0.1, 0.2, t), Agreement::Agree);
        assert_eq!(judge(0.0, 1e-3, t), Agreement::Hard);
        assert_eq!(judge(0.0, 1e-8, t), Agreement::Borderline);
        assert_eq!(judge(1e-10, 1e-3, t), Agreement::Soft);
    }
}
