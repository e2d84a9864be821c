//! Group-factored surrogates for holistic problems.
//!
//! Evidence attributes are partitioned into groups; each group is treated as
//! a single piece of evidence that is conditionally independent of the other
//! groups given the hypothesis. The surrogate posterior is
//!
//! ```text
//! P'(h|E) = P(h) prod_g P(E_g|h) / sum_v P(h=v) prod_g P(E_g|h=v)
//! ```
//!
//! and its distance from the exact predictive solution is the quality of the
//! decomposition. The greedy search starts from singletons and merges the
//! pair of groups with the largest summed conditional mutual information
//! until the surrogate is within tolerance or no merge is allowed.

use serde::{Deserialize, Serialize};

use crate::classify::conditional_mutual_information;
use crate::error::{Error, Result};
use crate::model::{Event, JointDistribution, Literal, Problem, PropositionalSpace};
use crate::oracle::{self, ZERO_MASS};
use crate::scalar::{max_of, FloatScalar, Scalar};

/// Disjoint, covering, non-empty groups of evidence attributes. Groups are
/// kept sorted internally and ordered by their smallest attribute.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvidencePartition {
    groups: Vec<Vec<usize>>,
}

impl EvidencePartition {
    pub fn new(problem: &Problem, groups: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = Vec::new();
        for g in &groups {
            if g.is_empty() {
                return Err(Error::InvalidPartition("empty group".into()));
            }
            for &a in g {
                if !problem.is_evidence(a) {
                    return Err(Error::NotEvidence(a));
                }
                if seen.contains(&a) {
                    return Err(Error::InvalidPartition(format!("attribute {a} in two groups")));
                }
                seen.push(a);
            }
        }
        if let Some(&a) = problem.evidence().iter().find(|a| !seen.contains(a)) {
            return Err(Error::InvalidPartition(format!("attribute {a} not covered")));
        }
        Ok(Self::normalized(groups))
    }

    fn normalized(mut groups: Vec<Vec<usize>>) -> Self {
        for g in &mut groups {
            g.sort_unstable();
        }
        groups.sort_by_key(|g| g[0]);
        Self { groups }
    }

    pub fn singletons(problem: &Problem) -> Self {
        Self::normalized(problem.evidence().iter().map(|&a| vec![a]).collect())
    }

    pub fn single_group(problem: &Problem) -> Self {
        Self::normalized(vec![problem.evidence().to_vec()])
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn names(&self, space: &PropositionalSpace) -> Vec<Vec<String>> {
        self.groups
            .iter()
            .map(|g| g.iter().map(|&a| space.name(a).to_string()).collect())
            .collect()
    }

    fn merged(&self, i: usize, j: usize) -> Self {
        let mut groups = self.groups.clone();
        let right = groups.remove(j);
        groups[i].extend(right);
        Self::normalized(groups)
    }
}

fn restrict(assignment: &[Literal], group: &[usize]) -> Result<Event> {
    Event::new(assignment.iter().copied().filter(|l| group.contains(&l.attr)))
}

fn positive<T: Scalar>(p: T) -> Result<T> {
    if p <= T::lit(ZERO_MASS) {
        Err(Error::ZeroProbabilityEvidence)
    } else {
        Ok(p)
    }
}

/// Surrogate posterior of `h = true` for a full evidence assignment.
pub fn approx_predictive_solution<T: Scalar>(
    dist: &JointDistribution<T>,
    problem: &Problem,
    partition: &EvidencePartition,
    assignment: &[Literal],
) -> Result<T> {
    let mut terms = Vec::with_capacity(2);
    for v in [true, false] {
        let h = Event::single(problem.hypothesis_literal(v));
        let p_h = positive(oracle::marginal(dist, &h)?)?;
        let mut term = p_h.clone();
        for group in partition.groups() {
            let joint = restrict(assignment, group)?.and(&h)?;
            term = term * (oracle::marginal(dist, &joint)? / p_h.clone());
        }
        terms.push(term);
    }
    let denom = positive(terms[0].clone() + terms[1].clone())?;
    Ok(terms[0].clone() / denom)
}

/// Surrogate error over every full evidence assignment with positive mass.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionError<T> {
    pub max_error: T,
    pub mean_error: T,
    pub evaluated: usize,
    pub skipped: usize,
}

pub fn partition_error<T: Scalar>(
    dist: &JointDistribution<T>,
    problem: &Problem,
    partition: &EvidencePartition,
) -> Result<PartitionError<T>> {
    let zero_mass = T::lit(ZERO_MASS);
    let mut max_error = T::zero();
    let mut total = T::zero();
    let (mut evaluated, mut skipped) = (0usize, 0usize);
    for assignment in problem.full_assignments() {
        let with_h = dist.prob(problem.state_of(&assignment, true)).clone();
        let mass = with_h.clone() + dist.prob(problem.state_of(&assignment, false)).clone();
        if mass <= zero_mass {
            skipped += 1;
            continue;
        }
        let exact = with_h / mass;
        let approx = approx_predictive_solution(dist, problem, partition, &assignment)?;
        let err = (approx - exact).abs();
        total = total + err.clone();
        max_error = max_of(max_error, err);
        evaluated += 1;
    }
    if evaluated == 0 {
        return Err(Error::EverythingSkipped);
    }
    Ok(PartitionError {
        max_error,
        mean_error: total / T::from_usize(evaluated).expect("count fits the scalar"),
        evaluated,
        skipped,
    })
}

/// One greedy merge.
#[derive(Debug, Clone, PartialEq)]
pub struct MergeStep<T> {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
    /// Summed pairwise conditional mutual information across the two groups.
    pub score: T,
    /// Surrogate max error before the merge.
    pub max_error_before: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionReport<T> {
    pub partition: EvidencePartition,
    pub max_error: T,
    pub mean_error: T,
    pub evaluated: usize,
    pub skipped: usize,
    pub merges: Vec<MergeStep<T>>,
}

/// Greedy agglomeration of evidence groups.
pub fn greedy_decompose<T: FloatScalar>(
    dist: &JointDistribution<T>,
    problem: &Problem,
    target_tol: T,
    max_group_size: usize,
) -> Result<DecompositionReport<T>> {
    if target_tol <= T::zero() {
        return Err(Error::InvalidConfig("target tolerance must be positive".into()));
    }
    if max_group_size == 0 {
        return Err(Error::InvalidConfig("max group size must be at least 1".into()));
    }
    let k = dist.k();
    let mut cmi = vec![vec![T::zero(); k]; k];
    let ev = problem.evidence();
    for (i, &x) in ev.iter().enumerate() {
        for &y in &ev[i + 1..] {
            let s = conditional_mutual_information(dist, problem, x, y)?;
            cmi[x][y] = s;
            cmi[y][x] = s;
        }
    }
    let score = |a: &[usize], b: &[usize]| -> T {
        a.iter()
            .flat_map(|&x| b.iter().map(move |&y| (x, y)))
            .fold(T::zero(), |acc, (x, y)| acc + cmi[x][y])
    };

    let mut partition = EvidencePartition::singletons(problem);
    let mut merges = Vec::new();
    loop {
        let err = partition_error(dist, problem, &partition)?;
        if err.max_error <= target_tol {
            return Ok(report(partition, err, merges));
        }
        let groups = partition.groups();
        let mut best: Option<(usize, usize, T)> = None;
        for i in 0..groups.len() {
            for j in i + 1..groups.len() {
                if groups[i].len() + groups[j].len() > max_group_size {
                    continue;
                }
                let s = score(&groups[i], &groups[j]);
                if best.as_ref().is_none_or(|(_, _, b)| s > *b) {
                    best = Some((i, j, s));
                }
            }
        }
        let Some((i, j, s)) = best else {
            return Ok(report(partition, err, merges));
        };
        merges.push(MergeStep {
            left: groups[i].clone(),
            right: groups[j].clone(),
            score: s,
            max_error_before: err.max_error,
        });
        partition = partition.merged(i, j);
    }
}

fn report<T>(
    partition: EvidencePartition,
    err: PartitionError<T>,
    merges: Vec<MergeStep<T>>,
) -> DecompositionReport<T> {
    DecompositionReport {
        partition,
        max_error: err.max_error,
        mean_error: err.mean_error,
        evaluated: err.evaluated,
        skipped: err.skipped,
        merges,
    }
}

/// JSON form of a [`DecompositionReport`], with attribute names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionJson {
    pub hypothesis: String,
    pub partition: Vec<Vec<String>>,
    pub max_error: f64,
    pub mean_error: f64,
    pub evaluated_assignments: usize,
    pub skipped_assignments: usize,
    pub merges: Vec<MergeJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MergeJson {
    pub left: Vec<String>,
    pub right: Vec<String>,
    pub score: f64,
    pub max_error_before: f64,
}

impl<T: Scalar> DecompositionReport<T> {
    pub fn to_json(&self, problem: &Problem) -> DecompositionJson {
        let space = problem.space();
        let names = |g: &[usize]| g.iter().map(|&a| space.name(a).to_string()).collect();
        DecompositionJson {
            hypothesis: space.name(problem.hypothesis()).to_string(),
            partition: self.partition.names(space),
            max_error: self.max_error.to_f64_lossy(),
            mean_error: self.mean_error.to_f64_lossy(),
            evaluated_assignments: self.evaluated,
            skipped_assignments: self.skipped,
            merges: self
                .merges
                .iter()
                .map(|m| MergeJson {
                    left: names(&m.left),
                    right: names(&m.right),
                    score: m.score.to_f64_lossy(),
                    max_error_before: m.max_error_before.to_f64_lossy(),
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use approx::assert_abs_diff_eq;
    use num_rational::BigRational;
    use num_traits::Zero;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn problem() -> Problem {
        Problem::new(fixtures::nb1::<f64>().space(), 0).unwrap()
    }

    fn pair(a: bool, b: bool) -> [Literal; 2] {
        [Literal::new(1, a), Literal::new(2, b)]
    }

    #[test]
    fn partition_validation() {
        let p = problem();
        assert!(EvidencePartition::new(&p, vec![vec![2], vec![1]]).is_ok());
        assert!(EvidencePartition::new(&p, vec![vec![1]]).is_err());
        assert!(EvidencePartition::new(&p, vec![vec![1, 2], vec![]]).is_err());
        assert!(EvidencePartition::new(&p, vec![vec![1, 2], vec![2]]).is_err());
        assert_eq!(
            EvidencePartition::new(&p, vec![vec![0], vec![1, 2]]),
            Err(Error::NotEvidence(0))
        );
        let n = EvidencePartition::new(&p, vec![vec![2], vec![1]]).unwrap();
        assert_eq!(n, EvidencePartition::singletons(&p));
    }

    #[test]
    fn approx_examples() {
        let p = problem();
        let xor1 = fixtures::xor1::<BigRational>();
        let one = EvidencePartition::single_group(&p);
        let singles = EvidencePartition::singletons(&p);
        assert_eq!(
            approx_predictive_solution(&xor1, &p, &one, &pair(true, false)).unwrap(),
            q(1, 1)
        );
        assert_eq!(
            approx_predictive_solution(&xor1, &p, &singles, &pair(true, false)).unwrap(),
            q(1, 2)
        );
        let nb1 = fixtures::nb1::<BigRational>();
        assert_eq!(
            approx_predictive_solution(&nb1, &p, &singles, &pair(true, true)).unwrap(),
            q(6, 7)
        );
    }

    #[test]
    fn partition_error_examples() {
        let p = problem();
        let xor1 = fixtures::xor1::<BigRational>();
        let e = partition_error(&xor1, &p, &EvidencePartition::single_group(&p)).unwrap();
        assert!(e.max_error.is_zero() && e.mean_error.is_zero());
        assert_eq!(e.skipped, 0);
        let e = partition_error(&xor1, &p, &EvidencePartition::singletons(&p)).unwrap();
        assert_eq!(e.max_error, q(1, 2));
        assert_eq!(e.mean_error, q(1, 2));
        let nb1 = fixtures::nb1::<BigRational>();
        let e = partition_error(&nb1, &p, &EvidencePartition::singletons(&p)).unwrap();
        assert!(e.max_error.is_zero());
    }

    #[test]
    fn degenerate_hypothesis_is_an_error() {
        let d =
            JointDistribution::validate(["h", "a", "b"], vec![0.25f64, 0.25, 0.25, 0.25, 0.0, 0.0, 0.0, 0.0]).unwrap();
        let p = Problem::new(d.space(), 0).unwrap();
        assert_eq!(
            partition_error(&d, &p, &EvidencePartition::singletons(&p)),
            Err(Error::ZeroProbabilityEvidence)
        );
    }

    #[test]
    fn greedy_examples() {
        let p = problem();
        let r = greedy_decompose(&fixtures::xor1::<f64>(), &p, 1e-9, 2).unwrap();
        assert_eq!(r.partition.groups(), &[vec![1, 2]]);
        assert_eq!(r.merges.len(), 1);
        assert_abs_diff_eq!(r.merges[0].score, std::f64::consts::LN_2, epsilon = 1e-12);
        assert_abs_diff_eq!(r.max_error, 0.0, epsilon = 1e-12);

        let r = greedy_decompose(&fixtures::xor1::<f64>(), &p, 1e-9, 1).unwrap();
        assert_eq!(r.partition, EvidencePartition::singletons(&p));
        assert_abs_diff_eq!(r.max_error, 0.5, epsilon = 1e-12);

        for d in [fixtures::nb1::<f64>(), fixtures::pr1::<f64>()] {
            let r = greedy_decompose(&d, &p, 1e-9, 2).unwrap();
            assert!(r.merges.is_empty());
            assert_abs_diff_eq!(r.max_error, 0.0, epsilon = 1e-12);
        }
        assert!(greedy_decompose(&fixtures::nb1::<f64>(), &p, 1e-9, 0).is_err());
        assert!(greedy_decompose(&fixtures::nb1::<f64>(), &p, 0.0, 2).is_err());
    }

    #[test]
    fn json_uses_names() {
        let p = problem();
        let r = greedy_decompose(&fixtures::xor1::<f64>(), &p, 1e-9, 2).unwrap();
        let j = r.to_json(&p);
        assert_eq!(j.partition, vec![vec!["a".to_string(), "b".to_string()]]);
        assert_eq!(j.merges[0].left, vec!["a".to_string()]);
        assert_eq!(j.hypothesis, "h");
    }
}
