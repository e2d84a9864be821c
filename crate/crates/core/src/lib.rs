//! Certainty factors against an exact Bayesian oracle.
//!
//! The crate evaluates the certainty-factor (CF) language on small binary
//! joint distributions: the MB/MD mapping from probabilities, the parallel
//! combination rules, and how far the two disagree. Around that it provides
//! exact enumeration queries, a decomposability classifier, seeded random
//! domains for audits, and a greedy evidence-grouping heuristic.
//!
//! All core computations are generic over [`Scalar`]; the aliases below fix
//! the common choices.

pub mod cf;
pub mod classify;
pub mod decompose;
pub mod error;
pub mod fixtures;
pub mod lab;
pub mod model;
pub mod oracle;
pub mod scalar;
pub mod text;

pub use cf::{cf_direct, combine, combine_mb, combine_md, fold_combine, mb_of, md_of, BeliefMeasures};
pub use classify::{
    classify, conditional_independence_gap, conditional_mutual_information, marginal_independence_gap,
    ClassificationReport, IndependenceVariant, ProblemClass,
};
pub use decompose::{
    approx_predictive_solution, greedy_decompose, partition_error, DecompositionReport, EvidencePartition,
};
pub use error::{Error, Result};
pub use lab::{
    audit, gap_record, lemma_gaps, product_condition_gap, sample_distribution, AuditConfig, AuditReport, Family,
    GapBranch, GapRecord, LemmaGaps,
};
pub use model::{
    DistributionFile, Event, EvidenceAssignment, JointDistribution, Literal, Observation, Problem, PropositionalSpace,
};
pub use oracle::{conditional, diagnostic_probability, marginal, predictive_solution};
pub use scalar::{FloatScalar, Scalar};

/// Exact rational scalar.
pub type Rational = num_rational::BigRational;

pub type Distribution = JointDistribution<f64>;
pub type DistributionF32 = JointDistribution<f32>;
pub type ExactDistribution = JointDistribution<Rational>;

pub type Measures = BeliefMeasures<f64>;
pub type ExactMeasures = BeliefMeasures<Rational>;

pub type Gaps = GapRecord<f64>;
pub type ExactGaps = GapRecord<Rational>;

pub type Classification = ClassificationReport<f64>;
pub type Decomposition = DecompositionReport<f64>;
