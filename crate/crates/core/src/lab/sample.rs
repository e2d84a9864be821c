//! Seeded random distribution families.
//!
//! Every family draws from `ChaCha8Rng::seed_from_u64(seed)` (rand_chacha
//! 0.3) and turns each 64-bit output into a uniform `u` in `[0, 1)` with the
//! top 53 bits (`rand` 0.8 `Standard` for `f64`). Draw order is part of the
//! contract:
//!
//! - `dirichlet`: one `u` per state in index order, weight `-ln(1 - u)`
//!   (a unit exponential), table = weights / sum. This is a symmetric
//!   Dirichlet(1) over all `2^k` states.
//! - `product`: one marginal `0.05 + 0.9 u` per attribute in order.
//! - `naive-bayes`: P(h), then for each evidence attribute in order
//!   P(e | h) and P(e | ¬h), each `0.05 + 0.9 u`.
//! - `xor-noise`: flip rate `0.2 u`, then one marginal `0.05 + 0.9 u` for
//!   each attribute from index 3 on. Attributes 1 and 2 are fair coins and
//!   h equals their exclusive or except with the flip rate.
//!
//! Attribute 0 is named `h`, the rest `e1 … e(k-1)`.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{JointDistribution, PropositionalSpace, MIN_ATTRIBUTES};

/// Largest attribute count accepted by the audit.
pub const AUDIT_MAX_ATTRIBUTES: usize = 12;

const MARGINAL_LO: f64 = 0.05;
const MARGINAL_HI: f64 = 0.95;
const MAX_FLIP: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Dirichlet,
    Product,
    NaiveBayes,
    XorNoise,
}

impl Family {
    pub const ALL: [Family; 4] = [Self::Dirichlet, Self::Product, Self::NaiveBayes, Self::XorNoise];

    pub fn label(self) -> &'static str {
        match self {
            Self::Dirichlet => "dirichlet",
            Self::Product => "product",
            Self::NaiveBayes => "naive-bayes",
            Self::XorNoise => "xor-noise",
        }
    }

    /// Smallest attribute count the family can be built on.
    pub fn min_attributes(self) -> usize {
        match self {
            Self::XorNoise => 3,
            _ => MIN_ATTRIBUTES,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.label() == s.trim())
            .ok_or_else(|| Error::UnknownFamily(s.to_string()))
    }
}

fn attribute_names(k: usize) -> Vec<String> {
    std::iter::once("h".to_string())
        .chain((1..k).map(|i| format!("e{i}")))
        .collect()
}

fn unit_marginal(rng: &mut ChaCha8Rng) -> f64 {
    MARGINAL_LO + (MARGINAL_HI - MARGINAL_LO) * rng.gen::<f64>()
}

fn bit(state: usize, k: usize, attr: usize) -> bool {
    state & (1 << (k - 1 - attr)) != 0
}

fn pick(p_true: f64, value: bool) -> f64 {
    if value {
        p_true
    } else {
        1.0 - p_true
    }
}

/// Draws one table from `family` over `k` attributes. Deterministic in
/// `(family, k, seed)`.
pub fn sample_distribution(family: Family, k: usize, seed: u64) -> Result<JointDistribution<f64>> {
    // Validates the attribute count, including the upper limit.
    let space = PropositionalSpace::new(attribute_names(k))?;
    if k < family.min_attributes() {
        return Err(Error::InvalidConfig(format!(
            "family {family} needs at least {} attributes, got {k}",
            family.min_attributes()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = space.num_states();
    let raw: Vec<f64> = match family {
        Family::Dirichlet => {
            let weights: Vec<f64> = (0..n).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
            let total: f64 = weights.iter().sum();
            weights.into_iter().map(|w| w / total).collect()
        }
        Family::Product => {
            let marginals: Vec<f64> = (0..k).map(|_| unit_marginal(&mut rng)).collect();
            (0..n)
                .map(|s| (0..k).map(|a| pick(marginals[a], bit(s, k, a))).product())
                .collect()
        }
        Family::NaiveBayes => {
            let p_h = unit_marginal(&mut rng);
            // [P(e | ¬h), P(e | h)] per evidence attribute.
            let likelihoods: Vec<[f64; 2]> = (1..k)
                .map(|_| {
                    let given_h = unit_marginal(&mut rng);
                    let given_not_h = unit_marginal(&mut rng);
                    [given_not_h, given_h]
                })
                .collect();
            (0..n)
                .map(|s| {
                    let h = bit(s, k, 0);
                    let evidence: f64 = (1..k)
                        .map(|a| pick(likelihoods[a - 1][usize::from(h)], bit(s, k, a)))
                        .product();
                    pick(p_h, h) * evidence
                })
                .collect()
        }
        Family::XorNoise => {
            let flip = MAX_FLIP * rng.gen::<f64>();
            let rest: Vec<f64> = (3..k).map(|_| unit_marginal(&mut rng)).collect();
            (0..n)
                .map(|s| {
                    let xor = bit(s, k, 1) ^ bit(s, k, 2);
                    let h_term = if bit(s, k, 0) == xor { 1.0 - flip } else { flip };
                    let others: f64 = (3..k).map(|a| pick(rest[a - 3], bit(s, k, a))).product();
                    0.25 * h_term * others
                })
                .collect()
        }
    };
    JointDistribution::with_space(space, raw)
}
