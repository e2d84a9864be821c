//! Canonical three-attribute tables over `[h, a, b]`.
//!
//! Entries are stored in hundredths so exact scalar types see the exact
//! table. The same tables ship as JSON under `fixtures/` at the repository
//! root.

use crate::error::Result;
use crate::model::JointDistribution;
use crate::scalar::Scalar;

pub const ATTRIBUTES: [&str; 3] = ["h", "a", "b"];

/// Full independence: P(h)=.5, P(a)=.6, P(b)=.4.
pub const PR1: [i64; 8] = [12, 8, 18, 12, 12, 8, 18, 12];
/// Naive Bayes: P(h)=.5, P(a|h)=.8, P(a|¬h)=.4, P(b|h)=.6, P(b|¬h)=.2.
pub const NB1: [i64; 8] = [24, 6, 16, 4, 4, 6, 16, 24];
/// h = a xor b with (a, b) uniform.
pub const XOR1: [i64; 8] = [25, 0, 0, 25, 0, 25, 25, 0];
/// Independent given h=true and marginally independent, but not given h=false.
pub const DSTRICT1: [i64; 8] = [20, 10, 20, 0, 4, 6, 16, 24];
/// Independent given h=false and marginally independent.
pub const M1X1: [i64; 8] = [24, 6, 16, 4, 0, 10, 20, 20];

pub const NAMES: [&str; 5] = ["pr1", "nb1", "xor1", "dstrict1", "m1x1"];

fn from_hundredths<T: Scalar>(entries: &[i64; 8]) -> JointDistribution<T> {
    let hundred = T::from_i64(100).expect("scalar holds small integers");
    let raw = entries
        .iter()
        .map(|&e| T::from_i64(e).expect("scalar holds small integers") / hundred.clone())
        .collect();
    JointDistribution::validate(ATTRIBUTES, raw).expect("fixture tables are valid")
}

pub fn pr1<T: Scalar>() -> JointDistribution<T> {
    from_hundredths(&PR1)
}

pub fn nb1<T: Scalar>() -> JointDistribution<T> {
    from_hundredths(&NB1)
}

pub fn xor1<T: Scalar>() -> JointDistribution<T> {
    from_hundredths(&XOR1)
}

pub fn dstrict1<T: Scalar>() -> JointDistribution<T> {
    from_hundredths(&DSTRICT1)
}

pub fn m1x1<T: Scalar>() -> JointDistribution<T> {
    from_hundredths(&M1X1)
}

/// Looks up a fixture by its lower-case name.
pub fn by_name<T: Scalar>(name: &str) -> Option<JointDistribution<T>> {
    let table = match name.to_ascii_lowercase().as_str() {
        "pr1" => &PR1,
        "nb1" => &NB1,
        "xor1" => &XOR1,
        "dstrict1" => &DSTRICT1,
        "m1x1" => &M1X1,
        _ => return None,
    };
    Some(from_hundredths(table))
}

/// Every fixture with its name.
pub fn all<T: Scalar>() -> Result<Vec<(&'static str, JointDistribution<T>)>> {
    Ok(NAMES
        .iter()
        .map(|&n| (n, by_name(n).expect("listed fixture")))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use num_traits::One;

    #[test]
    fn fixtures_sum_to_one_exactly() {
        for table in [PR1, NB1, XOR1, DSTRICT1, M1X1] {
            assert_eq!(table.iter().sum::<i64>(), 100);
        }
        for (_, d) in all::<BigRational>().unwrap() {
            let total = d.probs().iter().fold(BigRational::from_integer(0.into()), |a, p| a + p);
            assert!(total.is_one());
        }
        for (_, d) in all::<f64>().unwrap() {
            assert!((d.probs().iter().sum::<f64>() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn by_name_is_case_insensitive() {
        assert!(by_name::<f64>("NB1").is_some());
        assert!(by_name::<f64>("nope").is_none());
    }
}
