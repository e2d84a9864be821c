//! Scalar abstraction shared by every probability computation.
//!
//! The enumeration, certainty-factor and gap code only needs field
//! arithmetic and an ordering, so it runs over `f32`, `f64` and exact
//! `BigRational` alike. Quantities that need logarithms (mutual information,
//! the greedy decomposer) additionally require [`FloatScalar`].

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, Num, Signed, ToPrimitive};

/// A probability-valued scalar: an ordered field with conversions from `f64`.
pub trait Scalar:
    Clone + Debug + Display + PartialOrd + Num + Signed + FromPrimitive + ToPrimitive + Send + Sync
{
    /// Converts an `f64` constant (tolerance, fixture entry) into `Self`.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 constant")
    }

    /// Lossy conversion for reporting.
    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Scalar for T where
    T: Clone + Debug + Display + PartialOrd + Num + Signed + FromPrimitive + ToPrimitive + Send + Sync
{
}

/// Scalars with transcendental functions.
pub trait FloatScalar: Scalar + Float {}

impl<T: Scalar + Float> FloatScalar for T {}

pub(crate) fn max_of<T: Scalar>(a: T, b: T) -> T {
    if b > a {
        b
    } else {
        a
    }
}

pub(crate) fn min_of<T: Scalar>(a: T, b: T) -> T {
    if b < a {
        b
    } else {
        a
    }
}

/// Sum of a slice, left to right.
pub(crate) fn sum<'a, T: Scalar + 'a>(items: impl IntoIterator<Item = &'a T>) -> T {
    items.into_iter().fold(T::zero(), |acc, x| acc + x.clone())
}
