//! Floating-point scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// A real scalar the lifetime computations can be carried out in (`f32` or `f64`).
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Converts an `f64` literal; every supported scalar can represent (a rounding of) it.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar")
    }

    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// `x^k` computed as `exp(k ln x)` so huge exponents neither underflow
    /// prematurely nor lose accuracy; `0^0 = 1`.
    #[inline]
    fn pow_count(self, k: Self) -> Self {
        if k == Self::zero() || self == Self::one() {
            Self::one()
        } else if self <= Self::zero() {
            Self::zero()
        } else {
            (k * self.ln()).exp()
        }
    }

    /// A point strictly left of `x` but closer to it than any breakpoint spacing we care about.
    #[inline]
    fn left_of(self) -> Self {
        self - (self.abs() + Self::one()) * Self::epsilon() * Self::lit(16.0)
    }

    /// A point strictly right of `x`, mirror of [`Scalar::left_of`].
    #[inline]
    fn right_of(self) -> Self {
        self + (self.abs() + Self::one()) * Self::epsilon() * Self::lit(16.0)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Pairwise (cascade) sum: fixed reduction order, error growth `O(log n)`.
pub fn pairwise_sum<T: Scalar>(values: &[T]) -> T {
    const LEAF: usize = 32;
    if values.len() <= LEAF {
        values.iter().copied().fold(T::zero(), |a, b| a + b)
    } else {
        let mid = values.len() / 2;
        pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
    }
}
