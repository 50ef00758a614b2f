//! Offspring probability generating functions of Bienaymé–Galton–Watson processes.
//!
//! A [`Pgf`] keeps, besides its coefficients `p_i`, the tail sums
//! `T_l = Σ_{i>l} p_i`. They give the factorisation
//!
//! ```text
//! 1 - f(θ) = (1 - θ) · Σ_l T_l θ^l
//! ```
//!
//! whose right-hand side has only nonnegative terms. All iteration is carried out on the
//! survival complement `u_n = 1 - f_n(0)` through this identity, so `u_n` keeps full relative
//! accuracy long after `f_n(0)` has rounded to 1, and coefficients that sum to 1 only up to
//! rounding can never push the iterates past the fixed point.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

/// Highest supported polynomial degree.
pub const MAX_DEGREE: usize = 64;

/// Offspring means at or above `1 - SUBCRITICAL_MARGIN` are treated as critical.
pub const SUBCRITICAL_MARGIN: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PgfError {
    #[error("pgf has no coefficients")]
    Empty,
    #[error("pgf degree {0} exceeds the supported maximum of {MAX_DEGREE}")]
    DegreeTooHigh(usize),
    #[error("pgf coefficient {index} is {value}, expected a finite probability")]
    BadCoefficient { index: usize, value: f64 },
    #[error("pgf coefficients sum to {0}, expected 1")]
    NotNormalized(f64),
    #[error("pgf argument {0} outside [0, 1]")]
    ArgumentOutOfRange(f64),
    #[error("offspring mean {0} is not subcritical")]
    NotSubcritical(f64),
}

/// Serialized as the bare coefficient list and validated again when read back.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "", try_from = "Vec<T>", into = "Vec<T>")]
pub struct Pgf<T: Scalar = f64> {
    coeffs: Vec<T>,
    tails: Vec<T>,
    mean: T,
}

impl<T: Scalar> TryFrom<Vec<T>> for Pgf<T> {
    type Error = PgfError;

    fn try_from(coeffs: Vec<T>) -> Result<Self, PgfError> {
        Self::new(coeffs)
    }
}

impl<T: Scalar> From<Pgf<T>> for Vec<T> {
    fn from(p: Pgf<T>) -> Self {
        p.coeffs
    }
}

impl<T: Scalar> Pgf<T> {
    pub fn new(coeffs: Vec<T>) -> Result<Self, PgfError> {
        if coeffs.is_empty() {
            return Err(PgfError::Empty);
        }
        if coeffs.len() > MAX_DEGREE + 1 {
            return Err(PgfError::DegreeTooHigh(coeffs.len() - 1));
        }
        for (index, &p) in coeffs.iter().enumerate() {
            if !p.is_finite() || p < T::zero() || p > T::one() {
                return Err(PgfError::BadCoefficient {
                    index,
                    value: p.to_f64_lossy(),
                });
            }
        }
        let total: T = coeffs.iter().copied().sum();
        let slack = T::lit(1e-12).max(T::epsilon() * T::from_count(4 * coeffs.len()));
        if (total - T::one()).abs() > slack {
            return Err(PgfError::NotNormalized(total.to_f64_lossy()));
        }
        // T_l for l = 0..deg-1, accumulated from the top so small tails stay accurate.
        let deg = coeffs.len() - 1;
        let mut tails = vec![T::zero(); deg];
        let mut acc = T::zero();
        for l in (0..deg).rev() {
            acc += coeffs[l + 1];
            tails[l] = acc;
        }
        let mean = tails.iter().copied().sum();
        Ok(Self {
            coeffs,
            tails,
            mean,
        })
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    /// Degree of the polynomial ignoring trailing zero coefficients.
    pub fn degree(&self) -> usize {
        self.coeffs
            .iter()
            .rposition(|&p| p > T::zero())
            .unwrap_or(0)
    }

    /// Tail sums `T_l = P(ξ > l)`; `1 - f(θ) = (1 - θ) Σ T_l θ^l`.
    pub fn tail_sums(&self) -> &[T] {
        &self.tails
    }

    /// Offspring mean `f'(1) = Σ i p_i`.
    pub fn offspring_mean(&self) -> T {
        self.mean
    }

    pub fn is_subcritical(&self) -> bool {
        self.mean < T::one() - T::lit(SUBCRITICAL_MARGIN)
    }

    pub fn require_subcritical(&self) -> Result<(), PgfError> {
        if self.is_subcritical() {
            Ok(())
        } else {
            Err(PgfError::NotSubcritical(self.mean.to_f64_lossy()))
        }
    }

    /// `f(θ)` for `θ ∈ [0, 1]`.
    pub fn eval(&self, theta: T) -> Result<T, PgfError> {
        if !(theta >= T::zero() && theta <= T::one()) {
            return Err(PgfError::ArgumentOutOfRange(theta.to_f64_lossy()));
        }
        Ok(T::one() - self.complement(theta))
    }

    /// `1 - f(θ)`, evaluated without cancellation.
    pub fn complement(&self, theta: T) -> T {
        (T::one() - theta) * self.tail_poly(theta)
    }

    /// `Σ T_l θ^l = (1 - f(θ)) / (1 - θ)`; equals the offspring mean at `θ = 1`.
    pub fn tail_poly(&self, theta: T) -> T {
        self.tails
            .iter()
            .rev()
            .fold(T::zero(), |acc, &t| acc * theta + t)
    }

    /// One iteration on the survival complement: `u ↦ 1 - f(1 - u)`.
    #[inline]
    pub fn next_survival(&self, u: T) -> T {
        u * self.tail_poly(T::one() - u)
    }

    /// `[f_0(0), f_1(0), …, f_{n_max}(0)]` with `f_0(0) = 0`.
    pub fn extinction_cdf(&self, n_max: usize) -> Vec<T> {
        self.survival_sequence(n_max)
            .into_iter()
            .map(|u| T::one() - u)
            .collect()
    }

    /// `[1 - f_0(0), …, 1 - f_{n_max}(0)]`, i.e. `P(T > n)` for `n = 0..=n_max`.
    pub fn survival_sequence(&self, n_max: usize) -> Vec<T> {
        let mut out = Vec::with_capacity(n_max + 1);
        let mut u = T::one();
        out.push(u);
        for _ in 0..n_max {
            u = self.next_survival(u);
            out.push(u);
        }
        out
    }
}

impl Pgf<f64> {
    /// Convenience constructor for literal coefficient lists.
    pub fn from_slice(coeffs: &[f64]) -> Result<Self, PgfError> {
        Self::new(coeffs.to_vec())
    }
}
