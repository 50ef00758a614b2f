//! Expected lifetime of a parallel system with mixed component types.
//!
//! For counts `x = (x_1, …, x_d)` the expected maximum is
//!
//! ```text
//! M(x) = ∫_0^∞ (1 - Π_i F_i(s)^{x_i}) ds
//! ```
//!
//! The integral is split at the breakpoints of every active distribution. Panels on which
//! all factors are step functions contribute exact rectangles; the remaining panels go to
//! adaptive Simpson with half of the tolerance, shared in proportion to panel length. The
//! integral is cut at a point `T` where the union bound
//! `1 - Π F_i^{x_i} <= Σ ⌈x_i⌉ (1 - F_i)` certifies a tail of at most the other half.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dist::LifetimeDistribution;
use crate::error::{Error, Result};
use crate::quadrature::{adaptive_simpson, DEFAULT_MAX_DEPTH};
use crate::scalar::Scalar;

/// Component counts per type; `n` is their sum.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Composition {
    counts: Vec<usize>,
}

impl Composition {
    pub fn new(counts: Vec<usize>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::invalid("a composition needs at least one type"));
        }
        Ok(Self { counts })
    }

    /// All `n` units on type `index` out of `d`.
    pub fn unmixed(d: usize, index: usize, n: usize) -> Self {
        let mut counts = vec![0; d];
        counts[index] = n;
        Self { counts }
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn d(&self) -> usize {
        self.counts.len()
    }

    pub fn n(&self) -> usize {
        self.counts.iter().sum()
    }

    /// Moves one unit from `from` to `to`, if `from` has one.
    pub fn moved(&self, from: usize, to: usize) -> Option<Self> {
        if self.counts[from] == 0 {
            return None;
        }
        let mut counts = self.counts.clone();
        counts[from] -= 1;
        counts[to] += 1;
        Some(Self { counts })
    }
}

impl std::fmt::Display for Composition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.counts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// A set of component types together with how many of each are installed.
#[derive(Debug, Clone, Copy)]
pub struct MixedSystem<'a, T: Scalar = f64> {
    dists: &'a [LifetimeDistribution<T>],
    comp: &'a Composition,
}

impl<'a, T: Scalar> MixedSystem<'a, T> {
    pub fn new(dists: &'a [LifetimeDistribution<T>], comp: &'a Composition) -> Result<Self> {
        if dists.len() != comp.d() {
            return Err(Error::invalid(format!(
                "{} distributions but a composition over {} types",
                dists.len(),
                comp.d()
            )));
        }
        Ok(Self { dists, comp })
    }

    pub fn dists(&self) -> &'a [LifetimeDistribution<T>] {
        self.dists
    }

    pub fn composition(&self) -> &'a Composition {
        self.comp
    }

    /// `Π_i F_i(s)^{k_i}` with `0^0 = 1`.
    pub fn survival_product(&self, s: T) -> T {
        let exps: Vec<T> = self.comp.counts.iter().map(|&k| T::from_count(k)).collect();
        cdf_product(self.dists, &exps, s)
    }

    pub fn expected_max(&self, tol: T) -> Result<LifetimeValue<T>> {
        let exps: Vec<T> = self.comp.counts.iter().map(|&k| T::from_count(k)).collect();
        expected_max_real(self.dists, &exps, tol)
    }
}

/// An expected lifetime together with a certified bound on its absolute error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct LifetimeValue<T: Scalar = f64> {
    pub value: T,
    pub error_bound: T,
}

/// `Σ_i x_i ln F_i(s)`; `-∞` when some active factor vanishes.
fn log_cdf_product<T: Scalar>(dists: &[LifetimeDistribution<T>], exps: &[T], s: T) -> T {
    let mut acc = T::zero();
    for (d, &x) in dists.iter().zip(exps) {
        if x == T::zero() {
            continue;
        }
        let surv = d.survival(s);
        if surv >= T::one() {
            return T::neg_infinity();
        }
        acc += x * (-surv).ln_1p();
    }
    acc
}

fn cdf_product<T: Scalar>(dists: &[LifetimeDistribution<T>], exps: &[T], s: T) -> T {
    let l = log_cdf_product(dists, exps, s);
    if l == T::neg_infinity() {
        T::zero()
    } else {
        l.exp()
    }
}

/// `1 - Π F_i(s)^{x_i}`, accurate where the product is close to 1.
fn integrand<T: Scalar>(dists: &[LifetimeDistribution<T>], exps: &[T], s: T) -> T {
    let l = log_cdf_product(dists, exps, s);
    if l == T::neg_infinity() {
        T::one()
    } else {
        -l.exp_m1()
    }
}

/// `M(x)` for real nonnegative exponents. Integer exponents give the expected lifetime of the
/// corresponding system; fractional ones trace the concave interpolation between them.
pub fn expected_max_real<T: Scalar>(
    dists: &[LifetimeDistribution<T>],
    exps: &[T],
    tol: T,
) -> Result<LifetimeValue<T>> {
    if dists.len() != exps.len() {
        return Err(Error::invalid("one exponent per distribution is required"));
    }
    if !(tol > T::zero() && tol.is_finite()) {
        return Err(Error::invalid(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    if exps.iter().any(|&x| !(x >= T::zero() && x.is_finite())) {
        return Err(Error::invalid("exponents must be finite and nonnegative"));
    }
    let active: Vec<usize> = (0..dists.len()).filter(|&i| exps[i] > T::zero()).collect();
    if active.is_empty() {
        // max over an empty set of lifetimes is taken to be 0
        return Ok(LifetimeValue {
            value: T::zero(),
            error_bound: T::zero(),
        });
    }

    let half_tol = tol * T::lit(0.5);
    let weight = |i: usize| exps[i].ceil();
    let share = half_tol / T::from_count(active.len());
    let cutoff = active
        .iter()
        .map(|&i| dists[i].tail_cutoff(share / weight(i)))
        .fold(T::zero(), T::max);
    let tail_bound: T = active
        .iter()
        .map(|&i| weight(i) * dists[i].integrated_tail(cutoff))
        .sum();

    let mut points: Vec<T> = active
        .iter()
        .flat_map(|&i| dists[i].breakpoints(cutoff))
        .collect();
    points.push(T::zero());
    points.push(cutoff);
    points.sort_by(|a, b| a.partial_cmp(b).expect("finite breakpoints"));
    points.dedup();

    let all_step = active.iter().all(|&i| dists[i].is_step());
    let smooth_length = if all_step { T::zero() } else { cutoff };

    let mut value = T::zero();
    let mut quad_error = T::zero();
    let mut converged = true;
    for w in points.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        if all_step {
            value += (b - a) * integrand(dists, exps, a);
            continue;
        }
        // Factors are continuous inside the panel; the right end uses the left limit so a
        // jump located exactly at `b` belongs to the next panel.
        let b_left = b.left_of().max(a);
        let f = |s: T| integrand(dists, exps, s.min(b_left));
        let budget = half_tol * (b - a) / smooth_length;
        let q = adaptive_simpson(&f, a, b, budget, DEFAULT_MAX_DEPTH);
        value += q.value;
        quad_error += q.error;
        converged &= q.converged;
    }

    let rounding = T::epsilon() * T::from_count(points.len() + 16) * value.abs();
    let error_bound = tail_bound + quad_error + rounding;
    if !converged || error_bound > tol {
        return Err(Error::ToleranceNotReached {
            value: value.to_f64_lossy(),
            error_bound: error_bound.to_f64_lossy(),
        });
    }
    Ok(LifetimeValue { value, error_bound })
}

/// `M(counts)` for integer counts.
pub fn expected_max<T: Scalar>(
    dists: &[LifetimeDistribution<T>],
    counts: &[usize],
    tol: T,
) -> Result<LifetimeValue<T>> {
    let comp = Composition::new(counts.to_vec())?;
    MixedSystem::new(dists, &comp)?.expected_max(tol)
}

/// One row of a two-type lifetime curve: `M(k, m)` with `k + m = n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct CurveRow<T: Scalar = f64> {
    pub k: usize,
    pub m: usize,
    pub value: T,
    pub error_bound: T,
}

/// `M(k, n - k)` for `k = 0..=n`.
pub fn lifetime_curve<T: Scalar>(
    dists: &[LifetimeDistribution<T>],
    n: usize,
    tol: T,
) -> Result<Vec<CurveRow<T>>> {
    if dists.len() != 2 {
        return Err(Error::invalid(format!(
            "a lifetime curve needs exactly 2 distributions, got {}",
            dists.len()
        )));
    }
    if n == 0 {
        return Err(Error::invalid("n must be at least 1"));
    }
    (0..=n)
        .into_par_iter()
        .map(|k| {
            let v = expected_max(dists, &[k, n - k], tol)?;
            Ok(CurveRow {
                k,
                m: n - k,
                value: v.value,
                error_bound: v.error_bound,
            })
        })
        .collect()
}

/// Formats a float with 17 significant digits, independent of locale.
pub fn format_sig17(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV with header `k,m,value,error_bound`.
pub fn curve_to_csv<T: Scalar>(rows: &[CurveRow<T>]) -> String {
    let mut out = String::from("k,m,value,error_bound\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.k,
            r.m,
            format_sig17(r.value.to_f64_lossy()),
            format_sig17(r.error_bound.to_f64_lossy())
        ));
    }
    out
}
