//! Nonnegative lifetime distributions.
//!
//! Every family exposes exactly what the lifetime engine and the dominance checks consume:
//! the distribution function `F`, its complement, the generalized inverse
//! `F⁻¹(u) = inf{t : F(t) > u}`, the mean, the integrated tail `∫_T^∞ (1 - F)`, and the
//! points where `F` jumps or loses smoothness.
//!
//! Values are immutable after construction and every method is a pure function.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pgf::{Pgf, PgfError};
use crate::scalar::Scalar;

/// Extinction-time survival tables stop growing here; beyond it values are iterated on demand.
const EXTINCTION_TABLE_CAP: usize = 1 << 20;

/// Largest supported level of the Sudbury pair.
pub const MAX_SUDBURY_LEVEL: u32 = 30;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DistError {
    #[error("invalid {family} parameters: {reason}")]
    InvalidParameters {
        family: &'static str,
        reason: String,
    },
    #[error("quantile level {0} outside [0, 1)")]
    QuantileOutOfRange(f64),
    #[error(transparent)]
    Pgf(#[from] PgfError),
}

fn invalid<T>(family: &'static str, reason: impl Into<String>) -> Result<T, DistError> {
    Err(DistError::InvalidParameters {
        family,
        reason: reason.into(),
    })
}

/// How a tabulated distribution function is interpolated between knots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Interpolation {
    /// Right-continuous step function.
    #[default]
    Step,
    Linear,
}

/// Finitely supported distribution on strictly increasing nonnegative values.
#[derive(Debug, Clone, PartialEq)]
pub struct Lattice<T: Scalar> {
    values: Vec<T>,
    probs: Vec<T>,
    /// `F(values[i])`, with the last entry exactly 1.
    cdf: Vec<T>,
    /// `P(X > values[i])`, accumulated from the top.
    tail: Vec<T>,
}

impl<T: Scalar> Lattice<T> {
    fn new(values: Vec<T>, probs: Vec<T>) -> Result<Self, DistError> {
        const FAMILY: &str = "lattice";
        if values.is_empty() || values.len() != probs.len() {
            return invalid(
                FAMILY,
                "values and probs must be nonempty and of equal length",
            );
        }
        check_support(FAMILY, &values)?;
        if probs.iter().any(|&p| !p.is_finite() || p < T::zero()) {
            return invalid(FAMILY, "probabilities must be finite and nonnegative");
        }
        let total: T = probs.iter().copied().sum();
        let slack = T::lit(1e-12).max(T::epsilon() * T::from_count(4 * probs.len()));
        if (total - T::one()).abs() > slack {
            return invalid(FAMILY, format!("probabilities sum to {total}, expected 1"));
        }
        let mut tail = vec![T::zero(); probs.len()];
        let mut acc = T::zero();
        for i in (1..probs.len()).rev() {
            acc += probs[i];
            tail[i - 1] = acc;
        }
        Ok(Self::assemble(values, probs, tail))
    }

    /// Builds from `P(X > values[i])`; the last entry must be 0.
    fn from_tails(values: Vec<T>, tail: Vec<T>) -> Self {
        let mut probs = Vec::with_capacity(values.len());
        let mut above = T::one();
        for &t in &tail {
            probs.push(above - t);
            above = t;
        }
        Self::assemble(values, probs, tail)
    }

    fn assemble(values: Vec<T>, probs: Vec<T>, tail: Vec<T>) -> Self {
        let mut cdf: Vec<T> = tail.iter().map(|&t| T::one() - t).collect();
        if let Some(last) = cdf.last_mut() {
            *last = T::one();
        }
        Self {
            values,
            probs,
            cdf,
            tail,
        }
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    /// Number of support points `<= s`.
    fn rank(&self, s: T) -> usize {
        self.values.partition_point(|&v| v <= s)
    }

    fn cdf(&self, s: T) -> T {
        match self.rank(s) {
            0 => T::zero(),
            i => self.cdf[i - 1],
        }
    }

    fn survival(&self, s: T) -> T {
        match self.rank(s) {
            0 => T::one(),
            i => self.tail[i - 1],
        }
    }

    fn quantile(&self, u: T) -> T {
        let i = self.cdf.partition_point(|&c| c <= u);
        self.values[i.min(self.values.len() - 1)]
    }

    fn integrated_tail(&self, t: T) -> T {
        self.values
            .iter()
            .zip(&self.probs)
            .filter(|(&v, _)| v > t)
            .map(|(&v, &p)| p * (v - t))
            .sum()
    }
}

fn check_support<T: Scalar>(family: &'static str, values: &[T]) -> Result<(), DistError> {
    if values.iter().any(|&v| !v.is_finite() || v < T::zero()) {
        return invalid(family, "support points must be finite and nonnegative");
    }
    if values.windows(2).any(|w| w[0] >= w[1]) {
        return invalid(family, "support points must be strictly increasing");
    }
    Ok(())
}

/// Empirical or user-supplied distribution function given at knots.
#[derive(Debug, Clone, PartialEq)]
pub struct Tabulated<T: Scalar> {
    times: Vec<T>,
    levels: Vec<T>,
    mode: Interpolation,
}

impl<T: Scalar> Tabulated<T> {
    fn new(knots: Vec<(T, T)>, mode: Interpolation) -> Result<Self, DistError> {
        const FAMILY: &str = "tabulated";
        if knots.is_empty() {
            return invalid(FAMILY, "at least one knot is required");
        }
        let (times, mut levels): (Vec<T>, Vec<T>) = knots.into_iter().unzip();
        check_support(FAMILY, &times)?;
        if levels
            .iter()
            .any(|&f| !f.is_finite() || f < T::zero() || f > T::one())
        {
            return invalid(FAMILY, "distribution function values must lie in [0, 1]");
        }
        if levels.windows(2).any(|w| w[0] > w[1]) {
            return invalid(FAMILY, "distribution function values must be nondecreasing");
        }
        let last = levels.last_mut().expect("nonempty");
        if (*last - T::one()).abs() > T::lit(1e-12) {
            return invalid(FAMILY, "the last knot must reach probability 1");
        }
        *last = T::one();
        Ok(Self {
            times,
            levels,
            mode,
        })
    }

    fn cdf(&self, s: T) -> T {
        let i = self.times.partition_point(|&t| t <= s);
        if i == 0 {
            return T::zero();
        }
        if i == self.times.len() || self.mode == Interpolation::Step {
            return self.levels[i - 1];
        }
        let (t0, t1) = (self.times[i - 1], self.times[i]);
        let (f0, f1) = (self.levels[i - 1], self.levels[i]);
        f0 + (s - t0) / (t1 - t0) * (f1 - f0)
    }

    fn quantile(&self, u: T) -> T {
        let i = self.levels.partition_point(|&f| f <= u);
        let i = i.min(self.levels.len() - 1);
        if i == 0 || self.mode == Interpolation::Step {
            return self.times[i];
        }
        let (t0, t1) = (self.times[i - 1], self.times[i]);
        let (f0, f1) = (self.levels[i - 1], self.levels[i]);
        t0 + (u - f0) / (f1 - f0) * (t1 - t0)
    }

    fn integrated_tail(&self, t: T) -> T {
        let mut total = T::zero();
        let first = self.times[0];
        if t < first {
            total += first - t;
        }
        let half = T::lit(0.5);
        for w in 0..self.times.len() - 1 {
            let (t0, t1) = (self.times[w], self.times[w + 1]);
            if t1 <= t {
                continue;
            }
            let lo = t0.max(t);
            let s0 = T::one() - self.cdf(lo);
            let piece = match self.mode {
                Interpolation::Step => s0 * (t1 - lo),
                Interpolation::Linear => half * (s0 + T::one() - self.levels[w + 1]) * (t1 - lo),
            };
            total += piece;
        }
        total
    }
}

/// Law of the extinction time `T` of a subcritical BGW process: `P(T <= n) = f_n(0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtinctionTime<T: Scalar> {
    pgf: Pgf<T>,
    /// `P(T > n)` for `n = 0..survival.len()`.
    survival: Vec<T>,
    /// `suffix[n]` bounds `Σ_{j >= n} P(T > j)` from above; exact up to the geometric remainder.
    suffix: Vec<T>,
}

impl<T: Scalar> ExtinctionTime<T> {
    fn new(pgf: Pgf<T>) -> Result<Self, DistError> {
        pgf.require_subcritical()?;
        let floor = T::epsilon() * T::epsilon();
        let mut survival = vec![T::one()];
        let mut u = T::one();
        while u > floor && survival.len() < EXTINCTION_TABLE_CAP {
            u = pgf.next_survival(u);
            survival.push(u);
        }
        let rest = Self::geometric_remainder(&pgf, *survival.last().expect("nonempty"));
        let mut suffix = vec![T::zero(); survival.len()];
        let mut acc = rest;
        for n in (0..survival.len()).rev() {
            acc += survival[n];
            suffix[n] = acc;
        }
        Ok(Self {
            pgf,
            survival,
            suffix,
        })
    }

    /// Upper bound on `Σ_{j > n} u_j` given `u_n`. The ratio `u_{j+1}/u_j` is the slope of the
    /// chord of the convex `f` between `f_j(0)` and 1, which never exceeds `f'(1) = μ`.
    fn geometric_remainder(pgf: &Pgf<T>, u_n: T) -> T {
        let mu = pgf.offspring_mean();
        u_n * mu / (T::one() - mu)
    }

    pub fn pgf(&self) -> &Pgf<T> {
        &self.pgf
    }

    /// `P(T > n)`.
    pub fn survival_at(&self, n: usize) -> T {
        if let Some(&u) = self.survival.get(n) {
            return u;
        }
        let mut u = *self.survival.last().expect("nonempty");
        for _ in self.survival.len() - 1..n {
            u = self.pgf.next_survival(u);
        }
        u
    }

    fn step_index(s: T) -> usize {
        s.floor().to_usize().unwrap_or(usize::MAX)
    }

    /// Upper bound on `Σ_{j >= n} P(T > j)`.
    fn tail_sum_from(&self, n: usize) -> T {
        if let Some(&v) = self.suffix.get(n) {
            return v;
        }
        let last = self.survival.len() - 1;
        let mu = self.pgf.offspring_mean();
        let u = self.survival[last] * mu.powi((n - last).min(i32::MAX as usize) as i32);
        u / (T::one() - mu)
    }

    fn quantile(&self, u: T) -> T {
        // smallest n with 1 - u_n > u, i.e. u_n < 1 - u
        let target = T::one() - u;
        let n = self.survival.partition_point(|&s| s >= target);
        if n < self.survival.len() {
            return T::from_count(n);
        }
        let mut n = self.survival.len() - 1;
        let mut s = self.survival[n];
        while s >= target {
            s = self.pgf.next_survival(s);
            n += 1;
        }
        T::from_count(n)
    }

    fn integrated_tail(&self, t: T) -> T {
        if t <= T::zero() {
            return self.tail_sum_from(0);
        }
        let whole = Self::step_index(t);
        let frac = t - T::from_count(whole);
        let partial = if frac > T::zero() {
            (T::one() - frac) * self.survival_at(whole)
        } else {
            T::zero()
        };
        let next = if frac > T::zero() { whole + 1 } else { whole };
        partial + self.tail_sum_from(next)
    }

    /// Smallest integer `n` with `Σ_{j >= n} P(T > j) <= eps`.
    fn tail_cutoff(&self, eps: T) -> T {
        let n = self.suffix.partition_point(|&v| v > eps);
        if n < self.suffix.len() {
            return T::from_count(n);
        }
        let last = self.survival.len() - 1;
        let mu = self.pgf.offspring_mean();
        let head = self.survival[last] / (T::one() - mu);
        if mu <= T::zero() || head <= eps {
            return T::from_count(last);
        }
        let extra = ((eps / head).ln() / mu.ln()).ceil();
        T::from_count(last) + extra
    }
}

/// Which member of the truncated Sudbury pair a lattice came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SudburySide {
    X,
    Y,
}

#[derive(Debug, Clone, PartialEq)]
enum Family<T: Scalar> {
    Uniform {
        a: T,
        b: T,
    },
    Exponential {
        rate: T,
    },
    PointMass {
        c: T,
    },
    Lattice(Lattice<T>),
    Tabulated(Tabulated<T>),
    Extinction(ExtinctionTime<T>),
    Sudbury {
        side: SudburySide,
        level: u32,
        lattice: Lattice<T>,
    },
}

/// A nonnegative random lifetime with finite mean.
#[derive(Debug, Clone, PartialEq)]
pub struct LifetimeDistribution<T: Scalar = f64> {
    family: Family<T>,
}

impl<T: Scalar> LifetimeDistribution<T> {
    pub fn uniform(a: T, b: T) -> Result<Self, DistError> {
        if !(a.is_finite() && b.is_finite() && a >= T::zero() && a < b) {
            return invalid("uniform", format!("need 0 <= a < b, got a={a}, b={b}"));
        }
        Ok(Self {
            family: Family::Uniform { a, b },
        })
    }

    pub fn exponential(rate: T) -> Result<Self, DistError> {
        if !(rate.is_finite() && rate > T::zero()) {
            return invalid("exponential", format!("rate must be positive, got {rate}"));
        }
        Ok(Self {
            family: Family::Exponential { rate },
        })
    }

    pub fn point_mass(c: T) -> Result<Self, DistError> {
        if !(c.is_finite() && c >= T::zero()) {
            return invalid(
                "pointmass",
                format!("location must be finite and >= 0, got {c}"),
            );
        }
        Ok(Self {
            family: Family::PointMass { c },
        })
    }

    pub fn lattice(values: Vec<T>, probs: Vec<T>) -> Result<Self, DistError> {
        Ok(Self {
            family: Family::Lattice(Lattice::new(values, probs)?),
        })
    }

    pub fn tabulated(knots: Vec<(T, T)>, mode: Interpolation) -> Result<Self, DistError> {
        Ok(Self {
            family: Family::Tabulated(Tabulated::new(knots, mode)?),
        })
    }

    /// Extinction time of a single-ancestor BGW process; the pgf must be subcritical.
    pub fn bgw_extinction(pgf: Pgf<T>) -> Result<Self, DistError> {
        Ok(Self {
            family: Family::Extinction(ExtinctionTime::new(pgf)?),
        })
    }

    /// The even-valued member of the truncated Sudbury pair.
    ///
    /// `X ∈ {0, 2, …, 2J}` with `P(X >= 2j) = P_j = 2^{-2^j}` for `1 <= j <= J`.
    pub fn sudbury_x(level: u32) -> Result<Self, DistError> {
        let level = check_sudbury_level(level)?;
        let tails = sudbury_tails::<T>(level);
        let values = (0..=level).map(|j| T::from_count(2 * j as usize)).collect();
        let after = (0..=level as usize).map(|j| tails[j + 1]).collect();
        Ok(Self {
            family: Family::Sudbury {
                side: SudburySide::X,
                level,
                lattice: Lattice::from_tails(values, after),
            },
        })
    }

    /// The odd-valued member of the truncated Sudbury pair.
    ///
    /// `Y ∈ {1, 3, …, 2J+1}` with `Q_j = P(Y >= 2j+1)` equal to `P_j` for even `j` and to
    /// `P_{j+1}` for odd `j`, so `Y` overtakes `X` one level up at even levels and falls one
    /// level behind at odd ones. The two distribution functions therefore cross at every
    /// level.
    pub fn sudbury_y(level: u32) -> Result<Self, DistError> {
        let level = check_sudbury_level(level)?;
        let p = sudbury_tails::<T>(level);
        let q = |j: usize| -> T {
            match j {
                0 => T::one(),
                j if j > level as usize => T::zero(),
                j if j % 2 == 0 => p[j],
                j => p[j + 1],
            }
        };
        let values = (0..=level)
            .map(|j| T::from_count(2 * j as usize + 1))
            .collect();
        let after = (0..=level as usize).map(|j| q(j + 1)).collect();
        Ok(Self {
            family: Family::Sudbury {
                side: SudburySide::Y,
                level,
                lattice: Lattice::from_tails(values, after),
            },
        })
    }

    /// Short human-readable family name with parameters.
    pub fn label(&self) -> String {
        match &self.family {
            Family::Uniform { a, b } => format!("uniform({a}, {b})"),
            Family::Exponential { rate } => format!("exponential({rate})"),
            Family::PointMass { c } => format!("pointmass({c})"),
            Family::Lattice(l) => format!("lattice({} atoms)", l.values.len()),
            Family::Tabulated(t) => format!("tabulated({} knots)", t.times.len()),
            Family::Extinction(e) => format!("bgw(mean {})", e.pgf.offspring_mean()),
            Family::Sudbury { side, level, .. } => {
                format!("sudbury_{side:?}({level})").to_lowercase()
            }
        }
    }

    /// The underlying extinction-time law, for BGW-backed distributions.
    pub fn as_extinction(&self) -> Option<&ExtinctionTime<T>> {
        match &self.family {
            Family::Extinction(e) => Some(e),
            _ => None,
        }
    }

    /// `F(s) = P(X <= s)`.
    pub fn cdf(&self, s: T) -> T {
        if s < T::zero() {
            return T::zero();
        }
        match &self.family {
            Family::Uniform { a, b } => {
                if s < *a {
                    T::zero()
                } else if s >= *b {
                    T::one()
                } else {
                    (s - *a) / (*b - *a)
                }
            }
            Family::Exponential { rate } => -(-*rate * s).exp_m1(),
            Family::PointMass { c } => {
                if s >= *c {
                    T::one()
                } else {
                    T::zero()
                }
            }
            Family::Lattice(l) | Family::Sudbury { lattice: l, .. } => l.cdf(s),
            Family::Tabulated(t) => t.cdf(s),
            Family::Extinction(e) => T::one() - e.survival_at(ExtinctionTime::<T>::step_index(s)),
        }
    }

    /// `1 - F(s)`, accurate where `F(s)` is close to 1.
    pub fn survival(&self, s: T) -> T {
        if s < T::zero() {
            return T::one();
        }
        match &self.family {
            Family::Uniform { a, b } => {
                if s < *a {
                    T::one()
                } else if s >= *b {
                    T::zero()
                } else {
                    (*b - s) / (*b - *a)
                }
            }
            Family::Exponential { rate } => (-*rate * s).exp(),
            Family::Lattice(l) | Family::Sudbury { lattice: l, .. } => l.survival(s),
            Family::Extinction(e) => e.survival_at(ExtinctionTime::<T>::step_index(s)),
            Family::PointMass { .. } | Family::Tabulated(_) => T::one() - self.cdf(s),
        }
    }

    /// Generalized inverse `inf{t : F(t) > u}` for `u ∈ [0, 1)`.
    pub fn quantile(&self, u: T) -> Result<T, DistError> {
        if !(u >= T::zero() && u < T::one()) {
            return Err(DistError::QuantileOutOfRange(u.to_f64_lossy()));
        }
        Ok(match &self.family {
            Family::Uniform { a, b } => *a + u * (*b - *a),
            Family::Exponential { rate } => -(-u).ln_1p() / *rate,
            Family::PointMass { c } => *c,
            Family::Lattice(l) | Family::Sudbury { lattice: l, .. } => l.quantile(u),
            Family::Tabulated(t) => t.quantile(u),
            Family::Extinction(e) => e.quantile(u),
        })
    }

    /// `E X = ∫_0^∞ (1 - F)`.
    pub fn mean(&self) -> T {
        match &self.family {
            Family::Uniform { a, b } => (*a + *b) * T::lit(0.5),
            Family::Exponential { rate } => T::one() / *rate,
            Family::PointMass { c } => *c,
            _ => self.integrated_tail(T::zero()),
        }
    }

    /// `∫_t^∞ (1 - F(s)) ds`; exact except for BGW extinction times, where it is an upper bound
    /// whose excess is a geometric remainder below `ε²`.
    pub fn integrated_tail(&self, t: T) -> T {
        let t = t.max(T::zero());
        let half = T::lit(0.5);
        match &self.family {
            Family::Uniform { a, b } => {
                if t <= *a {
                    (*a - t) + (*b - *a) * half
                } else if t < *b {
                    (*b - t) * (*b - t) / ((*b - *a) * T::lit(2.0))
                } else {
                    T::zero()
                }
            }
            Family::Exponential { rate } => (-*rate * t).exp() / *rate,
            Family::PointMass { c } => (*c - t).max(T::zero()),
            Family::Lattice(l) | Family::Sudbury { lattice: l, .. } => l.integrated_tail(t),
            Family::Tabulated(tab) => tab.integrated_tail(t),
            Family::Extinction(e) => e.integrated_tail(t),
        }
    }

    /// Jumps and kinks of `F` in `[0, horizon]`, sorted and deduplicated. Smooth families report
    /// their support endpoints only.
    pub fn breakpoints(&self, horizon: T) -> Vec<T> {
        let keep = |v: &T| *v >= T::zero() && *v <= horizon;
        let mut out: Vec<T> = match &self.family {
            Family::Uniform { a, b } => vec![*a, *b],
            Family::Exponential { .. } => vec![T::zero()],
            Family::PointMass { c } => vec![*c],
            Family::Lattice(l) | Family::Sudbury { lattice: l, .. } => l.values.clone(),
            Family::Tabulated(t) => t.times.clone(),
            Family::Extinction(_) => {
                let top = if horizon >= T::zero() {
                    ExtinctionTime::<T>::step_index(horizon)
                } else {
                    return Vec::new();
                };
                (0..=top).map(T::from_count).collect()
            }
        };
        out.retain(keep);
        out.dedup();
        out
    }

    /// True when `F` is piecewise constant between its breakpoints.
    pub fn is_step(&self) -> bool {
        match &self.family {
            Family::Uniform { .. } | Family::Exponential { .. } => false,
            Family::Tabulated(t) => t.mode == Interpolation::Step,
            Family::PointMass { .. }
            | Family::Lattice(_)
            | Family::Extinction(_)
            | Family::Sudbury { .. } => true,
        }
    }

    /// Right end of the support, when bounded.
    pub fn support_max(&self) -> Option<T> {
        match &self.family {
            Family::Uniform { b, .. } => Some(*b),
            Family::PointMass { c } => Some(*c),
            Family::Lattice(l) | Family::Sudbury { lattice: l, .. } => l.values.last().copied(),
            Family::Tabulated(t) => t.times.last().copied(),
            Family::Exponential { .. } | Family::Extinction(_) => None,
        }
    }

    /// A point `T` (a breakpoint for lattice laws) with `integrated_tail(T) <= eps`.
    pub fn tail_cutoff(&self, eps: T) -> T {
        if let Some(top) = self.support_max() {
            return top;
        }
        match &self.family {
            Family::Exponential { rate } => {
                let t = -((eps * *rate).ln()) / *rate;
                t.max(T::zero())
            }
            Family::Extinction(e) => e.tail_cutoff(eps),
            _ => unreachable!("bounded families handled above"),
        }
    }
}

fn check_sudbury_level(level: u32) -> Result<u32, DistError> {
    if level == 0 || level > MAX_SUDBURY_LEVEL {
        return invalid(
            "sudbury",
            format!("level must be in 1..={MAX_SUDBURY_LEVEL}, got {level}"),
        );
    }
    Ok(level)
}

/// `[P_0, P_1, …, P_J, P_{J+1}]` with `P_0 = 1`, `P_j = 2^{-2^j}` and `P_{J+1} = 0`.
fn sudbury_tails<T: Scalar>(level: u32) -> Vec<T> {
    let mut p = Vec::with_capacity(level as usize + 2);
    p.push(T::one());
    for j in 1..=level {
        let exponent = -(2f64.powi(j as i32));
        p.push(T::lit(exponent.exp2()));
    }
    p.push(T::zero());
    p
}

/// Serializable description of a distribution, as accepted in configuration files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum DistSpec {
    Uniform {
        a: f64,
        b: f64,
    },
    Exponential {
        rate: f64,
    },
    #[serde(rename = "pointmass")]
    PointMass {
        c: f64,
    },
    Lattice {
        values: Vec<f64>,
        probs: Vec<f64>,
    },
    Tabulated {
        knots: Vec<(f64, f64)>,
        #[serde(default)]
        mode: Interpolation,
    },
    Bgw {
        pgf: Vec<f64>,
    },
    SudburyX {
        level: u32,
    },
    SudburyY {
        level: u32,
    },
}

impl DistSpec {
    pub fn build<T: Scalar>(&self) -> Result<LifetimeDistribution<T>, DistError> {
        let c = |v: &[f64]| v.iter().map(|&x| T::lit(x)).collect::<Vec<T>>();
        match self {
            DistSpec::Uniform { a, b } => LifetimeDistribution::uniform(T::lit(*a), T::lit(*b)),
            DistSpec::Exponential { rate } => LifetimeDistribution::exponential(T::lit(*rate)),
            DistSpec::PointMass { c } => LifetimeDistribution::point_mass(T::lit(*c)),
            DistSpec::Lattice { values, probs } => {
                LifetimeDistribution::lattice(c(values), c(probs))
            }
            DistSpec::Tabulated { knots, mode } => LifetimeDistribution::tabulated(
                knots.iter().map(|&(t, f)| (T::lit(t), T::lit(f))).collect(),
                *mode,
            ),
            DistSpec::Bgw { pgf } => LifetimeDistribution::bgw_extinction(Pgf::new(c(pgf))?),
            DistSpec::SudburyX { level } => LifetimeDistribution::sudbury_x(*level),
            DistSpec::SudburyY { level } => LifetimeDistribution::sudbury_y(*level),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type D = LifetimeDistribution<f64>;

    fn u01() -> D {
        D::uniform(0.0, 1.0).unwrap()
    }

    fn bgw_half() -> D {
        D::bgw_extinction(Pgf::from_slice(&[0.5, 0.5]).unwrap()).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn cdf_examples() {
        assert!(close(u01().cdf(0.3), 0.3, 1e-15));
        let pm = D::point_mass(0.6).unwrap();
        assert_eq!(pm.cdf(0.59), 0.0);
        assert_eq!(pm.cdf(0.6), 1.0);
        // f_2(0) = 1 - 2^{-2}
        assert_eq!(bgw_half().cdf(2.5), 0.75);
        assert_eq!(bgw_half().cdf(-1.0), 0.0);
    }

    #[test]
    fn quantile_examples() {
        assert_eq!(u01().quantile(0.25).unwrap(), 0.25);
        assert_eq!(D::point_mass(0.6).unwrap().quantile(0.5).unwrap(), 0.6);
        let l = D::lattice(vec![1.0, 3.0], vec![0.5, 0.5]).unwrap();
        assert_eq!(l.quantile(0.5).unwrap(), 3.0);
        assert_eq!(l.quantile(0.49).unwrap(), 1.0);
    }

    #[test]
    fn quantile_rejects_bad_levels() {
        for u in [1.0, 1.5, -0.1, f64::NAN] {
            assert!(matches!(
                u01().quantile(u),
                Err(DistError::QuantileOutOfRange(_))
            ));
        }
    }

    #[test]
    fn mean_examples() {
        assert_eq!(D::uniform(0.3, 0.5).unwrap().mean(), 0.4);
        assert_eq!(D::exponential(2.0).unwrap().mean(), 0.5);
        // Σ 2^{-n}
        assert!(close(bgw_half().mean(), 2.0, 1e-15));
    }

    #[test]
    fn integrated_tail_examples() {
        assert_eq!(D::exponential(1.0).unwrap().integrated_tail(0.0), 1.0);
        assert!(close(u01().integrated_tail(0.5), 0.125, 1e-15));
        assert!(close(
            D::point_mass(0.6).unwrap().integrated_tail(0.2),
            0.4,
            1e-15
        ));
        // P(T > n) = 2^{-n}: ∫_{1.5}^∞ = 0.5 * 2^{-1} + Σ_{n>=2} 2^{-n}
        assert!(close(bgw_half().integrated_tail(1.5), 0.25 + 0.5, 1e-15));
    }

    #[test]
    fn breakpoint_examples() {
        assert_eq!(
            D::uniform(0.3, 0.5).unwrap().breakpoints(1.0),
            vec![0.3, 0.5]
        );
        assert_eq!(D::point_mass(0.6).unwrap().breakpoints(1.0), vec![0.6]);
        assert_eq!(bgw_half().breakpoints(3.5), vec![0.0, 1.0, 2.0, 3.0]);
        assert_eq!(D::exponential(1.0).unwrap().breakpoints(5.0), vec![0.0]);
    }

    #[test]
    fn construction_rejects_invalid_parameters() {
        assert!(D::uniform(0.5, 0.5).is_err());
        assert!(D::uniform(-1.0, 1.0).is_err());
        assert!(D::exponential(0.0).is_err());
        assert!(D::point_mass(f64::INFINITY).is_err());
        assert!(D::lattice(vec![1.0, 1.0], vec![0.5, 0.5]).is_err());
        assert!(D::lattice(vec![0.0, 1.0], vec![0.5, 0.4]).is_err());
        assert!(D::lattice(vec![-1.0, 1.0], vec![0.5, 0.5]).is_err());
        assert!(D::tabulated(vec![(0.0, 0.5), (1.0, 0.9)], Interpolation::Step).is_err());
        assert!(D::tabulated(vec![(0.0, 0.5), (1.0, 0.4)], Interpolation::Step).is_err());
        assert!(D::sudbury_x(0).is_err());
        // supercritical and critical pgfs have infinite or undefined mean extinction time
        let critical = Pgf::from_slice(&[0.25, 0.5, 0.25]).unwrap();
        assert!(matches!(
            D::bgw_extinction(critical),
            Err(DistError::Pgf(PgfError::NotSubcritical(_)))
        ));
    }

    #[test]
    fn lattice_probabilities_within_tolerance_are_accepted() {
        assert!(D::lattice(vec![0.0, 1.0], vec![0.5, 0.5 + 5e-13]).is_ok());
    }

    #[test]
    fn tabulated_step_and_linear() {
        let knots = vec![(1.0, 0.25), (2.0, 0.5), (4.0, 1.0)];
        let step = D::tabulated(knots.clone(), Interpolation::Step).unwrap();
        let lin = D::tabulated(knots, Interpolation::Linear).unwrap();
        assert_eq!(step.cdf(0.5), 0.0);
        assert_eq!(step.cdf(1.0), 0.25);
        assert_eq!(step.cdf(3.0), 0.5);
        assert_eq!(lin.cdf(3.0), 0.75);
        assert_eq!(step.quantile(0.25).unwrap(), 2.0);
        assert_eq!(lin.quantile(0.75).unwrap(), 3.0);
        // step mean: 1 + 0.75*1 + 0.5*2
        assert!(close(step.mean(), 2.75, 1e-15));
        // linear mean: 1 + (0.75+0.5)/2 + (0.5+0)/2*2
        assert!(close(lin.mean(), 1.0 + 0.625 + 0.5, 1e-15));
        assert!(step.is_step() && !lin.is_step());
    }

    #[test]
    fn sudbury_pair_structure() {
        let x = D::sudbury_x(6).unwrap();
        let y = D::sudbury_y(6).unwrap();
        // P(X >= 4) = 2^{-4}, P(X >= 6) = 2^{-8}
        assert!(close(x.survival(3.0), 1.0 / 16.0, 1e-18));
        assert!(close(x.survival(5.0), 1.0 / 256.0, 1e-18));
        assert_eq!(x.survival(12.0), 0.0);
        // Q_1 = P_2, Q_2 = P_2, Q_3 = P_4, Q_4 = P_4
        assert!(close(y.survival(2.0), 1.0 / 16.0, 1e-18));
        assert!(close(y.survival(4.0), 1.0 / 16.0, 1e-18));
        assert!(close(y.survival(6.0), 2f64.powi(-16), 1e-22));
        assert_eq!(y.survival(0.5), 1.0);
        assert_eq!(x.breakpoints(13.0).len(), 7);
        assert_eq!(y.breakpoints(13.0).len(), 7);
    }

    #[test]
    fn spec_parsing() {
        let s: DistSpec = serde_json_like(r#"{"type":"uniform","a":0.0,"b":1.0}"#);
        assert_eq!(s, DistSpec::Uniform { a: 0.0, b: 1.0 });
        let s: DistSpec = serde_json_like(r#"{"type":"pointmass","c":0.6}"#);
        assert_eq!(s.build::<f64>().unwrap().mean(), 0.6);
        let s: DistSpec = serde_json_like(r#"{"type":"bgw","pgf":[0.5,0.5]}"#);
        assert!(close(s.build::<f64>().unwrap().mean(), 2.0, 1e-15));
        let s: DistSpec = serde_json_like(r#"{"type":"sudbury_x","level":6}"#);
        assert_eq!(s, DistSpec::SudburyX { level: 6 });
    }

    fn serde_json_like(s: &str) -> DistSpec {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn single_precision_instantiation() {
        let u = LifetimeDistribution::<f32>::uniform(0.0, 1.0).unwrap();
        assert_eq!(u.cdf(0.25), 0.25);
        assert_eq!(u.integrated_tail(0.5), 0.125);
    }
}
