//! Colonies of independent subcritical Galton–Watson processes.
//!
//! `T` is the extinction time of one process started from a single ancestor, so
//! `P(T <= n) = f_n(0)` with `f_0(0) = 0` and `E T = Σ_{n>=0} (1 - f_n(0)) >= 1`. A colony of
//! `k` type-f and `m` type-g ancestors dies out at `max` of the individual times.
//!
//! Series are summed on the survival complements `u_n = 1 - f_n(0)`, whose iteration never
//! overshoots and whose ratios `u_{n+1}/u_n` are bounded by the offspring mean `μ` (the chord
//! slope of a convex pgf). Hence `Σ_{j>n} u_j <= u_n μ / (1 - μ)` certifies every truncation.

use serde::{Deserialize, Serialize};

use crate::dist::LifetimeDistribution;
use crate::engine::{lifetime_curve, CurveRow, LifetimeValue};
use crate::error::{Error, Result};
use crate::optimizer::{optimize_composition, SLACK_FACTOR};
use crate::pgf::Pgf;
use crate::poly::{rational, rational_to_f64, Poly, SturmCounter};
use crate::scalar::Scalar;

/// Largest number of generations summed before giving up on the requested tolerance.
pub const MAX_GENERATIONS: usize = 1 << 26;
/// Points in the sign scan of `f - g` on `[0, 1)`.
pub const SCAN_POINTS: usize = 10_000;
/// Width to which scanned zeros are refined.
pub const ROOT_WIDTH: f64 = 1e-12;
/// Highest degree for which the Sturm count is computed.
pub const STURM_MAX_DEGREE: usize = 8;

fn check_tol<T: Scalar>(tol: T) -> Result<()> {
    if !(tol > T::zero() && tol.is_finite()) {
        return Err(Error::invalid(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    Ok(())
}

/// `Σ_{n>=0} (1 - Π_s f_{s,n}(0)^{c_s})` for species `s` with ancestor counts `c_s`.
fn colony_series<T: Scalar>(species: &[(&Pgf<T>, usize)], tol: T) -> Result<LifetimeValue<T>> {
    check_tol(tol)?;
    for (f, _) in species {
        f.require_subcritical()?;
    }
    let active: Vec<(&Pgf<T>, T, T)> = species
        .iter()
        .filter(|(_, c)| *c > 0)
        .map(|(f, c)| {
            let mu = f.offspring_mean();
            (*f, T::from_count(*c), mu / (T::one() - mu))
        })
        .collect();
    if active.is_empty() {
        return Ok(LifetimeValue {
            value: T::zero(),
            error_bound: T::zero(),
        });
    }

    let budget = tol * T::lit(0.5);
    let mut u: Vec<T> = vec![T::one(); active.len()];
    let (mut sum, mut comp) = (T::zero(), T::zero());
    let mut tail = T::infinity();
    let mut n = 0;
    while n < MAX_GENERATIONS {
        let log_cdf: T = active
            .iter()
            .zip(&u)
            .map(|(&(_, c, _), &ui)| c * (-ui).ln_1p())
            .sum();
        let term = -log_cdf.exp_m1();
        // Neumaier summation
        let t = sum + term;
        comp += if sum.abs() >= term.abs() {
            (sum - t) + term
        } else {
            (term - t) + sum
        };
        sum = t;
        tail = active
            .iter()
            .zip(&u)
            .map(|(&(_, c, ratio), &ui)| c * ui * ratio)
            .sum();
        n += 1;
        if tail <= budget {
            break;
        }
        for ((f, _, _), ui) in active.iter().zip(u.iter_mut()) {
            *ui = f.next_survival(*ui);
        }
    }
    let value = sum + comp;
    let rounding = T::epsilon() * (T::lit(4.0) + T::from_count(n) * T::epsilon()) * value;
    let error_bound = tail + rounding;
    if error_bound.is_nan() || error_bound > tol {
        return Err(Error::ToleranceNotReached {
            value: value.to_f64_lossy(),
            error_bound: error_bound.to_f64_lossy(),
        });
    }
    Ok(LifetimeValue { value, error_bound })
}

/// `E T^(r) = E max` of `r` independent extinction times.
pub fn expected_extinction_time<T: Scalar>(
    f: &Pgf<T>,
    r: usize,
    tol: T,
) -> Result<LifetimeValue<T>> {
    if r == 0 {
        return Err(Error::invalid("r must be at least 1"));
    }
    colony_series(&[(f, r)], tol)
}

/// `M(k, m)`: expected extinction time of a colony of `k` f-ancestors and `m` g-ancestors.
pub fn colony_lifetime<T: Scalar>(
    f: &Pgf<T>,
    g: &Pgf<T>,
    k: usize,
    m: usize,
    tol: T,
) -> Result<LifetimeValue<T>> {
    if k + m == 0 {
        return Err(Error::invalid("a colony needs at least one ancestor"));
    }
    colony_series(&[(f, k), (g, m)], tol)
}

/// Zeros of `f - g` in `[0, 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PgfZeros {
    /// Number of distinct zeros; the Sturm count when available, else the scan count.
    pub count: usize,
    pub locations: Vec<f64>,
    pub scan_count: usize,
    /// Exact count, computed for degree at most [`STURM_MAX_DEGREE`].
    pub sturm_count: Option<usize>,
}

/// Counts the distinct zeros of `f - g` on `[0, 1)`.
///
/// Since `f - g = (1 - θ)(R_g - R_f)` with `R` the tail-sum polynomials, the zeros in
/// `[0, 1)` are those of `D = R_g - R_f`, which has no forced root at 1. The scan uses `D` in
/// floating point; the Sturm count uses it in exact rational arithmetic from the exact
/// binary values of the coefficients.
pub fn pgf_difference_zeros<T: Scalar>(f: &Pgf<T>, g: &Pgf<T>) -> Result<PgfZeros> {
    let width = f.tail_sums().len().max(g.tail_sums().len());
    let pad = |p: &Pgf<T>| {
        let mut v: Vec<f64> = p.coeffs().iter().map(|c| c.to_f64_lossy()).collect();
        v.resize(width + 1, 0.0);
        v
    };
    let (pf, pg) = (pad(f), pad(g));

    // exact tail sums, accumulated from the top
    let mut exact = Vec::with_capacity(width);
    let (mut tf, mut tg) = (rational(0.0), rational(0.0));
    for l in (0..width).rev() {
        tf += rational(pf[l + 1]);
        tg += rational(pg[l + 1]);
        exact.push(&tg - &tf);
    }
    exact.reverse();
    let d_exact = Poly::new(exact);
    if d_exact.is_zero() {
        return Err(Error::DegeneratePgfPair);
    }
    let d_float: Vec<f64> = d_exact.coeffs().iter().map(rational_to_f64).collect();
    let d = |x: f64| d_float.iter().rev().fold(0.0, |acc, &c| acc * x + c);

    let (scan_count, scan_locations) = scan_zeros(&d);

    let (sturm_count, locations) = if d_exact.degree() <= STURM_MAX_DEGREE {
        let sturm = SturmCounter::new(&d_exact);
        let (zero, one) = (rational(0.0), rational(1.0));
        let count = sturm.count_closed_open(&zero, &one);
        let roots = sturm
            .isolate(&zero, &one, &rational(ROOT_WIDTH))
            .iter()
            .map(rational_to_f64)
            .collect();
        (Some(count), roots)
    } else {
        (None, scan_locations)
    };
    Ok(PgfZeros {
        count: sturm_count.unwrap_or(scan_count),
        locations,
        scan_count,
        sturm_count,
    })
}

/// Sign scan on `i / SCAN_POINTS`, `i < SCAN_POINTS`, with bisection of each bracket.
fn scan_zeros(d: &impl Fn(f64) -> f64) -> (usize, Vec<f64>) {
    let mut roots = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for i in 0..SCAN_POINTS {
        let x = i as f64 / SCAN_POINTS as f64;
        let y = d(x);
        if y == 0.0 {
            roots.push(x);
            prev = None;
            continue;
        }
        if let Some((px, py)) = prev {
            if py.signum() != y.signum() {
                roots.push(bisect(d, px, x, py));
            }
        }
        prev = Some((x, y));
    }
    // a sign change between the last grid point and 1
    if let Some((px, py)) = prev {
        let y1 = d(1.0);
        if y1 != 0.0 && y1.signum() != py.signum() {
            roots.push(bisect(d, px, 1.0, py));
        }
    }
    (roots.len(), roots)
}

fn bisect(d: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, fa: f64) -> f64 {
    while b - a > ROOT_WIDTH {
        let m = 0.5 * (a + b);
        let y = d(m);
        if y == 0.0 {
            return m;
        }
        if y.signum() == fa.signum() {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Which of the two regimes applies to a pair of quadratic-like pgfs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColonyCase {
    /// The species with the larger offspring mean also has the larger `E T`: an unmixed
    /// colony of it is optimal for every `n`.
    DominantF,
    DominantG,
    /// The means and expected extinction times disagree: `M(n,0) - M(0,n)` changes sign
    /// exactly once.
    OneSignChange,
    /// One of the two differences vanishes within the tolerance slack.
    Undetermined,
}

impl ColonyCase {
    pub fn as_str(self) -> &'static str {
        match self {
            ColonyCase::DominantF => "dominant_f",
            ColonyCase::DominantG => "dominant_g",
            ColonyCase::OneSignChange => "one_sign_change",
            ColonyCase::Undetermined => "undetermined",
        }
    }
}

impl std::fmt::Display for ColonyCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Classification<T: Scalar = f64> {
    pub case: ColonyCase,
    pub mean_f: T,
    pub mean_g: T,
    pub extinction_f: LifetimeValue<T>,
    pub extinction_g: LifetimeValue<T>,
    /// `(μ_f - μ_g)(E T_f - E T_g)`.
    pub product: T,
    pub zeros: usize,
}

/// Decides between the dominant and the single-sign-change regimes.
///
/// Requires `f - g` to have at most one zero on `[0, 1)`; more is refused with
/// [`Error::ConditionViolated`]. Identical pgfs are undetermined.
pub fn classify_two_species<T: Scalar>(
    f: &Pgf<T>,
    g: &Pgf<T>,
    tol: T,
) -> Result<Classification<T>> {
    f.require_subcritical()?;
    g.require_subcritical()?;
    let zeros = match pgf_difference_zeros(f, g) {
        Ok(z) => z.count,
        Err(Error::DegeneratePgfPair) => 0,
        Err(e) => return Err(e),
    };
    if zeros > 1 {
        return Err(Error::ConditionViolated { zeros });
    }
    let extinction_f = expected_extinction_time(f, 1, tol)?;
    let extinction_g = expected_extinction_time(g, 1, tol)?;
    let (mean_f, mean_g) = (f.offspring_mean(), g.offspring_mean());
    let dm = mean_f - mean_g;
    let de = extinction_f.value - extinction_g.value;
    let slack = T::lit(SLACK_FACTOR) * tol;
    let product = dm * de;
    let case = if dm.abs() <= slack || de.abs() <= slack {
        ColonyCase::Undetermined
    } else if product < T::zero() {
        ColonyCase::OneSignChange
    } else if dm > T::zero() {
        ColonyCase::DominantF
    } else {
        ColonyCase::DominantG
    };
    Ok(Classification {
        case,
        mean_f,
        mean_g,
        extinction_f,
        extinction_g,
        product,
        zeros,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ColonyPlan<T: Scalar = f64> {
    pub f: Pgf<T>,
    pub g: Pgf<T>,
    pub n: usize,
    /// Optimal number of f-ancestors.
    pub k_star: usize,
    /// `M(k, n - k)` for `k = 0..=n`.
    pub curve: Vec<CurveRow<T>>,
    pub classification: Classification<T>,
}

impl<T: Scalar> ColonyPlan<T> {
    /// CSV with header `k,m,value,error_bound,classification`.
    pub fn curve_csv(&self) -> String {
        let mut out = String::from("k,m,value,error_bound,classification\n");
        for r in &self.curve {
            out.push_str(&format!(
                "{},{},{:.16e},{:.16e},{}\n",
                r.k,
                r.m,
                r.value.to_f64_lossy(),
                r.error_bound.to_f64_lossy(),
                self.classification.case
            ));
        }
        out
    }
}

/// Best split of `n` ancestors between the two species, with the full curve.
pub fn optimal_colony<T: Scalar>(
    f: &Pgf<T>,
    g: &Pgf<T>,
    n: usize,
    tol: T,
) -> Result<ColonyPlan<T>> {
    let classification = classify_two_species(f, g, tol)?;
    let dists = [
        LifetimeDistribution::bgw_extinction(f.clone())?,
        LifetimeDistribution::bgw_extinction(g.clone())?,
    ];
    let best = optimize_composition(&dists, n, tol)?;
    let curve = lifetime_curve(&dists, n, tol)?;
    Ok(ColonyPlan {
        f: f.clone(),
        g: g.clone(),
        n,
        k_star: best.best.counts()[0],
        curve,
        classification,
    })
}
