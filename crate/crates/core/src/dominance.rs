//! Classification of a pair of lifetime laws `X ~ F`, `Y ~ G`.
//!
//! The "for all s" conditions are checked on a finite probe set: a uniform grid on
//! `[0, horizon]`, every breakpoint of either law, and points just left and right of each
//! breakpoint so both one-sided limits at a jump are seen. A pass certifies the property at
//! the probes only. When both laws are step functions the breakpoints alone are exact.
//!
//! Differences `|F - G| <= eq_tol` are treated as ties: they never start a new sign run and
//! never break one.

use serde::{Deserialize, Serialize};

use crate::dist::LifetimeDistribution;
use crate::engine::expected_max;
use crate::error::{Error, Result};
use crate::optimizer::SLACK_FACTOR;
use crate::scalar::Scalar;

pub const DEFAULT_GRID: usize = 4096;
pub const DEFAULT_EQ_TOL: f64 = 1e-12;
pub const DEFAULT_N_MAX: usize = 100;
pub const MIN_GRID: usize = 100;

/// Distribution-function level treated as "has reached 1".
const SATURATION: f64 = 1e-12;
/// Quantile level defining the automatic horizon.
const HORIZON_LEVEL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Order {
    XDominant,
    YDominant,
    Incomparable,
    /// Both directions hold at every probe: the laws coincide there.
    Equal,
}

impl Order {
    pub fn swapped(self) -> Self {
        match self {
            Order::XDominant => Order::YDominant,
            Order::YDominant => Order::XDominant,
            o => o,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    X,
    Y,
    #[serde(rename = "undetermined")]
    Undetermined,
}

impl Verdict {
    pub fn swapped(self) -> Self {
        match self {
            Verdict::X => Verdict::Y,
            Verdict::Y => Verdict::X,
            Verdict::Undetermined => Verdict::Undetermined,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "-")]
    Minus,
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "+")]
    Plus,
}

impl Sign {
    pub fn of<T: Scalar>(x: T, band: T) -> Self {
        if x > band {
            Sign::Plus
        } else if x < -band {
            Sign::Minus
        } else {
            Sign::Zero
        }
    }

    pub fn negated(self) -> Self {
        match self {
            Sign::Minus => Sign::Plus,
            Sign::Plus => Sign::Minus,
            Sign::Zero => Sign::Zero,
        }
    }
}

/// Strict sign alternations in a sequence, ignoring zeros.
pub fn count_sign_changes(signs: &[Sign]) -> usize {
    let mut last = Sign::Zero;
    let mut changes = 0;
    for &s in signs {
        if s == Sign::Zero {
            continue;
        }
        if last != Sign::Zero && s != last {
            changes += 1;
        }
        last = s;
    }
    changes
}

/// Where and how finely the pair is probed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeGrid<T: Scalar = f64> {
    pub horizon: T,
    pub grid: usize,
    pub eq_tol: T,
}

impl<T: Scalar> ProbeGrid<T> {
    pub fn new(horizon: T, grid: usize) -> Self {
        Self {
            horizon,
            grid,
            eq_tol: T::lit(DEFAULT_EQ_TOL),
        }
    }

    pub fn with_eq_tol(mut self, eq_tol: T) -> Self {
        self.eq_tol = eq_tol;
        self
    }

    /// Horizon at the larger of the two `1 - 1e-9` quantiles, default grid.
    pub fn auto(x: &LifetimeDistribution<T>, y: &LifetimeDistribution<T>) -> Self {
        Self::new(auto_horizon(x, y), DEFAULT_GRID)
    }

    fn validate(&self, x: &LifetimeDistribution<T>, y: &LifetimeDistribution<T>) -> Result<()> {
        if self.grid < MIN_GRID {
            return Err(Error::invalid(format!(
                "grid must be at least {MIN_GRID}, got {}",
                self.grid
            )));
        }
        if self.eq_tol.is_nan() || self.eq_tol <= T::zero() {
            return Err(Error::invalid("eq_tol must be positive"));
        }
        let needed = auto_horizon(x, y);
        if self.horizon.is_nan() || self.horizon < needed || !self.horizon.is_finite() {
            return Err(Error::invalid(format!(
                "horizon {} is below the 1 - 1e-9 quantile {needed}",
                self.horizon
            )));
        }
        Ok(())
    }

    fn points(&self, x: &LifetimeDistribution<T>, y: &LifetimeDistribution<T>) -> Vec<T> {
        let h = self.horizon;
        let mut pts: Vec<T> = Vec::new();
        pts.push(T::zero());
        let exact = x.is_step() && y.is_step();
        for b in x.breakpoints(h).into_iter().chain(y.breakpoints(h)) {
            pts.push(b);
            if !exact {
                pts.push(b.left_of());
                pts.push(b.right_of());
            }
        }
        if !exact {
            let step = h / T::from_count(self.grid);
            pts.extend((0..=self.grid).map(|i| T::from_count(i) * step));
        }
        pts.retain(|&p| p >= T::zero() && p <= h);
        pts.sort_by(|a, b| a.partial_cmp(b).expect("finite probes"));
        pts.dedup();
        pts
    }
}

pub fn auto_horizon<T: Scalar>(x: &LifetimeDistribution<T>, y: &LifetimeDistribution<T>) -> T {
    let u = T::one() - T::lit(HORIZON_LEVEL).max(T::epsilon());
    let qx = x.quantile(u).expect("level in [0, 1)");
    let qy = y.quantile(u).expect("level in [0, 1)");
    qx.max(qy)
}

fn saturated<T: Scalar>(x: &LifetimeDistribution<T>, y: &LifetimeDistribution<T>, s: T) -> bool {
    let level = T::one() - T::lit(SATURATION);
    x.cdf(s) >= level && y.cdf(s) >= level
}

/// Condition `F(s) <= G(s)` for all probes (X stochastically larger), and its mirror.
pub fn check_stochastic_order<T: Scalar>(
    x: &LifetimeDistribution<T>,
    y: &LifetimeDistribution<T>,
    probes: &ProbeGrid<T>,
) -> Result<Order> {
    probes.validate(x, y)?;
    let band = probes.eq_tol;
    let (mut x_dom, mut y_dom) = (true, true);
    for s in probes.points(x, y) {
        let diff = x.cdf(s) - y.cdf(s);
        x_dom &= diff <= band;
        y_dom &= diff >= -band;
    }
    Ok(match (x_dom, y_dom) {
        (true, true) => Order::Equal,
        (true, false) => Order::XDominant,
        (false, true) => Order::YDominant,
        (false, false) => Order::Incomparable,
    })
}

/// `∫_s^∞ (F - G) = ∫_s^∞ (1 - G) - ∫_s^∞ (1 - F)`.
fn tail_difference<T: Scalar>(x: &LifetimeDistribution<T>, y: &LifetimeDistribution<T>, s: T) -> T {
    y.integrated_tail(s) - x.integrated_tail(s)
}

/// Increasing convex order: `∫_s^∞ (F - G) < 0` at every probe before both laws saturate.
pub fn check_icx_order<T: Scalar>(
    x: &LifetimeDistribution<T>,
    y: &LifetimeDistribution<T>,
    probes: &ProbeGrid<T>,
) -> Result<Order> {
    probes.validate(x, y)?;
    let (mut x_dom, mut y_dom, mut all_tied) = (true, true, true);
    for s in probes.points(x, y) {
        if saturated(x, y, s) {
            break;
        }
        let t = tail_difference(x, y, s);
        x_dom &= t < T::zero();
        y_dom &= t > T::zero();
        all_tied &= t.abs() <= probes.eq_tol;
    }
    Ok(if all_tied {
        Order::Equal
    } else if x_dom {
        Order::XDominant
    } else if y_dom {
        Order::YDominant
    } else {
        Order::Incomparable
    })
}

/// A maximal stretch of probes on which `F - G` keeps one strict sign.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct SignRun<T: Scalar = f64> {
    /// Sign of `F - G`.
    pub sign: Sign,
    /// First and last probe with that strict sign.
    pub start: T,
    pub end: T,
}

fn sign_runs<T: Scalar>(
    x: &LifetimeDistribution<T>,
    y: &LifetimeDistribution<T>,
    points: impl IntoIterator<Item = T>,
    band: T,
) -> Vec<SignRun<T>> {
    let mut runs: Vec<SignRun<T>> = Vec::new();
    for s in points {
        let sign = Sign::of(x.cdf(s) - y.cdf(s), band);
        if sign == Sign::Zero {
            continue;
        }
        match runs.last_mut() {
            Some(run) if run.sign == sign => run.end = s,
            _ => runs.push(SignRun {
                sign,
                start: s,
                end: s,
            }),
        }
    }
    runs
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct UltimateDominance<T: Scalar = f64> {
    pub verdict: Verdict,
    /// Start `s₀` of the final strict separation, when one was found.
    pub crossover: Option<T>,
}

/// Eventual strict separation of `F` and `G` on `[s₀, ω)`, where `ω` is the first probe at
/// which both laws have reached 1. `F > G` eventually makes `Y` ultimately dominant.
pub fn check_ultimate_dominance<T: Scalar>(
    x: &LifetimeDistribution<T>,
    y: &LifetimeDistribution<T>,
    probes: &ProbeGrid<T>,
) -> Result<UltimateDominance<T>> {
    probes.validate(x, y)?;
    let live = probes
        .points(x, y)
        .into_iter()
        .take_while(|&s| !saturated(x, y, s));
    let runs = sign_runs(x, y, live, probes.eq_tol);
    Ok(match runs.last() {
        Some(run) => UltimateDominance {
            verdict: if run.sign == Sign::Plus {
                Verdict::Y
            } else {
                Verdict::X
            },
            crossover: Some(run.start),
        },
        None => UltimateDominance {
            verdict: Verdict::Undetermined,
            crossover: None,
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Intersections<T: Scalar = f64> {
    /// Number of maximal sign runs of `F - G`.
    pub nu: usize,
    pub runs: Vec<SignRun<T>>,
}

/// Counts the intersections `ν` of `F` and `G` over `[0, horizon]`.
pub fn count_intersections<T: Scalar>(
    x: &LifetimeDistribution<T>,
    y: &LifetimeDistribution<T>,
    probes: &ProbeGrid<T>,
) -> Result<Intersections<T>> {
    probes.validate(x, y)?;
    let runs = sign_runs(x, y, probes.points(x, y), probes.eq_tol);
    Ok(Intersections {
        nu: runs.len(),
        runs,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct SignSequence<T: Scalar = f64> {
    /// `M(n, 0) - M(0, n)` for `n = 1..=n_max`.
    pub differences: Vec<T>,
    pub signs: Vec<Sign>,
    pub changes: usize,
}

/// Signs of `M(n, 0) - M(0, n)`; differences within `4·tol` count as ties.
pub fn sign_change_sequence<T: Scalar>(
    x: &LifetimeDistribution<T>,
    y: &LifetimeDistribution<T>,
    n_max: usize,
    tol: T,
) -> Result<SignSequence<T>> {
    if n_max == 0 {
        return Err(Error::invalid("n_max must be at least 1"));
    }
    let band = T::lit(SLACK_FACTOR) * tol;
    let only_x = std::slice::from_ref(x);
    let only_y = std::slice::from_ref(y);
    let mut differences = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let mx = expected_max(only_x, &[n], tol)?.value;
        let my = expected_max(only_y, &[n], tol)?.value;
        differences.push(mx - my);
    }
    let signs: Vec<Sign> = differences.iter().map(|&d| Sign::of(d, band)).collect();
    let changes = count_sign_changes(&signs);
    Ok(SignSequence {
        differences,
        signs,
        changes,
    })
}

/// Everything known about a pair, flattened for reporting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct DominanceReport<T: Scalar = f64> {
    pub stochastic_order: Order,
    pub icx_order: Order,
    pub ultimate: Verdict,
    pub crossover: Option<T>,
    pub nu: usize,
    /// `ν - 1`: no more sign changes of `M(n, 0) - M(0, n)` can occur.
    pub sign_changes_bound: usize,
    pub observed_signs: Vec<Sign>,
    pub observed_changes: usize,
    pub horizon: T,
    pub n_max: usize,
}

/// Runs every check and enforces `observed_changes <= ν - 1`; a violation can only come from
/// a numerical defect and is reported as [`Error::Inconsistent`].
pub fn dominance_report<T: Scalar>(
    x: &LifetimeDistribution<T>,
    y: &LifetimeDistribution<T>,
    probes: &ProbeGrid<T>,
    n_max: usize,
    tol: T,
) -> Result<DominanceReport<T>> {
    let stochastic_order = check_stochastic_order(x, y, probes)?;
    let icx_order = check_icx_order(x, y, probes)?;
    let ultimate = check_ultimate_dominance(x, y, probes)?;
    let nu = count_intersections(x, y, probes)?.nu;
    let seq = sign_change_sequence(x, y, n_max, tol)?;
    let sign_changes_bound = nu.saturating_sub(1);
    if seq.changes > sign_changes_bound {
        return Err(Error::Inconsistent(format!(
            "{} sign changes observed but nu = {nu}",
            seq.changes
        )));
    }
    Ok(DominanceReport {
        stochastic_order,
        icx_order,
        ultimate: ultimate.verdict,
        crossover: ultimate.crossover,
        nu,
        sign_changes_bound,
        observed_signs: seq.signs,
        observed_changes: seq.changes,
        horizon: probes.horizon,
        n_max,
    })
}
