//! Optimal composition of an `n`-component system over `d` types.
//!
//! `M` is concave on the simplex lattice `{k ∈ Z₊^d : Σ k_i = n}`, so a composition that no
//! single-unit swap improves is a global maximizer. The ascent starts with every unit on
//! the type of largest mean and repeatedly applies the best improving swap.

use std::collections::BTreeMap;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dist::LifetimeDistribution;
use crate::engine::{expected_max, Composition, LifetimeValue};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Brute force refuses to enumerate more compositions than this.
pub const ENUMERATION_LIMIT: u128 = 100_000;

/// Two values closer than this many tolerances are treated as tied.
pub const SLACK_FACTOR: f64 = 4.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct TraceStep<T: Scalar = f64> {
    pub composition: Composition,
    pub value: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct OptimizationResult<T: Scalar = f64> {
    pub best: Composition,
    pub value: LifetimeValue<T>,
    /// Compositions visited by the ascent, each strictly better than the previous.
    pub trace: Vec<TraceStep<T>>,
    /// Number of distinct compositions whose lifetime was computed.
    pub evaluations: usize,
}

fn check_common<T: Scalar>(dists: &[LifetimeDistribution<T>], n: usize, tol: T) -> Result<()> {
    if dists.is_empty() {
        return Err(Error::invalid("at least one component type is required"));
    }
    if n == 0 {
        return Err(Error::invalid("n must be at least 1"));
    }
    if !(tol > T::zero() && tol.is_finite()) {
        return Err(Error::invalid(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    Ok(())
}

/// Memoized `M` over compositions of one fixed set of types.
struct Evaluator<'a, T: Scalar> {
    dists: &'a [LifetimeDistribution<T>],
    tol: T,
    cache: BTreeMap<Composition, LifetimeValue<T>>,
}

impl<'a, T: Scalar> Evaluator<'a, T> {
    fn new(dists: &'a [LifetimeDistribution<T>], tol: T) -> Self {
        Self {
            dists,
            tol,
            cache: BTreeMap::new(),
        }
    }

    fn value(&mut self, comp: &Composition) -> Result<LifetimeValue<T>> {
        if let Some(v) = self.cache.get(comp) {
            return Ok(*v);
        }
        let v = expected_max(self.dists, comp.counts(), self.tol)?;
        self.cache.insert(comp.clone(), v);
        Ok(v)
    }
}

/// Index of the largest mean, lowest index on ties.
fn argmax_mean<T: Scalar>(dists: &[LifetimeDistribution<T>]) -> usize {
    let mut best = 0;
    for (i, d) in dists.iter().enumerate().skip(1) {
        if d.mean() > dists[best].mean() {
            best = i;
        }
    }
    best
}

/// Steepest single-swap ascent from the unmixed system on the type of largest mean.
pub fn optimize_composition<T: Scalar>(
    dists: &[LifetimeDistribution<T>],
    n: usize,
    tol: T,
) -> Result<OptimizationResult<T>> {
    check_common(dists, n, tol)?;
    let d = dists.len();
    let slack = T::lit(SLACK_FACTOR) * tol;
    let mut eval = Evaluator::new(dists, tol);

    let mut current = Composition::unmixed(d, argmax_mean(dists), n);
    let mut current_value = eval.value(&current)?;
    let mut trace = vec![TraceStep {
        composition: current.clone(),
        value: current_value.value,
    }];

    loop {
        let mut step: Option<(Composition, LifetimeValue<T>)> = None;
        let mut best_gain = slack;
        for from in 0..d {
            for to in 0..d {
                if from == to {
                    continue;
                }
                let Some(candidate) = current.moved(from, to) else {
                    continue;
                };
                let v = eval.value(&candidate)?;
                let gain = v.value - current_value.value;
                if gain > best_gain {
                    best_gain = gain;
                    step = Some((candidate, v));
                }
            }
        }
        let Some((next, v)) = step else { break };
        current = next;
        current_value = v;
        trace.push(TraceStep {
            composition: current.clone(),
            value: v.value,
        });
    }

    Ok(OptimizationResult {
        best: current,
        value: current_value,
        trace,
        evaluations: eval.cache.len(),
    })
}

/// `C(n + d - 1, d - 1)`, the number of compositions of `n` into `d` parts.
pub fn composition_count(n: usize, d: usize) -> u128 {
    let (top, k) = ((n + d - 1) as u128, (d - 1) as u128);
    let k = k.min(top - k);
    let mut c: u128 = 1;
    for i in 0..k {
        c = c.saturating_mul(top - i) / (i + 1);
    }
    c
}

/// All compositions of `n` into `d` parts in descending lexicographic order,
/// starting at `(n, 0, …, 0)`.
pub fn compositions(n: usize, d: usize) -> Vec<Composition> {
    fn fill(rest: usize, slot: usize, cur: &mut Vec<usize>, out: &mut Vec<Composition>) {
        if slot + 1 == cur.len() {
            cur[slot] = rest;
            out.push(Composition::new(cur.clone()).expect("nonempty"));
            return;
        }
        for k in (0..=rest).rev() {
            cur[slot] = k;
            fill(rest - k, slot + 1, cur, out);
        }
    }
    let mut out = Vec::new();
    if d > 0 {
        fill(n, 0, &mut vec![0; d], &mut out);
    }
    out
}

/// Exhaustive search; ties go to the lexicographically largest composition.
pub fn brute_force_optimum<T: Scalar>(
    dists: &[LifetimeDistribution<T>],
    n: usize,
    tol: T,
) -> Result<OptimizationResult<T>> {
    check_common(dists, n, tol)?;
    let count = composition_count(n, dists.len());
    if count > ENUMERATION_LIMIT {
        return Err(Error::EnumerationTooLarge {
            count,
            limit: ENUMERATION_LIMIT,
        });
    }
    let all = compositions(n, dists.len());
    let mut best: Option<(Composition, LifetimeValue<T>)> = None;
    for comp in &all {
        let v = expected_max(dists, comp.counts(), tol)?;
        if best.as_ref().is_none_or(|(_, b)| v.value > b.value) {
            best = Some((comp.clone(), v));
        }
    }
    let (best, value) = best.expect("at least one composition");
    Ok(OptimizationResult {
        trace: vec![TraceStep {
            composition: best.clone(),
            value: value.value,
        }],
        best,
        value,
        evaluations: all.len(),
    })
}

/// `M(x + e_i - e_j) - 2 M(x) + M(x - e_i + e_j)`, or `None` when a neighbour is infeasible.
pub fn second_difference<T: Scalar>(
    dists: &[LifetimeDistribution<T>],
    x: &Composition,
    i: usize,
    j: usize,
    tol: T,
) -> Result<Option<T>> {
    if i == j || i >= x.d() || j >= x.d() {
        return Ok(None);
    }
    let (Some(plus), Some(minus)) = (x.moved(j, i), x.moved(i, j)) else {
        return Ok(None);
    };
    let centre = expected_max(dists, x.counts(), tol)?.value;
    let up = expected_max(dists, plus.counts(), tol)?.value;
    let down = expected_max(dists, minus.counts(), tol)?.value;
    Ok(Some(up - T::lit(2.0) * centre + down))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ConcavityReport<T: Scalar = f64> {
    pub trials: usize,
    pub evaluated: usize,
    pub skipped: usize,
    /// Largest second difference seen (concavity means it should be `<= slack`).
    pub worst: Option<T>,
    pub worst_at: Option<(Composition, usize, usize)>,
    pub violations: usize,
    pub slack: T,
}

impl<T: Scalar> ConcavityReport<T> {
    pub fn holds(&self) -> bool {
        self.violations == 0
    }
}

fn random_composition<R: Rng>(rng: &mut R, n: usize, d: usize) -> Composition {
    // stars and bars: d - 1 bar positions among n + d - 1 slots
    let mut bars = sample(rng, n + d - 1, d - 1).into_vec();
    bars.sort_unstable();
    let mut counts = Vec::with_capacity(d);
    let mut prev = 0;
    for &b in &bars {
        counts.push(b - prev);
        prev = b + 1;
    }
    counts.push(n + d - 1 - prev);
    Composition::new(counts).expect("d >= 1")
}

/// Samples `trials` swap triples `x - e_i + e_j, x, x + e_i - e_j` and checks that every
/// second difference is at most `4·tol`.
pub fn concavity_check<T: Scalar>(
    dists: &[LifetimeDistribution<T>],
    n: usize,
    trials: usize,
    seed: u64,
    tol: T,
) -> Result<ConcavityReport<T>> {
    check_common(dists, n, tol)?;
    if trials == 0 {
        return Err(Error::invalid("trials must be at least 1"));
    }
    let d = dists.len();
    let slack = T::lit(SLACK_FACTOR) * tol;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = ConcavityReport {
        trials,
        evaluated: 0,
        skipped: 0,
        worst: None,
        worst_at: None,
        violations: 0,
        slack,
    };
    for _ in 0..trials {
        if d < 2 {
            report.skipped += 1;
            continue;
        }
        let x = random_composition(&mut rng, n, d);
        let i = rng.random_range(0..d);
        let j = (i + rng.random_range(1..d)) % d;
        match second_difference(dists, &x, i, j, tol)? {
            None => report.skipped += 1,
            Some(sd) => {
                report.evaluated += 1;
                if sd > slack {
                    report.violations += 1;
                }
                if report.worst.is_none_or(|w| sd > w) {
                    report.worst = Some(sd);
                    report.worst_at = Some((x, i, j));
                }
            }
        }
    }
    Ok(report)
}
