//! Seeded Monte Carlo estimators, independent of the quadrature and series paths.
//!
//! Reps are grouped in fixed blocks of [`BLOCK`]; block `b` draws from the ChaCha8 stream
//! (`seed`, `b`) and its reps consume it in order, so estimates do not depend on thread count
//! or scheduling. Per-rep values are reduced by pairwise summation in rep order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::MixedSystem;
use crate::error::{Error, Result};
use crate::pgf::Pgf;
use crate::scalar::{pairwise_sum, Scalar};

pub const MIN_REPS: usize = 100;
/// Generations after which a simulated colony is declared runaway.
pub const GENERATION_CAP: u64 = 100_000;
/// Reps sharing one random stream.
pub const BLOCK: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    /// Sample standard deviation over `sqrt(reps)`.
    pub stderr: f64,
    pub reps: usize,
    pub seed: u64,
}

impl McEstimate {
    /// `|value - mean| / stderr`; zero when both agree exactly.
    pub fn z_score(&self, value: f64) -> f64 {
        let d = (value - self.mean).abs();
        if d == 0.0 {
            0.0
        } else {
            d / self.stderr
        }
    }

    /// Whether `value` lies within `k` standard errors of the estimate.
    pub fn covers(&self, value: f64, k: f64) -> bool {
        (value - self.mean).abs() <= k * self.stderr
    }
}

fn check_reps(reps: usize) -> Result<()> {
    if reps < MIN_REPS {
        return Err(Error::invalid(format!(
            "at least {MIN_REPS} reps are required, got {reps}"
        )));
    }
    Ok(())
}

fn summarize(values: &[f64], seed: u64) -> McEstimate {
    let reps = values.len();
    // shift by the first value so constant samples give their value exactly and zero spread
    let shift = values[0];
    let centered: Vec<f64> = values.iter().map(|&v| v - shift).collect();
    let offset = pairwise_sum(&centered) / reps as f64;
    let mean = shift + offset;
    let squares: Vec<f64> = centered
        .iter()
        .map(|&c| (c - offset) * (c - offset))
        .collect();
    let var = pairwise_sum(&squares) / (reps - 1) as f64;
    McEstimate {
        mean,
        stderr: (var / reps as f64).sqrt(),
        reps,
        seed,
    }
}

fn stream(base: &ChaCha8Rng, block: usize) -> ChaCha8Rng {
    let mut rng = base.clone();
    rng.set_stream(block as u64);
    rng
}

/// Runs `draw` once per rep and summarizes; the first failing rep (in rep order) determines
/// the error.
fn run_reps<F>(seed: u64, reps: usize, draw: F) -> Result<McEstimate>
where
    F: Fn(usize, &mut ChaCha8Rng) -> Result<f64> + Sync,
{
    check_reps(reps)?;
    let base = ChaCha8Rng::seed_from_u64(seed);
    let blocks: Vec<Result<Vec<f64>>> = (0..reps.div_ceil(BLOCK))
        .into_par_iter()
        .map(|b| {
            let mut rng = stream(&base, b);
            (b * BLOCK..reps.min((b + 1) * BLOCK))
                .map(|rep| draw(rep, &mut rng))
                .collect()
        })
        .collect();
    let mut values = Vec::with_capacity(reps);
    for block in blocks {
        values.extend(block?);
    }
    Ok(summarize(&values, seed))
}

/// A uniform level in `[0, 1)` representable in `T`.
fn level<T: Scalar>(rng: &mut ChaCha8Rng) -> T {
    let u = T::lit(rng.random::<f64>());
    u.min(T::one() - T::epsilon())
}

fn check_system<T: Scalar>(system: &MixedSystem<'_, T>) -> Result<()> {
    if system.composition().n() == 0 {
        return Err(Error::invalid("the system has no components"));
    }
    Ok(())
}

/// Lifetime of the system from `k_i` independent quantile-transformed draws per type.
pub fn sample_max<T: Scalar>(
    system: &MixedSystem<'_, T>,
    seed: u64,
    reps: usize,
) -> Result<McEstimate> {
    check_system(system)?;
    let counts = system.composition().counts();
    run_reps(seed, reps, |_, rng| {
        let mut best = T::neg_infinity();
        for (d, &k) in system.dists().iter().zip(counts) {
            for _ in 0..k {
                best = best.max(d.quantile(level(rng))?);
            }
        }
        Ok(best.to_f64_lossy())
    })
}

/// Like [`sample_max`], but draws the maximum of the `k_i` copies of each type at once as
/// `F_i^{-1}(U^{1/k_i})`; one uniform per type and rep regardless of the counts.
pub fn sample_max_order_statistic<T: Scalar>(
    system: &MixedSystem<'_, T>,
    seed: u64,
    reps: usize,
) -> Result<McEstimate> {
    check_system(system)?;
    let counts = system.composition().counts();
    run_reps(seed, reps, |_, rng| {
        let mut best = T::neg_infinity();
        for (d, &k) in system.dists().iter().zip(counts) {
            if k == 0 {
                continue;
            }
            let u: T = level(rng);
            let top = (u.ln() / T::from_count(k)).exp();
            best = best.max(d.quantile(top.min(T::one() - T::epsilon()))?);
        }
        Ok(best.to_f64_lossy())
    })
}

/// Offspring sampler by an inverse-CDF walk over the coefficients.
struct Offspring {
    cdf: Vec<f64>,
    last: usize,
}

impl Offspring {
    fn new<T: Scalar>(f: &Pgf<T>) -> Self {
        let mut acc = 0.0;
        let cdf = f
            .coeffs()
            .iter()
            .map(|p| {
                acc += p.to_f64_lossy();
                acc
            })
            .collect();
        Self {
            cdf,
            last: f.degree(),
        }
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> u64 {
        let u: f64 = rng.random();
        self.cdf.iter().position(|&c| u < c).unwrap_or(self.last) as u64
    }
}

/// Extinction time of a colony started from `k` f-ancestors and `m` g-ancestors, simulated
/// generation by generation.
pub fn sample_bgw_colony<T: Scalar>(
    f: &Pgf<T>,
    g: &Pgf<T>,
    k: usize,
    m: usize,
    seed: u64,
    reps: usize,
) -> Result<McEstimate> {
    f.require_subcritical()?;
    g.require_subcritical()?;
    if k + m == 0 {
        return Err(Error::invalid("a colony needs at least one ancestor"));
    }
    let species = [(Offspring::new(f), k as u64), (Offspring::new(g), m as u64)];
    run_reps(seed, reps, |rep, rng| {
        let mut alive: Vec<(&Offspring, u64)> = species.iter().map(|(o, c)| (o, *c)).collect();
        let mut generation = 0u64;
        while alive.iter().any(|&(_, z)| z > 0) {
            if generation >= GENERATION_CAP {
                return Err(Error::GenerationCapExceeded {
                    rep: rep as u64,
                    cap: GENERATION_CAP,
                });
            }
            for (o, z) in alive.iter_mut() {
                let mut next = 0u64;
                for _ in 0..*z {
                    next += o.draw(rng);
                }
                *z = next;
            }
            generation += 1;
        }
        Ok(generation as f64)
    })
}

/// `T^(r)`: extinction time of `r` independent single-ancestor processes.
pub fn sample_bgw_extinction<T: Scalar>(
    f: &Pgf<T>,
    r: usize,
    seed: u64,
    reps: usize,
) -> Result<McEstimate> {
    if r == 0 {
        return Err(Error::invalid("r must be at least 1"));
    }
    sample_bgw_colony(f, f, r, 0, seed, reps)
}
