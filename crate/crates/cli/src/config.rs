use std::io::Read;
use std::path::{Path, PathBuf};

use parmax::dominance::{DEFAULT_EQ_TOL, DEFAULT_GRID, DEFAULT_N_MAX};
use parmax::{DistSpec, LifetimeDistribution, Pgf};
use serde::Deserialize;

use crate::Failure;

pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_REPS: usize = 100_000;

/// The JSON document given with `--config`.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub dists: Vec<DistSpec>,
    pub counts: Option<Vec<usize>>,
    /// Offspring laws `[f, g]` as coefficient lists.
    pub pgfs: Option<[Vec<f64>; 2]>,
    pub n: Option<usize>,
    pub tol: Option<f64>,
    pub horizon: Option<f64>,
    pub grid: Option<usize>,
    pub eq_tol: Option<f64>,
    pub n_max: Option<usize>,
    pub seed: Option<u64>,
    pub reps: Option<usize>,
}

/// Command-line values that take precedence over the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub n: Option<usize>,
    pub tol: Option<f64>,
    pub horizon: Option<f64>,
    pub grid: Option<usize>,
    pub eq_tol: Option<f64>,
    pub n_max: Option<usize>,
    pub seed: Option<u64>,
    pub reps: Option<usize>,
}

impl RunConfig {
    pub fn load(source: &str) -> Result<Self, Failure> {
        let text = if source == "-" {
            let mut buf = String::new();
            std::io::stdin()
                .read_to_string(&mut buf)
                .map_err(|e| Failure::Validation(format!("cannot read config from stdin: {e}")))?;
            buf
        } else {
            std::fs::read_to_string(source)
                .map_err(|e| Failure::Validation(format!("cannot read config {source}: {e}")))?
        };
        serde_json::from_str(&text).map_err(|e| Failure::Validation(format!("invalid config: {e}")))
    }

    pub fn apply(&mut self, o: &Overrides) {
        macro_rules! take {
            ($($field:ident),*) => {
                $(if o.$field.is_some() { self.$field = o.$field; })*
            };
        }
        take!(n, tol, horizon, grid, eq_tol, n_max, seed, reps);
    }

    pub fn tol(&self) -> Result<f64, Failure> {
        let tol = self.tol.unwrap_or(DEFAULT_TOL);
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Failure::Validation(format!(
                "tol must be positive, got {tol}"
            )));
        }
        Ok(tol)
    }

    pub fn grid(&self) -> usize {
        self.grid.unwrap_or(DEFAULT_GRID)
    }

    pub fn eq_tol(&self) -> f64 {
        self.eq_tol.unwrap_or(DEFAULT_EQ_TOL)
    }

    pub fn n_max(&self) -> usize {
        self.n_max.unwrap_or(DEFAULT_N_MAX)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    pub fn reps(&self) -> usize {
        self.reps.unwrap_or(DEFAULT_REPS)
    }

    pub fn n(&self) -> Result<usize, Failure> {
        match self.n {
            Some(n) if n >= 1 => Ok(n),
            Some(_) => Err(Failure::Validation("n must be at least 1".into())),
            None => Err(Failure::Validation("missing field: n".into())),
        }
    }

    pub fn dists(&self) -> Result<Vec<LifetimeDistribution>, Failure> {
        if self.dists.is_empty() {
            return Err(Failure::Validation("missing field: dists".into()));
        }
        self.dists
            .iter()
            .enumerate()
            .map(|(i, spec)| {
                spec.build()
                    .map_err(|e| Failure::Validation(format!("dists[{i}]: {e}")))
            })
            .collect()
    }

    pub fn two_dists(&self) -> Result<[LifetimeDistribution; 2], Failure> {
        let dists = self.dists()?;
        let len = dists.len();
        <[LifetimeDistribution; 2]>::try_from(dists).map_err(|_| {
            Failure::Validation(format!("exactly 2 distributions are required, got {len}"))
        })
    }

    pub fn counts(&self, d: usize) -> Result<Vec<usize>, Failure> {
        let counts = self
            .counts
            .clone()
            .ok_or_else(|| Failure::Validation("missing field: counts".into()))?;
        if counts.len() != d {
            return Err(Failure::Validation(format!(
                "counts has {} entries for {d} types",
                counts.len()
            )));
        }
        Ok(counts)
    }

    pub fn pgfs(&self) -> Result<(Pgf, Pgf), Failure> {
        let [f, g] = self
            .pgfs
            .as_ref()
            .ok_or_else(|| Failure::Validation("missing field: pgfs".into()))?;
        let build = |name: &str, c: &[f64]| {
            Pgf::from_slice(c).map_err(|e| Failure::Validation(format!("pgf {name}: {e}")))
        };
        Ok((build("f", f)?, build("g", g)?))
    }
}

/// Where the CSV companion of a JSON report goes when not given explicitly.
pub fn csv_beside(out: &Path) -> PathBuf {
    out.with_extension("csv")
}
