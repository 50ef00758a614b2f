use std::path::PathBuf;

use parmax::dominance::ProbeGrid;
use parmax::engine::Composition;
use parmax::{
    colony_lifetime, curve_to_csv, dominance, expected_max, lifetime_curve, optimal_colony,
    optimize_composition, sample_bgw_colony, sample_max, LifetimeValue, McEstimate, MixedSystem,
};
use serde::{Deserialize, Serialize};

use crate::config::{csv_beside, RunConfig};
use crate::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Eval,
    Curve,
    Optimize,
    Dominance,
    BgwPlan,
    Simulate,
}

pub struct Options {
    pub out: Option<PathBuf>,
    pub csv_out: Option<PathBuf>,
    pub trace: bool,
}

/// Everything a command produces; written only after the command succeeded.
pub struct Artifacts {
    pub main: String,
    pub companion: Option<(PathBuf, String)>,
}

impl Artifacts {
    fn single(main: String) -> Self {
        Self {
            main,
            companion: None,
        }
    }
}

/// Report of the `simulate` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub estimate: McEstimate,
    pub analytic: LifetimeValue,
    /// `|analytic - mean| / stderr`; absent when the spread is zero and the values differ.
    pub ratio: Option<f64>,
}

fn json<T: Serialize>(value: &T) -> Result<String, Failure> {
    let mut s = serde_json::to_string_pretty(value)
        .map_err(|e| Failure::Numeric(format!("cannot serialize report: {e}")))?;
    s.push('\n');
    Ok(s)
}

pub fn run(command: Command, cfg: &RunConfig, opts: &Options) -> Result<Artifacts, Failure> {
    let tol = cfg.tol()?;
    match command {
        Command::Eval => {
            let dists = cfg.dists()?;
            let counts = cfg.counts(dists.len())?;
            let v = expected_max(&dists, &counts, tol)?;
            Ok(Artifacts::single(json(&v)?))
        }
        Command::Curve => {
            let dists = cfg.two_dists()?;
            let rows = lifetime_curve(&dists, cfg.n()?, tol)?;
            Ok(Artifacts::single(curve_to_csv(&rows)))
        }
        Command::Optimize => {
            let dists = cfg.dists()?;
            let result = optimize_composition(&dists, cfg.n()?, tol)?;
            let mut value = serde_json::to_value(&result)
                .map_err(|e| Failure::Numeric(format!("cannot serialize report: {e}")))?;
            if !opts.trace {
                if let Some(obj) = value.as_object_mut() {
                    obj.remove("trace");
                }
            }
            Ok(Artifacts::single(json(&value)?))
        }
        Command::Dominance => {
            let [x, y] = cfg.two_dists()?;
            let horizon = match cfg.horizon {
                Some(h) => h,
                None => dominance::auto_horizon(&x, &y),
            };
            let probes = ProbeGrid::new(horizon, cfg.grid()).with_eq_tol(cfg.eq_tol());
            let report = dominance::dominance_report(&x, &y, &probes, cfg.n_max(), tol)?;
            Ok(Artifacts::single(json(&report)?))
        }
        Command::BgwPlan => {
            let (f, g) = cfg.pgfs()?;
            let plan = optimal_colony(&f, &g, cfg.n()?, tol)?;
            let csv_path = opts
                .csv_out
                .clone()
                .or_else(|| opts.out.as_deref().map(csv_beside));
            Ok(Artifacts {
                main: json(&plan)?,
                companion: csv_path.map(|p| (p, plan.curve_csv())),
            })
        }
        Command::Simulate => {
            let (estimate, analytic) = if cfg.pgfs.is_some() {
                let (f, g) = cfg.pgfs()?;
                let counts = cfg.counts(2)?;
                let (k, m) = (counts[0], counts[1]);
                let analytic = colony_lifetime(&f, &g, k, m, tol)?;
                (
                    sample_bgw_colony(&f, &g, k, m, cfg.seed(), cfg.reps())?,
                    analytic,
                )
            } else {
                let dists = cfg.dists()?;
                let comp = Composition::new(cfg.counts(dists.len())?)?;
                let system = MixedSystem::new(&dists, &comp)?;
                let analytic = system.expected_max(tol)?;
                (sample_max(&system, cfg.seed(), cfg.reps())?, analytic)
            };
            let z = estimate.z_score(analytic.value);
            let report = SimulationReport {
                estimate,
                analytic,
                ratio: z.is_finite().then_some(z),
            };
            Ok(Artifacts::single(json(&report)?))
        }
    }
}
