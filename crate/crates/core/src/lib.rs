//! Expected lifetimes of parallel systems assembled from several component types.
//!
//! The crate computes `M(k_1, …, k_d) = E max{…}` for independent component lifetimes with
//! certified error bounds, searches for the composition of `n` components that maximizes it,
//! classifies pairs of lifetime laws by the orderings that decide whether unmixed systems
//! are optimal, and applies all of it to colonies of subcritical branching processes.
//!
//! Every numeric type is generic over a [`Scalar`] (`f32` or `f64`); the aliases at the crate
//! root fix the scalar to `f64`.

pub mod bgw;
pub mod dist;
pub mod dominance;
pub mod engine;
pub mod error;
pub mod mc;
pub mod optimizer;
pub mod pgf;
pub mod poly;
pub mod quadrature;
pub mod scalar;

pub use bgw::{
    classify_two_species, colony_lifetime, expected_extinction_time, optimal_colony,
    pgf_difference_zeros, ColonyCase, PgfZeros,
};
pub use dist::{DistError, DistSpec, Interpolation};
pub use dominance::{
    check_icx_order, check_stochastic_order, check_ultimate_dominance, count_intersections,
    dominance_report, sign_change_sequence, Order, Sign, Verdict,
};
pub use engine::{curve_to_csv, expected_max, expected_max_real, lifetime_curve, Composition};
pub use error::{Error, Result};
pub use mc::{
    sample_bgw_colony, sample_bgw_extinction, sample_max, sample_max_order_statistic, McEstimate,
};
pub use optimizer::{brute_force_optimum, optimize_composition};
pub use scalar::Scalar;

pub type LifetimeDistribution = dist::LifetimeDistribution<f64>;
pub type LifetimeValue = engine::LifetimeValue<f64>;
pub type CurveRow = engine::CurveRow<f64>;
pub type MixedSystem<'a> = engine::MixedSystem<'a, f64>;
pub type Pgf = pgf::Pgf<f64>;
pub type OptimizationResult = optimizer::OptimizationResult<f64>;
pub type DominanceReport = dominance::DominanceReport<f64>;
pub type ProbeGrid = dominance::ProbeGrid<f64>;
pub type Classification = bgw::Classification<f64>;
pub type ColonyPlan = bgw::ColonyPlan<f64>;
