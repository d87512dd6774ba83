//! Numerical laboratory for circle diffeomorphisms with a break: rotation
//! numbers, dynamical partitions, renormalization, cross-ratio distortion and
//! the regularity of conjugacies.
//!
//! Every numeric routine is generic over [`Real`]; [`Qd`] supplies roughly
//! 62 significant digits where binary64 runs out.

pub mod circle;
pub mod conjugacy;
pub mod constants;
pub mod distortion;
pub mod error;
pub mod jet;
pub mod partition;
pub mod qd;
pub mod real;
pub mod renorm;
pub mod rotation;

pub use circle::{make_break_map, AffineMap, BreakMap, CircleMap, CirclePoint, Composition, Side, SmoothMap};
pub use conjugacy::{
    build_conjugacy, holder_estimate, rigidity_experiment, ConjugacyTable, ExperimentConfig, HolderEstimate,
    LevelObstruction, MapSpec, RigidityReport,
};
pub use constants::{derivative_bound, ledger_for, nu_formula, ConstantsLedger};
pub use distortion::{interval_orbit, mixed_partial_check, tilde, xi, xi_generic, xi_orbit, xi_orbit_from, Interval, XiSummary};
pub use error::{LabError, Result};
pub use jet::Jet3;
pub use partition::{
    dynamical_partition, fit_decay, long_subinterval_ratio, partition_stats, return_derivative_range, DecayFit,
    DynamicalPartition, Generation, PartitionCheck, PartitionInterval, PartitionStats,
};
pub use qd::Qd;
pub use real::{fit_line, LineFit, Real};
pub use renorm::{
    fit_fractional_linear, in_uc, mobius_conjugacy_probe, mobius_renorm_step, pair_rotation_quotients, renormalize,
    tune_pair_alpha, FitResult, MobiusMap, MobiusPairParams, ProbeResult, RenormPair,
};
pub use rotation::{
    bisect_parameter, closest_returns, compare_prefix, compare_rotation, rotation_cf, tune_delta, tune_delta_with,
    ContinuedFraction, ReturnData, RotationOrder, RotationTarget, TargetSpec, TuneOptions, Tuned,
};

pub type BreakMap64 = BreakMap<f64>;
pub type BreakMapQd = BreakMap<Qd>;
pub type ContinuedFraction64 = ContinuedFraction<f64>;
pub type MobiusPair64 = MobiusPairParams<f64>;
pub type ConjugacyTable64 = ConjugacyTable<f64>;
