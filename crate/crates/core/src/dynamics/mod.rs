//! Bohmian trajectories, tangent dynamics and finite-time LCNs.

pub mod integrator;
pub mod lcn;
pub mod trajectory;
pub mod velocity;

pub use integrator::{Dp5, NoHook, OdeSystem, Singular, StepControl, StepHook};
pub use lcn::{classify_trajectory, Classification, LcnSeries, LcnThresholds, OrderClass};
pub use trajectory::{
    commensurate_period, default_xi0, detect_period, drive, integrate_observed,
    integrate_trajectory, integrate_with_deviation, lcn_run, lcn_series, sample_times,
    IntegratorConfig, Renormalizer, TrajectoryPath, TrajectorySample,
};
pub use velocity::{
    bohm_velocity, fd_jacobian, generic_velocity, velocity_and_jacobian, BohmFlow, TangentFlow,
};
