//! Path simulation: Brownian and bridge samplers, the pathwise closed-form
//! solution, crossing ensembles, and the Osgood-step Euler scheme.

mod ensemble;
mod euler;
mod exact;
mod paths;
pub mod rng;

pub use ensemble::{
    mc_barrier_crossing, mc_blowup_cdf, mc_blowup_cdf_curve, McConfig, PathEnsembleResult, MIN_PATHS,
    THREADS_ENV,
};
pub use euler::{
    euler_osgood_outcome, euler_osgood_path, EulerOutcome, EulerStatus, OsgoodScheme, StepRule,
    MIN_BLOWUP_THRESHOLD,
};
pub use exact::{exact_solution_path, ExplosionRecord, PathValue};
pub use paths::{sample_pinned_bridge, sample_wiener, PathGrid, WienerPath, MAX_GRID_STEPS};
