//! Born sampling, ensembles, histograms and conservation checks.

pub mod ensemble;
pub mod ergodicity;
pub mod histogram;
pub mod sampling;
pub mod section;
pub mod surface;

pub use ensemble::{
    final_position, run_ensemble, trajectory_histogram, EnsembleResult, EnsembleSpec,
    TrajectorySummary, MAX_FAILURE_FRACTION,
};
pub use ergodicity::{ergodicity_test, ErgodicityConfig, ErgodicityReport};
pub use histogram::{
    density_histogram, l1_distance, mean_density_histogram, GridMass, GridSpec, HistogramGrid,
    COVERAGE_TOL,
};
pub use sampling::{sample_born, BornSampler, Sampler, MIN_ACCEPTANCE};
pub use section::{box_counting_dimension, fit_conic, stroboscopic_section, ConicFit};
pub use surface::{surface_residual, IntegralSurfaceSpec};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Random stream of trajectory `index`: ChaCha8 keyed by the master seed
/// (expanded by `seed_from_u64`) on stream number `index`. The mapping is
/// part of the reproducibility contract and does not change between versions.
pub fn stream_rng(master: u64, index: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(master);
    r.set_stream(index);
    r
}
