use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("Hermite degree {degree} exceeds the supported maximum {max}")]
    DegreeOutOfRange { degree: u32, max: u32 },
    #[error("point lies within the singularity floor of a nodal point")]
    NearNode,
    #[error("trajectory hit a nodal point near t = {t}: step fell below {min_step:e}")]
    SingularityUnavoidable { t: f64, min_step: f64 },
    #[error("step limit {limit} exceeded at t = {t}")]
    StepLimit { limit: u64, t: f64 },
    #[error("integration produced a non-finite state at t = {t}")]
    NonFinite { t: f64 },
    #[error("nodal point is at infinity at t = {t}")]
    NodeAtInfinity { t: f64 },
    #[error("no saddle X-point found around the nodal point at t = {t}")]
    NoSaddle { t: f64 },
    #[error("LCN series spans {decades:.2} decades of time; at least 2 are required")]
    InsufficientSpan { decades: f64 },
    #[error("rejection sampler acceptance rate {rate:.3e} is below 1%")]
    EnvelopeFailure { rate: f64 },
    #[error("histogram grids have different geometry")]
    GeometryMismatch,
    #[error("grid misses {missing:.3e} of the probability mass")]
    Coverage { missing: f64 },
    #[error("integral surface needs z > 0 but z = {z} at t = {t}")]
    NonPositiveZ { t: f64, z: f64 },
    #[error("{failed} of {total} ensemble trajectories failed")]
    EnsembleFailure { failed: usize, total: usize },
    #[error("nodal-line continuation lost the line after {points} points")]
    LineLost { points: usize },
    #[error("{0}")]
    Unsupported(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Configuration problems map to exit code 1, numerical failures to 2.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config(_)
                | Error::DegreeOutOfRange { .. }
                | Error::Unsupported(_)
                | Error::Json(_)
                | Error::GeometryMismatch
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
