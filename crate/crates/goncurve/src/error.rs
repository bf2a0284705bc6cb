use thiserror::Error;

/// Unified error type for the whole crate.
///
/// Negative mathematical answers (no witness at a degree, a curve failing the
/// hyperelliptic test, and so on) are ordinary return values, not errors.
/// Errors mean the input was unusable or a search budget ran out.
#[derive(Debug, Error)]
pub enum Error {
    /// Both homogeneous coordinates are zero; no projective point.
    #[error("zero vector does not define a projective point")]
    ZeroPoint,

    /// Coincident or otherwise unusable points where distinct ones are required.
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// The two coefficient rows of a pencil are proportional, so the map is constant.
    #[error("degenerate pencil: coefficient rows are proportional")]
    DegeneratePencil,

    /// Evaluation attempted at a common zero of both pencil rows.
    #[error("base point: both forms vanish at the evaluation point")]
    BasePoint,

    /// Matrix and vector shapes do not line up.
    #[error("bad shape: {0}")]
    BadShape(String),

    /// A linear solve hit a singular (or numerically singular) system.
    #[error("singular system")]
    SingularSystem,

    /// A seeded rejection-sampling loop ran out of attempts.
    #[error("exhausted retries: {0}")]
    ExhaustedRetries(String),

    /// A matrix handed to the rank-2 factorizer does not have rank 2.
    #[error("rank mismatch: matrix does not have rank exactly 2 within tolerance")]
    RankMismatch,

    /// A curve failed validation.
    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    /// Subset enumeration was requested beyond the configured genus budget.
    #[error("genus {genus} exceeds the subset enumeration budget {budget}")]
    TooLarge { genus: u32, budget: u32 },

    /// Gonality bounds need arithmetic genus at least 2.
    #[error("bad genus {0}: need genus >= 2")]
    BadGenus(u32),

    /// Every degree up to the guaranteed one was searched without a verified
    /// witness, even after restart escalation. Carries the exclusion trail.
    #[error("solver budget exceeded after degree {max_degree}")]
    SolverBudgetExceeded {
        max_degree: u32,
        exclusions: Vec<crate::engine::Exclusion>,
    },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    /// Malformed CLI input or config file.
    #[error("config error: {0}")]
    Config(String),
}
