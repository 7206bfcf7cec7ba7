use thiserror::Error;

/// Errors produced by field construction, diagnostics, and experiments.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("non-finite value in field data ({context})")]
    NonFinite { context: String },

    #[error("field/grid mismatch: {0}")]
    Shape(String),

    #[error("exponent out of range: {0}")]
    Exponent(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("grid cannot resolve the requested scale: {0}")]
    Resolution(String),

    #[error("domain too small: {0}")]
    DomainTooSmall(String),

    #[error("contract violated: {name}: {lhs} vs required {rhs}")]
    Contract { name: String, lhs: f64, rhs: f64 },

    #[error("dyadic level {j} outside resolvable range [{j_min}, {j_max}]")]
    LevelRange { j: i32, j_min: i32, j_max: i32 },

    #[error("time step rejected (CFL): dt = {dt}, largest admissible dt = {suggested}")]
    StepRejected { dt: f64, suggested: f64 },

    #[error("calibration failed: {0}")]
    Calibration(String),

    #[error("registry has no entry for {0}")]
    RegistryMiss(String),

    #[error("file format: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn contract(name: &str, lhs: f64, rhs: f64) -> Self {
        Error::Contract {
            name: name.to_string(),
            lhs,
            rhs,
        }
    }
}
