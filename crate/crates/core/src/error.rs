use thiserror::Error;

/// Every failure the library reports.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid dimension {dim} for mode {mode}: every truncation must be at least 2")]
    InvalidDimension { mode: usize, dim: usize },

    #[error("mode index {mode} out of range for a space with {modes} modes")]
    InvalidMode { mode: usize, modes: usize },

    #[error("truncation risk on mode {mode}: {reason}")]
    TruncationRisk { mode: usize, reason: String },

    #[error("space mismatch: {0}")]
    SpaceMismatch(String),

    #[error("singular detuning: delta*(Delta+delta) - Omega^2 = {0} vanishes")]
    SingularDetuning(f64),

    #[error("undefined quasimode rotation: lambda = 0 and nu1 = nu2")]
    UndefinedRotation,

    #[error("resonance singularity: denominator {denominator} = {value} is inside the guard band")]
    ResonanceSingularity {
        denominator: &'static str,
        value: f64,
    },

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("expected {expected} modes, found {found}")]
    WrongModeCount { expected: usize, found: usize },

    #[error("mixing angle inconsistent with parameters: stored {stored}, recomputed {recomputed}")]
    ThetaInconsistent { stored: f64, recomputed: f64 },

    #[error("atom mode must have dimension 3 (levels a, b, c), found {0}")]
    AtomDimension(usize),

    #[error("invalid evolution spec: {0}")]
    InvalidSpec(String),

    #[error("trace drift {drift:e} at t = {time} exceeds {limit:e}; reduce the step or use the adaptive integrator")]
    TraceDrift { drift: f64, time: f64, limit: f64 },

    #[error("non-finite state at t = {time}")]
    Divergence { time: f64 },

    #[error("adaptive step collapsed below {step:e} at t = {time}")]
    StepUnderflow { step: f64, time: f64 },

    #[error("trajectory solver requires a pure initial state")]
    NonPureState,

    #[error("trajectory solver requires at least one jump operator")]
    NoJumps,

    #[error("unknown observable {0}")]
    UnknownObservable(String),

    #[error("total dimension {total} exceeds the cap {cap}")]
    DimensionCap { total: usize, cap: usize },

    #[error("empty grid")]
    EmptyGrid,

    #[error("configuration error at {key}: {reason}")]
    Config { key: String, reason: String },

    #[error("io error: {0}")]
    Io(String),

    #[error("{context}: {inner}")]
    InRun { context: String, inner: Box<Error> },
}

impl Error {
    /// Wraps `self` with the name of the run that produced it.
    pub fn in_run(self, context: impl Into<String>) -> Self {
        Error::InRun {
            context: context.into(),
            inner: Box::new(self),
        }
    }

    /// The innermost error, with run context stripped.
    pub fn root(&self) -> &Error {
        match self {
            Error::InRun { inner, .. } => inner.root(),
            other => other,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
