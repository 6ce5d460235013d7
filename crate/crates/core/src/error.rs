use thiserror::Error;

/// Failures raised by grid construction, operators, solvers and checkers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LevyError {
    /// A parameter lies outside its admissible range.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// A hypothesis of a checker is violated; the message names it.
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    /// The requested feature is not available for this configuration.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Time step exceeds the transport stability bound.
    #[error("CFL violation at t = {time}: dt = {dt} exceeds {max_dt} (suggested dt = {suggested})")]
    Cfl {
        time: f64,
        dt: f64,
        max_dt: f64,
        suggested: f64,
    },

    /// Mass near the box edge exceeded the configured tolerance.
    #[error("boundary mass {mass:.3e} exceeds {eps:.3e} at t = {time}")]
    BoundaryMass { time: f64, mass: f64, eps: f64 },

    /// Non-finite or exploding values appeared.
    #[error("numerical blowup at t = {time}: {detail}")]
    Blowup { time: f64, detail: String },

    /// An iteration did not reach its tolerance.
    #[error("no convergence after t = {time}: residual {residual:.3e}")]
    NoConvergence { time: f64, residual: f64 },

    /// Inputs are inconsistent with each other (grids, masses, time grids).
    #[error("mismatch: {0}")]
    Mismatch(String),

    /// A fit could not be carried out on the requested window.
    #[error("fit failed: {0}")]
    Fit(String),
}

impl LevyError {
    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            LevyError::Cfl { .. }
                | LevyError::BoundaryMass { .. }
                | LevyError::Blowup { .. }
                | LevyError::NoConvergence { .. }
                | LevyError::Fit(_)
        )
    }

    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            LevyError::Parameter(_) => "parameter",
            LevyError::Hypothesis(_) => "hypothesis",
            LevyError::Unsupported(_) => "unsupported",
            LevyError::Cfl { .. } => "cfl",
            LevyError::BoundaryMass { .. } => "boundary_mass",
            LevyError::Blowup { .. } => "blowup",
            LevyError::NoConvergence { .. } => "no_convergence",
            LevyError::Mismatch(_) => "mismatch",
            LevyError::Fit(_) => "fit",
        }
    }

    /// Simulation time attached to the failure, if any.
    pub fn time(&self) -> Option<f64> {
        match self {
            LevyError::Cfl { time, .. }
            | LevyError::BoundaryMass { time, .. }
            | LevyError::Blowup { time, .. }
            | LevyError::NoConvergence { time, .. } => Some(*time),
            _ => None,
        }
    }
}

pub type Result<T> = std::result::Result<T, LevyError>;

pub(crate) fn param<T>(msg: impl Into<String>) -> Result<T> {
    Err(LevyError::Parameter(msg.into()))
}
