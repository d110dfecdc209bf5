use thiserror::Error;

/// Errors raised by the simulation core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A physical or numerical parameter is outside its domain.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// Adaptive quadrature did not reach the requested tolerance.
    #[error("quadrature did not converge: estimate {estimate:e}, error {error:e}, requested {requested:e}")]
    QuadratureNotConverged { estimate: f64, error: f64, requested: f64 },

    /// An integral diverges (e.g. infrared divergence of a thermal trace).
    #[error("divergent integral: {0}")]
    Divergent(String),

    /// Time step violates the explicit-stability limit.
    #[error("time step {dt:e} violates stability limit; maximum allowed is {max_dt:e}")]
    CflViolation { dt: f64, max_dt: f64 },

    /// The grid cannot resolve the interference fringes.
    #[error("grid too coarse: {points_per_fringe:.2} points per fringe, need nx >= {required_nx}")]
    GridTooCoarse { points_per_fringe: f64, required_nx: usize },

    /// A one-dimensional minimizer failed to bracket or converge.
    #[error("optimizer did not converge: {0}")]
    OptimizerNotConverged(String),

    /// The requested operation is not defined for this input.
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

/// A value together with regime-validity warnings.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct Checked<T> {
    pub value: T,
    pub warnings: Vec<String>,
}

impl<T> Checked<T> {
    pub fn ok(value: T) -> Self {
        Self {
            value,
            warnings: Vec::new(),
        }
    }

    pub fn warn_if(mut self, cond: bool, msg: impl FnOnce() -> String) -> Self {
        if cond {
            let m = msg();
            log::warn!("{m}");
            self.warnings.push(m);
        }
        self
    }
}
