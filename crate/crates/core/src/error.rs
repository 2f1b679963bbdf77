use thiserror::Error;

/// Errors raised by the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum RatchetError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("grid underflow: {grid} grid points cannot hold a momentum span of {span}")]
    GridUnderflow { grid: usize, span: usize },

    #[error("momentum window overflow: {0}")]
    WindowOverflow(String),

    #[error("unitarity breach: {0}")]
    Unitarity(String),

    #[error("no closed fiber for kappa = {kappa}, eta = {eta}")]
    NoClosedFiber { kappa: f64, eta: f64 },

    #[error("negative radicand {value:e} in quasienergy at x0 = {x0}")]
    NegativeRadicand { x0: f64, value: f64 },

    #[error("degenerate fit window: {0}")]
    DegenerateWindow(String),

    #[error("metric undefined: {0}")]
    MetricUndefined(String),

    #[error("no sign change of the final current on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },
}

impl RatchetError {
    /// True for failures of a numerical guard (truncation window, unitarity)
    /// as opposed to bad input.
    pub fn is_numerical_guard(&self) -> bool {
        matches!(
            self,
            RatchetError::GridUnderflow { .. }
                | RatchetError::WindowOverflow(_)
                | RatchetError::Unitarity(_)
                | RatchetError::NegativeRadicand { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, RatchetError>;
