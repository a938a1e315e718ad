use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Invalid configuration (grid sizes, sample sets, regularization lengths).
    #[error("configuration error: {0}")]
    Config(String),

    /// A root-finding target outside the interval the function can reach.
    #[error("target {target:e} outside achievable range [{lo:e}, {hi:e}]")]
    Range { target: f64, lo: f64, hi: f64 },

    #[error("quadrature did not converge after {subdivisions} subdivisions (partial value {partial:e}, error estimate {abs_error:e})")]
    Quadrature {
        partial: f64,
        abs_error: f64,
        subdivisions: usize,
    },

    /// Non-finite values or a gradient above the configured ceiling.
    #[error("blow-up at t = {time}: {reason}", time = .0.time, reason = .0.reason)]
    BlowUp(Box<crate::evolution::BlowUp>),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
