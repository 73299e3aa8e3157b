use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CasimirError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("response model `{model}` cannot be evaluated at {at}: {reason}")]
    ModelEvaluation {
        model: &'static str,
        at: String,
        reason: String,
    },

    #[error("invalid absorption table: {0}")]
    InvalidTable(String),

    #[error("non-passive mirrors: |r1 r2 exp(-2qL)| = {magnitude} >= 1 at xi = {xi:e}, k = {k:e}")]
    NonPassive { magnitude: f64, xi: f64, k: f64 },

    #[error("non-finite value in {context}")]
    NonFinite { context: String },

    #[error(
        "quadrature did not converge: value {value:e} +/- {error:e}, worst subinterval [{worst_lo:e}, {worst_hi:e}]"
    )]
    QuadratureNotConverged {
        value: f64,
        error: f64,
        worst_lo: f64,
        worst_hi: f64,
    },

    #[error("Matsubara sum not converged after {terms} terms (last term {last_term:e})")]
    MatsubaraNotConverged { terms: usize, last_term: f64 },

    #[error(
        "argument principle mismatch in [{re_lo:e}, {re_hi:e}] x [{im_lo:e}, {im_hi:e}]: winding {winding}, roots found {found}"
    )]
    WindingMismatch {
        re_lo: f64,
        re_hi: f64,
        im_lo: f64,
        im_hi: f64,
        winding: i64,
        found: usize,
    },

    #[error("mode sum depends on the cutoff: {0}")]
    CutoffDependence(String),
}

pub type Result<T> = std::result::Result<T, CasimirError>;
