use thiserror::Error;

use crate::oracle::CrossValidationReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// Neither the oscillator nor the linear potential confines the particle.
    #[error("degenerate operator: omega = 0 and chi = 0 leave no confining term")]
    DegenerateOperator,

    #[error("zero coupling: the Coulomb-type coupling a must be nonzero")]
    ZeroCoupling,

    #[error("series failed to converge at r = {r}: {detail}")]
    ConvergenceFailure { r: f64, detail: String },

    #[error("no physical root{}", fmt_max_root(.max_real_root, .chi))]
    NoPhysicalRoot {
        max_real_root: Option<f64>,
        chi: Option<f64>,
    },

    #[error("no sign change of b_(n+1) on omega in [{omega_min:e}, {omega_max:e}]; widen the scan range")]
    BracketExhausted { omega_min: f64, omega_max: f64 },

    #[error("negative radicand {0:e} in the energy expression")]
    NegativeRadicand(f64),

    #[error("series does not terminate: wavefunctions require a polynomial solution")]
    NotTruncated,

    #[error("invalid oracle domain: {0}")]
    InvalidDomain(String),

    #[error("oracle did not converge: {0}")]
    OracleConvergence(String),

    #[error("oracle mismatch on {} of {} roots", .0.failures(), .0.rows.len())]
    Mismatch(Box<CrossValidationReport>),
}

fn fmt_max_root(max_real_root: &Option<f64>, chi: &Option<f64>) -> String {
    match (max_real_root, chi) {
        (Some(s), Some(chi)) => format!(" (max real root s={s:.3} < chi={chi})"),
        (Some(s), None) => format!(" (max real root {s:.3})"),
        _ => String::new(),
    }
}
