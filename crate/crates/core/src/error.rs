use alloc::string::String;

/// Errors raised by the constructions in this crate.
///
/// Verification failures are not errors: they are reported through
/// [`crate::report::Report`]. Errors signal that a construction could not be
/// carried out at all, and name the identity or precondition that broke.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("matrix is not positive semidefinite (eigenvalue {eigenvalue:e} below -{threshold:e})")]
    NotPositive { eigenvalue: f64, threshold: f64 },

    #[error("not a partial isometry (projection defect {defect:e})")]
    NotPartialIsometry { defect: f64 },

    #[error("maps do not commute (Choi residual {residual:e})")]
    NotCommuting { residual: f64 },

    #[error("maps do not commute strongly (dim ker m = {ker_m}, dim ker n = {ker_n})")]
    NotStronglyCommuting { ker_m: usize, ker_n: usize },

    #[error("coisometry identity CC* = I failed (residual {residual:e})")]
    CoisometryCheckFailed { residual: f64 },

    #[error("flip matrix is not unitary (residual {residual:e})")]
    InvalidFlip { residual: f64 },

    #[error("row contraction violated: defect operator has eigenvalue {eigenvalue:e}")]
    NotContractive { eigenvalue: f64 },

    #[error("construction failed at `{identity}` (residual {residual:e})")]
    ConstructionFailed { identity: String, residual: f64 },

    #[error("problem too large: {what} = {size} exceeds cap {cap}")]
    TooLarge {
        what: &'static str,
        size: usize,
        cap: usize,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn failed(identity: impl Into<String>, residual: f64) -> Self {
        Error::ConstructionFailed {
            identity: identity.into(),
            residual,
        }
    }
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
