use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid spin quantum number: 2I = {0} (must be >= 1)")]
    InvalidSpin(i64),

    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not unitary (deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("integration failed at t = {t}: {reason}")]
    Integration { t: f64, reason: String },

    #[error("not a two-component state: top-two Floquet weight {weight:.4} < {required}")]
    NotTwoComponent { weight: f64, required: f64 },

    #[error("spin 1/2 has no quadrupole moment")]
    NoQuadrupoleMoment,

    #[error("insufficient resolved lines: {found} found, at least {required} needed")]
    InsufficientLines { found: usize, required: usize },

    #[error("addressability violated: transitions at {f1:.6e} Hz and {f2:.6e} Hz are closer than {min_separation:.3e} Hz")]
    AddressabilityViolated {
        f1: f64,
        f2: f64,
        min_separation: f64,
    },

    #[error("unknown donor: {0}")]
    UnknownDonor(String),
}
