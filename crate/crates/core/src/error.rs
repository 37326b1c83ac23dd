use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid scenario: `{field}` {reason}")]
    InvalidScenario { field: &'static str, reason: String },

    #[error("time grid too coarse: {samples} samples per ramp, need at least {required}")]
    Resolution { samples: usize, required: usize },

    #[error("aliasing: grid Nyquist frequency {nyquist:.6e} is below {margin}x the basis cutoff {omega_max:.6e}")]
    Aliasing {
        nyquist: f64,
        omega_max: f64,
        margin: f64,
    },

    #[error("basis does not reach the ramp scale: omega_max = {omega_max:.6e} < {required:.6e}")]
    BasisTooNarrow { omega_max: f64, required: f64 },

    #[error("invalid mode basis: {0}")]
    InvalidBasis(String),

    #[error("mode count mismatch: {left} vs {right}")]
    ModeMismatch { left: usize, right: usize },

    #[error("mode bases differ")]
    BasisMismatch,

    #[error("matrix is not symplectic (residual {residual:.3e})")]
    NotSymplectic { residual: f64 },

    #[error("unitary is not passive (squeezing residual {residual:.3e}); coherent labels cannot represent its output")]
    NotPassive { residual: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("unitaries act on overlapping modes and do not commute (commutator {residual:.3e})")]
    NonCommuting { residual: f64 },

    #[error("invalid data: {0}")]
    InvalidData(String),

    #[error("invalid sweep: {0}")]
    InvalidSweep(String),

    #[error("invalid audit configuration: {0}")]
    InvalidAudit(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
}

impl Error {
    /// Stable short code used in sweep tables.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidScenario { .. } => "invalid_scenario",
            Error::Resolution { .. } => "resolution",
            Error::Aliasing { .. } => "aliasing",
            Error::BasisTooNarrow { .. } => "basis_too_narrow",
            Error::InvalidBasis(_) => "invalid_basis",
            Error::ModeMismatch { .. } => "mode_mismatch",
            Error::BasisMismatch => "basis_mismatch",
            Error::NotSymplectic { .. } => "not_symplectic",
            Error::NotPassive { .. } => "not_passive",
            Error::Dimension { .. } => "dimension",
            Error::InvalidPartition(_) => "invalid_partition",
            Error::NonCommuting { .. } => "non_commuting",
            Error::InvalidData(_) => "invalid_data",
            Error::InvalidSweep(_) => "invalid_sweep",
            Error::InvalidAudit(_) => "invalid_audit",
            Error::NonFinite(_) => "non_finite",
        }
    }

    /// True for failures caused by insufficient numerical resolution.
    pub fn is_resolution(&self) -> bool {
        matches!(
            self,
            Error::Resolution { .. } | Error::Aliasing { .. } | Error::BasisTooNarrow { .. } | Error::NonFinite(_)
        )
    }
}
