use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Crystal or configuration document does not match the expected schema.
    #[error("schema violation: {0}")]
    Schema(String),

    /// Input parsed but violates a model invariant.
    #[error("invalid {what}: {reason}")]
    Invalid { what: &'static str, reason: String },

    #[error("wavelength {lambda_um} µm outside valid range [{min_um}, {max_um}] µm")]
    OutOfRange {
        lambda_um: f64,
        min_um: f64,
        max_um: f64,
    },

    #[error("axis '{0}' is not registered for this crystal")]
    UnknownAxis(String),

    #[error("QPM order -1 impossible here: central mismatch is {0} rad/m")]
    QpmImpossible(f64),

    #[error("parabolic degeneracy: 2k_p'' = k_s'', Ω_d undefined")]
    ParabolicDegeneracy,

    #[error("phase-matching regime violated: {0}")]
    Regime(String),

    #[error("no cGVM point: {0}")]
    NoCgvm(String),

    #[error("root solver did not converge after {0} iterations")]
    NoConvergence(usize),

    #[error("joint spectral amplitude is identically zero")]
    ZeroJsa,
}

impl Error {
    pub(crate) fn invalid(what: &'static str, reason: impl Into<String>) -> Self {
        Error::Invalid {
            what,
            reason: reason.into(),
        }
    }
}
