use thiserror::Error;

/// Errors raised by the model, spectra, zero-finding and oracle routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid normalization: {0}")]
    InvalidNormalization(String),

    /// The Rabi splitting or the closed-form D_k denominator vanished.
    #[error("degenerate spectrum: {0}")]
    DegenerateSpectrum(String),

    /// The effective matrix is defective (coalescing eigenvalues with coupling).
    #[error("exceptional point: {0}")]
    ExceptionalPoint(String),

    #[error("no long-time limit: {0}")]
    NoLongTimeLimit(String),

    #[error("energy window too narrow: {0}")]
    WindowTooNarrow(String),

    #[error("tail bound violated: estimated tail fraction {estimate:e}, widen the grid to at least {suggested_half_width}")]
    TailBound { estimate: f64, suggested_half_width: f64 },

    #[error("recurrence time exceeded: t_final = {t_final} but the discretized continuum revives at {revival}")]
    RecurrenceTime { t_final: f64, revival: f64 },

    #[error("no zero: {0}")]
    NoZero(String),

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("zero polynomial")]
    ZeroPolynomial,

    #[error("root finding failed: {0}")]
    RootFinding(String),

    #[error("integration failed: {0}")]
    Integration(String),
}

impl Error {
    /// Stable identifier used by the CLI when reporting failures.
    pub fn name(&self) -> &'static str {
        match self {
            Error::Domain(_) => "DomainError",
            Error::InvalidNormalization(_) => "InvalidNormalization",
            Error::DegenerateSpectrum(_) => "DegenerateSpectrum",
            Error::ExceptionalPoint(_) => "ExceptionalPoint",
            Error::NoLongTimeLimit(_) => "NoLongTimeLimit",
            Error::WindowTooNarrow(_) => "WindowTooNarrow",
            Error::TailBound { .. } => "TailBound",
            Error::RecurrenceTime { .. } => "RecurrenceTime",
            Error::NoZero(_) => "NoZero",
            Error::UnknownPreset(_) => "UnknownPreset",
            Error::ZeroPolynomial => "ZeroPolynomial",
            Error::RootFinding(_) => "RootFinding",
            Error::Integration(_) => "IntegrationError",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
