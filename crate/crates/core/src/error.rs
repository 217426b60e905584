use thiserror::Error;

/// Errors raised by the numerical kernels and expansion engines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error in {op}: {detail}")]
    Domain { op: &'static str, detail: String },

    #[error("{op} did not reach tolerance: estimate error {error:.3e} after {evaluations} evaluations")]
    Accuracy {
        op: &'static str,
        error: f64,
        evaluations: usize,
    },

    #[error("{op} did not converge: {detail}")]
    NonConvergence { op: &'static str, detail: String },

    #[error("profile `{profile}` provides {available} origin coefficients, {requested} requested")]
    InsufficientCoefficients {
        profile: String,
        available: usize,
        requested: usize,
    },

    #[error("{op} requires a {expected} wavelet, got {got}")]
    WrongWavelet {
        op: &'static str,
        expected: &'static str,
        got: String,
    },

    #[error("Haar expansion requires d_0 = 0 on both half-lines, got |d_0| = {magnitude:.3e}")]
    NonzeroLeadingCoefficient { magnitude: f64 },

    #[error("missing Mellin value for s = {s}")]
    MissingMellin { s: usize },

    #[error("z = {z} lies outside the convergence strip 0 < Re(z) < 1")]
    StripViolation { z: f64 },

    #[error("integral diverges: {detail}")]
    Divergence { detail: String },

    #[error("sampled function covers [{start}, {end}] but [{need_lo}, {need_hi}] is required")]
    GridCoverage {
        start: f64,
        end: f64,
        need_lo: f64,
        need_hi: f64,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
