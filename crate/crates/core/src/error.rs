use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid filter spec: {0}")]
    InvalidSpec(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("coefficient source contains no values")]
    EmptyFile,

    #[error("a coefficient set needs at least 2 taps, got {0}")]
    TooFewTaps(usize),

    #[error("invalid memristance range: need 0 < r_min ({r_min}) < r_max ({r_max})")]
    InvalidRange { r_min: f64, r_max: f64 },

    #[error("invalid grid resolution: {0} bits (expected 1..=16)")]
    InvalidBits(u32),

    #[error("target {target} Ω outside device range [{r_on}, {r_off}] Ω")]
    TargetOutOfDeviceRange { target: f64, r_on: f64, r_off: f64 },

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("synthesis infeasible: {0}")]
    Infeasible(String),

    #[error("sample rate {f_sample} Hz is not an integer multiple of {f_s} Hz")]
    RateMismatch { f_sample: f64, f_s: f64 },

    #[error(
        "dead-zone violation: a·max|x| = {scale}·{peak_v} V exceeds {limit_v} V; use a ≤ {required_scale}"
    )]
    DeadZoneViolation {
        peak_v: f64,
        scale: f64,
        limit_v: f64,
        required_scale: f64,
    },

    #[error("synthesis result failed verification: {0}")]
    InvalidResult(String),

    #[error("analysis window of {available} samples is shorter than the {required} required")]
    WindowTooShort { available: usize, required: usize },

    #[error("{freq} Hz does not complete a whole number of cycles within the analysis window")]
    UnalignedFrequency { freq: f64 },

    #[error("results do not share the same target coefficients")]
    MismatchedTargets,

    #[error("frequency grids differ")]
    GridMismatch,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
