use thiserror::Error;

/// Syntax error in an expression or a profile/surface spec string.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("parse error at offset {offset}: {message}")]
pub struct ParseError {
    /// Byte offset into the input where the problem was detected.
    pub offset: usize,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(offset: usize, message: impl Into<String>) -> Self {
        Self {
            offset,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("evaluation error at s = {s}: {message}")]
    Eval { s: f64, message: String },

    #[error("unbound parameter `{0}`")]
    UnboundParameter(String),

    #[error("invalid family parameters: {0}")]
    Family(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("degenerate radius x² + y² = {radius_sq:e} at s = {s}")]
    DegenerateRadius { s: f64, radius_sq: f64 },

    #[error("profile is not unit speed (max |x'² + y'² - 1| = {residual:e})")]
    NotUnitSpeed { residual: f64 },

    #[error("parameter {name} = {value} outside [{lo}, {hi}]")]
    OutOfRange {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("frame is not orthonormal (Gram deviation {0:e})")]
    FrameNotOrthonormal(f64),

    #[error("degenerate metric (EG - F² = {0:e})")]
    DegenerateMetric(f64),

    #[error("reparametrization failed: {0}")]
    Reparametrization(String),

    #[error("surface is not flat (max |K| = {0:e})")]
    NotFlat(f64),

    #[error("too few samples for a fit: {got} < {need}")]
    TooFewSamples { got: usize, need: usize },

    #[error("Gauss sample {index} rejected: {reason}")]
    InvalidSample { index: usize, reason: String },

    #[error("zero divisor: {0} has no bicomplex inverse")]
    ZeroDivisor(String),

    #[error("matrix does not have the bicomplex pattern (deviation {0:e})")]
    NotBicomplexMatrix(f64),

    #[error("profile is not in polar form u(s)·(cos θ(s), sin θ(s)): {0}")]
    NotPolar(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Stable snake_case name of the variant, used in structured error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse(_) => "parse",
            Error::Eval { .. } => "eval",
            Error::UnboundParameter(_) => "unbound_parameter",
            Error::Family(_) => "family",
            Error::Config(_) => "config",
            Error::DegenerateRadius { .. } => "degenerate_radius",
            Error::NotUnitSpeed { .. } => "not_unit_speed",
            Error::OutOfRange { .. } => "out_of_range",
            Error::FrameNotOrthonormal(_) => "frame_not_orthonormal",
            Error::DegenerateMetric(_) => "degenerate_metric",
            Error::Reparametrization(_) => "reparametrization",
            Error::NotFlat(_) => "not_flat",
            Error::TooFewSamples { .. } => "too_few_samples",
            Error::InvalidSample { .. } => "invalid_sample",
            Error::ZeroDivisor(_) => "zero_divisor",
            Error::NotBicomplexMatrix(_) => "not_bicomplex_matrix",
            Error::NotPolar(_) => "not_polar",
            Error::Io(_) => "io",
        }
    }

    /// True for failures caused by bad user input rather than numerical degeneracy.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Parse(_)
                | Error::UnboundParameter(_)
                | Error::Family(_)
                | Error::Config(_)
                | Error::NotPolar(_)
                | Error::NotBicomplexMatrix(_)
                | Error::Io(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
