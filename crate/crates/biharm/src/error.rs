use thiserror::Error;

/// Every failure the library reports. Certificate outcomes and orbit
/// classifications are data, not errors.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension d = {d} not accepted here (need {need})")]
    Dimension { d: u32, need: &'static str },

    #[error("radius must be positive, got {0}")]
    NonPositiveRadius(f64),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("step size underflow at s = {s} (h = {h:e}, |x| = {norm:e})")]
    StepUnderflow { s: f64, h: f64, norm: f64 },

    #[error("s = {s} outside trajectory span [{lo}, {hi}]")]
    OutOfSpan { s: f64, lo: f64, hi: f64 },

    #[error("interval division by {0} which contains zero")]
    DivisionByZero(String),

    #[error("box {0} lies outside the Taylor enclosure domain")]
    TaylorDomain(String),

    #[error("unknown certificate task `{0}`")]
    UnknownTask(String),

    #[error("bracket [{lo}, {hi}] has no sign change in g ({g_lo:?}, {g_hi:?})")]
    NoSignChange { lo: f64, hi: f64, g_lo: Option<i8>, g_hi: Option<i8> },

    #[error("trajectory has no terminal segment with positive third derivative")]
    NoPositiveThirdDerivative,

    #[error("orbit did not blow up within the span ({0})")]
    NoBlowup(String),

    #[error("no samples with s <= shift ({0})")]
    EmptyOverlap(f64),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error("config file: {0}")]
    Toml(#[from] toml::de::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
