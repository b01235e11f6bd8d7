use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("index {index} out of range (limit {limit})")]
    IndexOutOfRange { index: usize, limit: usize },

    #[error("probability {value} outside [{lo}, {hi}] for {what}")]
    Probability {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("coupling diverges at zero error rate ({0})")]
    InfiniteCoupling(&'static str),

    #[error("invalid geometry: {0}")]
    Geometry(String),

    #[error("exact enumeration limited to {limit} spins, got {got}")]
    SizeCap { limit: usize, got: usize },

    #[error("invalid schedule: {0}")]
    Schedule(String),

    #[error("invalid dataset: {0}")]
    Dataset(String),

    #[error("loop tension indeterminate: {0}")]
    Indeterminate(String),

    #[error("syndrome infeasible for the code")]
    Infeasible,

    #[error("config: {0}")]
    Config(String),

    #[error("schema mismatch in {path}: {msg}")]
    Schema { path: String, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub(crate) fn check_probability(what: &'static str, value: f64, lo: f64, hi: f64) -> Result<()> {
    if value.is_finite() && value >= lo && value <= hi {
        Ok(())
    } else {
        Err(Error::Probability { what, value, lo, hi })
    }
}
