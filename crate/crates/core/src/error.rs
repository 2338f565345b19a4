use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Zero-energy input where a normalized quantity was requested.
    #[error("degenerate input: {0}")]
    DegenerateInput(&'static str),

    /// Levinson-Durbin hit a reflection coefficient with magnitude >= 1.
    #[error("unstable LPC recursion at order {order} (reflection coefficient {reflection})")]
    Unstable { order: usize, reflection: f64 },

    #[error("no admissible lags in the search band")]
    EmptySearchBand,

    #[error("contour has no voiced frames")]
    NoDominant,

    #[error("no frames eligible for evaluation")]
    EmptyEvaluation,

    #[error("malformed WAV file: {0}")]
    MalformedWav(String),

    #[error("unsupported WAV format: {0}")]
    UnsupportedFormat(String),

    #[error("WAV file contains no samples")]
    EmptyAudio,

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io(io),
            other => Error::Parse(format!("{other:?}")),
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        if e.is_io() {
            Error::Io(e.into())
        } else {
            Error::Parse(e.to_string())
        }
    }
}

impl From<toml::de::Error> for Error {
    fn from(e: toml::de::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
