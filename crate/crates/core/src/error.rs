use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{what} has size {size}, above the enumeration cap {cap}")]
    TooLarge {
        what: &'static str,
        size: usize,
        cap: usize,
    },
    #[error("{0} is not a finite sum of the basis")]
    NotInFs(u64),
    #[error("set is not sparse: {0} has two decompositions")]
    NotSparse(u64),
    #[error("pool exhausted after selecting {found} of {wanted} elements")]
    PoolExhausted { found: usize, wanted: usize },
    #[error("carrier mismatch: ideal {ideal} does not accept a {carrier}")]
    CarrierMismatch {
        ideal: &'static str,
        carrier: &'static str,
    },
    #[error("set leaves the window [0, {window}): found {value}")]
    OutsideWindow { value: u64, window: u64 },
    #[error("no subset of size {target} avoids the ideal's positivity proxy")]
    CannotAvoid { target: usize },
    #[error("need at least {min} points, got {got}")]
    TooSmall { got: usize, min: usize },
    #[error("coloring window {window} exceeded at {point}")]
    WindowExceeded { point: u64, window: u64 },
    #[error("classifier found {found}, caller claimed {expected}")]
    CaseMismatch { expected: String, found: String },
    #[error("search exhausted at step {step} (window {window}): {detail}")]
    SearchExhausted {
        step: usize,
        window: u64,
        detail: String,
    },
    #[error("input must be positive")]
    ZeroInput,
    #[error("pair {{{0}, {0}}} has equal endpoints")]
    DegeneratePair(u64),
    #[error("malformed bundle: {0}")]
    MalformedBundle(String),
    #[error("no suitable C: {0}")]
    NoSuchC(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("map is not total: {0}")]
    Incomplete(String),
    #[error("value {value} at {point} is outside FS(D)")]
    ValueOutsideFs { point: String, value: u64 },
}

impl Error {
    /// Stable machine-readable code, used by report writers.
    pub fn code(&self) -> &'static str {
        match self {
            Error::TooLarge { .. } => "TooLarge",
            Error::NotInFs(_) => "NotInFS",
            Error::NotSparse(_) => "NotSparse",
            Error::PoolExhausted { .. } => "PoolExhausted",
            Error::CarrierMismatch { .. } => "CarrierMismatch",
            Error::OutsideWindow { .. } => "OutsideWindow",
            Error::CannotAvoid { .. } => "CannotAvoid",
            Error::TooSmall { .. } => "TooSmall",
            Error::WindowExceeded { .. } => "WindowExceeded",
            Error::CaseMismatch { .. } => "CaseMismatch",
            Error::SearchExhausted { .. } => "SearchExhausted",
            Error::ZeroInput => "ZeroInput",
            Error::DegeneratePair(_) => "DegeneratePair",
            Error::MalformedBundle(_) => "MalformedBundle",
            Error::NoSuchC(_) => "NoSuchC",
            Error::InvalidParams(_) => "InvalidParams",
            Error::Incomplete(_) => "Incomplete",
            Error::ValueOutsideFs { .. } => "ValueOutsideFS",
        }
    }
}
