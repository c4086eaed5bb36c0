use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("singular linear system (pivot {pivot:e} in column {column})")]
    SingularSystem { column: usize, pivot: f64 },

    #[error("expected {expected} lattice values, found {found}")]
    LatticeSize { expected: usize, found: usize },

    #[error("lattice value missing for multi-index {0:?}")]
    MissingLatticeValue(Vec<u32>),

    #[error("B-spline order {0} exceeds the supported maximum of {max}", max = crate::bsplines::MAX_ORDER)]
    OrderOutOfRange(usize),

    #[error("derivative order {order:?} exceeds spline order {m} on some axis")]
    DerivativeOutOfRange { order: Vec<u32>, m: usize },

    #[error("no active cells: domain does not meet its bounding box at level {0}")]
    EmptyActiveSet(u32),

    #[error("no closed dyadic cell of level {0} lies inside the domain")]
    NoInteriorCells(u32),

    #[error("quadrature with {points} points per axis cannot integrate degree {degree} exactly (need at least {required})")]
    QuadratureOrder {
        points: usize,
        degree: i32,
        required: usize,
    },

    #[error("invalid L_p exponent {0}")]
    InvalidExponent(f64),

    #[error("derivative {0:?} is not available for this function")]
    DerivativeUnavailable(Vec<u32>),

    #[error("modulus of smoothness vanishes on the sampled grid; smoothness cannot be fitted")]
    DegenerateModulus,

    #[error("rate fit needs at least 3 points, got {0}")]
    TooFewPoints(usize),

    #[error("rate fit needs positive values, got {0} at position {1}")]
    NonPositiveValue(f64, usize),

    #[error("spline field mixes colour classes: {0:?} and {1:?}")]
    MixedColors(Vec<i64>, Vec<i64>),

    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: String, reason: String },

    #[error("missing sample values")]
    MissingSamples,

    #[error("field dump: {0}")]
    Format(String),

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("{condition} fails: {expression} = {value} is not positive")]
    ConditionViolated {
        condition: &'static str,
        expression: &'static str,
        value: f64,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field: field.into(),
            reason: reason.into(),
        }
    }
}
