use thiserror::Error;

/// Errors raised anywhere in the pipeline.
///
/// Variants carrying a witness (`BoundViolation`, `LemmaViolation`,
/// `NeighborMassViolation`, `RoundTripFailure`) report a failed check of a
/// proven inequality or identity, so they point at an implementation bug
/// rather than at bad input.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty point set")]
    Empty,
    #[error("points {0} and {1} coincide")]
    DuplicatePoints(usize, usize),
    #[error("triangle inequality fails: d({0},{2}) > d({0},{1}) + d({1},{2})")]
    TriangleViolation(usize, usize, usize),
    #[error("invalid distance at ({0},{1}): {2}")]
    InvalidDistance(usize, usize, f64),
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("truncation level too shallow: need at least {required}")]
    TruncationTooShallow { required: u32 },
    #[error("net hierarchy too shallow: have depth {have}, need {need}")]
    NetsTooShallow { have: u32, need: u32 },
    #[error("bad tau {0}: must be > 1 (or = 1 in counterexample mode)")]
    BadTau(f64),
    #[error("bad beta {0}: must be > 0")]
    BadBeta(f64),
    #[error("eps {eps} exceeds ln(alpha) = {max}; set collapse mode to allow it")]
    EpsOutOfRange { eps: f64, max: f64 },
    #[error("unknown vertex ({point}, {level})")]
    UnknownVertex { point: usize, level: u32 },
    #[error("unknown node {0}")]
    UnknownNode(String),
    #[error("not in the large-tau regime: tau = {tau} < {required}")]
    NotInRegime { tau: f64, required: f64 },
    #[error("bound violated in {check}: {detail}")]
    BoundViolation { check: String, detail: String },
    #[error("{lemma} violated by path {path:?}")]
    LemmaViolation { lemma: String, path: Vec<(usize, u32)> },
    #[error("neighbor mass ratio {ratio} exceeds {bound} on edge {edge:?}")]
    NeighborMassViolation {
        edge: ((usize, u32), (usize, u32)),
        ratio: f64,
        bound: f64,
    },
    #[error("gradient mismatch on edge {edge}: supplied {supplied}, exact {exact}")]
    GradientMismatch { edge: usize, supplied: f64, exact: f64 },
    #[error("round trip failed at point {point}: |Tr(Ef) - f| = {error}")]
    RoundTripFailure { point: usize, error: f64 },
    #[error("boundary diameter {0} is not below 1 in target units")]
    ScaleMismatch(f64),
    #[error("missing data: {0}")]
    MissingData(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    /// Stable variant name for machine-readable error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Empty => "empty",
            Error::DuplicatePoints(..) => "duplicate_points",
            Error::TriangleViolation(..) => "triangle_violation",
            Error::InvalidDistance(..) => "invalid_distance",
            Error::Malformed(_) => "malformed",
            Error::DuplicateLabel(_) => "duplicate_label",
            Error::BadParams(_) => "bad_params",
            Error::TruncationTooShallow { .. } => "truncation_too_shallow",
            Error::NetsTooShallow { .. } => "nets_too_shallow",
            Error::BadTau(_) => "bad_tau",
            Error::BadBeta(_) => "bad_beta",
            Error::EpsOutOfRange { .. } => "eps_out_of_range",
            Error::UnknownVertex { .. } => "unknown_vertex",
            Error::UnknownNode(_) => "unknown_node",
            Error::NotInRegime { .. } => "not_in_regime",
            Error::BoundViolation { .. } => "bound_violation",
            Error::LemmaViolation { .. } => "lemma_violation",
            Error::NeighborMassViolation { .. } => "neighbor_mass_violation",
            Error::GradientMismatch { .. } => "gradient_mismatch",
            Error::RoundTripFailure { .. } => "round_trip_failure",
            Error::ScaleMismatch(_) => "scale_mismatch",
            Error::MissingData(_) => "missing_data",
            Error::Io(_) => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
