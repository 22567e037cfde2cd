use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("non-finite input {0}")]
    NonFinite(f64),

    #[error("rotation positions of k = {first} and k = {second} coincide within 4 ulps (alpha = {alpha}); alpha is effectively rational at this precision")]
    DuplicatePositions { alpha: f64, first: i64, second: i64 },

    #[error("twist-positivity gate violated: max |l(k+1)/l(k) - 1| * eta_max = {value} at k = {k} (needs < 1; ratio = {ratio}, eta_max = {eta_max})")]
    GateViolation { value: f64, k: i64, ratio: f64, eta_max: f64 },

    #[error("gap index {k} lies beyond the stored table radius {radius}")]
    OrbitBeyondTable { k: i64, radius: i64 },

    #[error("domain error in {op}: argument {arg} (parameter {param})")]
    Domain { op: &'static str, param: f64, arg: f64 },

    #[error("slope seeding infeasible at k = {k}: {reason}")]
    SeedInfeasible { k: i64, reason: String },

    #[error("surgery infeasible at k = {k}, side {side}: sup |delta - 1| = {sup_deviation}, limit = {limit}, min delta = {min_delta}")]
    SurgeryInfeasible { k: i64, side: char, sup_deviation: f64, limit: f64, min_delta: f64 },

    #[error("invalid configuration: {}", .0.join("; "))]
    Config(Vec<String>),

    #[error("invalid build document: {0}")]
    InvalidBuild(String),
}
