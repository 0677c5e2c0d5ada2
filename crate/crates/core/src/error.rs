use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid root system type `{0}`")]
    InvalidType(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("zero-norm root cannot be paired as a real coroot")]
    ZeroNormRoot,

    #[error("root system {0} is simply laced; the twisted datum needs lacing number > 1")]
    SimplyLaced(String),

    #[error("capacity exceeded: {what} has size {size}, bound is {bound}")]
    Capacity { what: String, size: u128, bound: u128 },

    #[error("chamber reduction did not terminate after {0} steps")]
    NonTerminating(usize),

    #[error("weight lies on a wall of the chamber: {0}")]
    OnWall(String),

    #[error("invalid evaluation point: {0}")]
    InvalidPoint(String),

    #[error("invalid level: {0}")]
    InvalidLevel(String),

    #[error("level mismatch: expected {expected}, got {got}")]
    LevelMismatch { expected: String, got: String },

    #[error("{what} is not in the lattice {lattice}")]
    NotInLattice { what: String, lattice: String },

    #[error("weight is not regular: {0}")]
    NotRegular(String),

    #[error("inconsistent construction: {0}")]
    Inconsistent(String),

    #[error("point too close to a polar hyperplane (|denominator| = {0:e})")]
    PolarProximity(f64),

    #[error("extrapolation did not converge (error estimate {estimate:e} above tolerance {tol:e})")]
    Extrapolation { estimate: f64, tol: f64 },

    #[error("vanishing vacuum-row entry S[V,{0}]")]
    VanishingVacuumRow(usize),

    #[error("Verlinde sum is not a nonnegative integer at ({a},{b},{c}): {value}")]
    NonIntegerFusion { a: usize, b: usize, c: usize, value: f64 },

    #[error("hypothesis {what} violated: {detail}")]
    Hypothesis { what: String, detail: String },

    #[error("parse error: {0}")]
    Parse(String),
}
