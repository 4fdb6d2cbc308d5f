use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("points {0} and {1} coincide (distance {2:e} below tolerance)")]
    DuplicatePoints(usize, usize, f64),
    #[error("operation requires at least one interaction center")]
    EmptyConfiguration,
    #[error("{what}: N = {n} exceeds the limit {limit}")]
    TooLarge {
        what: &'static str,
        n: usize,
        limit: usize,
    },
    #[error("zero separation between arguments of the Green function")]
    ZeroSeparation,
    #[error("characteristic matrix is singular at z = {0}")]
    SingularGamma(num_complex::Complex64),
    #[error("evaluation point lies on an interaction center")]
    PointOnCenter,
    #[error("kernel arguments coincide")]
    CoincidentArguments,
    #[error("all exp-monomials cancelled")]
    FullCancellation,
    #[error("K_1 = {k1} disagrees with 1/diam = {inv_diam}")]
    DiamMismatch { k1: f64, inv_diam: f64 },
    #[error("only the zero frequency survives; finitely many resonances")]
    DegenerateSingleTerm,
    #[error("index {index} out of range for {len} elements")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("zero on or near the contour boundary after {0} perturbations")]
    BoundaryZero(usize),
    #[error("Newton iteration failed to converge near {0}")]
    NonConvergence(num_complex::Complex64),
    #[error("radius {requested} exceeds searched region {searched}")]
    RegionExceeded { requested: f64, searched: f64 },
    #[error("radius {0} is below the minimum {1} required for chain extraction")]
    InsufficientRadius(f64, f64),
    #[error("empty sample")]
    EmptySample,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("value overflow evaluating determinant at z = {0}")]
    Overflow(num_complex::Complex64),
}

pub type Result<T> = std::result::Result<T, Error>;
