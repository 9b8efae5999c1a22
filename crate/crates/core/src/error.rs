use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("graph is disconnected: vertex `{0}` is unreachable")]
    DisconnectedGraph(String),
    #[error("nonpositive {what} ({value}) on `{at}`")]
    NonpositiveWeight {
        what: &'static str,
        at: String,
        value: f64,
    },
    #[error("no interior vertices")]
    EmptyDomain,
    #[error("no boundary vertices")]
    EmptyBoundary,
    #[error("boundary vertex `{0}` has no interior neighbor")]
    DetachedBoundary(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("duplicate vertex `{0}`")]
    DuplicateVertex(String),
    #[error("invalid space description: {0}")]
    InvalidSpace(String),
    #[error("set has zero measure")]
    EmptySet,
    #[error("degenerate radius grid: {0}")]
    DegenerateGrid(String),
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("vertex `{0}` has no neighbors in the region")]
    IsolatedVertex(String),
    #[error("field has length {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("exponent {0} is outside the admissible range")]
    InvalidExponent(f64),
    #[error("lower-mass exponent s = {0} must be positive")]
    DegenerateExponent(f64),
    #[error("path family is empty")]
    EmptyFamily,
    #[error("convex program failed: {0}")]
    SolverFailure(String),
    #[error("field is not mean-zero over the domain (mean = {0:e})")]
    NotMeanZero(f64),
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("radii must satisfy 0 < rho < R{bound}: got rho = {rho}, R = {big_r}")]
    BadRadii {
        rho: f64,
        big_r: f64,
        bound: String,
    },
    #[error("radius {radius} outside (0, {limit})")]
    BadRadius { radius: f64, limit: f64 },
    #[error("ball B({center}, {radius}) leaves the domain")]
    BallNotInterior { center: String, radius: f64 },
    #[error("{dof} degrees of freedom exceed the brute-force limit of {max}")]
    TooManyVertices { dof: usize, max: usize },
    #[error("minimizer did not converge after {iterations} iterations (value {value})")]
    NotConverged { iterations: usize, value: f64 },
    #[error("iteration hypothesis fails at rho = {rho}, R = {big_r} (excess {excess:e})")]
    HypothesisFails { rho: f64, big_r: f64, excess: f64 },
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
