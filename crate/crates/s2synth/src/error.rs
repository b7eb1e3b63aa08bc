use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("alpha must lie in ({lo}, {hi}), got {value}")]
    AlphaOutOfRange { value: f64, lo: f64, hi: f64 },

    #[error("generator axis must have unit length within {tol:e}, got {length}")]
    NonUnitAxis { length: f64, tol: f64 },

    #[error("point is not on the unit sphere: |x| = {norm}")]
    NotOnSphere { norm: f64 },

    #[error("parameter {name} = {value} outside its admissible range")]
    ParamOutOfRange { name: &'static str, value: f64 },

    #[error("switching-curve index k = {k} outside 1..={k_max}")]
    CurveIndexOutOfRange { k: usize, k_max: usize },

    #[error("final arc s_f = {s_f} exceeds the interior duration v(s_i) = {limit}")]
    FinalArcTooLong { s_f: f64, limit: f64 },

    #[error("bang fields are parallel at this point; cone test has no basis")]
    DegenerateBasis,

    #[error("front index k = {k} exceeds the switch-time monotonicity bound {n_mon}")]
    MonotonicityViolated { k: usize, n_mon: usize },

    #[error("front at k_M is not a simple closed curve; source parametrization refused")]
    NonOptimalFront,

    #[error("rho = {value} outside (0, 2]")]
    RhoOutOfRange { value: f64 },

    #[error("target lies outside the source disk: |z| = {norm} > rho = {rho}")]
    TargetOutsideDisk { norm: f64, rho: f64 },

    #[error("planar chart exceeded: alpha*|z| = {radius} >= 1")]
    ChartExceeded { radius: f64 },

    #[error("Newton iteration failed at s = {s}: residual {residual:e} after {iters} iterations")]
    NewtonFailed { s: f64, iters: usize, residual: f64 },

    #[error("C = pi/4 is a bifurcation value; the regime is not resolved there")]
    UnresolvedBifurcation,

    #[error("regime precondition violated: {0}")]
    RegimeViolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
