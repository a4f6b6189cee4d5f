use thiserror::Error;

/// Every failure the numerical pipeline can report.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("asymmetric domain: [{x_min}, {x_max}] is not of the form [-a, a]")]
    AsymmetricDomain { x_min: f64, x_max: f64 },
    #[error("degenerate grid: need at least 3 points and x_max > x_min, got n = {n}")]
    DegenerateGrid { n: usize },
    #[error("grid has no center point (n = {n} is even)")]
    NoCenterPoint { n: usize },
    #[error("grid mismatch between sampled functions")]
    GridMismatch,
    #[error("kernel support does not fit inside the domain")]
    KernelSupportTooWide,
    #[error("kernel violates positive-definiteness assumption (min transform {min_transform:e})")]
    KernelNotPositiveDefinite { min_transform: f64 },
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter {
        name: &'static str,
        reason: &'static str,
    },
    #[error("hartree minimisation did not converge after {iterations} iterations (residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },
    #[error("hartree minimiser lost to a gaussian trial by {margin:e}")]
    VariationalCheckFailed { margin: f64 },
    #[error("ordering violated: mu_- - mu_+ = {gap:e} is not positive")]
    OrderingViolated { gap: f64 },
    #[error("need N >= 2 particles, got {n}")]
    TooFewParticles { n: usize },
    #[error("eigensolver did not converge")]
    EigenNoConvergence,
    #[error("empty support: sigma^2 = {sigma_sq} < 1")]
    EmptySupport { sigma_sq: f64 },
    #[error("increase n_modes: cutoff {cutoff} needs {needed} modes, basis has {available}")]
    InsufficientModes {
        cutoff: usize,
        needed: usize,
        available: usize,
    },
    #[error("non-PSD square-root argument (eigenvalue {min_eigenvalue:e})")]
    NonPsdArgument { min_eigenvalue: f64 },
    #[error("unstable quadratic form: A - B is not positive definite (eigenvalue {min_eigenvalue:e})")]
    UnstableQuadraticForm { min_eigenvalue: f64 },
    #[error("singular linear system")]
    SingularSolve,
    #[error("dimension {dimension} exceeds the cap of {cap}")]
    DimensionCap { dimension: usize, cap: usize },
    #[error("mode index {index} out of range ({available} modes)")]
    ModeIndex { index: usize, available: usize },
}
