use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("singular Möbius map: denominator vanishes at z = {z}")]
    SingularMap { z: Complex64 },

    #[error("(a, b) with |a|^2 - |b|^2 = {norm} does not define an element of PSU(1,1)")]
    NotPsu { norm: f64 },

    #[error("point with |z| = {modulus} is outside the open unit disk")]
    OutsideDisk { modulus: f64 },

    #[error("not an orientation-preserving diffeomorphism: lift derivative {d1} at theta = {theta}")]
    NotADiffeo { theta: f64, d1: f64 },

    #[error("metric has total length {length}, expected {expected}; rescale first")]
    NotNormalized { length: f64, expected: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("closure Newton failed after {iters} iterations, residual {residual:.3e}")]
    ClosureFailure { iters: usize, residual: f64 },

    #[error("piecewise map is not a degree-1 diffeomorphism: {0}")]
    NotPiecewiseDiffeo(String),

    #[error("inconsistent observables at triangle ({u:.6}, {v:.6}, {w:.6}): {reason}")]
    InconsistentObservables { u: f64, v: f64, w: f64, reason: String },

    #[error("excluded range: enclosed area {area:.3e} is not positive at t = {t}")]
    ExcludedRange { t: f64, area: f64 },

    #[error("convergence failure: {0}")]
    ConvergenceFailure(String),

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("invalid descriptor: {0}")]
    Descriptor(String),
}
