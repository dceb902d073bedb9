use num_complex::Complex64;

/// Crate-wide error type. The CLI maps variants onto its exit codes.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("degenerate parameter a = {0}: the coordinate maps (az+1)/(z+1) degenerate at a = ±1")]
    ParameterDegenerate(Complex64),

    #[error("degenerate cross-ratio parameter {0}: must avoid 0, 1 and infinity")]
    DegenerateCrossRatio(Complex64),

    #[error("word is not Sturmian")]
    NotSturmian,

    #[error("no convergence after {iterations} iterations, last residual {residual:.3e}")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("point outside the model strip: t = {t}, y = {y}")]
    OutOfStrip { t: f64, y: f64 },

    #[error("bad model parameters: {0}")]
    BadParameters(String),

    #[error("defining polynomial degenerates identically; refusing to guess roots")]
    DegenerateRoot,

    #[error("sampling hit degenerate points repeatedly")]
    SamplingDegenerate,

    #[error("invalid raster spec: {0}")]
    InvalidRaster(String),

    #[error("internal invariant violated: {0}")]
    InvariantViolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
