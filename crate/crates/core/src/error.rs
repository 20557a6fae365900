use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular point: {0}")]
    Singularity(String),

    #[error("invalid geometry: {0}")]
    Geometry(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("near resonance: |J_{order}(sqrt(lambda) R)| = {value:e} below guard")]
    NearResonance { order: i32, value: f64 },

    #[error("singular matrix: pivot {pivot} vanishes")]
    SingularMatrix { pivot: usize },

    #[error("resonance: {0}")]
    Resonance(String),

    #[error("mode resonance: 2x2 transmission system for mode {mode} is singular")]
    ModeResonance { mode: i32 },

    #[error("capacity resonance: {0}")]
    CapacityResonance(String),

    #[error("no sign change of the determinant in ({lo}, {hi}); scanned {} points", scan.len())]
    NoRoot {
        lo: f64,
        hi: f64,
        scan: Vec<(f64, f64)>,
    },

    #[error("series did not converge: {0}")]
    NotConverged(String),

    #[error("oracle failure: {0}")]
    OracleFailure(String),
}
