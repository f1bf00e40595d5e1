use thiserror::Error;

/// Failures raised by the simulator and its I/O layer.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error(
        "density-matrix invariant breached at step {step} (t = {t:.6} ns, z = {z:.6} cm): {what}"
    )]
    InvariantBreach {
        step: usize,
        t: f64,
        z: f64,
        what: String,
    },

    #[error("ion-yield estimators disagree: population {population:.3e} vs flux {flux:.3e} (window or dt too small)")]
    YieldMismatch { population: f64, flux: f64 },

    #[error("z-step underflow at z = {z:.6} cm (dz = {dz:.3e} cm): propagation is too stiff for the tolerance")]
    Stiffness { z: f64, dz: f64 },

    #[error("relative phase undefined: amplitude {amplitude:.3e} at the evaluation sample")]
    UndefinedPhase { amplitude: f64 },

    #[error("config error: {0}")]
    Config(#[from] crate::config::ConfigErrors),

    #[error("empty result: {0}")]
    EmptyResult(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Numerical failures (as opposed to bad input or I/O).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::InvariantBreach { .. }
                | Error::YieldMismatch { .. }
                | Error::Stiffness { .. }
                | Error::UndefinedPhase { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
