use thiserror::Error;

/// Crate-wide error type.
///
/// Exit-code mapping used by the CLI: configuration problems map to 2,
/// numerical-validity failures (boundary, norm, truncation) map to 3,
/// everything else to 1.
#[derive(Debug, Error)]
pub enum Error {
    #[error("config error: {0}")]
    Config(String),

    #[error("invalid parameter: {0}")]
    Validation(String),

    #[error("wavepacket reached the grid boundary at t = {time:.6e} s (edge amplitude {amplitude:.3e})")]
    Boundary { time: f64, amplitude: f64 },

    #[error("norm drift {drift:.3e} at t = {time:.6e} s exceeds tolerance")]
    NormDrift { time: f64, drift: f64 },

    #[error("Fock truncation inadequate: population {population:.3e} in top levels at n_max = {n_max}")]
    Truncation { n_max: usize, population: f64 },

    #[error("band truncation breakdown: discarded weight {weight:.3e} exceeds threshold {threshold:.3e}")]
    BandLeak { weight: f64, threshold: f64 },

    #[error("mismatched Fock truncations: {a} vs {b}")]
    MismatchedTruncation { a: usize, b: usize },

    #[error("malformed CSV: {0}")]
    Csv(String),

    #[error("{model} run at omega_q/2pi = {omega_q_hz} Hz, t = {time:.6e} s: {source}")]
    InRun {
        model: &'static str,
        omega_q_hz: f64,
        time: f64,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Validation(_) => 2,
            Error::Boundary { .. }
            | Error::NormDrift { .. }
            | Error::Truncation { .. }
            | Error::BandLeak { .. }
            | Error::MismatchedTruncation { .. } => 3,
            Error::InRun { source, .. } => source.exit_code(),
            Error::Csv(_) | Error::Io(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
