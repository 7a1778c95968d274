//! Error type shared across model ingestion, simulation, and estimation.

use std::path::PathBuf;

use thiserror::Error;

/// Everything that can go wrong between reading a model file and fitting a
/// loss curve.
///
/// Variants are grouped roughly by pipeline stage: file/model ingestion,
/// operator construction, state evolution, sampling, and estimation.
#[derive(Debug, Error)]
pub enum Error {
    /// A file could not be read or written.
    #[error("failed to access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A model file line could not be parsed.
    #[error("model parse error at line {line}: {message}")]
    ModelParse { line: usize, message: String },

    /// A mode index referenced a mode the model does not have.
    #[error("mode index {index} out of range for {n_modes} modes")]
    ModeIndex { index: usize, n_modes: usize },

    /// Two entries that must agree by Hermiticity disagree beyond tolerance.
    #[error("hermiticity violation for {entry}: {a} vs {b} differ by more than {tolerance}")]
    Hermiticity {
        entry: String,
        a: f64,
        b: f64,
        tolerance: f64,
    },

    /// An operator and a state disagree on the number of qubits.
    #[error("operator acts on {operator} qubits but the state has {state}")]
    QubitMismatch { operator: usize, state: usize },

    /// An occupation pattern does not match the expected mode count.
    #[error("occupation pattern has {got} entries, expected {expected}")]
    OccupationLength { got: usize, expected: usize },

    /// A state vector was built from a non-power-of-two amplitude count.
    #[error("{0} amplitudes do not form a qubit register (must be a power of two)")]
    BadAmplitudeCount(usize),

    /// A state vector was built from amplitudes that are not normalized.
    #[error("state norm {0} differs from 1 beyond tolerance")]
    NotNormalized(f64),

    /// Dense (eigendecomposition-based) evolution was requested beyond the
    /// size this crate is willing to handle densely.
    #[error("dense evolution refused: 2^{n_qubits} amplitudes exceed the limit of {limit}")]
    DenseLimit { n_qubits: usize, limit: usize },

    /// An iterative matrix decomposition failed to converge.
    #[error("matrix decomposition failed to converge")]
    Decomposition,

    /// A sampling routine was asked for zero shots.
    #[error("shot count must be positive")]
    ZeroShots,

    /// A probability left the unit interval.
    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),

    /// A sampled signal is not on a uniform grid.
    #[error("signal samples are not uniformly spaced")]
    NonUniformSpacing,

    /// A signal is too short for the requested decomposition.
    #[error("signal has {got} samples, need at least {min}")]
    TooFewSamples { got: usize, min: usize },

    /// Rank selection on a signal found no subspace above the noise floor.
    #[error("rank selection found no signal subspace")]
    NoSignalSubspace,

    /// No oscillating component was found near the expected frequency.
    #[error("no mode found near the density frequency")]
    NoSignal,

    /// Every particle received zero likelihood during a posterior update.
    #[error("posterior degenerated: all particle weights vanished")]
    DegeneratePosterior,

    /// A trace-level operation was handed an empty trace.
    #[error("trace has no points")]
    EmptyTrace,

    /// Outlier cleaning removed every point of a trace.
    #[error("all trace points were removed by outlier cleaning")]
    AllPointsRemoved,

    /// A log-log fit was handed non-positive data.
    #[error("log-log fit needs strictly positive values")]
    NonPositiveData,

    /// Too few points for the requested fit or aggregate.
    #[error("need at least {min} points, got {got}")]
    TooFewPoints { got: usize, min: usize },

    /// A configuration value failed validation.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
