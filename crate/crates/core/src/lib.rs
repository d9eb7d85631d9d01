//! Desk-scale simulator and analysis toolkit for single-photon logic on an
//! integrated network of directional couplers.
//!
//! The crate is organised as a pipeline:
//!
//! * [`optics`] — coupler networks, compiled mode unitaries, and the
//!   post-selected two-qubit operator of the six-mode CNOT circuit.
//! * [`temporal`] — wavepackets, two-photon detection-time densities and
//!   their integrals (coincidence curves, interference visibility), plus a
//!   permanent-based probability oracle.
//! * [`source`] — Monte-Carlo photon source (intermittent, slotted), the
//!   delay-line pair router, and the detector model producing timestamped
//!   click logs.
//! * [`analysis`] — correlation histograms, windowed coincidence counting,
//!   background handling, maximum-likelihood normalisation, similarity and
//!   entanglement-witness estimators.
//! * [`experiments`] — end-to-end experiment configurations, presets for the
//!   six standard figures, and report generation.
//!
//! Everything downstream of a seed is deterministic: the same config and
//! seed produce byte-identical event logs and reports.

pub mod analysis;
pub mod eventlog;
pub mod experiments;
pub mod optics;
pub mod rng;
pub mod source;
pub mod temporal;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("network topology error: {0}")]
    Topology(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("argument error: {0}")]
    Argument(String),
    #[error("basis mismatch: {0}")]
    BasisMismatch(String),
    #[error("empty event log")]
    EmptyLog,
    #[error("event log parse error: {0}")]
    Parse(String),
    #[error("invalid config: {0}")]
    Config(String),
    #[error("matrix is not unitary (deviation {0:.3e})")]
    NotUnitary(f64),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("config parse error: {0}")]
    TomlParse(String),
    #[error("serialisation error: {0}")]
    Serialize(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
    pub fn argument(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }
}
