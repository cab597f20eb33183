//! Rate, fidelity and secret-key analysis of quantum repeaters built from
//! single atoms in optical cavities.
//!
//! The crate is organised bottom-up:
//!
//! * [`states`] — exact two-qubit density-matrix algebra (Bell projections,
//!   depolarizing gate noise, entanglement swapping, entanglement pumping).
//! * [`generation`] — heralded entanglement generation with the single- and
//!   two-photon detection schemes, including fiber loss and dark counts.
//! * [`gates`] — effective CNOT/CZ gate models.
//! * [`combinatorics`] — expected waiting times `Z_{l;m}(p)` for parallel
//!   attempts, with a Monte Carlo oracle.
//! * [`rate`] — distribution-time estimates for parallel and sequential
//!   repeaters, and fidelity propagation through purification and swapping.
//! * [`secret`] — six-state secret-key fraction and per-station normalization.
//! * [`optimize`] — grid search over architectures with an inner simplex
//!   search over the generation knobs.
//! * [`chain`] — event-driven Monte Carlo simulation of a repeater chain,
//!   used to validate the analytic time estimates.

pub mod chain;
pub mod combinatorics;
pub mod config;
mod error;
pub mod gates;
pub mod generation;
pub mod optimize;
pub mod rate;
mod register;
pub mod secret;
pub mod simplex;
pub mod states;

pub use config::{
    Architecture, Emitter, GateKind, LinkParams, PhysicalParams, PurificationVariant,
    RepeaterConfig, Scheme,
};
pub use error::{Error, Result};
pub use gates::GateModel;
pub use generation::{CoefficientForm, GenerationAttempt};
pub use rate::TimingBreakdown;
pub use secret::RateReport;
pub use states::{BellDecomposition, BellState, TwoQubitState};
