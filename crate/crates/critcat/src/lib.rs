//! Simulation and spectral analysis of dissipatively stabilized Schrödinger-cat
//! qubits with sizeable Kerr nonlinearity.
//!
//! The crate builds parity-symmetric Lindblad generators on truncated Fock
//! spaces, eigendecomposes their Z₂ symmetry blocks, extracts logical error
//! rates near the first-order dissipative phase transition, and simulates
//! recovery and gate protocols. A small exact-rational engine reproduces the
//! rotating-wave bookkeeping that links the microscopic circuit model to the
//! effective cat-qubit parameters.
//!
//! Modules map onto the physics pipeline:
//!
//! * [`fock`] — truncated bosonic operators, coherent and cat states;
//! * [`model`] — parameter containers and closed-form coupling relations;
//! * [`liouv`] — superoperators, parity-block decomposition, matrix-free
//!   Lindblad generators (single- and two-mode);
//! * [`spectral`] — per-block eigendecomposition, steady states, coherences,
//!   gaps, conserved quantities, noiseless-subsystem diagnostics;
//! * [`rates`] — phase-flip rates, optimal detuning, critical-point search,
//!   exponential-suppression fits;
//! * [`dynamics`] — time evolution, logical embedding/extraction, fidelity,
//!   recovery and gate protocols, adiabatic-elimination validation;
//! * [`rwa`] — normally ordered expansion of cos(φ̂) powers with exact
//!   resonance filtering;
//! * [`sweep`], [`report`] — grid dispatch and CSV/JSON emission.

extern crate blas_src;

pub mod dynamics;
pub mod fock;
pub mod linalg;
pub mod liouv;
pub mod model;
pub mod rates;
pub mod report;
pub mod rwa;
pub mod spectral;
pub mod sweep;

pub use num_complex::Complex64;

/// Crate version string recorded in output metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
