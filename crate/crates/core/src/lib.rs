//! Simulation and benchmarking of on-site density readout for fermionic
//! dynamics on qubit registers.
//!
//! A second-quantized Hamiltonian on `M` modes is mapped to an `M`-qubit
//! operator ([`fermion`]), the register is evolved with a first-order
//! product formula ([`statevector`]), and the instantaneous occupation
//! `n_j(t) = ⟨a_j† a_j⟩(t)` is recovered from simulated measurement records
//! ([`measurement`]) by three routes ([`estimators`]):
//!
//! * **direct** — read the site's qubit in the computational basis and
//!   average;
//! * **harminv** — drive an ancilla-free phase probe over a grid of angles
//!   and extract the density from the signal's harmonic content by the
//!   matrix-pencil method;
//! * **bayes** — adaptively choose probe angles and update a sequential
//!   Monte Carlo posterior over the density.
//!
//! The [`benchmark`] module wires the three routes into a common harness
//! with shared seeding, outlier cleaning, and budget sweeps; [`fock`]
//! provides small dense reference operators used to cross-check the
//! encoding.

pub mod benchmark;
pub mod error;
pub mod estimators;
pub mod fermion;
pub mod fock;
pub mod measurement;
pub mod pauli;
pub mod seeding;
pub mod statevector;

pub use error::{Error, Result};
