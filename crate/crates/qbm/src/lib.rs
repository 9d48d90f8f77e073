//! Exact-diagonalization training of classical and quantum Boltzmann machines.
//!
//! A quantum Boltzmann machine models data with the Gibbs state
//! `rho = exp(-H) / Tr[exp(-H)]` of a transverse-field Ising Hamiltonian
//!
//! ```text
//! H = - Σ_a Γ_a σˣ_a - Σ_a b_a σᶻ_a - Σ_{a<b} w_ab σᶻ_a σᶻ_b
//! ```
//!
//! over visible and hidden qubits. At `Γ = 0` this reduces to the familiar
//! classical Boltzmann machine. Everything in this crate works with exact
//! dense linear algebra on the full `2^n`-dimensional space, which keeps all
//! probabilities, losses and gradients free of sampling noise and makes
//! desk-scale experiments (n ≤ ~14 qubits) exactly reproducible.
//!
//! The crate is organized around five concerns:
//!
//! - [`operator`]: dense real-symmetric operator algebra — Pauli tensor
//!   construction, eigendecomposition, Gibbs operators, projectors and the
//!   Fréchet derivative of the matrix exponential.
//! - [`model`]: transverse-field Ising parameterization, Hamiltonian
//!   assembly, clamping, Gibbs expectations and visible-state distributions.
//! - [`training`]: exact and bound-based negative log-likelihood losses,
//!   their gradients, KL divergence, and gradient-descent / BFGS optimizers.
//! - [`data`]: reproducible Bernoulli-mixture training distributions.
//! - [`annealer`]: mapping of annealer schedule parameters to dimensionless
//!   model parameters.
//!
//! The `book/` directory of the repository contains a guide with worked
//! examples; its code snippets are compiled as doc-tests of this crate.

pub mod annealer;
pub mod basis;
pub mod data;
pub mod error;
pub mod model;
pub mod operator;
pub mod rng;
pub mod training;

mod engine;

#[cfg(doctest)]
mod book;

pub use error::{Error, Result};

/// Default ceiling on the qubit count of dense operator constructions.
///
/// A `2^14`-dimensional eigendecomposition is the practical desk-scale limit;
/// [`model::ModelParameters::with_size_guard`] raises or lowers the ceiling
/// for a specific model.
pub const DEFAULT_SIZE_GUARD: usize = 14;
