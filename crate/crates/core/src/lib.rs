//! Exact dynamics of a generalized Jaynes-Cummings model whose atom-field
//! coupling follows a hyperbolic-secant pulse, `λ(t) = λ₀ sech(t / 2τ)`.
//!
//! The Hamiltonian splits into two-dimensional invariant subspaces labelled by
//! the conserved excitation number `Δ`. Inside each subspace the
//! interaction-picture propagator is written in Wei-Norman form,
//!
//! ```text
//! Ũ = | H*  F* |
//!     | -F  H  |
//! ```
//!
//! and `H`, `F` are obtained in closed form from Gauss hypergeometric
//! functions of the logistic time variable `z = e^{t/τ} / (1 + e^{t/τ})`.
//!
//! Modules:
//! - [`algebra`]: model families, subspace decomposition, `Ω(Δ)` and `δ̄(Δ)`.
//! - [`specfun`]: complex log-gamma and `₂F₁` kernels.
//! - [`propagator`]: the sech-pulse solution and the zero-detuning closed form.
//! - [`oracle`]: adaptive Runge-Kutta integration of the same dynamics.
//! - [`states`]: quantum states, time evolution and atomic inversion.
//! - [`cli`]: run configuration, presets and CSV output behind the binary.

pub mod algebra;
pub mod cli;
pub mod error;
pub mod oracle;
pub mod propagator;
pub mod specfun;
pub mod states;

pub use error::{Error, Result};

/// Complex double used throughout the crate.
pub type C64 = num_complex::Complex64;
