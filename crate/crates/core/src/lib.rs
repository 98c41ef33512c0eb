//! Two-spinor geometry toolkit.
//!
//! Minkowski space is built as the Hermitian part of `U ⊗ Ū` for a complex
//! 2-dimensional spinor space `U`; Dirac spinors live in `W = U ⊕ Ū*`. On top
//! of that algebra the crate provides the spinor-connection calculus
//! (induced dilaton/electromagnetic/Lorentz pieces, curvature, torsion) and
//! the Fermi transport of vectors, 2-spinors and 4-spinors along timelike
//! worldlines, including momentum-dependent Dirac frames for free states.
//!
//! Units: `ħ = c = 1`, lengths are plain `f64`.
//!
//! Frame conventions used throughout:
//! - chart points and chart vectors are [`Point`] = `Vector4<f64>` with index `a`;
//! - orthonormal frame components (index `λ`) are relative to the Pauli frame
//!   `τ_λ` carried to spacetime by the background tetrad;
//! - the Minkowski metric is `η = diag(1, -1, -1, -1)`;
//! - covariant derivatives follow `∇_a s = ∂_a s - Λ_a s`.

pub mod backgrounds;
pub mod cli;
pub mod connection;
pub mod dirac_algebra;
mod error;
pub mod fermi;
pub mod free_states;
pub mod ode;
pub mod spinor_algebra;

pub use error::{Error, Result};

/// Complex scalar used everywhere.
pub type C64 = num_complex::Complex64;

/// Chart point or chart-vector components `x^a`.
pub type Point = nalgebra::Vector4<f64>;
