//! Fuzzy de Sitter geometries from coherent-state quantization.
//!
//! The crate builds truncated operator matrices for the ambient coordinates of
//! the 2d and 4d de Sitter hyperboloids, checks their algebraic identities, and
//! cross-checks them against a quadrature implementation of the
//! Berezin–Toeplitz map `f ↦ ∫ f(x) |x⟩⟨x| N(x) μ(dx)`.
//!
//! - [`numerics`]: dense complex matrices and quadrature grids.
//! - [`cs`]: generic coherent-state quantization engine.
//! - [`ds2`]: the 2d hyperboloid with its Gaussian-weighted Fourier basis.
//! - [`ds4`]: the ℝ×S³ vector coherent-state engine with pluggable eigenbasis.
//! - [`expr`]: parser and evaluator for classical observables.

pub mod cs;
pub mod ds2;
pub mod ds4;
pub mod expr;
pub mod numerics;

pub use num_complex::Complex64;
