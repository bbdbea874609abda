//! Dense complex matrix algebra and quadrature grids.

mod matrix;
mod quadrature;

use thiserror::Error;

pub use matrix::ComplexMatrix;
pub use quadrature::{
    gauss_legendre, periodic_trapezoid, s3_product_grid, tau_window_grid, tau_window_grid_span,
    tau_window_half_width, Density, Domain, ProductGrid, QuadratureGrid1D,
    DEFAULT_NODES_PER_UNIT, TAU_TAIL_WIDTH,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("invalid interval [{a}, {b}]: need a < b")]
    InvalidInterval { a: f64, b: f64 },
    #[error("node count must be at least 1")]
    InvalidCount,
    #[error("{0}")]
    InvalidParameter(String),
    #[error("dimension mismatch: (dim {}, offset {}) vs (dim {}, offset {})", left.0, left.1, right.0, right.1)]
    DimMismatch {
        left: (usize, i64),
        right: (usize, i64),
    },
    #[error("margin {margin} leaves no interior block in a {dim}x{dim} matrix")]
    MarginTooLarge { margin: usize, dim: usize },
    #[error("matrix dimension must be at least 1")]
    EmptyMatrix,
    #[error("expected {} entries for dim {dim}, found {found}", dim * dim)]
    EntryCount { dim: usize, found: usize },
}
