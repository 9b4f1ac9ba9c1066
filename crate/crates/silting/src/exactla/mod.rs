//! Exact sparse linear algebra over the rationals and prime fields:
//! elimination, kernels, cohomology of complexes, and contraction data.

mod complex;
mod matrix;
mod scalar;

pub use complex::{
    cohomology_dims, cohomology_with_contraction, invert, preimage, CohomologyData, Complex,
    Contraction,
};
pub use matrix::{
    column_basis_indices, kernel_basis, rank, rref, solve, solve_matrix, Rref, SparseMatrix,
    SparseVec, SpanBuilder,
};
pub use scalar::{Field, Scalar};
