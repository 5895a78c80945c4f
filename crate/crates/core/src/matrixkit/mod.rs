//! Dense complex matrices, permutation matrices, zero-pattern predicates
//! (zero cross, block point, diagonal radius) and singular-value norms.

mod matrix;
mod perm;
mod predicates;
pub mod random;

pub use matrix::{ComplexMatrix, C64};
pub use perm::{perm_matrix, Permutation};
pub use predicates::{
    diagonal_radius, has_block_point, has_zero_cross, is_strictly_lower_triangular, min_singular_value, op_norm,
    singular_values, svd, zero_cross_positions,
};

/// Tolerance for structural predicates on directly constructed matrices.
pub const DEFAULT_ATOL: f64 = 1e-12;

/// Tolerance for identities that multiply long products of unitary factors.
pub const PATH_ATOL: f64 = 1e-9;
