//! Paths of unitaries built from transposition homotopies.
//!
//! Positions are 1-based throughout. Products are stored as ordered factor
//! lists and applied by 2×2 row/column updates.

mod condense;
mod eta;
mod gather;
mod theta;
mod transposition;
mod vn;

pub use condense::{condense_path, ramp, CondensePath};
pub use eta::{eta_pairs, eta_path, eta_permutation, eta_product, gamma_permutation};
pub use gather::{gather_multi, gather_multi_product, gather_once, gather_once_product, permute_product, window_product};
pub use theta::ThetaVector;
pub use transposition::{profile, u_transposition, Factor, FactorProduct, TranspositionPathSpec};
pub use vn::{triangulate_check, v_n, v_n_split, v_n_unitary, VnUnitary};
