//! Finite spectrum models: levels of free and glued points, elements living
//! on them, diagonal maps, and the constructions used by the reduction.

mod element;
mod indicator;
mod maps;
mod model;
pub mod random;
mod restrict;

pub use element::{
    eval_element, is_invertible, norm_dist, soft_threshold, soft_threshold_scalar, witness_no_block_point, Element,
};
pub use indicator::build_indicator;
pub use maps::{apply_diagonal_map, check_simplicity_condition, compose_diagonal_maps, Chain, DiagonalMap};
pub use model::{
    block_starts, normalize_model, validate_model, BlockStartTable, FiniteDshModel, Level, Point, PointRef, ValidationReport,
};
pub use restrict::{restrict_element, restrict_model, Restriction};
