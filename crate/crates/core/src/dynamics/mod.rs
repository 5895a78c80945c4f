//! Tower models from substitution subshifts and the diagonal maps between
//! towers over nested cylinders.

mod embed;
mod generators;
mod returns;
mod substitution;
mod tower;

pub use embed::{embedding_map, tower_chain};
pub use generators::{eval_generator_f, eval_generator_ug, generator_f_element, generator_ug_element, WordFn};
pub use returns::{
    factorize_returns, occurrences, return_times, return_words, shortest_prefix_with_min_return, FactorizationMap,
};
pub use substitution::{fixed_point_prefix, Substitution};
pub use tower::{build_tower_model, TowerModel};
