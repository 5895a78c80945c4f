//! Seeded random models for property trials.

use rand::seq::IndexedRandom;
use rand::Rng;

use super::model::{FiniteDshModel, Level, Point, PointRef};

#[derive(Clone, Debug, PartialEq)]
pub struct RandomModelConfig {
    pub max_levels: usize,
    pub max_points_per_level: usize,
    pub min_base_dim: usize,
    pub max_base_dim: usize,
    pub max_dim: usize,
    pub glue_probability: f64,
}

impl Default for RandomModelConfig {
    fn default() -> Self {
        Self { max_levels: 4, max_points_per_level: 6, min_base_dim: 3, max_base_dim: 5, max_dim: 24, glue_probability: 0.5 }
    }
}

/// A valid, normalized model with nondecreasing dimensions. Each later level
/// gets a dimension reachable as a sum of dimensions of earlier levels that
/// have free points, and each glued point a random list realizing that sum.
pub fn random_model<R: Rng + ?Sized>(rng: &mut R, cfg: &RandomModelConfig) -> FiniteDshModel {
    let n1 = rng.random_range(cfg.min_base_dim..=cfg.max_base_dim);
    let count = rng.random_range(1..=cfg.max_points_per_level);
    let mut levels = vec![Level { dim: n1, points: (0..count).map(|i| Point::free(format!("p{i}"))).collect() }];
    let level_count = rng.random_range(1..=cfg.max_levels);
    while levels.len() < level_count {
        let free: Vec<PointRef> = levels
            .iter()
            .enumerate()
            .flat_map(|(l, lv)| lv.points.iter().enumerate().filter(|(_, p)| p.is_free()).map(move |(i, _)| PointRef::new(l, i)))
            .collect();
        let mut dims: Vec<usize> = free.iter().map(|p| levels[p.level].dim).collect();
        dims.sort_unstable();
        dims.dedup();
        let mut reach = vec![false; cfg.max_dim + 1];
        reach[0] = true;
        for s in 1..=cfg.max_dim {
            reach[s] = dims.iter().any(|&d| d <= s && reach[s - d]);
        }
        let prev = levels.last().expect("nonempty").dim;
        let candidates: Vec<usize> = (prev.max(1)..=cfg.max_dim).filter(|&s| reach[s]).collect();
        let Some(&dim) = candidates.choose(rng) else { break };
        let count = rng.random_range(1..=cfg.max_points_per_level);
        let points = (0..count)
            .map(|i| {
                let id = format!("p{i}");
                if !rng.random_bool(cfg.glue_probability) {
                    return Point::free(id);
                }
                let mut list = Vec::new();
                let mut remaining = dim;
                while remaining > 0 {
                    let parts: Vec<usize> = dims.iter().copied().filter(|&d| d <= remaining && reach[remaining - d]).collect();
                    let d = *parts.choose(rng).expect("remaining sum is reachable");
                    let sources: Vec<PointRef> = free.iter().copied().filter(|p| levels[p.level].dim == d).collect();
                    list.push(*sources.choose(rng).expect("dimension comes from a free point"));
                    remaining -= d;
                }
                Point::glued(id, list)
            })
            .collect();
        levels.push(Level { dim, points });
    }
    FiniteDshModel { levels }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsh_model::validate_model;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_models_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let cfg = RandomModelConfig::default();
        let mut glued = 0;
        for _ in 0..200 {
            let m = random_model(&mut rng, &cfg);
            let report = validate_model(&m);
            assert!(report.is_valid(), "{:?}", report.violations);
            assert!(m.level_count() <= 4 && m.max_dim() <= 24);
            glued += m.glued_points().len();
        }
        assert!(glued > 0);
    }
}
