//! Growing a chain of towers over fixed-point prefixes until it is deep
//! enough for the pipeline.

use std::collections::BTreeSet;

use crate::dsh_model::{check_simplicity_condition, Chain, Element, PointRef};
use crate::dynamics::{fixed_point_prefix, shortest_prefix_with_min_return, tower_chain, Substitution, TowerModel};
use crate::error::{Error, Result};

use super::zero::{find_singular_point, make_zero_cross, SINGULAR_TOL};

/// Parameters of [`plan_cylinder_chain`].
#[derive(Clone, Debug)]
pub struct CylinderChainConfig {
    /// Source base; must be a prefix of the fixed point.
    pub base: String,
    pub horizon: usize,
    pub scan_length: usize,
    /// Points kept per level of the top tower.
    pub top_cap: Option<usize>,
    /// Most intermediate towers tried while looking for the simplicity witness.
    pub max_depth: usize,
    /// Crosses per block start; `R + M + 3` when unset.
    pub n: Option<usize>,
}

impl Default for CylinderChainConfig {
    fn default() -> Self {
        Self { base: "0".into(), horizon: 1, scan_length: 10_000, top_cap: Some(3), max_depth: 6, n: None }
    }
}

/// Towers over nested prefixes, with the chain and the index of the model
/// that first satisfies the simplicity condition for the singular set.
#[derive(Clone, Debug)]
pub struct CylinderChain {
    pub towers: Vec<TowerModel>,
    pub chain: Chain,
    pub simple_index: Option<usize>,
}

fn check_base(s: &Substitution, base: &str, scan_length: usize) -> Result<()> {
    if base.is_empty() || !fixed_point_prefix(s, scan_length.max(base.len())).starts_with(base) {
        return Err(Error::Precondition(format!("base {base:?} is not a prefix of the fixed point")));
    }
    Ok(())
}

/// The source tower alone.
pub fn source_tower(s: &Substitution, cfg: &CylinderChainConfig) -> Result<TowerModel> {
    check_base(s, &cfg.base, cfg.scan_length)?;
    let (mut towers, _) = tower_chain(s, &[cfg.base.as_str()], &[cfg.horizon], None, cfg.scan_length)?;
    Ok(towers.remove(0))
}

/// Extends the source tower by prefixes one symbol longer at a time until
/// the singular set of `a` is met by every eigenvalue list of some later
/// model, then appends the shortest prefix whose first return exceeds `N·M`.
///
/// `a` must live on the source tower. An invertible `a` yields the source
/// tower alone.
pub fn plan_cylinder_chain(s: &Substitution, cfg: &CylinderChainConfig, a: &Element, epsilon: f64) -> Result<CylinderChain> {
    check_base(s, &cfg.base, cfg.scan_length)?;
    let single = |bases: &[String], cap: Option<usize>| {
        let refs: Vec<&str> = bases.iter().map(String::as_str).collect();
        let horizons: Vec<usize> = bases.iter().map(|b| b.len().max(cfg.horizon)).collect();
        tower_chain(s, &refs, &horizons, cap, cfg.scan_length)
    };
    let mut bases = vec![cfg.base.clone()];
    let (towers, chain) = single(&bases, None)?;
    if **a.model() != *towers[0].model {
        return Err(Error::Precondition("element does not live on the source tower".into()));
    }
    if find_singular_point(a, SINGULAR_TOL).is_none() {
        return Ok(CylinderChain { towers, chain, simple_index: None });
    }
    let u: BTreeSet<PointRef> = make_zero_cross(a, epsilon / 4.0)?.points;
    let text = fixed_point_prefix(s, cfg.scan_length);
    let mut found = None;
    for depth in 1..=cfg.max_depth {
        let len = cfg.base.len() + depth;
        if len > text.len() {
            break;
        }
        bases.push(text[..len].to_string());
        let (towers, chain) = single(&bases, None)?;
        if let Some(j) = check_simplicity_condition(&chain, 0, &u)? {
            found = Some((j, towers));
            break;
        }
    }
    let Some((j, towers)) = found else {
        return Err(Error::SimplicityFails { from: 0 });
    };
    let r = towers[0].model.max_dim();
    let m = 2 * towers[j].model.max_dim();
    let n = cfg.n.unwrap_or(r + m + 3);
    let need = n * m + 1;
    let top = shortest_prefix_with_min_return(s, need, cfg.scan_length)?;
    if top.len() > bases.last().expect("nonempty").len() {
        bases.push(top);
    }
    let (towers, chain) = single(&bases, cfg.top_cap)?;
    Ok(CylinderChain { towers, chain, simple_index: Some(j) })
}
