//! The diagonal map between towers over nested cylinders.

use std::collections::HashMap;
use std::sync::Arc;

use crate::dsh_model::{Chain, DiagonalMap};
use crate::error::{Error, Result};

use super::returns::{factorize_returns, occurrences, FactorizationMap};
use super::substitution::Substitution;
use super::tower::{build_tower_model, TowerModel};

/// Diagonal map from the tower over `[outer]` to the tower over `[inner]`.
///
/// A target word `z` with return word `r` factored as `r_1 .. r_s` (offsets
/// `S_0 = 0, .., S_{s-1}`) lists the source points read at `z[S_j..]`, one
/// per factor.
pub fn embedding_map(f: &FactorizationMap, source: &TowerModel, target: &TowerModel) -> Result<DiagonalMap> {
    if source.base != f.outer || target.base != f.inner {
        return Err(Error::Precondition("towers do not match the factorization".into()));
    }
    if source.substitution != target.substitution {
        return Err(Error::Precondition("towers come from different substitutions".into()));
    }
    if target.horizon < source.horizon {
        return Err(Error::Horizon(format!(
            "target horizon {} is below source horizon {}",
            target.horizon, source.horizon
        )));
    }
    let mut lists = HashMap::new();
    for p in target.model.free_points() {
        let z = target.word(p);
        let n = target.model.dim(p.level);
        let offsets = f
            .offsets(&z[..n])
            .ok_or_else(|| Error::Precondition(format!("{:?} is not a known return word", &z[..n])))?;
        let visits: Vec<usize> = occurrences(&z[..n + f.outer.len()], &f.outer);
        debug_assert_eq!(&visits[..visits.len() - 1], offsets.as_slice());
        let mut list = Vec::with_capacity(offsets.len());
        for (j, &s_j) in offsets.iter().enumerate() {
            let next = offsets.get(j + 1).copied().unwrap_or(n);
            let piece = &z[s_j..next + source.horizon];
            let q = source.point_of_word(piece).ok_or_else(|| {
                Error::Horizon(format!("no source point for {piece:?} inside {z:?}; the source sample is too small"))
            })?;
            list.push(q);
        }
        lists.insert(p, list);
    }
    DiagonalMap::new(Arc::clone(&source.model), Arc::clone(&target.model), lists)
}

/// Towers over the nested bases with their embeddings. Every tower but the
/// last is sampled in full so that the next tower finds its representatives.
pub fn tower_chain(
    s: &Substitution,
    bases: &[&str],
    horizons: &[usize],
    top_cap: Option<usize>,
    scan_length: usize,
) -> Result<(Vec<TowerModel>, Chain)> {
    if bases.is_empty() || bases.len() != horizons.len() {
        return Err(Error::DimensionMismatch { expected: bases.len(), found: horizons.len() });
    }
    let last = bases.len() - 1;
    let towers = bases
        .iter()
        .zip(horizons)
        .enumerate()
        .map(|(i, (b, &h))| build_tower_model(s, b, h, if i == last { top_cap } else { None }, scan_length))
        .collect::<Result<Vec<_>>>()?;
    let mut maps = Vec::with_capacity(last);
    for i in 0..last {
        let f = factorize_returns(s, bases[i], bases[i + 1], scan_length)?;
        maps.push(embedding_map(&f, &towers[i], &towers[i + 1])?);
    }
    let chain = Chain::new(towers.iter().map(|t| Arc::clone(&t.model)).collect(), maps)?;
    Ok((towers, chain))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsh_model::norm_dist;
    use crate::dynamics::generators::{generator_f_element, generator_ug_element, WordFn};
    use crate::matrixkit::C64;

    #[test]
    fn fibonacci_two_step_lists() {
        let s = Substitution::fibonacci();
        let (towers, chain) = tower_chain(&s, &["0", "01"], &[1, 2], None, 2000).unwrap();
        let d = &chain.maps[0];
        let z = towers[1].point_of_word("01001").unwrap();
        let list = d.list_at(z).unwrap();
        let words: Vec<&str> = list.iter().map(|&q| towers[0].word(q)).collect();
        assert_eq!(words, vec!["010", "00"]);
        let single = towers[1].point_of_word("0101").unwrap();
        assert_eq!(d.list_at(single).unwrap().len(), 1);
    }

    #[test]
    fn generators_commute_with_embedding() {
        let s = Substitution::fibonacci();
        let (towers, chain) = tower_chain(&s, &["0", "01", "010"], &[2, 3, 3], None, 4000).unwrap();
        let f = WordFn::new(2, |w| C64::new(w.len() as f64 + if w == "01" { 0.5 } else { -0.25 }, 0.0));
        let g = WordFn::new(1, |w| if w == "1" { C64::new(2.0, 1.0) } else { C64::new(0.0, 0.0) });
        for i in 0..2 {
            let d = &chain.maps[i];
            let lhs = d.apply(&generator_f_element(&f, &towers[i]).unwrap()).unwrap();
            assert_eq!(norm_dist(&lhs, &generator_f_element(&f, &towers[i + 1]).unwrap()).unwrap(), 0.0);
            let lhs = d.apply(&generator_ug_element(&g, &towers[i]).unwrap()).unwrap();
            assert_eq!(norm_dist(&lhs, &generator_ug_element(&g, &towers[i + 1]).unwrap()).unwrap(), 0.0);
        }
    }
}
