//! Diagonal homomorphisms between models and chains of them.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::matrixkit::ComplexMatrix;

use super::element::Element;
use super::model::{FiniteDshModel, PointRef};

/// A diagonal map: each target free point carries an ordered list of source
/// points whose values are stacked along the diagonal.
///
/// Lists are stored expanded to source free points.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalMap {
    source: Arc<FiniteDshModel>,
    target: Arc<FiniteDshModel>,
    lists: HashMap<PointRef, Vec<PointRef>>,
}

impl DiagonalMap {
    /// `lists` must name every target free point; source refs may be glued
    /// and are expanded to free points.
    pub fn new(
        source: Arc<FiniteDshModel>,
        target: Arc<FiniteDshModel>,
        lists: HashMap<PointRef, Vec<PointRef>>,
    ) -> Result<Self> {
        let mut flat = HashMap::new();
        for p in target.free_points() {
            let list = lists
                .get(&p)
                .ok_or_else(|| Error::DanglingReference(format!("no eigenvalue list for target {}", target.key(p).unwrap())))?;
            let mut expanded = Vec::new();
            for &q in list {
                expanded.extend(source.flatten(q)?);
            }
            let total: usize = expanded.iter().map(|q| source.dim(q.level)).sum();
            if total != target.dim(p.level) {
                return Err(Error::DimensionMismatch { expected: target.dim(p.level), found: total });
            }
            flat.insert(p, expanded);
        }
        if let Some(extra) = lists.keys().find(|p| !target.is_free(**p).unwrap_or(false)) {
            return Err(Error::Precondition(format!("eigenvalue list given for non-free target {}:{}", extra.level, extra.index)));
        }
        Ok(Self { source, target, lists: flat })
    }

    pub fn source(&self) -> &Arc<FiniteDshModel> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FiniteDshModel> {
        &self.target
    }

    /// Eigenvalue list at any target point; glued points concatenate their components' lists.
    pub fn list_at(&self, p: PointRef) -> Result<Vec<PointRef>> {
        let mut out = Vec::new();
        for q in self.target.flatten(p)? {
            out.extend_from_slice(&self.lists[&q]);
        }
        Ok(out)
    }

    pub fn apply(&self, e: &Element) -> Result<Element> {
        if !(Arc::ptr_eq(e.model(), &self.source) || **e.model() == *self.source) {
            return Err(Error::Precondition("element does not live on the source model".into()));
        }
        Element::try_from_fn(&self.target, |p, _| {
            let blocks = self.lists[&p].iter().map(|&q| e.free_value(q).cloned()).collect::<Result<Vec<_>>>()?;
            Ok(ComplexMatrix::block_diag(&blocks))
        })
    }

    /// `self ∘ inner`: lists of `inner` substituted into the lists of `self`.
    pub fn compose(&self, inner: &DiagonalMap) -> Result<DiagonalMap> {
        if !(Arc::ptr_eq(&inner.target, &self.source) || *inner.target == *self.source) {
            return Err(Error::Precondition("maps are not composable".into()));
        }
        let lists = self
            .lists
            .iter()
            .map(|(&p, list)| (p, list.iter().flat_map(|q| inner.lists[q].iter().copied()).collect()))
            .collect();
        Ok(DiagonalMap { source: Arc::clone(&inner.source), target: Arc::clone(&self.target), lists })
    }

    /// Map with every target free point listing the single source point of the same key.
    pub fn identity(model: &Arc<FiniteDshModel>) -> Self {
        let lists = model.free_points().into_iter().map(|p| (p, vec![p])).collect();
        Self { source: Arc::clone(model), target: Arc::clone(model), lists }
    }
}

pub fn apply_diagonal_map(d: &DiagonalMap, e: &Element) -> Result<Element> {
    d.apply(e)
}

/// `d2 ∘ d1`.
pub fn compose_diagonal_maps(d2: &DiagonalMap, d1: &DiagonalMap) -> Result<DiagonalMap> {
    d2.compose(d1)
}

/// Models `A_0 → A_1 → ..` joined by diagonal maps, `maps[i]: models[i] → models[i+1]`.
#[derive(Clone, Debug)]
pub struct Chain {
    pub models: Vec<Arc<FiniteDshModel>>,
    pub maps: Vec<DiagonalMap>,
}

impl Chain {
    pub fn new(models: Vec<Arc<FiniteDshModel>>, maps: Vec<DiagonalMap>) -> Result<Self> {
        if models.len() != maps.len() + 1 {
            return Err(Error::DimensionMismatch { expected: models.len().saturating_sub(1), found: maps.len() });
        }
        for (i, d) in maps.iter().enumerate() {
            if *d.source != *models[i] || *d.target != *models[i + 1] {
                return Err(Error::Precondition(format!("map {i} does not join models {i} and {}", i + 1)));
            }
        }
        Ok(Self { models, maps })
    }

    pub fn len(&self) -> usize {
        self.models.len()
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
    }

    /// The composite map from model `i` to model `j >= i`.
    pub fn composed(&self, i: usize, j: usize) -> Result<DiagonalMap> {
        if i > j || j >= self.len() {
            return Err(Error::IndexOutOfRange { index: j, n: self.len() });
        }
        let mut acc = DiagonalMap::identity(&self.models[i]);
        for d in &self.maps[i..j] {
            acc = d.compose(&acc)?;
        }
        Ok(acc)
    }
}

/// Least `j > i` such that every free point of model `j` has an eigenvalue
/// list (under the composite map from `i`) meeting `u`; `None` if the chain
/// runs out first.
pub fn check_simplicity_condition(chain: &Chain, i: usize, u: &BTreeSet<PointRef>) -> Result<Option<usize>> {
    if u.is_empty() {
        return Err(Error::Precondition("the point set must be nonempty".into()));
    }
    if i >= chain.len() {
        return Err(Error::IndexOutOfRange { index: i, n: chain.len() });
    }
    if let Some(p) = u.iter().find(|p| !chain.models[i].is_free(**p).unwrap_or(false)) {
        return Err(Error::Precondition(format!("{}:{} is not a free point of model {i}", p.level, p.index)));
    }
    let mut acc = DiagonalMap::identity(&chain.models[i]);
    for j in i + 1..chain.len() {
        acc = chain.maps[j - 1].compose(&acc)?;
        let meets = chain.models[j]
            .free_points()
            .into_iter()
            .all(|p| acc.lists[&p].iter().any(|q| u.contains(q)));
        if meets {
            return Ok(Some(j));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsh_model::model::{Level, Point};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn small() -> Arc<FiniteDshModel> {
        Arc::new(
            FiniteDshModel::checked(vec![
                Level { dim: 1, points: vec![Point::free("a"), Point::free("b")] },
                Level { dim: 2, points: vec![Point::free("c"), Point::glued("g", vec![PointRef::new(0, 0), PointRef::new(0, 1)])] },
            ])
            .unwrap(),
        )
    }

    fn big() -> Arc<FiniteDshModel> {
        Arc::new(
            FiniteDshModel::checked(vec![
                Level { dim: 3, points: vec![Point::free("x")] },
                Level { dim: 4, points: vec![Point::free("y")] },
            ])
            .unwrap(),
        )
    }

    fn embed() -> DiagonalMap {
        let (s, t) = (small(), big());
        let lists = HashMap::from([
            (PointRef::new(0, 0), vec![PointRef::new(0, 0), PointRef::new(1, 1)]),
            (PointRef::new(1, 0), vec![PointRef::new(1, 0), PointRef::new(0, 1), PointRef::new(0, 0)]),
        ]);
        DiagonalMap::new(s, t, lists).unwrap()
    }

    #[test]
    fn unital_and_multiplicative() {
        let d = embed();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let one = Element::identity(d.source());
        assert_eq!(d.apply(&one).unwrap(), Element::identity(d.target()));
        let (a, b) = (Element::random(d.source(), &mut rng), Element::random(d.source(), &mut rng));
        let lhs = d.apply(&a.mul(&b).unwrap()).unwrap();
        let rhs = d.apply(&a).unwrap().mul(&d.apply(&b).unwrap()).unwrap();
        assert!(crate::dsh_model::norm_dist(&lhs, &rhs).unwrap() < 1e-12);
    }

    #[test]
    fn lists_expand_glued_sources() {
        let d = embed();
        assert_eq!(d.list_at(PointRef::new(0, 0)).unwrap(), vec![PointRef::new(0, 0), PointRef::new(0, 0), PointRef::new(0, 1)]);
    }

    #[test]
    fn rejects_wrong_dimension_sum() {
        let lists = HashMap::from([
            (PointRef::new(0, 0), vec![PointRef::new(0, 0)]),
            (PointRef::new(1, 0), vec![PointRef::new(1, 0), PointRef::new(1, 0)]),
        ]);
        assert!(matches!(DiagonalMap::new(small(), big(), lists), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn identity_composition_keeps_lists() {
        let d = embed();
        let left = DiagonalMap::identity(d.target()).compose(&d).unwrap();
        let right = d.compose(&DiagonalMap::identity(d.source())).unwrap();
        assert_eq!(left, d);
        assert_eq!(right, d);
    }

    #[test]
    fn simplicity_on_identity_chain_fails_for_proper_subset() {
        let m = small();
        let chain = Chain::new(vec![m.clone(), m.clone(), m.clone()], vec![DiagonalMap::identity(&m), DiagonalMap::identity(&m)]).unwrap();
        let u = BTreeSet::from([PointRef::new(0, 0)]);
        assert_eq!(check_simplicity_condition(&chain, 0, &u).unwrap(), None);
        let all: BTreeSet<_> = m.free_points().into_iter().collect();
        assert_eq!(check_simplicity_condition(&chain, 0, &all).unwrap(), Some(1));
    }
}
