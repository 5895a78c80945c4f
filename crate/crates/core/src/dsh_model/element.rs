use std::collections::BTreeMap;
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::matrixkit::random::random_matrix;
use crate::matrixkit::{min_singular_value, op_norm, ComplexMatrix, C64};

use super::model::{block_starts, FiniteDshModel, PointRef};

/// An algebra element: one matrix per free point. Values at glued points
/// are assembled on demand from their gluing lists.
#[derive(Clone, Debug)]
pub struct Element {
    model: Arc<FiniteDshModel>,
    values: Vec<Vec<Option<ComplexMatrix>>>,
}

impl PartialEq for Element {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.model, &other.model) || self.model == other.model) && self.values == other.values
    }
}

impl Element {
    /// Element with value `f(p, n)` at every free point `p` of dimension `n`.
    pub fn from_fn(model: &Arc<FiniteDshModel>, mut f: impl FnMut(PointRef, usize) -> ComplexMatrix) -> Result<Self> {
        let mut values: Vec<Vec<Option<ComplexMatrix>>> =
            model.levels.iter().map(|l| vec![None; l.points.len()]).collect();
        for p in model.free_points() {
            let n = model.dim(p.level);
            let v = f(p, n);
            if v.dim() != n {
                return Err(Error::DimensionMismatch { expected: n, found: v.dim() });
            }
            values[p.level][p.index] = Some(v);
        }
        Ok(Self { model: Arc::clone(model), values })
    }

    pub fn try_from_fn(
        model: &Arc<FiniteDshModel>,
        mut f: impl FnMut(PointRef, usize) -> Result<ComplexMatrix>,
    ) -> Result<Self> {
        let mut err = None;
        let e = Self::from_fn(model, |p, n| match f(p, n) {
            Ok(v) => v,
            Err(e) => {
                err.get_or_insert(e);
                ComplexMatrix::zeros(n)
            }
        })?;
        match err {
            Some(e) => Err(e),
            None => Ok(e),
        }
    }

    pub fn identity(model: &Arc<FiniteDshModel>) -> Self {
        Self::from_fn(model, |_, n| ComplexMatrix::identity(n)).expect("dimensions match")
    }

    pub fn zeros(model: &Arc<FiniteDshModel>) -> Self {
        Self::from_fn(model, |_, n| ComplexMatrix::zeros(n)).expect("dimensions match")
    }

    pub fn random<R: Rng + ?Sized>(model: &Arc<FiniteDshModel>, rng: &mut R) -> Self {
        Self::from_fn(model, |_, n| random_matrix(rng, n)).expect("dimensions match")
    }

    pub fn model(&self) -> &Arc<FiniteDshModel> {
        &self.model
    }

    /// Stored value at a free point.
    pub fn free_value(&self, p: PointRef) -> Result<&ComplexMatrix> {
        self.values
            .get(p.level)
            .and_then(|l| l.get(p.index))
            .ok_or_else(|| Error::DanglingReference(format!("{}:{}", p.level, p.index)))?
            .as_ref()
            .ok_or_else(|| Error::Precondition(format!("point {}:{} is glued", p.level, p.index)))
    }

    /// Value at any point: stored at free points, diagonal assembly at glued ones.
    pub fn eval(&self, p: PointRef) -> Result<ComplexMatrix> {
        let point = self.model.point(p)?;
        match &point.gluing {
            None => Ok(self.free_value(p)?.clone()),
            Some(list) => {
                let blocks = list.iter().map(|&q| self.eval(q)).collect::<Result<Vec<_>>>()?;
                Ok(ComplexMatrix::block_diag(&blocks))
            }
        }
    }

    /// Applies `f` at every free point.
    pub fn map(&self, mut f: impl FnMut(PointRef, &ComplexMatrix) -> ComplexMatrix) -> Self {
        let mut values = self.values.clone();
        for p in self.model.free_points() {
            let v = values[p.level][p.index].as_ref().expect("free value");
            values[p.level][p.index] = Some(f(p, v));
        }
        Self { model: Arc::clone(&self.model), values }
    }

    pub fn try_map(&self, mut f: impl FnMut(PointRef, &ComplexMatrix) -> Result<ComplexMatrix>) -> Result<Self> {
        let mut values = self.values.clone();
        for p in self.model.free_points() {
            let v = values[p.level][p.index].as_ref().expect("free value");
            values[p.level][p.index] = Some(f(p, v)?);
        }
        Ok(Self { model: Arc::clone(&self.model), values })
    }

    fn zip(&self, other: &Self, f: impl Fn(&ComplexMatrix, &ComplexMatrix) -> ComplexMatrix) -> Result<Self> {
        if !(Arc::ptr_eq(&self.model, &other.model) || self.model == other.model) {
            return Err(Error::Precondition("elements live on different models".into()));
        }
        Ok(self.map(|p, a| f(a, other.free_value(p).expect("same model"))))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a * b)
    }

    pub fn scale(&self, c: C64) -> Self {
        self.map(|_, a| a.scale(c))
    }

    pub fn adjoint(&self) -> Self {
        self.map(|_, a| a.adjoint())
    }

    /// Entrywise `g_δ(z) = z · max(0, |z| - δ) / |z|` at every free point.
    pub fn soft_threshold(&self, delta: f64) -> Result<Self> {
        if !(delta >= 0.0) {
            return Err(Error::ParameterOutOfRange { name: "delta", value: delta });
        }
        Ok(self.map(|_, a| a.map_entries(|z| soft_threshold_scalar(z, delta))))
    }

    /// Smallest singular value over all points together with the point attaining it.
    pub fn min_singular_value(&self) -> Result<(f64, PointRef)> {
        let mut best: Option<(f64, PointRef)> = None;
        for p in self.model.points() {
            let s = min_singular_value(&self.eval(p)?);
            if best.is_none_or(|(b, _)| s < b) {
                best = Some((s, p));
            }
        }
        best.ok_or_else(|| Error::InvalidModel("model has no points".into()))
    }

    pub fn is_invertible(&self, tol: f64) -> Result<bool> {
        Ok(self.min_singular_value()?.0 > tol)
    }

    /// Stored values keyed by `"level/id"`.
    pub fn to_json(&self) -> serde_json::Value {
        let mut map = serde_json::Map::new();
        for p in self.model.free_points() {
            let v = self.free_value(p).expect("free value");
            map.insert(self.model.key(p).expect("valid point"), serde_json::to_value(v).expect("matrix serializes"));
        }
        serde_json::Value::Object(map)
    }

    /// Reads the `"level/id"` keyed form; every free point must be present and nothing else.
    pub fn from_json(model: &Arc<FiniteDshModel>, value: &serde_json::Value) -> Result<Self> {
        let raw: BTreeMap<String, ComplexMatrix> = serde_json::from_value(value.clone())?;
        let mut parsed = BTreeMap::new();
        for (k, v) in raw {
            let p = model.parse_key(&k)?;
            if !model.is_free(p)? {
                return Err(Error::InvalidModel(format!("value given for glued point {k}")));
            }
            parsed.insert(p, v);
        }
        let mut missing = None;
        let e = Self::from_fn(model, |p, n| match parsed.remove(&p) {
            Some(v) => v,
            None => {
                missing.get_or_insert(p);
                ComplexMatrix::zeros(n)
            }
        })?;
        if let Some(p) = missing {
            return Err(Error::DanglingReference(format!("no value for {}", model.key(p)?)));
        }
        Ok(e)
    }
}

pub fn soft_threshold_scalar(z: C64, delta: f64) -> C64 {
    let r = z.norm();
    if r <= delta {
        C64::new(0.0, 0.0)
    } else {
        z * ((r - delta) / r)
    }
}

pub fn eval_element(e: &Element, p: PointRef) -> Result<ComplexMatrix> {
    e.eval(p)
}

pub fn soft_threshold(e: &Element, delta: f64) -> Result<Element> {
    e.soft_threshold(delta)
}

/// Largest operator-norm distance over free points. Glued values are
/// assemblies of free ones, so they cannot be further apart.
pub fn norm_dist(a: &Element, b: &Element) -> Result<f64> {
    let d = a.sub(b)?;
    Ok(a.model.free_points().iter().map(|&p| op_norm(d.free_value(p).expect("free value"))).fold(0.0, f64::max))
}

pub fn is_invertible(e: &Element, tol: f64) -> Result<bool> {
    e.is_invertible(tol)
}

/// An element whose value at `p` has no block point at `k`, when `k` is not a block start.
pub fn witness_no_block_point(model: &Arc<FiniteDshModel>, p: PointRef, k: usize) -> Result<Element> {
    model.point(p)?;
    let n = model.dim(p.level);
    if k == 0 || k > n {
        return Err(Error::IndexOutOfRange { index: k, n });
    }
    let table = block_starts(model)?;
    let starts = table.get(p);
    if starts.contains(&k) {
        return Err(Error::NoWitness { point: model.key(p)?, k });
    }
    let leaves = model.flatten(p)?;
    let c = starts.iter().rposition(|&s| s < k).expect("1 is always a start");
    let (source, local) = (leaves[c], k - starts[c] + 1);
    Element::from_fn(model, |q, d| {
        if q == source {
            ComplexMatrix::zeros(d).with_entry(0, local - 1, C64::new(1.0, 0.0))
        } else {
            ComplexMatrix::zeros(d)
        }
    })
}
