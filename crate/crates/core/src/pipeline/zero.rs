//! Locating a near-singular point and perturbing it into an exact zero cross.

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::dsh_model::{Element, PointRef};
use crate::error::{Error, Result};
use crate::matrixkit::{has_zero_cross, min_singular_value, svd, ComplexMatrix, Permutation, C64, PATH_ATOL};

use super::certificate::{PredicateResult, Predicates};
use super::sweep::{par_element, par_norm_dist, sweep};

/// Values with smallest singular value at most this are treated as singular.
pub const SINGULAR_TOL: f64 = 1e-9;

fn free_singular_values(e: &Element) -> Vec<(PointRef, f64)> {
    let pts = e.model().free_points();
    let s: Vec<f64> = pts.par_iter().map(|&p| min_singular_value(e.free_value(p).expect("free value"))).collect();
    pts.into_iter().zip(s).collect()
}

/// Free point with smallest singular value `<= tol`, taken from the highest
/// level that has one.
pub fn find_singular_point(e: &Element, tol: f64) -> Option<PointRef> {
    pick(&free_singular_values(e), |s| s <= tol)
}

/// Copy of `e` whose value at the free point `p` has its smallest singular
/// value set to zero.
pub fn plant_singularity(e: &Element, p: PointRef) -> Result<Element> {
    if !e.model().is_free(p)? {
        return Err(Error::Precondition(format!("{} is not a free point", e.model().key(p)?)));
    }
    e.try_map(|q, v| {
        if q != p {
            return Ok(v.clone());
        }
        let (u, mut s, w) = svd(v);
        if let Some(last) = s.last_mut() {
            *last = 0.0;
        }
        let d: Vec<C64> = s.iter().map(|&x| C64::new(x, 0.0)).collect();
        Ok(&(&u * &ComplexMatrix::from_diagonal(&d)) * &w.adjoint())
    })
}

fn pick(sv: &[(PointRef, f64)], accept: impl Fn(f64) -> bool) -> Option<PointRef> {
    let level = sv.iter().filter(|(_, s)| accept(*s)).map(|(p, _)| p.level).max()?;
    sv.iter()
        .filter(|(p, s)| p.level == level && accept(*s))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(p, _)| *p)
}

/// Output of [`make_zero_cross`].
#[derive(Clone, Debug)]
pub struct ZeroCross {
    /// `e′`, within the budget of `e`.
    pub perturbed: Element,
    pub v_left: Element,
    pub v_right: Element,
    /// Diagonal weights: `e_{11}` on `points`, zero elsewhere.
    pub delta: Element,
    /// Free points where `v_left · e′ · v_right` has a zero cross at 1.
    pub points: BTreeSet<PointRef>,
    pub distance: f64,
}

impl ZeroCross {
    /// `v_left · e′ · v_right`.
    pub fn rotated(&self) -> Result<Element> {
        self.v_left.mul(&self.perturbed)?.mul(&self.v_right)
    }
}

/// Drops the smallest singular value of `a` to zero and returns
/// `(a′, vL, vR)` with `vL a′ vR` diagonal and zero at `(1, 1)`.
fn rotate_kernel_to_front(a: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix, ComplexMatrix) {
    let n = a.dim();
    if has_zero_cross(a, 1, 0.0).expect("dimension is positive") {
        return (a.clone(), ComplexMatrix::identity(n), ComplexMatrix::identity(n));
    }
    let (x, mut s, y) = svd(a);
    s[n - 1] = 0.0;
    let sd: Vec<C64> = s.iter().map(|&v| C64::new(v, 0.0)).collect();
    let a_new = &(&x * &ComplexMatrix::from_diagonal(&sd)) * &y.adjoint();
    let p = Permutation::transposition(n, 1, n).expect("valid positions").matrix();
    (a_new, &p * &x.adjoint(), &y * &p)
}

/// Perturbs `e` by less than `budget` so that, after multiplying by unitary
/// elements on both sides, it has a zero cross at position 1 on a set of
/// free points at a single level.
pub fn make_zero_cross(e: &Element, budget: f64) -> Result<ZeroCross> {
    let sv = free_singular_values(e);
    let target = pick(&sv, |s| s < budget).ok_or_else(|| Error::NotCloseToSingular {
        min_singular_value: sv.iter().map(|(_, s)| *s).fold(f64::INFINITY, f64::min),
        budget,
    })?;
    let mut points: BTreeSet<PointRef> =
        sv.iter().filter(|(p, s)| p.level == target.level && *s <= SINGULAR_TOL).map(|(p, _)| *p).collect();
    points.insert(target);

    let model = e.model();
    let rotated: Vec<(PointRef, (ComplexMatrix, ComplexMatrix, ComplexMatrix))> = points
        .par_iter()
        .map(|&p| (p, rotate_kernel_to_front(e.free_value(p).expect("free value"))))
        .collect();
    let find = |p: PointRef| rotated.iter().find(|(q, _)| *q == p).map(|(_, r)| r);
    let perturbed = par_element(model, |p, _| Ok(find(p).map_or_else(|| e.free_value(p).cloned().expect("free value"), |r| r.0.clone())))?;
    let v_left = par_element(model, |p, n| Ok(find(p).map_or_else(|| ComplexMatrix::identity(n), |r| r.1.clone())))?;
    let v_right = par_element(model, |p, n| Ok(find(p).map_or_else(|| ComplexMatrix::identity(n), |r| r.2.clone())))?;
    let delta = Element::from_fn(model, |p, n| {
        let mut d = vec![0.0; n];
        if points.contains(&p) {
            d[0] = 1.0;
        }
        ComplexMatrix::from_real_diagonal(&d)
    })?;
    let distance = par_norm_dist(e, &perturbed)?;
    Ok(ZeroCross { perturbed, v_left, v_right, delta, points, distance })
}

/// Structural checks on a [`ZeroCross`] against the original element and budget.
pub fn verify_zero_cross(zc: &ZeroCross, budget: f64) -> Result<Predicates> {
    let model = zc.perturbed.model();
    let g = zc.rotated()?;
    let mut out = Predicates::new();
    let set: Vec<PointRef> = zc.points.iter().copied().collect();
    out.insert(
        "zero_cross_at_1".into(),
        sweep(model, &set, |p| {
            Ok((!has_zero_cross(g.free_value(p)?, 1, PATH_ATOL)?).then(|| "no zero cross at 1".to_string()))
        })?,
    );
    out.insert(
        "weights_on_set".into(),
        sweep(model, &set, |p| {
            let d = zc.delta.free_value(p)?.get(0, 0);
            Ok((d != C64::new(1.0, 0.0)).then(|| format!("weight at 1 is {d}")))
        })?,
    );
    out.insert(
        "weights_supported_on_crosses".into(),
        sweep(model, &model.points(), |p| {
            let (d, v) = (zc.delta.eval(p)?, g.eval(p)?);
            for k in 1..=d.dim() {
                let w = d.get(k - 1, k - 1).re;
                if !(0.0..=1.0).contains(&w) {
                    return Ok(Some(format!("weight {w} at {k} outside [0, 1]")));
                }
                if w > 0.0 && !has_zero_cross(&v, k, PATH_ATOL)? {
                    return Ok(Some(format!("weight {w} at {k} without a zero cross")));
                }
            }
            Ok(None)
        })?,
    );
    out.insert(
        "unitary".into(),
        sweep(model, &model.free_points(), |p| {
            let defect = zc.v_left.free_value(p)?.unitarity_defect().max(zc.v_right.free_value(p)?.unitarity_defect());
            Ok((defect > PATH_ATOL).then(|| format!("unitarity defect {defect:e}")))
        })?,
    );
    out.insert(
        "within_budget".into(),
        PredicateResult::from_check(zc.distance < budget, || format!("distance {} >= {budget}", zc.distance)),
    );
    Ok(out)
}
