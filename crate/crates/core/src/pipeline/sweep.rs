//! Per-point helpers that fan out across points with rayon.

use std::collections::HashMap;
use std::sync::Arc;

use rayon::prelude::*;

use crate::dsh_model::{Element, FiniteDshModel, PointRef};
use crate::error::Result;
use crate::matrixkit::{min_singular_value, op_norm, ComplexMatrix, PATH_ATOL};
use crate::unitary_paths::ThetaVector;

use super::certificate::PredicateResult;

/// Element built from `f` evaluated in parallel at the free points.
pub(crate) fn par_element(
    model: &Arc<FiniteDshModel>,
    f: impl Fn(PointRef, usize) -> Result<ComplexMatrix> + Sync,
) -> Result<Element> {
    let pts = model.free_points();
    let vals: Vec<ComplexMatrix> = pts.par_iter().map(|&p| f(p, model.dim(p.level))).collect::<Result<_>>()?;
    let mut by_point: HashMap<PointRef, ComplexMatrix> = pts.into_iter().zip(vals).collect();
    Element::from_fn(model, |p, _| by_point.remove(&p).expect("value computed for every free point"))
}

pub(crate) fn par_norm_dist(a: &Element, b: &Element) -> Result<f64> {
    let pts = a.model().free_points();
    let d: Vec<f64> = pts
        .par_iter()
        .map(|&p| Ok(op_norm(&(a.free_value(p)? - b.free_value(p)?))))
        .collect::<Result<_>>()?;
    Ok(d.into_iter().fold(0.0, f64::max))
}

/// Smallest singular value over every point, free and glued.
pub(crate) fn par_min_singular_value(e: &Element) -> Result<(f64, PointRef)> {
    let pts = e.model().points();
    let s: Vec<f64> = pts.par_iter().map(|&p| Ok(min_singular_value(&e.eval(p)?))).collect::<Result<_>>()?;
    let (i, v) = s.iter().enumerate().min_by(|x, y| x.1.total_cmp(y.1)).expect("model has points");
    Ok((*v, pts[i]))
}

/// Runs `check` at every point; the first point (in model order) returning a
/// message makes the predicate fail with that point as witness.
pub(crate) fn sweep(
    model: &FiniteDshModel,
    points: &[PointRef],
    check: impl Fn(PointRef) -> Result<Option<String>> + Sync,
) -> Result<PredicateResult> {
    let found: Vec<Option<String>> = points.par_iter().map(|&p| check(p)).collect::<Result<_>>()?;
    for (p, msg) in points.iter().zip(found) {
        if let Some(msg) = msg {
            return Ok(PredicateResult::fail(format!("{}: {msg}", model.key(*p)?)));
        }
    }
    Ok(PredicateResult::pass())
}

/// Sweep over every point of the model.
pub(crate) fn sweep_all(
    model: &FiniteDshModel,
    check: impl Fn(PointRef) -> Result<Option<String>> + Sync,
) -> Result<PredicateResult> {
    sweep(model, &model.points(), check)
}

/// Compares the assembled value of `e` at each glued point with `direct`,
/// the construction evaluated on the glued point's own data.
pub(crate) fn gluing_check(
    e: &Element,
    direct: impl Fn(PointRef) -> Result<ComplexMatrix> + Sync,
) -> Result<PredicateResult> {
    let model = Arc::clone(e.model());
    sweep(&model, &model.glued_points(), |p| {
        let (assembled, built) = (e.eval(p)?, direct(p)?);
        let diff = assembled.max_abs_diff(&built);
        Ok((diff > PATH_ATOL).then(|| format!("assembled and direct values differ by {diff:e}")))
    })
}

/// Real diagonal of a diagonal-valued element at `p`, clamped into `[0, 1]`.
pub(crate) fn diagonal_weights(e: &Element, p: PointRef) -> Result<ThetaVector> {
    let v = e.eval(p)?;
    ThetaVector::new(v.diagonal().iter().map(|z| z.re.clamp(0.0, 1.0)).collect())
}
