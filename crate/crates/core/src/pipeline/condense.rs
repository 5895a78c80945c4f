//! Opening block points by soft thresholding and condensing spaced crosses
//! into consecutive ones.

use std::sync::Arc;

use crate::dsh_model::{block_starts, build_indicator, Element, PointRef};
use crate::error::{Error, Result};
use crate::matrixkit::{diagonal_radius, has_block_point, has_zero_cross, zero_cross_positions, PATH_ATOL};
use crate::unitary_paths::{condense_path, Factor, FactorProduct, ThetaVector};

use super::certificate::{PredicateResult, Predicates};
use super::propagate::unitary_check;
use super::sweep::{diagonal_weights, gluing_check, par_element, par_norm_dist, sweep_all};

/// Output of [`open_block_points`].
#[derive(Clone, Debug)]
pub struct BlockOpening {
    pub element: Element,
    /// Soft-threshold level.
    pub delta: f64,
    pub distance: f64,
}

/// Soft-thresholds `g` at the largest level found by bisection that keeps
/// the result strictly within `budget`.
///
/// `budget / n_max` is always admissible since each entry moves by at most
/// the threshold; bisection runs between that and the largest entry modulus.
pub fn open_block_points(g: &Element, budget: f64) -> Result<BlockOpening> {
    if !(budget > 0.0) {
        return Err(Error::Precondition(format!("budget must be positive, got {budget}")));
    }
    let model = g.model();
    let dist = |d: f64| -> Result<(Element, f64)> {
        let e = g.soft_threshold(d)?;
        let dd = par_norm_dist(g, &e)?;
        Ok((e, dd))
    };
    let mut lo = budget / model.max_dim() as f64;
    let (mut best, mut best_dist) = dist(lo)?;
    while best_dist >= budget {
        lo /= 2.0;
        (best, best_dist) = dist(lo)?;
    }
    let hi_start = model.free_points().iter().map(|&p| g.free_value(p).expect("free value").max_abs()).fold(0.0, f64::max);
    let mut hi = hi_start;
    if hi > lo {
        let (top, top_dist) = dist(hi)?;
        if top_dist < budget {
            return Ok(BlockOpening { element: top, delta: hi, distance: top_dist });
        }
        for _ in 0..40 {
            if hi - lo <= 1e-6 * lo {
                break;
            }
            let mid = 0.5 * (lo + hi);
            let (e, d) = dist(mid)?;
            if d < budget {
                (lo, best, best_dist) = (mid, e, d);
            } else {
                hi = mid;
            }
        }
    }
    Ok(BlockOpening { element: best, delta: lo, distance: best_dist })
}

pub fn verify_block_opening(before: &Element, opened: &BlockOpening, budget: f64) -> Result<Predicates> {
    let model = Arc::clone(before.model());
    let after = &opened.element;
    let table = block_starts(&model)?;
    let mut out = Predicates::new();
    out.insert(
        "block_points".into(),
        sweep_all(&model, |p| {
            let v = after.eval(p)?;
            for &k in table.get(p) {
                if !has_block_point(&v, k, 0.0)? {
                    return Ok(Some(format!("no block point at {k}")));
                }
            }
            Ok(None)
        })?,
    );
    out.insert(
        "crosses_retained".into(),
        sweep_all(&model, |p| {
            let v = after.eval(p)?;
            for k in zero_cross_positions(&before.eval(p)?, PATH_ATOL) {
                if !has_zero_cross(&v, k, 0.0)? {
                    return Ok(Some(format!("zero cross at {k} lost")));
                }
            }
            Ok(None)
        })?,
    );
    out.insert(
        "radius_not_increased".into(),
        sweep_all(&model, |p| {
            let (r0, r1) = (diagonal_radius(&before.eval(p)?, PATH_ATOL), diagonal_radius(&after.eval(p)?, 0.0));
            Ok((r1 > r0).then(|| format!("radius grew from {r0} to {r1}")))
        })?,
    );
    out.insert(
        "within_budget".into(),
        PredicateResult::from_check(opened.distance < budget, || format!("distance {} >= {budget}", opened.distance)),
    );
    Ok(out)
}

/// Output of [`condense_crosses`].
#[derive(Clone, Debug)]
pub struct Condensation {
    /// Indicator with spacing `N·M` and ones at block starts.
    pub theta: Element,
    pub v3: Element,
    /// `V3 · G′ · V3*`.
    pub g: Element,
}

/// At each `k` with `Θ_k > 0`, the condensing path of size `N·M` for crosses
/// at `1, M+1, .., (N-1)M+1`, evaluated at `Θ_k` and placed at offset `k - 1`.
fn condense_at(theta: &ThetaVector, m: usize, n: usize) -> Result<FactorProduct> {
    let dim = theta.len();
    let zs: Vec<usize> = (0..n).map(|a| a * m + 1).collect();
    let path = condense_path(n * m, &zs)?;
    let mut factors = Vec::new();
    for k in theta.support() {
        if k + n * m - 1 > dim {
            return Err(Error::Precondition(format!("condensing window at {k} exceeds dimension {dim}")));
        }
        let shift = k - 1;
        factors.extend(path.product(theta.at(k))?.factors().iter().map(|f| Factor::new(f.a + shift, f.b + shift, f.t)));
    }
    Ok(FactorProduct::from_factors(dim, factors))
}

fn condense_preconditions(g: &Element, m: usize, n: usize) -> Result<()> {
    let model = g.model();
    let table = block_starts(model)?;
    let check = sweep_all(model, |p| {
        let v = g.eval(p)?;
        for &k in table.get(p) {
            if !has_block_point(&v, k, PATH_ATOL)? {
                return Ok(Some(format!("no block point at {k}")));
            }
            for a in 0..n {
                let pos = k + a * m;
                if pos > v.dim() || !has_zero_cross(&v, pos, PATH_ATOL)? {
                    return Ok(Some(format!("no zero cross at {pos} (block start {k})")));
                }
            }
        }
        Ok(None)
    })?;
    match check.witness {
        Some(w) => Err(Error::Precondition(w)),
        None => Ok(()),
    }
}

/// Conjugates `g` so that the crosses at `k, k+M, .., k+(N-1)M` move to
/// `k, .., k+N-1` at every block start `k`.
pub fn condense_crosses(g: &Element, m: usize, n: usize) -> Result<Condensation> {
    if m == 0 || n == 0 {
        return Err(Error::Precondition("M and N must be positive".into()));
    }
    condense_preconditions(g, m, n)?;
    let model = g.model();
    let theta = build_indicator(model, n * m, &[0], &[])?;
    let product = |p: PointRef| condense_at(&diagonal_weights(&theta, p)?, m, n);
    let v3 = par_element(model, |p, _| Ok(product(p)?.matrix()))?;
    let out = par_element(model, |p, _| Ok(product(p)?.conjugate(g.free_value(p)?)))?;
    Ok(Condensation { theta, v3, g: out })
}

pub fn verify_condensation(before: &Element, c: &Condensation, m: usize, n: usize) -> Result<Predicates> {
    let model = Arc::clone(before.model());
    let table = block_starts(&model)?;
    let mut out = Predicates::new();
    out.insert(
        "consecutive_crosses".into(),
        sweep_all(&model, |p| {
            let v = c.g.eval(p)?;
            for &k in table.get(p) {
                for pos in k..k + n {
                    if !has_zero_cross(&v, pos, PATH_ATOL)? {
                        return Ok(Some(format!("no zero cross at {pos} (block start {k})")));
                    }
                }
            }
            Ok(None)
        })?,
    );
    out.insert(
        "radius_growth_at_most_2".into(),
        sweep_all(&model, |p| {
            let (r0, r1) = (diagonal_radius(&before.eval(p)?, PATH_ATOL), diagonal_radius(&c.g.eval(p)?, PATH_ATOL));
            Ok((r1 > r0 + 2).then(|| format!("radius grew from {r0} to {r1}")))
        })?,
    );
    out.insert("unitary".into(), unitary_check(&c.v3)?);
    out.insert(
        "gluing_consistency".into(),
        gluing_check(&c.v3, |p| Ok(condense_at(&diagonal_weights(&c.theta, p)?, m, n)?.matrix()))?,
    );
    Ok(out)
}
