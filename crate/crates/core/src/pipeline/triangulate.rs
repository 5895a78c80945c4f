//! Right multiplication to strictly lower triangular form, and the
//! nilpotent-to-invertible step.

use std::sync::Arc;

use crate::dsh_model::{build_indicator, Element, PointRef};
use crate::error::{Error, Result};
use crate::matrixkit::{diagonal_radius, is_strictly_lower_triangular, op_norm, svd, ComplexMatrix, C64, PATH_ATOL};
use crate::unitary_paths::{triangulate_check, v_n, v_n_unitary};

use super::certificate::Predicates;
use super::propagate::unitary_check;
use super::sweep::{diagonal_weights, gluing_check, par_element, sweep, sweep_all};

/// Output of [`triangulate`].
#[derive(Clone, Debug)]
pub struct Triangulation {
    /// Indicator with spacing `N` and ones at block starts.
    pub theta: Element,
    pub v4: Element,
    /// `G″ · V4`.
    pub t: Element,
}

/// Right-multiplies by `V_n(Θ)` pointwise. Requires consecutive crosses
/// `k, .., k+N-1` at every block start `k` and diagonal radius below `N`.
pub fn triangulate(g: &Element, n: usize) -> Result<Triangulation> {
    if n == 0 {
        return Err(Error::Precondition("N must be positive".into()));
    }
    let model = g.model();
    let radius = sweep_all(model, |p| {
        let r = diagonal_radius(&g.eval(p)?, PATH_ATOL);
        Ok((r >= n).then(|| format!("diagonal radius {r} >= N = {n}")))
    })?;
    if let Some(w) = radius.witness {
        return Err(Error::Precondition(w));
    }
    let theta = build_indicator(model, n, &[0], &[])?;
    let t = par_element(model, |p, _| {
        triangulate_check(g.free_value(p)?, &diagonal_weights(&theta, p)?, n)
            .map_err(|e| Error::Precondition(format!("{}: {e}", model.key(p).unwrap_or_default())))
    })?;
    let v4 = par_element(model, |p, _| v_n(&diagonal_weights(&theta, p)?, n))?;
    Ok(Triangulation { theta, v4, t })
}

/// `T^d = 0` at a point of dimension `d`, tested on `T / max(1, ‖T‖)` so
/// intermediate powers stay bounded.
fn nilpotency_defect(t: &ComplexMatrix) -> f64 {
    let d = t.dim();
    let scaled = t.scale(C64::new(1.0 / op_norm(t).max(1.0), 0.0));
    let (mut acc, mut base, mut e) = (ComplexMatrix::identity(d), scaled, d);
    while e > 0 {
        if e & 1 == 1 {
            acc = &acc * &base;
        }
        base = &base * &base;
        e >>= 1;
    }
    acc.max_abs()
}

pub fn verify_triangulation(before: &Element, tr: &Triangulation, n: usize) -> Result<Predicates> {
    let model = Arc::clone(before.model());
    let mut out = Predicates::new();
    out.insert(
        "strictly_lower_triangular".into(),
        sweep_all(&model, |p| {
            let v = tr.t.eval(p)?;
            if is_strictly_lower_triangular(&v, PATH_ATOL) {
                return Ok(None);
            }
            let d = v.dim();
            let (i, j) = (0..d).flat_map(|i| (i..d).map(move |j| (i, j))).find(|&(i, j)| v.get(i, j).norm() > PATH_ATOL).expect("offending entry");
            Ok(Some(format!("entry ({}, {}) = {}", i + 1, j + 1, v.get(i, j))))
        })?,
    );
    out.insert(
        "nilpotent".into(),
        sweep_all(&model, |p| {
            let v = tr.t.eval(p)?;
            let defect = nilpotency_defect(&v);
            Ok((defect > PATH_ATOL * v.dim() as f64).then(|| format!("largest entry of the top power is {defect:e}")))
        })?,
    );
    out.insert(
        "product".into(),
        sweep(&model, &model.free_points(), |p| {
            let d = (before.free_value(p)? * tr.v4.free_value(p)?).max_abs_diff(tr.t.free_value(p)?);
            Ok((d > PATH_ATOL).then(|| format!("G″ V4 differs from T by {d:e}")))
        })?,
    );
    out.insert("unitary".into(), unitary_check(&tr.v4)?);
    out.insert(
        "gluing_consistency".into(),
        gluing_check(&tr.v4, |p: PointRef| Ok(v_n_unitary(&diagonal_weights(&tr.theta, p)?, n)?.matrix()))?,
    );
    Ok(out)
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::Precondition(format!("step size must be positive, got {delta}")));
    }
    Ok(())
}

/// `T + δ·1`. Invertible when `T` is nilpotent pointwise, at distance exactly `δ`.
pub fn rordam_invert(t: &Element, delta: f64) -> Result<Element> {
    check_delta(delta)?;
    Ok(t.map(|_, a| a + &ComplexMatrix::identity(a.dim()).scale(C64::new(delta, 0.0))))
}

/// Raises every singular value below `δ` to `δ`: `U · max(Σ, δ) · W*`.
/// Moves each value by at most `δ` and leaves smallest singular value `≥ δ`.
pub fn singular_value_floor(t: &Element, delta: f64) -> Result<Element> {
    check_delta(delta)?;
    par_element(t.model(), |p, _| {
        let (u, s, w) = svd(t.free_value(p)?);
        let floored: Vec<C64> = s.iter().map(|&x| C64::new(x.max(delta), 0.0)).collect();
        Ok(&(&u * &ComplexMatrix::from_diagonal(&floored)) * &w.adjoint())
    })
}
