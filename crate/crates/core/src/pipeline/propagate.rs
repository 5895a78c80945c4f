//! Pushing a single zero cross forward along the chain until every block
//! start carries `N` crosses spaced `M` apart.

use std::sync::Arc;

use crate::dsh_model::{
    block_starts, build_indicator, check_simplicity_condition, Chain, DiagonalMap, Element, FiniteDshModel, PointRef,
};
use crate::error::{Error, Result};
use crate::matrixkit::{diagonal_radius, has_zero_cross, ComplexMatrix, PATH_ATOL};
use crate::unitary_paths::{gather_multi_product, FactorProduct, ThetaVector};

use super::certificate::{PredicateResult, Predicates};
use super::sweep::{diagonal_weights, gluing_check, par_element, sweep, sweep_all};
use super::zero::ZeroCross;

/// Output of [`propagate_crosses`].
#[derive(Clone, Debug)]
pub struct Propagation {
    /// Index of the first model whose eigenvalue lists all meet the singular set.
    pub simple_index: usize,
    /// Index of the model the crosses were pushed into.
    pub target_index: usize,
    /// Largest dimension at the source model.
    pub r: usize,
    pub m: usize,
    pub n: usize,
    pub map: DiagonalMap,
    /// Indicator with ones at `k, k+M, .., k+(N-1)M` for each block start `k`.
    pub theta: Element,
    /// Pushed-forward weights.
    pub weights: Element,
    /// The gathering unitary `V`.
    pub gather: Element,
    /// `V · φ(vL)`.
    pub v1: Element,
    /// `φ(vR) · V*`.
    pub v2: Element,
    /// `V1 · φ(e′) · V2`.
    pub g: Element,
}

fn binary_ones(theta: &ThetaVector) -> Result<Vec<usize>> {
    if let Some(&t) = theta.values().iter().find(|&&t| t != 0.0 && t != 1.0) {
        return Err(Error::InvalidTheta(format!("indicator value {t} is not 0 or 1")));
    }
    Ok(theta.ones())
}

/// Gathering unitary at one point: windows of length `m` at the ones of `theta`.
fn gather_at(a: &ComplexMatrix, theta: &ThetaVector, weights: &ThetaVector, m: usize) -> Result<FactorProduct> {
    gather_multi_product(a, weights, &binary_ones(theta)?, m)
}

/// Finds the model where the crosses can be spread, builds `V` from the
/// indicator and the pushed-forward weights, and conjugates.
///
/// `n` defaults to `R + M + 3`.
pub fn propagate_crosses(chain: &Chain, source: usize, zc: &ZeroCross, n: Option<usize>) -> Result<Propagation> {
    let simple_index =
        check_simplicity_condition(chain, source, &zc.points)?.ok_or(Error::SimplicityFails { from: source })?;
    let m = 2 * chain.models[simple_index].max_dim();
    let r = chain.models[source].max_dim();
    let n = n.unwrap_or(r + m + 3);
    if n == 0 {
        return Err(Error::Precondition("at least one cross per block start is required".into()));
    }
    let target_index = (simple_index..chain.len())
        .find(|&i| chain.models[i].dim(0) > n * m)
        .ok_or(Error::ChainTooShort { required_n1: n * m + 1 })?;
    let map = chain.composed(source, target_index)?;
    let model = Arc::clone(&chain.models[target_index]);

    let g0 = map.apply(&zc.rotated()?)?;
    let weights = map.apply(&zc.delta)?;
    let offsets: Vec<usize> = (0..n).map(|a| a * m).collect();
    let theta = build_indicator(&model, m, &offsets, &[])?;

    let product = |p: PointRef| -> Result<FactorProduct> {
        gather_at(g0.free_value(p)?, &diagonal_weights(&theta, p)?, &diagonal_weights(&weights, p)?, m)
    };
    let gather = par_element(&model, |p, _| Ok(product(p)?.matrix()))?;
    let g = par_element(&model, |p, _| Ok(product(p)?.conjugate(g0.free_value(p)?)))?;
    let v1 = gather.mul(&map.apply(&zc.v_left)?)?;
    let v2 = map.apply(&zc.v_right)?.mul(&gather.adjoint())?;
    Ok(Propagation { simple_index, target_index, r, m, n, map, theta, weights, gather, v1, v2, g })
}

/// Zero crosses at `k + aM` for every block start `k` and `a < N`, at every point.
pub(crate) fn periodic_crosses(model: &FiniteDshModel, g: &Element, m: usize, n: usize) -> Result<PredicateResult> {
    let table = block_starts(model)?;
    sweep_all(model, |p| {
        let v = g.eval(p)?;
        for &k in table.get(p) {
            for a in 0..n {
                let pos = k + a * m;
                if pos > v.dim() || !has_zero_cross(&v, pos, PATH_ATOL)? {
                    return Ok(Some(format!("no zero cross at {pos} (block start {k})")));
                }
            }
        }
        Ok(None)
    })
}

pub(crate) fn radius_below(g: &Element, bound: usize) -> Result<PredicateResult> {
    sweep_all(g.model(), |p| {
        let r = diagonal_radius(&g.eval(p)?, PATH_ATOL);
        Ok((r >= bound).then(|| format!("diagonal radius {r} >= {bound}")))
    })
}

pub(crate) fn unitary_check(u: &Element) -> Result<PredicateResult> {
    sweep(u.model(), &u.model().free_points(), |p| {
        let d = u.free_value(p)?.unitarity_defect();
        Ok((d > PATH_ATOL).then(|| format!("unitarity defect {d:e}")))
    })
}

/// Checks the outcome of [`propagate_crosses`] against the perturbed element it came from.
pub fn verify_propagation(pr: &Propagation, zc: &ZeroCross) -> Result<Predicates> {
    let model = Arc::clone(pr.g.model());
    let mut out = Predicates::new();
    out.insert(
        "chain_depth".into(),
        PredicateResult::from_check(model.dim(0) > pr.n * pr.m, || {
            format!("smallest dimension {} <= N·M = {}", model.dim(0), pr.n * pr.m)
        }),
    );
    out.insert("periodic_crosses".into(), periodic_crosses(&model, &pr.g, pr.m, pr.n)?);
    out.insert("radius_below_r_plus_m".into(), radius_below(&pr.g, pr.r + pr.m)?);
    let f = pr.map.apply(&zc.perturbed)?;
    let sandwich = pr.v1.mul(&f)?.mul(&pr.v2)?;
    out.insert(
        "sandwich".into(),
        sweep(&model, &model.free_points(), |p| {
            let d = sandwich.free_value(p)?.max_abs_diff(pr.g.free_value(p)?);
            Ok((d > PATH_ATOL).then(|| format!("V1 φ(e′) V2 differs from G by {d:e}")))
        })?,
    );
    out.insert("unitary".into(), {
        let (a, b) = (unitary_check(&pr.v1)?, unitary_check(&pr.v2)?);
        if a.passed() { b } else { a }
    });
    let g0 = pr.map.apply(&zc.rotated()?)?;
    out.insert(
        "gluing_consistency".into(),
        gluing_check(&pr.gather, |p| {
            let ones = binary_ones(&diagonal_weights(&pr.theta, p)?)?;
            Ok(gather_multi_product(&g0.eval(p)?, &diagonal_weights(&pr.weights, p)?, &ones, pr.m)?.matrix())
        })?,
    );
    Ok(out)
}
