//! Zero-pattern predicates and singular-value norms.
//!
//! Positions `k` are 1-based: row/column `k` is index `k - 1` of the storage.

use nalgebra::SVD;

use crate::error::{Error, Result};

use super::matrix::ComplexMatrix;

fn check_position(a: &ComplexMatrix, k: usize) -> Result<()> {
    if k == 0 || k > a.dim() {
        return Err(Error::IndexOutOfRange { index: k, n: a.dim() });
    }
    Ok(())
}

/// Row `k` and column `k` vanish (every modulus `<= atol`).
pub fn has_zero_cross(a: &ComplexMatrix, k: usize, atol: f64) -> Result<bool> {
    check_position(a, k)?;
    let p = k - 1;
    Ok((0..a.dim()).all(|j| a.get(p, j).norm() <= atol && a.get(j, p).norm() <= atol))
}

/// All zero-cross positions of `a`, ascending.
pub fn zero_cross_positions(a: &ComplexMatrix, atol: f64) -> Vec<usize> {
    (1..=a.dim()).filter(|&k| has_zero_cross(a, k, atol).unwrap_or(false)).collect()
}

/// `a` splits as a direct sum across position `k`: both off-diagonal blocks
/// `rows >= k, cols < k` and `rows < k, cols >= k` vanish.
pub fn has_block_point(a: &ComplexMatrix, k: usize, atol: f64) -> Result<bool> {
    check_position(a, k)?;
    let split = k - 1;
    let n = a.dim();
    for i in 0..n {
        for j in 0..n {
            let crosses = (i >= split && j < split) || (i < split && j >= split);
            if crosses && a.get(i, j).norm() > atol {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Smallest `r >= 0` with `|a_ij| <= atol` whenever `|i - j| >= r`.
pub fn diagonal_radius(a: &ComplexMatrix, atol: f64) -> usize {
    let n = a.dim();
    let mut r = 0;
    for i in 0..n {
        for j in 0..n {
            if a.get(i, j).norm() > atol {
                r = r.max(i.abs_diff(j) + 1);
            }
        }
    }
    r
}

/// `|a_ij| <= atol` for all `i <= j`.
pub fn is_strictly_lower_triangular(a: &ComplexMatrix, atol: f64) -> bool {
    let n = a.dim();
    (0..n).all(|i| (i..n).all(|j| a.get(i, j).norm() <= atol))
}

/// Singular values in descending order.
pub fn singular_values(a: &ComplexMatrix) -> Vec<f64> {
    if a.dim() == 0 {
        return Vec::new();
    }
    let mut sv: Vec<f64> = a.inner().clone().singular_values().iter().copied().collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    sv
}

pub fn op_norm(a: &ComplexMatrix) -> f64 {
    singular_values(a).first().copied().unwrap_or(0.0)
}

pub fn min_singular_value(a: &ComplexMatrix) -> f64 {
    singular_values(a).last().copied().unwrap_or(0.0)
}

/// Full SVD `a = u · diag(s) · v*` with `s` descending.
pub fn svd(a: &ComplexMatrix) -> (ComplexMatrix, Vec<f64>, ComplexMatrix) {
    let n = a.dim();
    let dec = SVD::new(a.inner().clone(), true, true);
    let u = dec.u.expect("left singular vectors requested");
    let v_t = dec.v_t.expect("right singular vectors requested");
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| dec.singular_values[y].total_cmp(&dec.singular_values[x]));
    let s = order.iter().map(|&i| dec.singular_values[i]).collect();
    let u = ComplexMatrix::from_fn(n, |i, j| u[(i, order[j])]);
    let v = ComplexMatrix::from_fn(n, |i, j| v_t[(order[j], i)].conj());
    (u, s, v)
}
