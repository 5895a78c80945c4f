//! Conjugators that pull an existing zero cross onto a chosen position.

use crate::error::{Error, Result};
use crate::matrixkit::{has_zero_cross, ComplexMatrix, PATH_ATOL};

use super::theta::ThetaVector;
use super::transposition::{Factor, FactorProduct};

/// `u_{(k z_m)}(t_m) ··· u_{(k z_1)}(t_1)`; conjugating by it moves the
/// zero crosses at `zs` towards `k`.
pub fn permute_product(n: usize, k: usize, zs: &[usize], ts: &[f64]) -> Result<FactorProduct> {
    if zs.len() != ts.len() {
        return Err(Error::DimensionMismatch { expected: zs.len(), found: ts.len() });
    }
    if k == 0 || k > n {
        return Err(Error::IndexOutOfRange { index: k, n });
    }
    let mut factors = Vec::with_capacity(zs.len());
    for (&z, &t) in zs.iter().zip(ts).rev() {
        if z == 0 || z > n {
            return Err(Error::IndexOutOfRange { index: z, n });
        }
        if z == k {
            return Err(Error::Precondition(format!("position {k} cannot also be a source position")));
        }
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::ParameterOutOfRange { name: "t", value: t });
        }
        factors.push(Factor::new(k, z, t));
    }
    Ok(FactorProduct::from_factors(n, factors))
}

/// `u_{(k, k+1)}(Δ_{k+1}) ··· u_{(k, k+M-1)}(Δ_{k+M-1})` with no hypothesis checks.
pub fn window_product(n: usize, k: usize, delta: &ThetaVector, m: usize) -> FactorProduct {
    let factors = (1..m).map(|a| Factor::new(k, k + a, delta.at(k + a))).collect();
    FactorProduct::from_factors(n, factors)
}

fn check_delta_support(a: &ComplexMatrix, delta: &ThetaVector) -> Result<()> {
    if delta.len() != a.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: delta.len() });
    }
    for i in delta.support() {
        if !has_zero_cross(a, i, PATH_ATOL)? {
            return Err(Error::Precondition(format!("weight at position {i} is positive but there is no zero cross there")));
        }
    }
    Ok(())
}

fn check_window(n: usize, k: usize, delta: &ThetaVector, m: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::Precondition("window length M must be positive".into()));
    }
    if k == 0 || k + m - 1 > n {
        return Err(Error::Precondition(format!("window {k}..{} exceeds dimension {n}", k + m - 1)));
    }
    if !(k..k + m).any(|i| delta.at(i) == 1.0) {
        return Err(Error::Precondition(format!("no weight equal to 1 in window starting at {k}")));
    }
    Ok(())
}

/// Conjugator for one window, after checking the hypotheses.
pub fn gather_once_product(a: &ComplexMatrix, k: usize, delta: &ThetaVector, m: usize) -> Result<FactorProduct> {
    check_delta_support(a, delta)?;
    check_window(a.dim(), k, delta, m)?;
    Ok(window_product(a.dim(), k, delta, m))
}

/// Returns `(V, V A V*)`; the conjugate has a zero cross at `k`.
pub fn gather_once(a: &ComplexMatrix, k: usize, delta: &ThetaVector, m: usize) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let v = gather_once_product(a, k, delta, m)?;
    Ok((v.matrix(), v.conjugate(a)))
}

/// Product `V_N ··· V_1` of the window conjugators for `ks`.
pub fn gather_multi_product(a: &ComplexMatrix, delta: &ThetaVector, ks: &[usize], m: usize) -> Result<FactorProduct> {
    let n = a.dim();
    check_delta_support(a, delta)?;
    if let Some(w) = ks.windows(2).find(|w| w[1] < w[0] + m) {
        return Err(Error::Precondition(format!("windows at {} and {} are closer than {m}", w[0], w[1])));
    }
    if let Some(&last) = ks.last() {
        if last + m > n + 1 {
            return Err(Error::Precondition(format!("last window start {last} exceeds {}", n + 1 - m.min(n + 1))));
        }
    }
    let mut total = FactorProduct::identity(n);
    for &k in ks.iter().rev() {
        check_window(n, k, delta, m)?;
        total = total.then(&window_product(n, k, delta, m));
    }
    Ok(total)
}

/// Returns `(V, V A V*)` with `V = V_N ··· V_1`; the conjugate has zero crosses at every `k_j`.
pub fn gather_multi(a: &ComplexMatrix, delta: &ThetaVector, ks: &[usize], m: usize) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let v = gather_multi_product(a, delta, ks, m)?;
    Ok((v.matrix(), v.conjugate(a)))
}
