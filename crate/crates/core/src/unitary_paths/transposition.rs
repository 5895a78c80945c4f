use std::f64::consts::FRAC_PI_2;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::matrixkit::{ComplexMatrix, C64};

/// Scalar profile `[g1, g2, g3, g4]` of a transposition path at `t`.
///
/// `g1 = g4 = e^{-iπt/2} cos(πt/2)` and `g2 = g3 = i e^{-iπt/2} sin(πt/2)`.
/// The endpoints are returned exactly so that `t = 0` and `t = 1` give the
/// identity and the permutation matrix with no rounding residue.
pub fn profile(t: f64) -> [C64; 4] {
    if t == 0.0 {
        let (one, zero) = (C64::new(1.0, 0.0), C64::new(0.0, 0.0));
        return [one, zero, zero, one];
    }
    if t == 1.0 {
        let (one, zero) = (C64::new(1.0, 0.0), C64::new(0.0, 0.0));
        return [zero, one, one, zero];
    }
    let phase = C64::from_polar(1.0, -FRAC_PI_2 * t);
    let (s, c) = (FRAC_PI_2 * t).sin_cos();
    let diag = phase * c;
    let off = C64::new(0.0, 1.0) * phase * s;
    [diag, off, off, diag]
}

fn check_parameter(name: &'static str, t: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::ParameterOutOfRange { name, value: t });
    }
    Ok(())
}

/// The path `t ↦ u_{(k1 k2)}(t)` in dimension `n`, positions 1-based with `k1 < k2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TranspositionPathSpec {
    pub n: usize,
    pub k1: usize,
    pub k2: usize,
}

impl TranspositionPathSpec {
    pub fn new(n: usize, k1: usize, k2: usize) -> Result<Self> {
        if k1 == 0 || k1 > n {
            return Err(Error::IndexOutOfRange { index: k1, n });
        }
        if k2 > n {
            return Err(Error::IndexOutOfRange { index: k2, n });
        }
        if k1 >= k2 {
            return Err(Error::Precondition(format!("transposition requires k1 < k2, got ({k1} {k2})")));
        }
        Ok(Self { n, k1, k2 })
    }

    /// Same path for an unordered pair; the profile is symmetric in the two positions.
    pub fn between(n: usize, a: usize, b: usize) -> Result<Self> {
        Self::new(n, a.min(b), a.max(b))
    }

    pub fn eval(&self, t: f64) -> Result<ComplexMatrix> {
        u_transposition(self, t)
    }
}

/// `u_{(k1 k2)}(t)`: identity outside rows/columns `k1, k2`, 2×2 core `[[g1, g2], [g3, g4]]`.
pub fn u_transposition(spec: &TranspositionPathSpec, t: f64) -> Result<ComplexMatrix> {
    check_parameter("t", t)?;
    Ok(FactorProduct::from_factors(spec.n, vec![Factor::new(spec.k1, spec.k2, t)]).matrix())
}

/// One transposition-path factor `u_{(a b)}(t)` with 1-based positions.
/// `a == b` is the identity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Factor {
    pub a: usize,
    pub b: usize,
    pub t: f64,
}

impl Factor {
    pub fn new(a: usize, b: usize, t: f64) -> Self {
        Self { a, b, t }
    }

    fn is_identity(&self) -> bool {
        self.a == self.b || self.t == 0.0
    }

    /// `m ← m · u`: mixes columns `a` and `b`.
    pub(crate) fn apply_right(&self, m: &mut DMatrix<C64>) {
        if self.is_identity() {
            return;
        }
        let [g1, g2, g3, g4] = profile(self.t);
        let (a, b) = (self.a - 1, self.b - 1);
        for i in 0..m.nrows() {
            let (x, y) = (m[(i, a)], m[(i, b)]);
            m[(i, a)] = x * g1 + y * g3;
            m[(i, b)] = x * g2 + y * g4;
        }
    }

    /// `m ← u · m`: mixes rows `a` and `b`.
    pub(crate) fn apply_left(&self, m: &mut DMatrix<C64>) {
        if self.is_identity() {
            return;
        }
        let [g1, g2, g3, g4] = profile(self.t);
        let (a, b) = (self.a - 1, self.b - 1);
        for j in 0..m.ncols() {
            let (x, y) = (m[(a, j)], m[(b, j)]);
            m[(a, j)] = g1 * x + g2 * y;
            m[(b, j)] = g3 * x + g4 * y;
        }
    }

    /// `m ← m · u*`.
    pub(crate) fn apply_right_adjoint(&self, m: &mut DMatrix<C64>) {
        if self.is_identity() {
            return;
        }
        let [g1, g2, g3, g4] = profile(self.t);
        let (a, b) = (self.a - 1, self.b - 1);
        for i in 0..m.nrows() {
            let (x, y) = (m[(i, a)], m[(i, b)]);
            m[(i, a)] = x * g1.conj() + y * g2.conj();
            m[(i, b)] = x * g3.conj() + y * g4.conj();
        }
    }
}

/// Ordered product `f_1 f_2 ··· f_m` of transposition-path factors in dimension `n`.
///
/// Factors are kept symbolically and applied as 2×2 row/column updates, so
/// building or conjugating costs `O(n)` per factor rather than a dense product.
#[derive(Clone, Debug, PartialEq)]
pub struct FactorProduct {
    n: usize,
    factors: Vec<Factor>,
}

impl FactorProduct {
    pub fn identity(n: usize) -> Self {
        Self { n, factors: Vec::new() }
    }

    pub fn from_factors(n: usize, factors: Vec<Factor>) -> Self {
        debug_assert!(factors.iter().all(|f| f.a >= 1 && f.b >= 1 && f.a <= n && f.b <= n));
        Self { n, factors }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    /// Appends on the right.
    pub fn push(&mut self, f: Factor) {
        debug_assert!(f.a >= 1 && f.b >= 1 && f.a <= self.n && f.b <= self.n);
        self.factors.push(f);
    }

    /// `self · other`.
    pub fn then(mut self, other: &FactorProduct) -> Self {
        assert_eq!(self.n, other.n, "dimension mismatch");
        self.factors.extend_from_slice(&other.factors);
        self
    }

    pub fn matrix(&self) -> ComplexMatrix {
        let mut m = DMatrix::identity(self.n, self.n);
        for f in &self.factors {
            f.apply_right(&mut m);
        }
        ComplexMatrix::from_inner_unchecked(m)
    }

    /// `a · self`.
    pub fn right_multiply(&self, a: &ComplexMatrix) -> ComplexMatrix {
        let mut m = a.clone().into_inner();
        for f in &self.factors {
            f.apply_right(&mut m);
        }
        ComplexMatrix::from_inner_unchecked(m)
    }

    /// `self · a · self*`.
    pub fn conjugate(&self, a: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.n, a.dim(), "dimension mismatch");
        let mut m = a.clone().into_inner();
        for f in self.factors.iter().rev() {
            f.apply_left(&mut m);
            f.apply_right_adjoint(&mut m);
        }
        ComplexMatrix::from_inner_unchecked(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrixkit::{perm_matrix, Permutation};

    #[test]
    fn endpoints_are_exact() {
        let spec = TranspositionPathSpec::new(5, 2, 4).unwrap();
        assert_eq!(spec.eval(0.0).unwrap(), ComplexMatrix::identity(5));
        let p = perm_matrix(&Permutation::transposition(5, 2, 4).unwrap());
        assert_eq!(spec.eval(1.0).unwrap(), p);
    }

    #[test]
    fn midpoint_moduli() {
        let u = TranspositionPathSpec::new(3, 1, 3).unwrap().eval(0.5).unwrap();
        let h = std::f64::consts::FRAC_PI_4;
        assert!((u.get(0, 0).norm() - h.cos()).abs() < 1e-15);
        assert!((u.get(2, 2).norm() - h.cos()).abs() < 1e-15);
        assert!((u.get(0, 2).norm() - h.sin()).abs() < 1e-15);
        assert!((u.get(2, 0).norm() - h.sin()).abs() < 1e-15);
        assert_eq!(u.get(1, 1), C64::new(1.0, 0.0));
        assert!(u.is_unitary(1e-14));
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(TranspositionPathSpec::new(4, 3, 3).is_err());
        assert!(TranspositionPathSpec::new(4, 0, 3).is_err());
        assert!(TranspositionPathSpec::new(4, 2, 5).is_err());
        let spec = TranspositionPathSpec::new(4, 1, 2).unwrap();
        assert!(matches!(spec.eval(1.5), Err(Error::ParameterOutOfRange { .. })));
        assert!(spec.eval(-0.1).is_err());
    }

    #[test]
    fn factor_product_matches_dense_product() {
        let n = 6;
        let factors = vec![Factor::new(1, 4, 0.3), Factor::new(2, 6, 0.8), Factor::new(4, 5, 1.0), Factor::new(3, 3, 0.5)];
        let prod = FactorProduct::from_factors(n, factors.clone());
        let mut dense = ComplexMatrix::identity(n);
        for f in &factors {
            if f.a != f.b {
                dense = &dense * &TranspositionPathSpec::between(n, f.a, f.b).unwrap().eval(f.t).unwrap();
            }
        }
        assert!(prod.matrix().approx_eq(&dense, 1e-14));
        let a = ComplexMatrix::from_fn(n, |i, j| C64::new(i as f64 - 0.5 * j as f64, (i * j) as f64 * 0.1));
        let conj = &(&dense * &a) * &dense.adjoint();
        assert!(prod.conjugate(&a).approx_eq(&conj, 1e-12));
        assert!(prod.right_multiply(&a).approx_eq(&(&a * &dense), 1e-12));
    }
}
