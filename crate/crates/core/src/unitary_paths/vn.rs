//! The triangulating unitary `V_n(Θ) = U[γ_{1,n}]^N · ∏_{k=N}^{n-1} u_{η_{k,n}}(Θ_{k+1})`.

use crate::error::{Error, Result};
use crate::matrixkit::{has_zero_cross, ComplexMatrix, Permutation, PATH_ATOL};

use super::eta::eta_pairs;
use super::theta::ThetaVector;
use super::transposition::{Factor, FactorProduct};

/// `V_n(Θ)` kept as a permutation followed by transposition-path factors.
#[derive(Clone, Debug, PartialEq)]
pub struct VnUnitary {
    shift: Permutation,
    tail: FactorProduct,
}

impl VnUnitary {
    pub fn matrix(&self) -> ComplexMatrix {
        self.tail.right_multiply(&self.shift.matrix())
    }

    /// `a · V_n(Θ)`.
    pub fn right_multiply(&self, a: &ComplexMatrix) -> ComplexMatrix {
        self.tail.right_multiply(&(a * &self.shift.matrix()))
    }
}

/// Evaluates the product formula with no shape checks on `values`.
pub(crate) fn vn_formula(values: &[f64], big_n: usize) -> VnUnitary {
    let n = values.len();
    let shift = Permutation::cycle(n, 1, n).expect("n >= 1").pow(big_n);
    let mut tail = FactorProduct::identity(n);
    for k in big_n..n {
        let t = values[k];
        if t == 0.0 {
            continue;
        }
        for (a, b) in eta_pairs(k, n, big_n) {
            tail.push(Factor::new(a, b, t));
        }
    }
    VnUnitary { shift, tail }
}

pub fn v_n_unitary(theta: &ThetaVector, big_n: usize) -> Result<VnUnitary> {
    theta.validate_for_vn(big_n)?;
    Ok(vn_formula(theta.values(), big_n))
}

pub fn v_n(theta: &ThetaVector, big_n: usize) -> Result<ComplexMatrix> {
    Ok(v_n_unitary(theta, big_n)?.matrix())
}

/// Block-diagonal right-hand side of the splitting of `V_n(Θ)` at the
/// positions `k_1 = 1 < k_2 < ..` where `Θ` equals 1: one block per segment
/// `Θ_{k_j} .. Θ_{k_{j+1}-1}`, each evaluated with the same product formula.
pub fn v_n_split(theta: &ThetaVector, big_n: usize) -> Result<ComplexMatrix> {
    theta.validate_for_vn(big_n)?;
    let n = theta.len();
    let mut cuts = theta.ones();
    cuts.push(n + 1);
    let blocks: Vec<ComplexMatrix> =
        cuts.windows(2).map(|w| vn_formula(&theta.values()[w[0] - 1..w[1] - 1], big_n).matrix()).collect();
    Ok(ComplexMatrix::block_diag(&blocks))
}

/// Checks the hypotheses of the triangulation and returns `A · V_n(Θ)`.
pub fn triangulate_check(a: &ComplexMatrix, theta: &ThetaVector, big_n: usize) -> Result<ComplexMatrix> {
    if a.dim() != theta.len() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: theta.len() });
    }
    let v = v_n_unitary(theta, big_n)?;
    let n = a.dim();
    for i in 0..n {
        for j in 0..n {
            if i.abs_diff(j) >= big_n && a.get(i, j).norm() > PATH_ATOL {
                return Err(Error::Precondition(format!(
                    "diagonal radius exceeds {big_n}: entry ({}, {}) = {}",
                    i + 1,
                    j + 1,
                    a.get(i, j)
                )));
            }
        }
    }
    for k in theta.support() {
        for p in k..k + big_n {
            if !has_zero_cross(a, p, PATH_ATOL)? {
                let q = p - 1;
                let witness = (0..n)
                    .flat_map(|x| [(q, x), (x, q)])
                    .find(|&(i, j)| a.get(i, j).norm() > PATH_ATOL)
                    .expect("some entry breaks the cross");
                return Err(Error::Precondition(format!(
                    "expected zero cross at {p} (weight at {k}): entry ({}, {}) = {}",
                    witness.0 + 1,
                    witness.1 + 1,
                    a.get(witness.0, witness.1)
                )));
            }
        }
    }
    Ok(v.right_multiply(a))
}
