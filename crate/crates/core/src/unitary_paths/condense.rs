//! A path of unitaries moving zero crosses at `z_1 < .. < z_m` onto `1, .., m`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrixkit::ComplexMatrix;

use super::transposition::{Factor, FactorProduct};

/// Piecewise-linear ramp `δ_j^i`: 0 for `θ <= (i-1)/j`, 1 for `θ >= i/j`, linear between.
pub fn ramp(i: usize, j: usize, theta: f64) -> f64 {
    debug_assert!(i >= 1 && i <= j);
    let lo = (i - 1) as f64 / j as f64;
    let hi = i as f64 / j as f64;
    if theta <= lo {
        0.0
    } else if theta >= hi {
        1.0
    } else {
        (j as f64 * theta - (i - 1) as f64).clamp(0.0, 1.0)
    }
}

/// Factors of `u_j^i(s)`: adjacent swaps `(p, p+1)` for `p = i..j-1`, the
/// rightmost swap moving first, so that at `s = 1` the cross at `j` sits at `i`.
fn shift_factors(i: usize, j: usize, s: f64, out: &mut Vec<Factor>) {
    let len = j - i;
    for p in i..j {
        out.push(Factor::new(p, p + 1, ramp(j - p, len, s)));
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CondensePath {
    n: usize,
    zs: Vec<usize>,
}

/// Builds the condensing path for zero crosses at the sorted positions `zs`.
///
/// The crosses are moved one at a time, `z_1` first, each during its own
/// parameter interval `[(q-1)/m, q/m]`.
pub fn condense_path(n: usize, zs: &[usize]) -> Result<CondensePath> {
    if let Some(&z) = zs.iter().find(|&&z| z == 0 || z > n) {
        return Err(Error::IndexOutOfRange { index: z, n });
    }
    if zs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Precondition(format!("cross positions must be strictly increasing, got {zs:?}")));
    }
    Ok(CondensePath { n, zs: zs.to_vec() })
}

impl CondensePath {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn positions(&self) -> &[usize] {
        &self.zs
    }

    /// `V(θ) = u^1_{z_m}(δ_m^m(θ)) ··· u^1_{z_1}(δ_m^1(θ))` as a factor list.
    pub fn product(&self, theta: f64) -> Result<FactorProduct> {
        if !(0.0..=1.0).contains(&theta) {
            return Err(Error::ParameterOutOfRange { name: "theta", value: theta });
        }
        let m = self.zs.len();
        let mut factors = Vec::new();
        for q in (1..=m).rev() {
            let z = self.zs[q - 1];
            if z > 1 {
                shift_factors(1, z, ramp(q, m, theta), &mut factors);
            }
        }
        Ok(FactorProduct::from_factors(self.n, factors))
    }

    pub fn eval(&self, theta: f64) -> Result<ComplexMatrix> {
        Ok(self.product(theta)?.matrix())
    }

    /// `V(θ) A V(θ)*`.
    pub fn conjugate(&self, a: &ComplexMatrix, theta: f64) -> Result<ComplexMatrix> {
        if a.dim() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: a.dim() });
        }
        Ok(self.product(theta)?.conjugate(a))
    }
}
