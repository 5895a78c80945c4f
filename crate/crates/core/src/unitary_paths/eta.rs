//! Cyclic shifts `γ` and block exchanges `η` together with their paths.

use crate::error::{Error, Result};
use crate::matrixkit::{ComplexMatrix, Permutation};

use super::transposition::{Factor, FactorProduct};

fn check_eta(n: usize, k: usize, top: usize, big_n: usize) -> Result<()> {
    if big_n == 0 {
        return Err(Error::Precondition("block size N must be positive".into()));
    }
    if top > n {
        return Err(Error::IndexOutOfRange { index: top, n });
    }
    if k < big_n || k > top {
        return Err(Error::Precondition(format!("exchange requires N <= k <= top, got N={big_n}, k={k}, top={top}")));
    }
    Ok(())
}

/// Index pairs `(k-N+1, top-N+1), .., (k, top)` of the block exchange.
pub fn eta_pairs(k: usize, top: usize, big_n: usize) -> Vec<(usize, usize)> {
    (0..big_n).map(|j| (k + 1 + j - big_n, top + 1 + j - big_n)).collect()
}

/// `u_{(k-N+1, top-N+1)}(t) ··· u_{(k, top)}(t)` acting on dimension `n`.
///
/// With `top = n` this swaps the `N` entries ending at `k` with the last `N` entries.
pub fn eta_product(n: usize, k: usize, top: usize, big_n: usize, t: f64) -> Result<FactorProduct> {
    check_eta(n, k, top, big_n)?;
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::ParameterOutOfRange { name: "t", value: t });
    }
    let factors = eta_pairs(k, top, big_n).into_iter().map(|(a, b)| Factor::new(a, b, t)).collect();
    Ok(FactorProduct::from_factors(n, factors))
}

/// The exchange path `u_{η_{k,n}}(t)` in dimension `n`.
pub fn eta_path(k: usize, n: usize, big_n: usize, t: f64) -> Result<ComplexMatrix> {
    Ok(eta_product(n, k, n, big_n, t)?.matrix())
}

/// The permutation `(k-N+1 top-N+1) ··· (k top)` on `n` points.
pub fn eta_permutation(n: usize, k: usize, top: usize, big_n: usize) -> Result<Permutation> {
    check_eta(n, k, top, big_n)?;
    let mut acc = Permutation::identity(n);
    for (a, b) in eta_pairs(k, top, big_n) {
        acc = acc.compose(&Permutation::transposition(n, a, b)?);
    }
    Ok(acc)
}

/// The cycle `(from from+1 .. to)` on `n` points.
pub fn gamma_permutation(n: usize, from: usize, to: usize) -> Result<Permutation> {
    Permutation::cycle(n, from, to)
}
