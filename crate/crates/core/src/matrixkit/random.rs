//! Seeded random matrices for property trials.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use super::matrix::{ComplexMatrix, C64};

/// Entries with independent standard complex Gaussian real and imaginary parts.
pub fn random_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, |_, _| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
}

/// Haar-distributed unitary via QR of a Gaussian matrix with phase correction.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let g = random_matrix(rng, n).into_inner();
    let qr = g.qr();
    let q = qr.q();
    let r = qr.r();
    let phases = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            let d = r[(i, i)];
            if d.norm() > 0.0 {
                d / d.norm()
            } else {
                C64::new(1.0, 0.0)
            }
        } else {
            C64::new(0.0, 0.0)
        }
    });
    ComplexMatrix::from_inner_unchecked(q * phases)
}

/// Random matrix with every entry `(i, j)`, `|i - j| >= radius`, set to zero.
pub fn random_banded<R: Rng + ?Sized>(rng: &mut R, n: usize, radius: usize) -> ComplexMatrix {
    let m = random_matrix(rng, n);
    m.map_indexed(|i, j, z| if i.abs_diff(j) < radius { z } else { C64::new(0.0, 0.0) })
}

/// Zeroes row and column of every 1-based position in `positions`.
pub fn with_zero_crosses(a: &ComplexMatrix, positions: &[usize]) -> ComplexMatrix {
    a.map_indexed(|i, j, z| {
        if positions.contains(&(i + 1)) || positions.contains(&(j + 1)) {
            C64::new(0.0, 0.0)
        } else {
            z
        }
    })
}
