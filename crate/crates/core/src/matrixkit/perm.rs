use crate::error::{Error, Result};

use super::matrix::{ComplexMatrix, C64};

/// A bijection on `{0, .., n-1}`, stored as its image list.
///
/// Constructors named after cycles and transpositions take 1-based
/// positions so they read like the usual cycle notation.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Self { images: (0..n).collect() }
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &im in &images {
            if im >= n || seen[im] {
                return Err(Error::InvalidPermutation(format!("{images:?} is not a bijection")));
            }
            seen[im] = true;
        }
        Ok(Self { images })
    }

    /// The transposition `(a b)` on `n` points; `a == b` gives the identity.
    pub fn transposition(n: usize, a: usize, b: usize) -> Result<Self> {
        for &x in &[a, b] {
            if x == 0 || x > n {
                return Err(Error::IndexOutOfRange { index: x, n });
            }
        }
        let mut images: Vec<usize> = (0..n).collect();
        images.swap(a - 1, b - 1);
        Ok(Self { images })
    }

    /// The cycle `(from from+1 .. to)`: `from -> from+1 -> .. -> to -> from`.
    pub fn cycle(n: usize, from: usize, to: usize) -> Result<Self> {
        if from == 0 || from > n {
            return Err(Error::IndexOutOfRange { index: from, n });
        }
        if to < from || to > n {
            return Err(Error::IndexOutOfRange { index: to, n });
        }
        let mut images: Vec<usize> = (0..n).collect();
        for p in from..to {
            images[p - 1] = p;
        }
        images[to - 1] = from - 1;
        Ok(Self { images })
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// Image of the 0-based point `j`.
    pub fn apply(&self, j: usize) -> usize {
        self.images[j]
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.len(), other.len(), "permutation size mismatch");
        Self { images: other.images.iter().map(|&j| self.images[j]).collect() }
    }

    pub fn inverse(&self) -> Self {
        let mut images = vec![0; self.len()];
        for (j, &im) in self.images.iter().enumerate() {
            images[im] = j;
        }
        Self { images }
    }

    pub fn pow(&self, k: usize) -> Self {
        (0..k).fold(Self::identity(self.len()), |acc, _| self.compose(&acc))
    }

    pub fn matrix(&self) -> ComplexMatrix {
        perm_matrix(self)
    }
}

/// Permutation matrix with entry `(i, j) = 1` iff `i = p(j)`, so that
/// `perm_matrix(p) e_j = e_{p(j)}` and `perm_matrix(p∘q) = perm_matrix(p) perm_matrix(q)`.
pub fn perm_matrix(p: &Permutation) -> ComplexMatrix {
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    ComplexMatrix::from_fn(p.len(), |i, j| if p.apply(j) == i { one } else { zero })
}
