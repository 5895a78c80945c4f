//! Images of the generators `f` and `u·g` in a tower model.

use std::fmt;
use std::sync::Arc;

use crate::dsh_model::{Element, PointRef};
use crate::error::{Error, Result};
use crate::matrixkit::{ComplexMatrix, C64};

use super::tower::TowerModel;

/// A scalar function of the first `arity` symbols of a point.
#[derive(Clone)]
pub struct WordFn {
    arity: usize,
    f: Arc<dyn Fn(&str) -> C64 + Send + Sync>,
}

impl fmt::Debug for WordFn {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        fm.debug_struct("WordFn").field("arity", &self.arity).finish_non_exhaustive()
    }
}

impl WordFn {
    pub fn new(arity: usize, f: impl Fn(&str) -> C64 + Send + Sync + 'static) -> Self {
        Self { arity, f: Arc::new(f) }
    }

    pub fn constant(c: C64) -> Self {
        Self::new(0, move |_| c)
    }

    /// 1 on windows starting with `prefix`, 0 elsewhere.
    pub fn cylinder(prefix: &str) -> Self {
        let p = prefix.to_string();
        Self::new(p.len(), move |w| C64::new(if w.starts_with(p.as_str()) { 1.0 } else { 0.0 }, 0.0))
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Value on the window of `word` starting at offset `shift`.
    pub fn at(&self, word: &str, shift: usize) -> C64 {
        (self.f)(&word[shift..shift + self.arity])
    }
}

fn check_horizon(t: &TowerModel, f: &WordFn, p: PointRef) -> Result<(String, usize)> {
    let word = t.model.point(p)?.id.clone();
    let n = t.model.dim(p.level);
    if f.arity > t.horizon || n + f.arity > word.len() {
        return Err(Error::Horizon(format!("function of arity {} exceeds horizon {}", f.arity, t.horizon)));
    }
    Ok((word, n))
}

/// `diag(f∘σ, .., f∘σ^n)` at `p`: entry `k` reads the window at shift `k`.
pub fn eval_generator_f(f: &WordFn, t: &TowerModel, p: PointRef) -> Result<ComplexMatrix> {
    let (word, n) = check_horizon(t, f, p)?;
    Ok(ComplexMatrix::from_diagonal(&(1..=n).map(|k| f.at(&word, k)).collect::<Vec<_>>()))
}

/// The subdiagonal matrix with `(k+1, k)` entry `g∘σ^k`, for `g` vanishing on the base cylinder.
///
/// The windows at shifts `0` and `n` start at visits to the cylinder, so `g` must vanish there.
pub fn eval_generator_ug(g: &WordFn, t: &TowerModel, p: PointRef) -> Result<ComplexMatrix> {
    let (word, n) = check_horizon(t, g, p)?;
    for shift in [0, n] {
        if g.at(&word, shift) != C64::new(0.0, 0.0) {
            return Err(Error::GeneratorNotVanishing { window: word[shift..shift + g.arity.max(t.base.len())].to_string() });
        }
    }
    Ok(ComplexMatrix::from_fn(n, |i, j| if i == j + 1 { g.at(&word, i) } else { C64::new(0.0, 0.0) }))
}

pub fn generator_f_element(f: &WordFn, t: &TowerModel) -> Result<Element> {
    Element::try_from_fn(&t.model, |p, _| eval_generator_f(f, t, p))
}

pub fn generator_ug_element(g: &WordFn, t: &TowerModel) -> Result<Element> {
    Element::try_from_fn(&t.model, |p, _| eval_generator_ug(g, t, p))
}
