use std::sync::Arc;

use crate::error::{Error, Result};
use crate::matrixkit::ComplexMatrix;

use super::element::Element;
use super::model::{block_starts, FiniteDshModel, PointRef};

/// Diagonal 0/1 element with value 1 at position `j + K_t` for every block
/// start `j` of a point and every offset `K_t`, and 0 elsewhere.
///
/// Requires `1 <= M < n_1`, offsets increasing with gaps `>= M`, and the last
/// offset at most `n_1 - M`. Then any `M` consecutive diagonal entries hold at
/// most one 1 and the last `M - 1` entries vanish. `forbidden` lists
/// `(point, position)` pairs that must be 0; a pair landing on a forced 1 is
/// reported as infeasible.
pub fn build_indicator(
    model: &Arc<FiniteDshModel>,
    m: usize,
    offsets: &[usize],
    forbidden: &[(PointRef, usize)],
) -> Result<Element> {
    let n1 = model.dim(0);
    if m == 0 || m >= n1 {
        return Err(Error::Precondition(format!("spacing M = {m} must satisfy 1 <= M < n_1 = {n1}")));
    }
    if offsets.is_empty() {
        return Err(Error::Precondition("offset set must be nonempty".into()));
    }
    if let Some(w) = offsets.windows(2).find(|w| w[1] < w[0] + m) {
        return Err(Error::Precondition(format!("offsets {} and {} are closer than {m}", w[0], w[1])));
    }
    let last = *offsets.last().expect("nonempty");
    if last + m > n1 {
        return Err(Error::Precondition(format!("largest offset {last} exceeds n_1 - M = {}", n1 - m)));
    }
    let table = block_starts(model)?;
    for &(p, k) in forbidden {
        model.point(p)?;
        let n = model.dim(p.level);
        if k == 0 || k > n {
            return Err(Error::IndexOutOfRange { index: k, n });
        }
        if table.get(p).iter().any(|&j| offsets.iter().any(|&o| j + o == k)) {
            return Err(Error::Infeasible(format!("position {k} of {} is forced to 1", model.key(p)?)));
        }
    }
    Element::from_fn(model, |_, n| {
        let mut d = vec![0.0; n];
        for &o in offsets {
            d[o] = 1.0;
        }
        ComplexMatrix::from_real_diagonal(&d)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsh_model::model::{Level, Point};
    use crate::matrixkit::C64;

    fn two_level() -> Arc<FiniteDshModel> {
        Arc::new(
            FiniteDshModel::checked(vec![
                Level { dim: 3, points: vec![Point::free("a"), Point::free("b")] },
                Level { dim: 4, points: vec![Point::free("c")] },
                Level { dim: 7, points: vec![Point::glued("g", vec![PointRef::new(0, 1), PointRef::new(1, 0)])] },
            ])
            .unwrap(),
        )
    }

    #[test]
    fn single_level_gives_leading_one() {
        let m = Arc::new(FiniteDshModel::checked(vec![Level { dim: 4, points: vec![Point::free("x")] }]).unwrap());
        let t = build_indicator(&m, 2, &[0], &[]).unwrap();
        let expected = ComplexMatrix::from_real_diagonal(&[1.0, 0.0, 0.0, 0.0]);
        assert_eq!(t.eval(PointRef::new(0, 0)).unwrap(), expected);
    }

    #[test]
    fn glued_point_has_ones_at_block_starts() {
        let m = two_level();
        let g = m.glued_points()[0];
        let t = build_indicator(&m, 2, &[0], &[]).unwrap();
        let v = t.eval(g).unwrap();
        let starts = block_starts(&m).unwrap();
        for k in 1..=v.dim() {
            let expected = if starts.contains(g, k) { 1.0 } else { 0.0 };
            assert_eq!(v.get(k - 1, k - 1), C64::new(expected, 0.0));
        }
    }

    #[test]
    fn rejects_forced_forbidden_position() {
        let m = two_level();
        let g = m.glued_points()[0];
        assert!(matches!(build_indicator(&m, 2, &[0], &[(g, 4)]), Err(Error::Infeasible(_))));
        assert!(build_indicator(&m, 2, &[0], &[(g, 2)]).is_ok());
        assert!(build_indicator(&m, 3, &[0], &[]).is_err());
        assert!(build_indicator(&m, 1, &[0, 2], &[]).is_ok());
        assert!(build_indicator(&m, 2, &[0, 1], &[]).is_err());
    }
}
