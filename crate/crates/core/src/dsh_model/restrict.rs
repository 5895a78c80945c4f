use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use crate::error::{Error, Result};

use super::element::Element;
use super::model::{FiniteDshModel, Level, Point, PointRef};

/// A restricted model and the renaming of kept points into it.
#[derive(Clone, Debug)]
pub struct Restriction {
    pub model: Arc<FiniteDshModel>,
    pub renaming: HashMap<PointRef, PointRef>,
}

/// Keeps the points in `keep` (free or glued). Every kept glued point must
/// keep its whole gluing list; levels left empty are removed.
pub fn restrict_model(m: &FiniteDshModel, keep: &BTreeSet<PointRef>) -> Result<Restriction> {
    for &p in keep {
        let point = m.point(p)?;
        for q in point.gluing.iter().flatten() {
            if !keep.contains(q) {
                return Err(Error::ClosureViolation(format!(
                    "{} is kept but its gluing source {} is dropped",
                    m.key(p)?,
                    m.key(*q)?
                )));
            }
        }
    }
    let mut renaming = HashMap::new();
    let mut next_level = 0;
    for (l, level) in m.levels.iter().enumerate() {
        let kept: Vec<usize> = (0..level.points.len()).filter(|&i| keep.contains(&PointRef::new(l, i))).collect();
        if kept.is_empty() {
            continue;
        }
        for (j, &i) in kept.iter().enumerate() {
            renaming.insert(PointRef::new(l, i), PointRef::new(next_level, j));
        }
        next_level += 1;
    }
    let mut levels: Vec<Level> = Vec::new();
    for (l, level) in m.levels.iter().enumerate() {
        let points: Vec<Point> = level
            .points
            .iter()
            .enumerate()
            .filter(|(i, _)| keep.contains(&PointRef::new(l, *i)))
            .map(|(_, p)| Point {
                id: p.id.clone(),
                gluing: p.gluing.as_ref().map(|list| list.iter().map(|q| renaming[q]).collect()),
            })
            .collect();
        if !points.is_empty() {
            levels.push(Level { dim: level.dim, points });
        }
    }
    Ok(Restriction { model: Arc::new(FiniteDshModel { levels }), renaming })
}

/// The image of `e` under restriction.
pub fn restrict_element(e: &Element, r: &Restriction) -> Result<Element> {
    let back: HashMap<PointRef, PointRef> = r.renaming.iter().map(|(&old, &new)| (new, old)).collect();
    Element::try_from_fn(&r.model, |p, _| e.free_value(back[&p]).cloned())
}
