use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A spectrum point: level index and point index within the level, both 0-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PointRef {
    pub level: usize,
    pub index: usize,
}

impl PointRef {
    pub fn new(level: usize, index: usize) -> Self {
        Self { level, index }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Point {
    pub id: String,
    /// `None` for a free point; otherwise the ordered list of lower-level points
    /// whose values are stacked along the diagonal.
    pub gluing: Option<Vec<PointRef>>,
}

impl Point {
    pub fn free(id: impl Into<String>) -> Self {
        Self { id: id.into(), gluing: None }
    }

    pub fn glued(id: impl Into<String>, gluing: Vec<PointRef>) -> Self {
        Self { id: id.into(), gluing: Some(gluing) }
    }

    pub fn is_free(&self) -> bool {
        self.gluing.is_none()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Level {
    pub dim: usize,
    pub points: Vec<Point>,
}

/// A finite spectrum model: levels of matrix dimension `n_1 <= n_2 <= ..`,
/// each with free points and points glued diagonally from lower levels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteDshModel {
    pub levels: Vec<Level>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every structural requirement and lists each violation found.
pub fn validate_model(m: &FiniteDshModel) -> ValidationReport {
    let mut v = Vec::new();
    if m.levels.is_empty() {
        v.push("model has no levels".to_string());
    }
    for (l, level) in m.levels.iter().enumerate() {
        if level.dim == 0 {
            v.push(format!("level {l} has dimension 0"));
        }
        if l > 0 && level.dim < m.levels[l - 1].dim {
            v.push(format!("level {l} dimension {} is below level {} dimension {}", level.dim, l - 1, m.levels[l - 1].dim));
        }
        let mut ids = BTreeSet::new();
        for p in &level.points {
            if !ids.insert(p.id.as_str()) {
                v.push(format!("level {l} repeats point id {:?}", p.id));
            }
            let Some(list) = &p.gluing else { continue };
            let here = format!("point {}/{}", l, p.id);
            if l == 0 {
                v.push(format!("{here} is glued but level 0 admits only free points"));
                continue;
            }
            if list.is_empty() {
                v.push(format!("{here} has an empty gluing list"));
            }
            let mut total = 0;
            for r in list {
                if r.level >= l {
                    v.push(format!("{here} references level {} which is not below {l}", r.level));
                    continue;
                }
                match m.levels.get(r.level).and_then(|lv| lv.points.get(r.index)) {
                    None => v.push(format!("{here} references missing point {}:{}", r.level, r.index)),
                    Some(q) => {
                        total += m.levels[r.level].dim;
                        if !q.is_free() {
                            v.push(format!("{here} references glued point {}/{}; normalize first", r.level, q.id));
                        }
                    }
                }
            }
            if total != level.dim {
                v.push(format!("{here} gluing dimensions sum to {total}, expected {}", level.dim));
            }
        }
    }
    ValidationReport { violations: v }
}

impl FiniteDshModel {
    /// Builds a model and rejects it unless [`validate_model`] reports no violations.
    pub fn checked(levels: Vec<Level>) -> Result<Self> {
        let m = Self { levels };
        let report = validate_model(&m);
        if !report.is_valid() {
            return Err(Error::InvalidModel(report.violations.join("; ")));
        }
        Ok(m)
    }

    pub fn level_count(&self) -> usize {
        self.levels.len()
    }

    pub fn dim(&self, level: usize) -> usize {
        self.levels[level].dim
    }

    pub fn max_dim(&self) -> usize {
        self.levels.iter().map(|l| l.dim).max().unwrap_or(0)
    }

    pub fn point(&self, p: PointRef) -> Result<&Point> {
        self.levels
            .get(p.level)
            .and_then(|l| l.points.get(p.index))
            .ok_or_else(|| Error::DanglingReference(format!("{}:{}", p.level, p.index)))
    }

    pub fn contains(&self, p: PointRef) -> bool {
        self.point(p).is_ok()
    }

    pub fn is_free(&self, p: PointRef) -> Result<bool> {
        Ok(self.point(p)?.is_free())
    }

    /// `"level/id"`, the key used in element JSON.
    pub fn key(&self, p: PointRef) -> Result<String> {
        Ok(format!("{}/{}", p.level, self.point(p)?.id))
    }

    pub fn find(&self, level: usize, id: &str) -> Option<PointRef> {
        let index = self.levels.get(level)?.points.iter().position(|p| p.id == id)?;
        Some(PointRef::new(level, index))
    }

    pub fn parse_key(&self, key: &str) -> Result<PointRef> {
        let (l, id) = key.split_once('/').ok_or_else(|| Error::DanglingReference(key.to_string()))?;
        let level: usize = l.parse().map_err(|_| Error::DanglingReference(key.to_string()))?;
        self.find(level, id).ok_or_else(|| Error::DanglingReference(key.to_string()))
    }

    pub fn points(&self) -> Vec<PointRef> {
        self.levels
            .iter()
            .enumerate()
            .flat_map(|(l, lv)| (0..lv.points.len()).map(move |i| PointRef::new(l, i)))
            .collect()
    }

    pub fn free_points(&self) -> Vec<PointRef> {
        self.points().into_iter().filter(|&p| self.levels[p.level].points[p.index].is_free()).collect()
    }

    pub fn free_points_at(&self, level: usize) -> Vec<PointRef> {
        self.free_points().into_iter().filter(|p| p.level == level).collect()
    }

    pub fn glued_points(&self) -> Vec<PointRef> {
        self.points().into_iter().filter(|&p| !self.levels[p.level].points[p.index].is_free()).collect()
    }

    /// Free points whose values make up the value at `p`, in diagonal order.
    pub fn flatten(&self, p: PointRef) -> Result<Vec<PointRef>> {
        let mut out = Vec::new();
        self.flatten_into(p, &mut out)?;
        Ok(out)
    }

    fn flatten_into(&self, p: PointRef, out: &mut Vec<PointRef>) -> Result<()> {
        match &self.point(p)?.gluing {
            None => out.push(p),
            Some(list) => {
                for &q in list {
                    if q.level >= p.level {
                        return Err(Error::InvalidModel(format!("point {}:{} references level {}", p.level, p.index, q.level)));
                    }
                    self.flatten_into(q, out)?;
                }
            }
        }
        Ok(())
    }
}

/// Rewrites every gluing list in terms of free points only.
pub fn normalize_model(m: &FiniteDshModel) -> Result<FiniteDshModel> {
    let mut out = m.clone();
    for p in m.glued_points() {
        let flat = m.flatten(p)?;
        out.levels[p.level].points[p.index].gluing = Some(flat);
    }
    Ok(out)
}

/// Block-start positions (1-based) of every point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockStartTable {
    starts: HashMap<PointRef, Vec<usize>>,
}

impl BlockStartTable {
    pub fn get(&self, p: PointRef) -> &[usize] {
        self.starts.get(&p).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn contains(&self, p: PointRef, k: usize) -> bool {
        self.get(p).contains(&k)
    }
}

/// Free points start a single block at 1; a glued point with component
/// dimensions `d_1, .., d_t` starts blocks at `1, d_1 + 1, d_1 + d_2 + 1, ..`.
pub fn block_starts(m: &FiniteDshModel) -> Result<BlockStartTable> {
    let mut starts = HashMap::new();
    for p in m.points() {
        let mut s = Vec::new();
        let mut pos = 1;
        for q in m.flatten(p)? {
            s.push(pos);
            pos += m.dim(q.level);
        }
        starts.insert(p, s);
    }
    Ok(BlockStartTable { starts })
}

#[derive(Serialize, Deserialize)]
struct RefJson {
    level: usize,
    point: String,
}

#[derive(Serialize, Deserialize)]
struct PointJson {
    id: String,
    glued: bool,
    #[serde(default)]
    gluing: Vec<RefJson>,
}

#[derive(Serialize, Deserialize)]
struct LevelJson {
    dim: usize,
    points: Vec<PointJson>,
}

#[derive(Serialize, Deserialize)]
struct ModelJson {
    levels: Vec<LevelJson>,
}

impl Serialize for FiniteDshModel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let levels = self
            .levels
            .iter()
            .map(|lv| LevelJson {
                dim: lv.dim,
                points: lv
                    .points
                    .iter()
                    .map(|p| PointJson {
                        id: p.id.clone(),
                        glued: !p.is_free(),
                        gluing: p
                            .gluing
                            .iter()
                            .flatten()
                            .map(|r| RefJson {
                                level: r.level,
                                point: self
                                    .levels
                                    .get(r.level)
                                    .and_then(|l| l.points.get(r.index))
                                    .map(|q| q.id.clone())
                                    .unwrap_or_default(),
                            })
                            .collect(),
                    })
                    .collect(),
            })
            .collect();
        ModelJson { levels }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for FiniteDshModel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = ModelJson::deserialize(d)?;
        model_from_json(raw).map_err(serde::de::Error::custom)
    }
}

fn model_from_json(raw: ModelJson) -> Result<FiniteDshModel> {
    let index: Vec<HashMap<&str, usize>> = raw
        .levels
        .iter()
        .map(|lv| lv.points.iter().enumerate().map(|(i, p)| (p.id.as_str(), i)).collect())
        .collect();
    let mut levels = Vec::with_capacity(raw.levels.len());
    for lv in &raw.levels {
        let mut points = Vec::with_capacity(lv.points.len());
        for p in &lv.points {
            let gluing = if p.glued {
                let mut list = Vec::with_capacity(p.gluing.len());
                for r in &p.gluing {
                    let i = index
                        .get(r.level)
                        .and_then(|m| m.get(r.point.as_str()))
                        .ok_or_else(|| Error::DanglingReference(format!("{}/{}", r.level, r.point)))?;
                    list.push(PointRef::new(r.level, *i));
                }
                Some(list)
            } else {
                if !p.gluing.is_empty() {
                    return Err(Error::InvalidModel(format!("free point {:?} carries a gluing list", p.id)));
                }
                None
            };
            points.push(Point { id: p.id.clone(), gluing });
        }
        levels.push(Level { dim: lv.dim, points });
    }
    Ok(FiniteDshModel { levels })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_level() -> FiniteDshModel {
        FiniteDshModel::checked(vec![
            Level { dim: 2, points: vec![Point::free("a"), Point::free("b")] },
            Level { dim: 3, points: vec![Point::free("c")] },
            Level {
                dim: 5,
                points: vec![
                    Point::free("d"),
                    Point::glued("y", vec![PointRef::new(0, 0), PointRef::new(1, 0)]),
                ],
            },
        ])
        .unwrap()
    }

    #[test]
    fn single_level_is_valid() {
        let m = FiniteDshModel { levels: vec![Level { dim: 3, points: vec![Point::free("x")] }] };
        assert!(validate_model(&m).is_valid());
    }

    #[test]
    fn reports_wrong_gluing_sum() {
        let mut m = two_level();
        m.levels[2].points[1].gluing = Some(vec![PointRef::new(0, 0), PointRef::new(0, 1)]);
        let report = validate_model(&m);
        assert!(report.violations.iter().any(|v| v.contains("sum to 4, expected 5")));
    }

    #[test]
    fn reports_glued_level_zero_and_decreasing_dims() {
        let m = FiniteDshModel {
            levels: vec![
                Level { dim: 3, points: vec![Point::glued("x", vec![])] },
                Level { dim: 2, points: vec![Point::free("y")] },
            ],
        };
        let report = validate_model(&m);
        assert!(report.violations.iter().any(|v| v.contains("level 0 admits only free")));
        assert!(report.violations.iter().any(|v| v.contains("below level 0")));
    }

    #[test]
    fn block_starts_are_cumulative_dims() {
        let m = two_level();
        let t = block_starts(&m).unwrap();
        assert_eq!(t.get(PointRef::new(0, 1)), &[1]);
        assert_eq!(t.get(PointRef::new(2, 1)), &[1, 3]);
    }

    #[test]
    fn normalization_flattens_nested_gluing() {
        let m = FiniteDshModel {
            levels: vec![
                Level { dim: 1, points: vec![Point::free("a")] },
                Level { dim: 2, points: vec![Point::glued("b", vec![PointRef::new(0, 0), PointRef::new(0, 0)])] },
                Level { dim: 3, points: vec![Point::glued("c", vec![PointRef::new(1, 0), PointRef::new(0, 0)])] },
            ],
        };
        assert!(!validate_model(&m).is_valid());
        let n = normalize_model(&m).unwrap();
        assert!(validate_model(&n).is_valid());
        assert_eq!(n.levels[2].points[0].gluing.as_ref().unwrap().len(), 3);
    }

    #[test]
    fn json_round_trip() {
        let m = two_level();
        let s = serde_json::to_string(&m).unwrap();
        assert!(s.contains(r#"{"id":"y","glued":true,"gluing":[{"level":0,"point":"a"},{"level":1,"point":"c"}]}"#));
        let back: FiniteDshModel = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        assert!(serde_json::from_str::<FiniteDshModel>(
            r#"{"levels":[{"dim":1,"points":[{"id":"x","glued":true,"gluing":[{"level":0,"point":"zz"}]}]}]}"#
        )
        .is_err());
    }
}
