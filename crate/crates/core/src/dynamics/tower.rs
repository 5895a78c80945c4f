use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;

use crate::dsh_model::{FiniteDshModel, Level, Point, PointRef};
use crate::error::{Error, Result};

use super::returns::{occurrences, return_words};
use super::substitution::{fixed_point_prefix, Substitution};

/// First-return tower over the cylinder `[base]`.
///
/// Level `i` has dimension `n_i`, the `i`-th smallest return time. Its points
/// are words of length `n_i + horizon` read from the sequence at occurrences
/// of `base` whose next occurrence is `n_i` symbols later. Point ids are the
/// words themselves.
#[derive(Clone, Debug)]
pub struct TowerModel {
    pub substitution: Substitution,
    pub base: String,
    pub horizon: usize,
    pub return_words: Vec<String>,
    pub model: Arc<FiniteDshModel>,
    index: HashMap<String, PointRef>,
}

#[derive(Serialize)]
struct DynamicsMeta<'a> {
    base: &'a str,
    return_words: &'a [String],
    horizon: usize,
}

#[derive(Serialize)]
struct TowerExport<'a> {
    #[serde(flatten)]
    model: &'a FiniteDshModel,
    dynamics: DynamicsMeta<'a>,
}

impl TowerModel {
    pub fn point_of_word(&self, word: &str) -> Option<PointRef> {
        self.index.get(word).copied()
    }

    pub fn word(&self, p: PointRef) -> &str {
        &self.model.levels[p.level].points[p.index].id
    }

    pub fn return_times(&self) -> Vec<usize> {
        self.model.levels.iter().map(|l| l.dim).collect()
    }

    /// Model JSON with an extra `"dynamics"` block.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(TowerExport {
            model: &self.model,
            dynamics: DynamicsMeta { base: &self.base, return_words: &self.return_words, horizon: self.horizon },
        })
        .expect("tower serializes")
    }
}

/// Builds the tower over `[base]`. `horizon` must cover `base` so that every
/// point word shows the next visit to the cylinder; `max_points_per_level`
/// keeps the first distinct words in order of appearance.
pub fn build_tower_model(
    s: &Substitution,
    base: &str,
    horizon: usize,
    max_points_per_level: Option<usize>,
    scan_length: usize,
) -> Result<TowerModel> {
    if horizon < base.len() {
        return Err(Error::Horizon(format!("horizon {horizon} is shorter than the base word {base:?}")));
    }
    let words = return_words(s, base, scan_length)?;
    let mut times: Vec<usize> = words.iter().map(String::len).collect();
    times.dedup();
    let text = fixed_point_prefix(s, 2 * scan_length);
    let occ = occurrences(&text, base);
    let mut levels: Vec<Level> = times.iter().map(|&dim| Level { dim, points: Vec::new() }).collect();
    let mut index = HashMap::new();
    for pair in occ.windows(2) {
        let (p, n) = (pair[0], pair[1] - pair[0]);
        if p + n + horizon > text.len() {
            break;
        }
        let l = times.binary_search(&n).expect("gap is a return time");
        if max_points_per_level.is_some_and(|cap| levels[l].points.len() >= cap) {
            continue;
        }
        let word = &text[p..p + n + horizon];
        if index.contains_key(word) {
            continue;
        }
        index.insert(word.to_string(), PointRef::new(l, levels[l].points.len()));
        levels[l].points.push(Point::free(word));
    }
    if let Some(l) = levels.iter().position(|l| l.points.is_empty()) {
        return Err(Error::NotStabilized { scan_length: scan_length.max(times[l]) });
    }
    Ok(TowerModel {
        substitution: s.clone(),
        base: base.to_string(),
        horizon,
        return_words: words,
        model: Arc::new(FiniteDshModel::checked(levels)?),
        index,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fibonacci_base_zero() {
        let t = build_tower_model(&Substitution::fibonacci(), "0", 3, None, 10_000).unwrap();
        assert_eq!(t.return_times(), vec![1, 2]);
        for p in t.model.points() {
            let w = t.word(p);
            let n = t.model.dim(p.level);
            assert!(w.starts_with("0") && w[n..].starts_with("0"));
            assert!(!w[1..n].contains('0'));
        }
    }

    #[test]
    fn cap_keeps_one_word_per_level() {
        let t = build_tower_model(&Substitution::fibonacci(), "01", 5, Some(1), 10_000).unwrap();
        assert!(t.model.levels.iter().all(|l| l.points.len() == 1));
    }

    #[test]
    fn thue_morse_levels_follow_return_times() {
        let s = Substitution::thue_morse();
        let t = build_tower_model(&s, "0", 2, None, 10_000).unwrap();
        assert_eq!(t.return_times(), vec![1, 2, 3]);
    }

    #[test]
    fn short_horizon_rejected() {
        assert!(matches!(build_tower_model(&Substitution::fibonacci(), "010", 2, None, 1000), Err(Error::Horizon(_))));
    }

    #[test]
    fn export_carries_dynamics_block() {
        let t = build_tower_model(&Substitution::fibonacci(), "0", 1, None, 1000).unwrap();
        let v = t.to_json();
        assert_eq!(v["dynamics"]["base"], "0");
        assert_eq!(v["levels"].as_array().unwrap().len(), 2);
    }
}
