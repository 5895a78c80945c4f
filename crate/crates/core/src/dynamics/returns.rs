//! Return words to a cylinder and their factorization over a shorter base.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{Error, Result};

use super::substitution::{fixed_point_prefix, Substitution};

/// Start positions of every (possibly overlapping) occurrence of `w` in `text`.
pub fn occurrences(text: &str, w: &str) -> Vec<usize> {
    if w.is_empty() || w.len() > text.len() {
        return Vec::new();
    }
    let (t, p) = (text.as_bytes(), w.as_bytes());
    (0..=t.len() - p.len()).filter(|&i| &t[i..i + p.len()] == p).collect()
}

fn return_set(text: &str, w: &str) -> Result<BTreeSet<(usize, String)>> {
    let occ = occurrences(text, w);
    if occ.is_empty() {
        return Err(Error::WordNotFound(w.to_string()));
    }
    if occ.len() < 2 {
        return Err(Error::WordNotFound(format!("{w} occurs only once in the scanned prefix")));
    }
    Ok(occ.windows(2).map(|p| (p[1] - p[0], text[p[0]..p[1]].to_string())).collect())
}

/// Distinct first-return words to `[w]`, ordered by length then lexicographically.
///
/// The set is read off the fixed-point prefix of length `scan_length` and
/// accepted only if the prefix of twice that length gives the same set.
pub fn return_words(s: &Substitution, w: &str, scan_length: usize) -> Result<Vec<String>> {
    let long = fixed_point_prefix(s, 2 * scan_length);
    let short = return_set(&long[..scan_length.min(long.len())], w)?;
    let full = return_set(&long, w)?;
    if short != full {
        return Err(Error::NotStabilized { scan_length });
    }
    Ok(full.into_iter().map(|(_, r)| r).collect())
}

/// Distinct return times to `[w]`, ascending.
pub fn return_times(s: &Substitution, w: &str, scan_length: usize) -> Result<Vec<usize>> {
    let mut t: Vec<usize> = return_words(s, w, scan_length)?.iter().map(String::len).collect();
    t.dedup();
    Ok(t)
}

/// How each return word to `[inner]` splits into return words to `[outer]`,
/// where `outer` is a proper prefix of `inner`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FactorizationMap {
    pub outer: String,
    pub inner: String,
    pub factors: BTreeMap<String, Vec<String>>,
}

impl FactorizationMap {
    /// Partial sums `S_0 = 0, S_1, .., S_{s-1}` of the factor lengths of `word`.
    pub fn offsets(&self, word: &str) -> Option<Vec<usize>> {
        let f = self.factors.get(word)?;
        let mut acc = 0;
        Some(
            f.iter()
                .map(|x| {
                    let start = acc;
                    acc += x.len();
                    start
                })
                .collect(),
        )
    }
}

/// Cuts every inner return word `r` at the occurrences of `outer` in `r · inner`
/// (the text that follows `r` in the sequence begins with `inner`).
pub fn factorize_returns(s: &Substitution, outer: &str, inner: &str, scan_length: usize) -> Result<FactorizationMap> {
    if !inner.starts_with(outer) || inner.len() <= outer.len() {
        return Err(Error::Precondition(format!("{outer:?} must be a proper prefix of {inner:?}")));
    }
    let outer_words: BTreeSet<String> = return_words(s, outer, scan_length)?.into_iter().collect();
    let mut factors = BTreeMap::new();
    for r in return_words(s, inner, scan_length)? {
        let ext = format!("{r}{inner}");
        let cuts: Vec<usize> = occurrences(&ext, outer).into_iter().filter(|&k| k <= r.len()).collect();
        if cuts.first() != Some(&0) || cuts.last() != Some(&r.len()) {
            return Err(Error::Precondition(format!("return word {r:?} is not delimited by {outer:?}")));
        }
        let parts: Vec<String> = cuts.windows(2).map(|c| ext[c[0]..c[1]].to_string()).collect();
        if let Some(bad) = parts.iter().find(|p| !outer_words.contains(*p)) {
            return Err(Error::Precondition(format!(
                "factor {bad:?} of {r:?} is not a return word to {outer:?}; increase the scan length"
            )));
        }
        factors.insert(r, parts);
    }
    Ok(FactorizationMap { outer: outer.to_string(), inner: inner.to_string(), factors })
}

/// Shortest fixed-point prefix whose return times are all at least `min_return`.
pub fn shortest_prefix_with_min_return(s: &Substitution, min_return: usize, scan_length: usize) -> Result<String> {
    let text = fixed_point_prefix(s, scan_length);
    for len in 1..scan_length {
        let w = &text[..len];
        let times = return_times(s, w, scan_length)?;
        if times[0] >= min_return {
            return Ok(w.to_string());
        }
    }
    Err(Error::NotStabilized { scan_length })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SCAN: usize = 10_000;

    #[test]
    fn fibonacci_return_words() {
        let s = Substitution::fibonacci();
        assert_eq!(return_words(&s, "0", SCAN).unwrap(), vec!["0", "01"]);
        assert_eq!(return_words(&s, "01", SCAN).unwrap(), vec!["01", "010"]);
        assert_eq!(return_times(&s, "010", SCAN).unwrap(), vec![2, 3]);
        assert_eq!(return_times(&s, "0100", SCAN).unwrap(), vec![3, 5]);
    }

    #[test]
    fn whole_prefix_has_no_return() {
        let s = Substitution::fibonacci();
        let w = fixed_point_prefix(&s, 50);
        assert!(matches!(return_words(&s, &w, 50), Err(Error::WordNotFound(_))));
        assert!(matches!(return_words(&s, "11", SCAN), Err(Error::WordNotFound(_))));
    }

    #[test]
    fn factorization_of_fibonacci_returns() {
        let s = Substitution::fibonacci();
        let f = factorize_returns(&s, "0", "01", SCAN).unwrap();
        assert_eq!(f.factors["010"], vec!["01", "0"]);
        assert_eq!(f.factors["01"], vec!["01"]);
        assert_eq!(f.offsets("010").unwrap(), vec![0, 2]);
        assert!(factorize_returns(&s, "01", "01", SCAN).is_err());
    }

    #[test]
    fn prefix_with_long_returns() {
        let s = Substitution::fibonacci();
        let w = shortest_prefix_with_min_return(&s, 5, SCAN).unwrap();
        assert_eq!(w.len(), 7);
        assert_eq!(return_times(&s, &w, SCAN).unwrap(), vec![5, 8]);
    }
}
