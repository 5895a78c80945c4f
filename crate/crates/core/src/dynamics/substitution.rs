use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A substitution on printable ASCII symbols with a fixed-point seed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SubstitutionJson", into = "SubstitutionJson")]
pub struct Substitution {
    alphabet: Vec<char>,
    rules: BTreeMap<char, String>,
    seed: char,
}

#[derive(Serialize, Deserialize)]
struct SubstitutionJson {
    alphabet: Vec<String>,
    rules: BTreeMap<String, String>,
    seed: String,
}

fn single_char(s: &str) -> Result<char> {
    let mut it = s.chars();
    match (it.next(), it.next()) {
        (Some(c), None) => Ok(c),
        _ => Err(Error::Substitution(format!("symbol {s:?} must be a single character"))),
    }
}

impl TryFrom<SubstitutionJson> for Substitution {
    type Error = Error;
    fn try_from(j: SubstitutionJson) -> Result<Self> {
        let alphabet = j.alphabet.iter().map(|s| single_char(s)).collect::<Result<Vec<_>>>()?;
        let rules = j.rules.iter().map(|(k, v)| Ok((single_char(k)?, v.clone()))).collect::<Result<BTreeMap<_, _>>>()?;
        Substitution::new(alphabet, rules, single_char(&j.seed)?)
    }
}

impl From<Substitution> for SubstitutionJson {
    fn from(s: Substitution) -> Self {
        SubstitutionJson {
            alphabet: s.alphabet.iter().map(|c| c.to_string()).collect(),
            rules: s.rules.iter().map(|(k, v)| (k.to_string(), v.clone())).collect(),
            seed: s.seed.to_string(),
        }
    }
}

impl Substitution {
    /// Validates the rules: every symbol has a nonempty image over the
    /// alphabet, the incidence matrix is primitive, and the seed's image
    /// starts with the seed and is longer than one symbol.
    pub fn new(alphabet: Vec<char>, rules: BTreeMap<char, String>, seed: char) -> Result<Self> {
        if alphabet.is_empty() {
            return Err(Error::Substitution("empty alphabet".into()));
        }
        if let Some(c) = alphabet.iter().find(|c| !c.is_ascii_graphic()) {
            return Err(Error::Substitution(format!("symbol {c:?} is not a printable ASCII character")));
        }
        for a in &alphabet {
            let image = rules.get(a).ok_or_else(|| Error::Substitution(format!("no rule for {a:?}")))?;
            if image.is_empty() {
                return Err(Error::Substitution(format!("rule for {a:?} is empty")));
            }
            if let Some(c) = image.chars().find(|c| !alphabet.contains(c)) {
                return Err(Error::Substitution(format!("rule for {a:?} uses unknown symbol {c:?}")));
            }
        }
        if let Some(k) = rules.keys().find(|k| !alphabet.contains(k)) {
            return Err(Error::Substitution(format!("rule given for unknown symbol {k:?}")));
        }
        let s = Self { alphabet, rules, seed };
        let image = s.rules.get(&seed).ok_or_else(|| Error::Substitution(format!("seed {seed:?} is not in the alphabet")))?;
        if !image.starts_with(seed) || image.chars().count() < 2 {
            return Err(Error::Substitution(format!("seed {seed:?} does not generate a fixed point")));
        }
        if !s.is_primitive() {
            return Err(Error::Substitution("incidence matrix is not primitive".into()));
        }
        Ok(s)
    }

    pub fn fibonacci() -> Self {
        Self::new(vec!['0', '1'], BTreeMap::from([('0', "01".into()), ('1', "0".into())]), '0').expect("valid")
    }

    pub fn thue_morse() -> Self {
        Self::new(vec!['0', '1'], BTreeMap::from([('0', "01".into()), ('1', "10".into())]), '0').expect("valid")
    }

    pub fn alphabet(&self) -> &[char] {
        &self.alphabet
    }

    pub fn seed(&self) -> char {
        self.seed
    }

    pub fn apply(&self, word: &str) -> String {
        word.chars().map(|c| self.rules[&c].as_str()).collect()
    }

    /// Some power of the 0/1 incidence pattern is all-positive; checked up to
    /// the bound `(d-1)^2 + 1`.
    fn is_primitive(&self) -> bool {
        let d = self.alphabet.len();
        let idx = |c: char| self.alphabet.iter().position(|&a| a == c).expect("known symbol");
        let mut base = vec![vec![false; d]; d];
        for (i, a) in self.alphabet.iter().enumerate() {
            for c in self.rules[a].chars() {
                base[i][idx(c)] = true;
            }
        }
        let mut power = base.clone();
        for _ in 0..(d - 1) * (d - 1) + 1 {
            if power.iter().all(|row| row.iter().all(|&x| x)) {
                return true;
            }
            power = (0..d).map(|i| (0..d).map(|j| (0..d).any(|k| power[i][k] && base[k][j])).collect()).collect();
        }
        false
    }
}

/// Length-`len` prefix of the fixed point generated from the seed.
pub fn fixed_point_prefix(s: &Substitution, len: usize) -> String {
    let mut w = s.seed.to_string();
    while w.len() < len {
        w = s.apply(&w);
    }
    w.chars().take(len).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_prefixes() {
        assert_eq!(fixed_point_prefix(&Substitution::fibonacci(), 13), "0100101001001");
        assert_eq!(fixed_point_prefix(&Substitution::thue_morse(), 8), "01101001");
        assert_eq!(fixed_point_prefix(&Substitution::fibonacci(), 1), "0");
    }

    #[test]
    fn rejects_bad_rules() {
        let periodic = Substitution::new(vec!['a', 'b'], BTreeMap::from([('a', "ab".into()), ('b', "b".into())]), 'a');
        assert!(periodic.is_err());
        let no_seed = Substitution::new(vec!['0', '1'], BTreeMap::from([('0', "10".into()), ('1', "0".into())]), '0');
        assert!(no_seed.is_err());
    }

    #[test]
    fn json_round_trip() {
        let s = Substitution::fibonacci();
        let j = serde_json::to_string(&s).unwrap();
        assert_eq!(j, r#"{"alphabet":["0","1"],"rules":{"0":"01","1":"0"},"seed":"0"}"#);
        assert_eq!(serde_json::from_str::<Substitution>(&j).unwrap(), s);
    }
}
