use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A vector in `[0, 1]^n`, indexed from position 1.
///
/// Used both as the gathering weights `Δ` and as the parameter `Θ` of the
/// triangulating unitary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ThetaVector {
    values: Vec<f64>,
}

impl TryFrom<Vec<f64>> for ThetaVector {
    type Error = Error;
    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

impl From<ThetaVector> for Vec<f64> {
    fn from(t: ThetaVector) -> Self {
        t.values
    }
}

impl ThetaVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some((i, &v)) = values.iter().enumerate().find(|(_, v)| !(0.0..=1.0).contains(*v)) {
            return Err(Error::InvalidTheta(format!("entry {} = {v} lies outside [0, 1]", i + 1)));
        }
        Ok(Self { values })
    }

    pub fn zeros(n: usize) -> Self {
        Self { values: vec![0.0; n] }
    }

    /// Ones exactly at the 1-based `positions`, zeros elsewhere.
    pub fn indicator(n: usize, positions: &[usize]) -> Result<Self> {
        let mut values = vec![0.0; n];
        for &k in positions {
            if k == 0 || k > n {
                return Err(Error::IndexOutOfRange { index: k, n });
            }
            values[k - 1] = 1.0;
        }
        Ok(Self { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Entry at 1-based position `k`.
    pub fn at(&self, k: usize) -> f64 {
        self.values[k - 1]
    }

    /// Positions (1-based) holding exactly 1.
    pub fn ones(&self) -> Vec<usize> {
        (1..=self.len()).filter(|&k| self.at(k) == 1.0).collect()
    }

    /// Positions (1-based) holding a positive entry.
    pub fn support(&self) -> Vec<usize> {
        (1..=self.len()).filter(|&k| self.at(k) > 0.0).collect()
    }

    /// Checks the three shape constraints needed by the triangulating unitary
    /// with block size `big_n`: first entry 1, last `big_n` entries 0, and at
    /// most one nonzero entry in every `big_n` consecutive entries.
    pub fn validate_for_vn(&self, big_n: usize) -> Result<()> {
        let n = self.len();
        if big_n == 0 {
            return Err(Error::InvalidTheta("block size N must be positive".into()));
        }
        if n <= big_n {
            return Err(Error::InvalidTheta(format!("length {n} must exceed block size {big_n}")));
        }
        if self.values[0] != 1.0 {
            return Err(Error::InvalidTheta(format!("first entry must be 1, found {}", self.values[0])));
        }
        if let Some(k) = (n - big_n + 1..=n).find(|&k| self.at(k) != 0.0) {
            return Err(Error::InvalidTheta(format!("last {big_n} entries must vanish, entry {k} = {}", self.at(k))));
        }
        let support = self.support();
        if let Some(w) = support.windows(2).find(|w| w[1] - w[0] < big_n) {
            return Err(Error::InvalidTheta(format!(
                "entries {} and {} are both nonzero within {big_n} consecutive entries",
                w[0], w[1]
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation_names_the_failing_constraint() {
        let ok = ThetaVector::new(vec![1.0, 0.0, 0.0, 0.4, 0.0, 0.0, 0.0]).unwrap();
        ok.validate_for_vn(3).unwrap();
        let first = ThetaVector::new(vec![0.5, 0.0, 0.0, 0.0]).unwrap();
        assert!(format!("{}", first.validate_for_vn(2).unwrap_err()).contains("first entry"));
        let tail = ThetaVector::new(vec![1.0, 0.0, 0.0, 0.2]).unwrap();
        assert!(format!("{}", tail.validate_for_vn(2).unwrap_err()).contains("last 2"));
        let close = ThetaVector::new(vec![1.0, 0.3, 0.0, 0.0, 0.0]).unwrap();
        assert!(format!("{}", close.validate_for_vn(2).unwrap_err()).contains("consecutive"));
        assert!(ThetaVector::new(vec![1.5]).is_err());
        assert!(ThetaVector::new(vec![f64::NAN]).is_err());
    }

    #[test]
    fn json_is_a_plain_array() {
        let t = ThetaVector::indicator(4, &[1, 3]).unwrap();
        assert_eq!(serde_json::to_string(&t).unwrap(), "[1.0,0.0,1.0,0.0]");
        assert!(serde_json::from_str::<ThetaVector>("[2.0]").is_err());
    }
}
