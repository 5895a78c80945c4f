use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

/// Outcome of one structural check, with the first offending point or entry on failure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PredicateResult {
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl PredicateResult {
    pub fn pass() -> Self {
        Self { status: Status::Pass, witness: None }
    }

    pub fn fail(witness: impl Into<String>) -> Self {
        Self { status: Status::Fail, witness: Some(witness.into()) }
    }

    pub fn from_check(ok: bool, witness: impl FnOnce() -> String) -> Self {
        if ok {
            Self::pass()
        } else {
            Self::fail(witness())
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

pub type Predicates = BTreeMap<String, PredicateResult>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub name: String,
    pub unitary_ids: Vec<String>,
    /// Norm distance this stage moved the element by.
    pub distance: f64,
    pub predicates: Predicates,
}

impl StageRecord {
    pub fn new(name: &str, unitary_ids: &[&str], distance: f64, predicates: Predicates) -> Self {
        Self {
            name: name.to_string(),
            unitary_ids: unitary_ids.iter().map(|s| s.to_string()).collect(),
            distance,
            predicates,
        }
    }

    pub fn passed(&self) -> bool {
        self.predicates.values().all(PredicateResult::passed)
    }
}

/// Chain positions and constants chosen by the run.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PipelineParameters {
    /// Chain index of the input element.
    pub source_index: usize,
    /// First chain index where every eigenvalue list meets the singular set.
    pub simple_index: Option<usize>,
    /// Chain index where the output lives.
    pub target_index: usize,
    /// Largest dimension of the source model.
    pub r: usize,
    /// Cross spacing.
    pub m: usize,
    /// Crosses per block start.
    pub n: usize,
    /// Soft-threshold level used to open block points.
    pub block_delta: f64,
    /// Inversion step size.
    pub invert_delta: f64,
    pub inversion: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateSummary {
    pub epsilon: f64,
    /// Measured distance between the pushed-forward input and the output.
    pub total_distance: f64,
    pub stage_distance_sum: f64,
    /// Smallest singular value of the output over every point.
    pub min_singular_value: f64,
    /// Smallest singular value `T + δ1` would have had, for comparison.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scalar_shift_min_singular_value: Option<f64>,
    pub runtime_ms: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineCertificate {
    pub input_element: String,
    pub output_element: String,
    pub parameters: PipelineParameters,
    pub stages: Vec<StageRecord>,
    pub summary: CertificateSummary,
}

impl PipelineCertificate {
    /// Every predicate passes, the output is within `ε` and it is invertible.
    pub fn passed(&self) -> bool {
        self.stages.iter().all(StageRecord::passed)
            && self.summary.total_distance < self.summary.epsilon
            && self.summary.min_singular_value > 0.0
    }

    /// `(stage, predicate, witness)` for every failing predicate.
    pub fn failures(&self) -> Vec<(String, String, Option<String>)> {
        let mut out = Vec::new();
        for s in &self.stages {
            for (name, p) in &s.predicates {
                if !p.passed() {
                    out.push((s.name.clone(), name.clone(), p.witness.clone()));
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("certificate serializes")
    }
}
