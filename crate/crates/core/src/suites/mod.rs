//! Seeded randomized and exhaustive property suites.
//!
//! Every trial draws from its own ChaCha stream derived from the seed, the
//! suite and the trial index, so reports are reproducible and trials can run
//! in parallel.

mod models;
mod paths;

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pipeline::Status;

/// Name, description and default trial count of one suite.
#[derive(Clone, Copy, Debug)]
pub struct SuiteInfo {
    pub name: &'static str,
    pub description: &'static str,
    pub default_trials: usize,
}

pub const SUITES: &[SuiteInfo] = &[
    SuiteInfo {
        name: "conj",
        description: "conjugating u_(k1 k2)(t) by the permutation (k2 k3) gives u_(k1 k3)(t); all k1<k2<k3, n <= 10",
        default_trials: 20,
    },
    SuiteInfo {
        name: "fullconj",
        description: "block exchange paths conjugate into each other by block exchange permutations; all valid k, i, n <= 10, N <= 3",
        default_trials: 20,
    },
    SuiteInfo {
        name: "elementary",
        description: "N-th power of the full cycle times a block exchange splits into two cycle powers; all valid i, n <= 14, N <= 3",
        default_trials: 1,
    },
    SuiteInfo {
        name: "permute",
        description: "moving zero crosses onto k: entries off the moved rows and columns are fixed, the zero pattern is confined, and a full swap leaves a cross at k",
        default_trials: 200,
    },
    SuiteInfo {
        name: "block1",
        description: "one gathering window with a unit weight produces a zero cross at its start",
        default_trials: 200,
    },
    SuiteInfo {
        name: "block2",
        description: "disjoint gathering windows produce every requested cross and grow the diagonal radius by at most M - 1",
        default_trials: 200,
    },
    SuiteInfo {
        name: "condense",
        description: "condensing path: crosses land on 1..m at the end and the radius grows by at most 2 at 50 sampled parameters",
        default_trials: 100,
    },
    SuiteInfo {
        name: "vn",
        description: "the triangulating unitary equals its block-diagonal split at the unit entries of the weight vector",
        default_trials: 100,
    },
    SuiteInfo {
        name: "triangulate",
        description: "right multiplication by the triangulating unitary makes a banded matrix with the required crosses strictly lower triangular",
        default_trials: 100,
    },
    SuiteInfo {
        name: "blockchar",
        description: "a position is a block start exactly when no element breaks the block point there",
        default_trials: 50,
    },
    SuiteInfo {
        name: "indicator",
        description: "indicator elements: diagonal in [0, 1], one nonzero per M window, zero tail, forbidden zeros, ones at offset block starts",
        default_trials: 50,
    },
    SuiteInfo {
        name: "embed",
        description: "diagonal maps between Fibonacci towers send the images of f and u g to their images one level up",
        default_trials: 1,
    },
    SuiteInfo {
        name: "simplicity",
        description: "on the Fibonacci cylinder chain every sampled single point is met by all eigenvalue lists of a model at most 6 steps later",
        default_trials: 20,
    },
];

pub fn suite_names() -> Vec<&'static str> {
    SUITES.iter().map(|s| s.name).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub trial: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub name: String,
    pub description: String,
    pub seed: u64,
    pub trials: usize,
    pub failures: usize,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
    pub runtime_ms: u64,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

/// A failed trial; library errors convert into it so `?` works inside trials.
#[derive(Debug)]
pub(crate) struct Fail(pub String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(e.to_string())
    }
}

impl From<String> for Fail {
    fn from(s: String) -> Self {
        Fail(s)
    }
}

pub(crate) type Trial = std::result::Result<(), Fail>;

pub(crate) fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Trial {
    if ok {
        Ok(())
    } else {
        Err(Fail(msg()))
    }
}

pub(crate) struct Outcome {
    failures: usize,
    first: Option<Counterexample>,
}

/// Runs `trials` independent trials in parallel; trial `i` of suite number
/// `stream` gets ChaCha stream `(stream << 32) | i` under `seed`.
pub(crate) fn run_trials(
    seed: u64,
    stream: u64,
    trials: usize,
    f: impl Fn(usize, &mut ChaCha8Rng) -> Trial + Sync,
) -> Outcome {
    let results: Vec<Trial> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream((stream << 32) | i as u64);
            f(i, &mut rng)
        })
        .collect();
    let failures = results.iter().filter(|r| r.is_err()).count();
    let first = results
        .into_iter()
        .enumerate()
        .find_map(|(i, r)| r.err().map(|Fail(message)| Counterexample { trial: i, message }));
    Outcome { failures, first }
}

/// Runs the named suite; `trials` overrides its default trial count.
pub fn run_suite(name: &str, seed: u64, trials: Option<usize>) -> Result<SuiteReport> {
    let (index, info) = SUITES
        .iter()
        .enumerate()
        .find(|(_, s)| s.name == name)
        .ok_or_else(|| Error::Precondition(format!("unknown suite {name:?}; valid suites: {}", suite_names().join(", "))))?;
    let trials = trials.unwrap_or(info.default_trials);
    let stream = index as u64 + 1;
    let start = Instant::now();
    let outcome = match name {
        "conj" => paths::conj(seed, stream, trials),
        "fullconj" => paths::fullconj(seed, stream, trials),
        "elementary" => paths::elementary(seed, stream, trials),
        "permute" => paths::permute(seed, stream, trials),
        "block1" => paths::block1(seed, stream, trials),
        "block2" => paths::block2(seed, stream, trials),
        "condense" => paths::condense(seed, stream, trials),
        "vn" => paths::vn(seed, stream, trials),
        "triangulate" => paths::triangulate(seed, stream, trials),
        "blockchar" => models::blockchar(seed, stream, trials),
        "indicator" => models::indicator(seed, stream, trials),
        "embed" => models::embed(seed, stream, trials)?,
        "simplicity" => models::simplicity(seed, stream, trials)?,
        _ => unreachable!("suite table and dispatch agree"),
    };
    Ok(SuiteReport {
        name: info.name.to_string(),
        description: info.description.to_string(),
        seed,
        trials,
        failures: outcome.failures,
        status: if outcome.failures == 0 { Status::Pass } else { Status::Fail },
        counterexample: outcome.first,
        runtime_ms: start.elapsed().as_millis() as u64,
    })
}

/// Runs several suites in order.
pub fn run_suites(names: &[&str], seed: u64, trials: Option<usize>) -> Result<Vec<SuiteReport>> {
    names.iter().map(|n| run_suite(n, seed, trials)).collect()
}
