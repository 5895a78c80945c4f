//! Suites over finite models, indicators and tower chains.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use rand::seq::IndexedRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::dsh_model::random::{random_model, RandomModelConfig};
use crate::dsh_model::{
    block_starts, build_indicator, check_simplicity_condition, norm_dist, witness_no_block_point, Element,
    FiniteDshModel, PointRef,
};
use crate::dynamics::{
    factorize_returns, generator_f_element, generator_ug_element, occurrences, tower_chain, Substitution, WordFn,
};
use crate::error::{Error, Result};
use crate::matrixkit::{has_block_point, is_strictly_lower_triangular, C64, DEFAULT_ATOL};

use super::{ensure, run_trials, Fail, Outcome, Trial};

const EMBED_SCAN: usize = 4000;
const FIB_PREFIX_LENGTHS: [usize; 9] = [1, 2, 3, 5, 8, 13, 21, 34, 55];
/// Largest number of chain steps allowed between a point and its witness.
const SIMPLICITY_DEPTH: usize = 6;

pub(super) fn blockchar(seed: u64, stream: u64, trials: usize) -> Outcome {
    run_trials(seed, stream, trials, |_, rng| {
        let model = Arc::new(random_model(rng, &RandomModelConfig::default()));
        let table = block_starts(&model)?;
        for p in model.points() {
            let key = model.key(p)?;
            for k in 1..=model.dim(p.level) {
                match witness_no_block_point(&model, p, k) {
                    Err(Error::NoWitness { .. }) => {
                        ensure(table.contains(p, k), || format!("{key}: no witness at {k}, which is not a block start"))?;
                    }
                    Err(e) => return Err(e.into()),
                    Ok(w) => {
                        ensure(!table.contains(p, k), || format!("{key}: witness produced at block start {k}"))?;
                        ensure(!has_block_point(&w.eval(p)?, k, 0.0)?, || format!("{key}: witness keeps a block point at {k}"))?;
                    }
                }
            }
        }
        for _ in 0..100 {
            let e = Element::random(&model, rng);
            for p in model.points() {
                let v = e.eval(p)?;
                for &k in table.get(p) {
                    ensure(has_block_point(&v, k, 0.0)?, || {
                        format!("{}: random element has no block point at block start {k}", model.key(p).unwrap_or_default())
                    })?;
                }
            }
        }
        Ok(())
    })
}

/// Increasing offsets with gaps at least `m`, last one at most `n1 - m`.
fn random_offsets(rng: &mut ChaCha8Rng, n1: usize, m: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut o = rng.random_range(0..=2.min(n1 - m));
    while o + m <= n1 {
        out.push(o);
        if rng.random_bool(0.3) {
            break;
        }
        o += m + rng.random_range(0..=1);
    }
    out
}

fn check_indicator(
    model: &Arc<FiniteDshModel>,
    e: &Element,
    m: usize,
    offsets: &[usize],
    forbidden: &[(PointRef, usize)],
) -> Trial {
    let table = block_starts(model)?;
    for p in model.points() {
        let key = model.key(p)?;
        let v = e.eval(p)?;
        let n = v.dim();
        for i in 0..n {
            for j in 0..n {
                ensure(i == j || v.get(i, j) == C64::new(0.0, 0.0), || format!("{key}: off-diagonal entry ({}, {})", i + 1, j + 1))?;
            }
        }
        let d: Vec<C64> = v.diagonal();
        if let Some(k) = (0..n).find(|&k| d[k].im != 0.0 || !(0.0..=1.0).contains(&d[k].re)) {
            return Err(Fail(format!("{key}: diagonal entry {} = {} outside [0, 1]", k + 1, d[k])));
        }
        let nonzero: Vec<usize> = (1..=n).filter(|&k| d[k - 1] != C64::new(0.0, 0.0)).collect();
        if let Some(w) = nonzero.windows(2).find(|w| w[1] - w[0] < m) {
            return Err(Fail(format!("{key}: nonzero entries {} and {} within {m} consecutive", w[0], w[1])));
        }
        if let Some(&k) = nonzero.iter().find(|&&k| k + m > n + 1) {
            return Err(Fail(format!("{key}: entry {k} lies in the last {} positions", m - 1)));
        }
        for &(q, k) in forbidden {
            if q == p {
                ensure(d[k - 1] == C64::new(0.0, 0.0), || format!("{key}: forbidden position {k} is nonzero"))?;
            }
        }
        for &j in table.get(p) {
            for &o in offsets {
                ensure(d[j + o - 1] == C64::new(1.0, 0.0), || format!("{key}: position {} (block start {j} + {o}) is not 1", j + o))?;
            }
        }
    }
    Ok(())
}

pub(super) fn indicator(seed: u64, stream: u64, trials: usize) -> Outcome {
    run_trials(seed, stream, trials, |_, rng| {
        let model = Arc::new(random_model(rng, &RandomModelConfig::default()));
        let n1 = model.dim(0);
        let m = rng.random_range(1..n1);
        let offsets = random_offsets(rng, n1, m);
        let table = block_starts(&model)?;
        let points = model.points();
        let mut forbidden = Vec::new();
        for _ in 0..4 {
            let p = *points.choose(rng).expect("models have points");
            let k = rng.random_range(1..=model.dim(p.level));
            let forced = table.get(p).iter().any(|&j| offsets.iter().any(|&o| j + o == k));
            if forced {
                match build_indicator(&model, m, &offsets, &[(p, k)]) {
                    Err(Error::Infeasible(_)) => {}
                    other => {
                        return Err(Fail(format!(
                            "forbidding forced position {k} of {} gave {:?} instead of an infeasibility report",
                            model.key(p)?,
                            other.map(|_| ())
                        )))
                    }
                }
            } else {
                forbidden.push((p, k));
            }
        }
        let e = build_indicator(&model, m, &offsets, &forbidden)?;
        check_indicator(&model, &e, m, &offsets, &forbidden)
            .map_err(|Fail(msg)| Fail(format!("M={m} offsets={offsets:?}: {msg}")))
    })
}

/// A random function of the first `arity` binary symbols; with `vanish_on`
/// set it is zero on windows starting with that prefix.
fn random_word_fn(rng: &mut ChaCha8Rng, arity: usize, vanish_on: Option<&str>) -> WordFn {
    let mut table = HashMap::new();
    for bits in 0..1usize << arity {
        let w: String = (0..arity).map(|b| if bits >> (arity - 1 - b) & 1 == 1 { '1' } else { '0' }).collect();
        let z = if vanish_on.is_some_and(|p| w.starts_with(p)) {
            C64::new(0.0, 0.0)
        } else {
            C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        };
        table.insert(w, z);
    }
    WordFn::new(arity, move |w| table.get(w).copied().unwrap_or_default())
}

pub(super) fn embed(seed: u64, stream: u64, trials: usize) -> Result<Outcome> {
    let s = Substitution::fibonacci();
    let bases = ["0", "01", "0100101"];
    let (towers, chain) = tower_chain(&s, &bases, &[3, 3, 7], None, EMBED_SCAN)?;
    let maps: Vec<(usize, usize)> = vec![(0, 1), (1, 2), (0, 2)];
    let composed = maps.iter().map(|&(i, j)| chain.composed(i, j)).collect::<Result<Vec<_>>>()?;
    Ok(run_trials(seed, stream, trials, |_, rng| {
        for w in bases.windows(2) {
            let f = factorize_returns(&s, w[0], w[1], EMBED_SCAN)?;
            for (r, parts) in &f.factors {
                let total: usize = parts.iter().map(String::len).sum();
                ensure(total == r.len(), || format!("factors of {r:?} have total length {total}"))?;
                let offsets = f.offsets(r).expect("word is factored");
                let visits = occurrences(&format!("{r}{}", w[1]), w[0]);
                ensure(offsets.iter().all(|o| visits.contains(o)), || {
                    format!("offsets {offsets:?} of {r:?} are not all occurrences of {:?}", w[0])
                })?;
            }
        }
        let fs: Vec<WordFn> = (0..5).map(|_| {
            let arity = rng.random_range(0..=3);
            random_word_fn(rng, arity, None)
        }).collect();
        let gs: Vec<WordFn> = (0..3).map(|_| {
            let arity = rng.random_range(1..=3);
            random_word_fn(rng, arity, Some("0"))
        }).collect();
        for ((i, j), d) in maps.iter().zip(&composed) {
            for (a, f) in fs.iter().enumerate() {
                let dist = norm_dist(&d.apply(&generator_f_element(f, &towers[*i])?)?, &generator_f_element(f, &towers[*j])?)?;
                ensure(dist <= DEFAULT_ATOL, || format!("f #{a} (arity {}) map {i}->{j}: distance {dist:e}", f.arity()))?;
            }
            for (a, g) in gs.iter().enumerate() {
                let source = generator_ug_element(g, &towers[*i])?;
                for p in towers[*i].model.free_points() {
                    ensure(is_strictly_lower_triangular(source.free_value(p)?, 0.0), || format!("u g #{a} is not strictly lower triangular"))?;
                }
                let dist = norm_dist(&d.apply(&source)?, &generator_ug_element(g, &towers[*j])?)?;
                ensure(dist <= DEFAULT_ATOL, || format!("u g #{a} (arity {}) map {i}->{j}: distance {dist:e}", g.arity()))?;
            }
        }
        Ok(())
    }))
}

/// Towers over Fibonacci prefixes of Fibonacci lengths 1 to 55.
pub(crate) fn fibonacci_cylinder_chain() -> Result<(Vec<crate::dynamics::TowerModel>, crate::dsh_model::Chain)> {
    let s = Substitution::fibonacci();
    let text = crate::dynamics::fixed_point_prefix(&s, 64);
    let bases: Vec<&str> = FIB_PREFIX_LENGTHS.iter().map(|&l| &text[..l]).collect();
    let horizons: Vec<usize> = FIB_PREFIX_LENGTHS.iter().map(|&l| l.max(2)).collect();
    tower_chain(&s, &bases, &horizons, None, EMBED_SCAN)
}

pub(super) fn simplicity(seed: u64, stream: u64, trials: usize) -> Result<Outcome> {
    let (_, chain) = fibonacci_cylinder_chain()?;
    Ok(run_trials(seed, stream, trials, |_, rng| {
        let i = rng.random_range(0..chain.len() - SIMPLICITY_DEPTH);
        let free = chain.models[i].free_points();
        let p = *free.choose(rng).expect("towers have free points");
        let found = check_simplicity_condition(&chain, i, &BTreeSet::from([p]))?;
        ensure(found.is_some_and(|j| j - i <= SIMPLICITY_DEPTH), || {
            format!(
                "model {i}, point {}: witness {found:?} is not within {SIMPLICITY_DEPTH} steps",
                chain.models[i].key(p).unwrap_or_default()
            )
        })
    }))
}
