//! Suites over the unitary path constructions.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::matrixkit::random::{random_banded, random_matrix, with_zero_crosses};
use crate::matrixkit::{
    diagonal_radius, has_zero_cross, is_strictly_lower_triangular, perm_matrix, ComplexMatrix, C64, DEFAULT_ATOL,
    PATH_ATOL,
};
use crate::unitary_paths::{
    condense_path, eta_permutation, eta_product, gamma_permutation, gather_multi, gather_once, permute_product,
    triangulate_check, v_n, v_n_split, Factor, FactorProduct, ThetaVector,
};

use super::{ensure, run_trials, Outcome, Trial};

/// Trial 0 and 1 pin the endpoints, later trials sample the interior.
fn sample_parameter(i: usize, rng: &mut ChaCha8Rng) -> f64 {
    match i {
        0 => 0.0,
        1 => 1.0,
        _ => rng.random(),
    }
}

fn u(n: usize, a: usize, b: usize, t: f64) -> ComplexMatrix {
    FactorProduct::from_factors(n, vec![Factor::new(a, b, t)]).matrix()
}

pub(super) fn conj(seed: u64, stream: u64, trials: usize) -> Outcome {
    run_trials(seed, stream, trials, |i, rng| {
        let t = sample_parameter(i, rng);
        for n in 3..=10 {
            for k1 in 1..=n {
                for k2 in k1 + 1..=n {
                    for k3 in k2 + 1..=n {
                        let p = perm_matrix(&crate::matrixkit::Permutation::transposition(n, k2, k3)?);
                        let lhs = &(&p * &u(n, k1, k2, t)) * &p;
                        let d = lhs.max_abs_diff(&u(n, k1, k3, t));
                        ensure(d <= DEFAULT_ATOL, || format!("n={n} k=({k1},{k2},{k3}) t={t}: defect {d:e}"))?;
                    }
                }
            }
        }
        Ok(())
    })
}

pub(super) fn fullconj(seed: u64, stream: u64, trials: usize) -> Outcome {
    run_trials(seed, stream, trials, |i, rng| {
        let t = sample_parameter(i, rng);
        for big_n in 1..=3 {
            for n in 1usize..=10 {
                for mid in 2 * big_n..=n.saturating_sub(big_n) {
                    let p = eta_permutation(n, mid, n, big_n)?.matrix();
                    for k in big_n..=mid - big_n {
                        let lhs = eta_product(n, k, n, big_n, t)?.matrix();
                        let rhs = &(&p * &eta_product(n, k, mid, big_n, t)?.matrix()) * &p;
                        let d = lhs.max_abs_diff(&rhs);
                        ensure(d <= DEFAULT_ATOL, || format!("n={n} N={big_n} k={k} i={mid} t={t}: defect {d:e}"))?;
                    }
                }
            }
        }
        Ok(())
    })
}

pub(super) fn elementary(seed: u64, stream: u64, trials: usize) -> Outcome {
    run_trials(seed, stream, trials, |_, _| {
        for big_n in 1..=3 {
            for n in 1usize..=14 {
                for i in big_n + 1..=n.saturating_sub(big_n) {
                    let lhs = gamma_permutation(n, 1, n)?.pow(big_n).compose(&eta_permutation(n, i - 1, n, big_n)?);
                    let rhs = gamma_permutation(n, 1, i - 1)?.pow(big_n).compose(&gamma_permutation(n, i, n)?.pow(big_n));
                    ensure(lhs == rhs, || format!("n={n} N={big_n} i={i}: {:?} != {:?}", lhs.images(), rhs.images()))?;
                    let d = perm_matrix(&lhs).max_abs_diff(&perm_matrix(&rhs));
                    ensure(d <= DEFAULT_ATOL, || format!("n={n} N={big_n} i={i}: matrix defect {d:e}"))?;
                }
            }
        }
        Ok(())
    })
}

/// Random matrix with crosses at `zs` and roughly a third of the remaining
/// entries zeroed, so that the zero-pattern clauses are not vacuous.
fn sparse_with_crosses(rng: &mut ChaCha8Rng, n: usize, zs: &[usize]) -> ComplexMatrix {
    let a = random_matrix(rng, n);
    let a = a.map_entries(|z| if rng.random_bool(0.3) { C64::new(0.0, 0.0) } else { z });
    with_zero_crosses(&a, zs)
}

pub(super) fn permute(seed: u64, stream: u64, trials: usize) -> Outcome {
    run_trials(seed, stream, trials, |_, rng| {
        let n = rng.random_range(3..=12);
        let mut positions: Vec<usize> = (1..=n).collect();
        positions.shuffle(rng);
        let m = rng.random_range(1..=4.min(n - 1));
        let k = positions[0];
        let zs = positions[1..=m].to_vec();
        let mut ts: Vec<f64> = (0..m).map(|_| rng.random()).collect();
        if rng.random_bool(0.5) {
            ts[rng.random_range(0..m)] = 1.0;
        }
        let a = sparse_with_crosses(rng, n, &zs);
        let b = permute_product(n, k, &zs, &ts)?.conjugate(&a);
        let ctx = format!("n={n} k={k} zs={zs:?} ts={ts:?}");
        let moved = |x: usize| x == k || zs.contains(&x);
        for i in 1..=n {
            for j in 1..=n {
                let (bij, aij) = (b.get(i - 1, j - 1), a.get(i - 1, j - 1));
                match (moved(i), moved(j)) {
                    (false, false) => {
                        let d = (bij - aij).norm();
                        ensure(d <= DEFAULT_ATOL, || format!("{ctx}: entry ({i},{j}) changed by {d:e}"))?;
                    }
                    (true, false) => {
                        let src = a.get(k - 1, j - 1).norm();
                        ensure(src != 0.0 || bij.norm() <= DEFAULT_ATOL, || {
                            format!("{ctx}: entry ({i},{j}) = {bij} although A({k},{j}) = 0")
                        })?;
                    }
                    (false, true) => {
                        let src = a.get(i - 1, k - 1).norm();
                        ensure(src != 0.0 || bij.norm() <= DEFAULT_ATOL, || {
                            format!("{ctx}: entry ({i},{j}) = {bij} although A({i},{k}) = 0")
                        })?;
                    }
                    (true, true) => {}
                }
            }
        }
        if ts.contains(&1.0) {
            ensure(has_zero_cross(&b, k, DEFAULT_ATOL)?, || format!("{ctx}: no zero cross at {k}"))?;
        }
        Ok(())
    })
}

/// Weights with a unit entry at a cross inside every window `[k, k+M-1]`,
/// plus a few extra crosses carrying weights in (0, 1].
fn window_weights(rng: &mut ChaCha8Rng, n: usize, ks: &[usize], m: usize) -> (Vec<usize>, ThetaVector) {
    let mut values = vec![0.0; n];
    let mut crosses = Vec::new();
    for &k in ks {
        let z = rng.random_range(k..k + m);
        values[z - 1] = 1.0;
        crosses.push(z);
    }
    for _ in 0..rng.random_range(0..=2) {
        let z = rng.random_range(1..=n);
        if values[z - 1] == 0.0 {
            values[z - 1] = rng.random_range(0.05..=1.0);
            crosses.push(z);
        }
    }
    crosses.sort_unstable();
    (crosses, ThetaVector::new(values).expect("weights in [0, 1]"))
}

pub(super) fn block1(seed: u64, stream: u64, trials: usize) -> Outcome {
    run_trials(seed, stream, trials, |_, rng| {
        let n = rng.random_range(4..=16);
        let m = rng.random_range(1..=n.min(6));
        let k = rng.random_range(1..=n - m + 1);
        let (crosses, delta) = window_weights(rng, n, &[k], m);
        let a = with_zero_crosses(&random_matrix(rng, n), &crosses);
        let (v, b) = gather_once(&a, k, &delta, m)?;
        ensure(v.is_unitary(PATH_ATOL), || format!("n={n} k={k} M={m}: conjugator not unitary"))?;
        ensure(has_zero_cross(&b, k, DEFAULT_ATOL)?, || {
            format!("n={n} k={k} M={m} crosses={crosses:?}: no zero cross at {k}")
        })?;
        Ok(())
    })
}

pub(super) fn block2(seed: u64, stream: u64, trials: usize) -> Outcome {
    run_trials(seed, stream, trials, |_, rng| {
        let n = rng.random_range(8..=24);
        let m = rng.random_range(2..=5);
        let radius = rng.random_range(1..=4);
        let mut ks = Vec::new();
        let mut k = rng.random_range(1..=m);
        while k + m <= n + 1 {
            ks.push(k);
            k += m + rng.random_range(0..=2);
        }
        let (crosses, delta) = window_weights(rng, n, &ks, m);
        let a = with_zero_crosses(&random_banded(rng, n, radius), &crosses);
        let (_, b) = gather_multi(&a, &delta, &ks, m)?;
        let ctx = format!("n={n} M={m} ks={ks:?} crosses={crosses:?}");
        for &k in &ks {
            ensure(has_zero_cross(&b, k, DEFAULT_ATOL)?, || format!("{ctx}: no zero cross at {k}"))?;
        }
        let (ra, rb) = (diagonal_radius(&a, DEFAULT_ATOL), diagonal_radius(&b, DEFAULT_ATOL));
        ensure(rb + 1 <= ra + m, || format!("{ctx}: radius grew from {ra} to {rb}"))?;
        Ok(())
    })
}

pub(super) fn condense(seed: u64, stream: u64, trials: usize) -> Outcome {
    run_trials(seed, stream, trials, |_, rng| {
        let n = rng.random_range(4..=20);
        let m = rng.random_range(1..=4.min(n));
        let mut zs: Vec<usize> = rand::seq::index::sample(rng, n, m).into_iter().map(|z| z + 1).collect();
        zs.sort_unstable();
        let radius = rng.random_range(1..=4);
        let a = with_zero_crosses(&random_banded(rng, n, radius), &zs);
        let ra = diagonal_radius(&a, DEFAULT_ATOL);
        let path = condense_path(n, &zs)?;
        let ctx = format!("n={n} zs={zs:?}");
        for s in 0..50 {
            let theta = s as f64 / 49.0;
            let b = path.conjugate(&a, theta)?;
            let rb = diagonal_radius(&b, PATH_ATOL);
            ensure(rb <= ra + 2, || format!("{ctx} θ={theta}: radius grew from {ra} to {rb}"))?;
            if s % 7 == 0 {
                let defect = path.eval(theta)?.unitarity_defect();
                ensure(defect <= PATH_ATOL, || format!("{ctx} θ={theta}: unitarity defect {defect:e}"))?;
            }
            if s == 49 {
                for p in 1..=m {
                    ensure(has_zero_cross(&b, p, PATH_ATOL)?, || format!("{ctx}: no zero cross at {p} at the end"))?;
                }
            }
        }
        Ok(())
    })
}

/// A weight vector valid for the triangulating unitary: leading 1, last `N`
/// entries 0, nonzero entries at least `N` apart, a mix of 1s and fractions.
fn random_vn_theta(rng: &mut ChaCha8Rng, n: usize, big_n: usize) -> ThetaVector {
    let mut values = vec![0.0; n];
    values[0] = 1.0;
    let mut k = 1 + big_n + rng.random_range(0..=2);
    while k + big_n <= n {
        values[k - 1] = if rng.random_bool(0.5) { 1.0 } else { rng.random_range(0.05..1.0) };
        k += big_n + rng.random_range(0..=2);
    }
    ThetaVector::new(values).expect("weights in [0, 1]")
}

pub(super) fn vn(seed: u64, stream: u64, trials: usize) -> Outcome {
    run_trials(seed, stream, trials, |_, rng| {
        let big_n = rng.random_range(1..=3);
        let n = rng.random_range(big_n + 1..=20);
        let theta = random_vn_theta(rng, n, big_n);
        let full = v_n(&theta, big_n)?;
        let split = v_n_split(&theta, big_n)?;
        let ctx = || format!("n={n} N={big_n} Θ={:?}", theta.values());
        let d = full.max_abs_diff(&split);
        ensure(d <= PATH_ATOL, || format!("{}: split differs by {d:e}", ctx()))?;
        let defect = full.unitarity_defect();
        ensure(defect <= PATH_ATOL, || format!("{}: unitarity defect {defect:e}", ctx()))?;
        Ok(())
    })
}

pub(super) fn triangulate(seed: u64, stream: u64, trials: usize) -> Outcome {
    run_trials(seed, stream, trials, |_, rng| -> Trial {
        let big_n = rng.random_range(1..=3);
        let n = rng.random_range(big_n + 1..=20);
        let theta = random_vn_theta(rng, n, big_n);
        let crosses: Vec<usize> = theta.support().into_iter().flat_map(|k| k..k + big_n).collect();
        let a = with_zero_crosses(&random_banded(rng, n, big_n), &crosses);
        let t = triangulate_check(&a, &theta, big_n)?;
        ensure(is_strictly_lower_triangular(&t, PATH_ATOL), || {
            format!("n={n} N={big_n} Θ={:?}: product not strictly lower triangular", theta.values())
        })
    })
}
