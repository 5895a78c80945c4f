use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use dsh_lab::dsh_model::{block_starts, Chain, DiagonalMap, Element, FiniteDshModel, Level, Point, PointRef};
use dsh_lab::dynamics::{shortest_prefix_with_min_return, tower_chain, Substitution, TowerModel};
use dsh_lab::matrixkit::random::{random_banded, random_matrix, with_zero_crosses};
use dsh_lab::matrixkit::{
    diagonal_radius, has_zero_cross, is_strictly_lower_triangular, min_singular_value, op_norm, svd, ComplexMatrix,
    Permutation, C64, PATH_ATOL,
};
use dsh_lab::pipeline::*;
use dsh_lab::Error;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn single(dim: usize, ids: &[&str]) -> Arc<FiniteDshModel> {
    Arc::new(FiniteDshModel::checked(vec![Level { dim, points: ids.iter().map(|&i| Point::free(i)).collect() }]).unwrap())
}

fn truncate(a: &ComplexMatrix) -> ComplexMatrix {
    let (u, mut s, w) = svd(a);
    *s.last_mut().unwrap() = 0.0;
    let d: Vec<C64> = s.iter().map(|&x| C64::new(x, 0.0)).collect();
    &(&u * &ComplexMatrix::from_diagonal(&d)) * &w.adjoint()
}

fn all_pass(p: &Predicates) -> bool {
    p.values().all(PredicateResult::passed)
}

/// `a` and `b` scalars; two-dim points listing `[a, b]` and `[a, a]`; then a
/// level of 17 blocks and a glued level above it, so the crosses have room.
fn glued_chain() -> Chain {
    let m0 = single(1, &["a", "b"]);
    let m1 = single(2, &["x", "y"]);
    let m2 = Arc::new(
        FiniteDshModel::checked(vec![
            Level { dim: 34, points: vec![Point::free("p"), Point::free("q")] },
            Level {
                dim: 68,
                points: vec![Point::free("r"), Point::glued("s", vec![PointRef::new(0, 0), PointRef::new(0, 1)])],
            },
        ])
        .unwrap(),
    );
    let (a, b) = (PointRef::new(0, 0), PointRef::new(0, 1));
    let (x, y) = (PointRef::new(0, 0), PointRef::new(0, 1));
    let d0 = DiagonalMap::new(Arc::clone(&m0), Arc::clone(&m1), HashMap::from([(x, vec![a, b]), (y, vec![a, a])])).unwrap();
    let lists = HashMap::from([
        (PointRef::new(0, 0), (0..17).map(|i| if i % 3 == 0 { y } else { x }).collect()),
        (PointRef::new(0, 1), vec![x; 17]),
        (PointRef::new(1, 0), (0..34).map(|i| if i % 2 == 0 { x } else { y }).collect()),
    ]);
    let d1 = DiagonalMap::new(Arc::clone(&m1), Arc::clone(&m2), lists).unwrap();
    Chain::new(vec![m0, m1, m2], vec![d0, d1]).unwrap()
}

fn fibonacci_chain() -> (Vec<TowerModel>, Chain) {
    let s = Substitution::fibonacci();
    let w = shortest_prefix_with_min_return(&s, 67, 10_000).unwrap();
    tower_chain(&s, &["0", "01", &w], &[1, 2, w.len()], Some(3), 10_000).unwrap()
}

#[test]
fn find_singular_point_cases() {
    let m = Arc::new(
        FiniteDshModel::checked(vec![
            Level { dim: 2, points: vec![Point::free("a"), Point::free("b")] },
            Level { dim: 3, points: vec![Point::free("c")] },
        ])
        .unwrap(),
    );
    assert_eq!(find_singular_point(&Element::identity(&m), 1e-9), None);
    let b = PointRef::new(0, 1);
    let zeroed = Element::identity(&m).map(|p, v| if p == b { ComplexMatrix::zeros(2) } else { v.clone() });
    assert_eq!(find_singular_point(&zeroed, 1e-9), Some(b));
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let c = PointRef::new(1, 0);
    let planted = Element::random(&m, &mut rng).map(|p, v| if p == c { truncate(v) } else { v.clone() });
    assert_eq!(find_singular_point(&planted, 1e-9), Some(c));
}

#[test]
fn zero_value_needs_no_rotation() {
    let m = single(3, &["a", "b"]);
    let a = PointRef::new(0, 0);
    let e = Element::identity(&m).map(|p, v| if p == a { ComplexMatrix::zeros(3) } else { v.clone() });
    let zc = make_zero_cross(&e, 0.1).unwrap();
    assert_eq!(zc.perturbed, e);
    assert_eq!(zc.v_left, Element::identity(&m));
    assert_eq!(zc.v_right, Element::identity(&m));
    assert_eq!(zc.points, BTreeSet::from([a]));
    assert_eq!(zc.delta.eval(a).unwrap(), ComplexMatrix::from_real_diagonal(&[1.0, 0.0, 0.0]));
    assert_eq!(zc.delta.eval(PointRef::new(0, 1)).unwrap(), ComplexMatrix::zeros(3));
    assert!(all_pass(&verify_zero_cross(&zc, 0.1).unwrap()));
}

#[test]
fn planted_rank_deficiency_is_rotated_to_the_front() {
    let m = single(5, &["a", "b"]);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let e = Element::random(&m, &mut rng);
    let a = PointRef::new(0, 0);
    let sigma = min_singular_value(e.free_value(a).unwrap());
    let e_small = e.map(|p, v| {
        if p != a {
            return v.scale(C64::new(50.0, 0.0));
        }
        v.clone()
    });
    let zc = make_zero_cross(&e_small, sigma * 1.01).unwrap();
    assert_eq!(zc.points, BTreeSet::from([a]));
    assert!((zc.distance - sigma).abs() < 1e-12);
    let g = zc.rotated().unwrap();
    assert!(has_zero_cross(g.free_value(a).unwrap(), 1, 1e-10).unwrap());
    assert!(all_pass(&verify_zero_cross(&zc, sigma * 1.01).unwrap()));
}

#[test]
fn budget_below_every_singular_value_is_rejected() {
    let m = single(3, &["a"]);
    let e = Element::identity(&m);
    assert!(matches!(make_zero_cross(&e, 0.5), Err(Error::NotCloseToSingular { .. })));
}

#[test]
fn identity_shaped_chain_fails_simplicity() {
    let m0 = single(1, &["a", "b"]);
    let m1 = single(1, &["a", "b"]);
    let id = |p: usize| (PointRef::new(0, p), vec![PointRef::new(0, p)]);
    let d = DiagonalMap::new(Arc::clone(&m0), Arc::clone(&m1), HashMap::from([id(0), id(1)])).unwrap();
    let chain = Chain::new(vec![m0.clone(), m1], vec![d]).unwrap();
    let e = Element::identity(&m0).map(|p, v| if p.index == 0 { ComplexMatrix::zeros(1) } else { v.clone() });
    let zc = make_zero_cross(&e, 0.1).unwrap();
    assert!(matches!(propagate_crosses(&chain, 0, &zc, None), Err(Error::SimplicityFails { from: 0 })));
}

#[test]
fn short_chain_reports_required_dimension() {
    let chain = glued_chain();
    let e = Element::zeros(&chain.models[0]);
    let zc = make_zero_cross(&e, 0.1).unwrap();
    // M = 4, N = 9 needs n_1 > 36
    assert!(matches!(propagate_crosses(&chain, 0, &zc, Some(9)), Err(Error::ChainTooShort { required_n1: 37 })));
}

#[test]
fn propagation_on_glued_chain() {
    let chain = glued_chain();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let e = Element::random(&chain.models[0], &mut rng).map(|p, v| if p.index == 0 { ComplexMatrix::zeros(1) } else { v.clone() });
    let zc = make_zero_cross(&e, 0.1).unwrap();
    for n in [1, 8] {
        let pr = propagate_crosses(&chain, 0, &zc, Some(n)).unwrap();
        assert_eq!((pr.simple_index, pr.target_index, pr.m, pr.r), (1, 2, 4, 1));
        let preds = verify_propagation(&pr, &zc).unwrap();
        assert!(all_pass(&preds), "{preds:?}");
    }
}

#[test]
fn open_block_points_cases() {
    let m = single(8, &["a"]);
    let a = PointRef::new(0, 0);
    let z = open_block_points(&Element::zeros(&m), 0.1).unwrap();
    assert_eq!(z.element, Element::zeros(&m));

    let pattern = ComplexMatrix::from_fn(8, |i, j| C64::new(if (i + j) % 3 == 0 { 1.0 } else { 0.0 }, 0.0));
    let e = Element::from_fn(&m, |_, _| pattern.clone()).unwrap();
    let opened = open_block_points(&e, 0.1).unwrap();
    assert!(opened.delta >= 0.1 / 8.0);
    assert!(opened.distance < 0.1);
    let v = opened.element.free_value(a).unwrap();
    for i in 0..8 {
        for j in 0..8 {
            assert_eq!(v.get(i, j).norm() > 0.0, pattern.get(i, j).norm() > 0.0);
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let e = Element::from_fn(&m, |_, _| with_zero_crosses(&random_banded(&mut rng, 8, 3), &[2, 5])).unwrap();
    let opened = open_block_points(&e, 0.1).unwrap();
    assert!(opened.delta >= 0.1 / 8.0);
    assert!(all_pass(&verify_block_opening(&e, &opened, 0.1).unwrap()));
}

/// Dims 5 and 10, one glued point over two free ones; crosses at `k` and `k + 2`.
fn spaced_fixture(rng: &mut ChaCha8Rng) -> Element {
    let model = Arc::new(
        FiniteDshModel::checked(vec![
            Level { dim: 5, points: vec![Point::free("a"), Point::free("b")] },
            Level {
                dim: 10,
                points: vec![Point::free("c"), Point::glued("g", vec![PointRef::new(0, 1), PointRef::new(0, 0)])],
            },
        ])
        .unwrap(),
    );
    Element::from_fn(&model, |_, n| with_zero_crosses(&random_banded(rng, n, 3), &[1, 3])).unwrap()
}

#[test]
fn condense_on_glued_fixture() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..5 {
        let g = spaced_fixture(&mut rng);
        let c = condense_crosses(&g, 2, 2).unwrap();
        let preds = verify_condensation(&g, &c, 2, 2).unwrap();
        assert!(all_pass(&preds), "{preds:?}");
        let glued = g.model().glued_points()[0];
        let v = c.g.eval(glued).unwrap();
        for k in [1, 2, 6, 7] {
            assert!(has_zero_cross(&v, k, PATH_ATOL).unwrap());
        }
        for p in g.model().points() {
            let (r0, r1) = (diagonal_radius(&g.eval(p).unwrap(), PATH_ATOL), diagonal_radius(&c.g.eval(p).unwrap(), PATH_ATOL));
            assert!(r1 <= r0 + 2);
        }
    }
}

#[test]
fn condense_keeps_points_without_weights() {
    let m = single(6, &["a"]);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    // crosses already consecutive at 1, 2: with M = 1 the path only moves them onto themselves
    let e = Element::from_fn(&m, |_, n| with_zero_crosses(&random_matrix(&mut rng, n), &[1, 2])).unwrap();
    let c = condense_crosses(&e, 1, 2).unwrap();
    assert_eq!(c.g, e);
}

#[test]
fn condense_rejects_missing_cross() {
    let m = single(6, &["a"]);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let e = Element::from_fn(&m, |_, n| with_zero_crosses(&random_matrix(&mut rng, n), &[1])).unwrap();
    let err = condense_crosses(&e, 2, 2).unwrap_err();
    assert!(matches!(&err, Error::Precondition(w) if w.contains("0/a") && w.contains("zero cross at 3")), "{err}");
}

#[test]
fn triangulate_cases() {
    let m = single(7, &["a"]);
    let tr = triangulate(&Element::zeros(&m), 3).unwrap();
    assert_eq!(tr.t, Element::zeros(&m));

    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let e = Element::from_fn(&m, |_, n| with_zero_crosses(&random_banded(&mut rng, n, 2), &[1, 2, 3])).unwrap();
    let tr = triangulate(&e, 3).unwrap();
    assert!(is_strictly_lower_triangular(tr.t.free_value(PointRef::new(0, 0)).unwrap(), PATH_ATOL));
    assert!(all_pass(&verify_triangulation(&e, &tr, 3).unwrap()));

    let wide = Element::from_fn(&m, |_, n| with_zero_crosses(&random_banded(&mut rng, n, 3), &[1, 2, 3])).unwrap();
    assert!(matches!(triangulate(&wide, 3), Err(Error::Precondition(_))));
}

#[test]
fn triangulate_on_glued_fixture() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let model = spaced_fixture(&mut rng).model().clone();
    let g = Element::from_fn(&model, |_, n| with_zero_crosses(&random_banded(&mut rng, n, 2), &[1, 2, 3])).unwrap();
    let tr = triangulate(&g, 3).unwrap();
    let preds = verify_triangulation(&g, &tr, 3).unwrap();
    assert!(all_pass(&preds), "{preds:?}");
}

#[test]
fn rordam_invert_cases() {
    let m = single(6, &["a"]);
    let a = PointRef::new(0, 0);
    let shifted = rordam_invert(&Element::zeros(&m), 0.1).unwrap();
    assert!((min_singular_value(shifted.free_value(a).unwrap()) - 0.1).abs() < 1e-15);

    let shift = Permutation::cycle(6, 1, 6).unwrap().matrix().map_indexed(|i, j, z| if i > j { z } else { C64::new(0.0, 0.0) });
    let t = Element::from_fn(&m, |_, _| shift.clone()).unwrap();
    let inv = rordam_invert(&t, 0.1).unwrap();
    let det = inv.free_value(a).unwrap().determinant();
    assert!((det - C64::new(1e-6, 0.0)).norm() < 1e-18);
    let d = op_norm(&(inv.free_value(a).unwrap() - &shift));
    assert!((d - 0.1).abs() < 1e-15);
    assert!(rordam_invert(&t, 0.0).is_err());
}

#[test]
fn floor_moves_by_at_most_delta() {
    let m = single(6, &["a"]);
    let a = PointRef::new(0, 0);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let t = Element::from_fn(&m, |_, n| truncate(&random_matrix(&mut rng, n))).unwrap();
    let f = singular_value_floor(&t, 0.05).unwrap();
    assert!(min_singular_value(f.free_value(a).unwrap()) >= 0.05 - 1e-12);
    assert!(op_norm(&(f.free_value(a).unwrap() - t.free_value(a).unwrap())) <= 0.05 + 1e-12);
}

#[test]
fn invertible_input_is_returned_unchanged() {
    let chain = glued_chain();
    let e = Element::identity(&chain.models[0]);
    let out = approximate_by_invertible(&chain, 0, &e, 0.25, &PipelineOptions::default()).unwrap();
    assert_eq!(out.element, e);
    assert_eq!(out.certificate.stages.len(), 1);
    assert_eq!(out.certificate.summary.total_distance, 0.0);
    assert!(out.certificate.passed());
}

#[test]
fn zero_input_becomes_scaled_unitary() {
    let chain = glued_chain();
    let e = Element::zeros(&chain.models[0]);
    let out = approximate_by_invertible(&chain, 0, &e, 0.25, &PipelineOptions::default()).unwrap();
    let cert = &out.certificate;
    assert!(cert.passed(), "{:?}", cert.failures());
    let delta = cert.parameters.invert_delta;
    assert!((cert.summary.total_distance - delta).abs() < 1e-12);
    for p in out.element.model().points() {
        let v = out.element.eval(p).unwrap().scale(C64::new(1.0 / delta, 0.0));
        assert!(v.is_unitary(1e-10));
    }
}

#[test]
fn glued_chain_end_to_end() {
    let chain = glued_chain();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let e = Element::random(&chain.models[0], &mut rng).map(|p, v| if p.index == 0 { ComplexMatrix::zeros(1) } else { v.clone() });
    let out = approximate_by_invertible(&chain, 0, &e, 0.25, &PipelineOptions::default()).unwrap();
    let cert = &out.certificate;
    assert_eq!(cert.parameters.target_index, 2);
    assert!(cert.passed(), "{:?}", cert.failures());
    assert!(cert.summary.total_distance <= cert.summary.stage_distance_sum + 1e-9);
    assert!(cert.summary.min_singular_value >= cert.parameters.invert_delta - 1e-9);
    assert!(block_starts(out.element.model()).unwrap().get(PointRef::new(1, 1)).len() == 2);
}

#[test]
fn fibonacci_end_to_end() {
    let (towers, chain) = fibonacci_chain();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let p = towers[0].point_of_word("010").unwrap();
    let a = Element::random(&chain.models[0], &mut rng).map(|q, v| if q == p { truncate(v) } else { v.clone() });
    let out = approximate_by_invertible(&chain, 0, &a, 0.25, &PipelineOptions::default()).unwrap();
    let cert = &out.certificate;
    assert!(cert.passed(), "{:?}", cert.failures());
    assert!(cert.summary.total_distance < 0.25);
    assert!(cert.summary.min_singular_value > 1e-3);
    let json = cert.to_json();
    assert_eq!(json["stages"].as_array().unwrap().len(), 7);
    assert!(json["summary"]["runtime_ms"].is_u64());
}

#[test]
fn scalar_shift_records_its_conditioning() {
    let chain = glued_chain();
    let e = Element::zeros(&chain.models[0]);
    let opts = PipelineOptions { inversion: Inversion::ScalarShift, ..Default::default() };
    let out = approximate_by_invertible(&chain, 0, &e, 0.25, &opts).unwrap();
    let s = out.certificate.summary.scalar_shift_min_singular_value.unwrap();
    assert!((s - out.certificate.summary.min_singular_value).abs() < 1e-12);
    assert!(approximate_by_invertible(&chain, 0, &e, 0.0, &opts).is_err());
}

#[test]
fn plant_singularity_touches_one_point() {
    let chain = glued_chain();
    let m = &chain.models[2];
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let e = Element::random(m, &mut rng);
    let r = m.find(1, "r").unwrap();
    let planted = plant_singularity(&e, r).unwrap();
    assert!(min_singular_value(planted.free_value(r).unwrap()) < 1e-12);
    for p in m.free_points().into_iter().filter(|&p| p != r) {
        assert_eq!(planted.free_value(p).unwrap(), e.free_value(p).unwrap());
    }
    assert!(matches!(plant_singularity(&e, m.find(1, "s").unwrap()), Err(Error::Precondition(_))));
}

#[test]
fn planned_chain_matches_the_hand_built_one() {
    let s = Substitution::fibonacci();
    let cfg = CylinderChainConfig::default();
    let src = source_tower(&s, &cfg).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let p = src.point_of_word("010").unwrap();
    let a = plant_singularity(&Element::random(&src.model, &mut rng), p).unwrap();
    let planned = plan_cylinder_chain(&s, &cfg, &a, 0.25).unwrap();
    assert_eq!(planned.simple_index, Some(1));
    let (_, expected) = fibonacci_chain();
    assert_eq!(planned.chain.models.len(), 3);
    for (x, y) in planned.chain.models.iter().zip(&expected.models) {
        assert_eq!(**x, **y);
    }
    assert_eq!(planned.towers[2].base.len(), 143);
}

#[test]
fn planning_edge_cases() {
    let s = Substitution::fibonacci();
    let cfg = CylinderChainConfig::default();
    let src = source_tower(&s, &cfg).unwrap();
    let planned = plan_cylinder_chain(&s, &cfg, &Element::identity(&src.model), 0.25).unwrap();
    assert_eq!((planned.chain.len(), planned.simple_index), (1, None));

    let zero = Element::zeros(&src.model);
    let shallow = CylinderChainConfig { max_depth: 0, ..cfg.clone() };
    assert!(matches!(plan_cylinder_chain(&s, &shallow, &zero, 0.25), Err(Error::SimplicityFails { from: 0 })));
    let off = CylinderChainConfig { base: "1".into(), ..cfg };
    assert!(matches!(source_tower(&s, &off), Err(Error::Precondition(_))));
}
