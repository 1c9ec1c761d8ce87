mod common;

use reluland::enumerate::{
    enumerate_all, grid_oracle, grid_oracle_decreasing, kink_residuals, oracle_agrees, search_decreasing,
    search_increasing, EntryKind, KinkSolution, Orientation, DEFAULT_DEDUP,
};
use reluland::{Realization, Target};

#[test]
fn oracle_bijection_on_random_targets() {
    let mut rng = common::rng(2024);
    for i in 0..20 {
        let g = common::continuous_target(&mut rng, 4, 4, 0.0, 1.0);
        let inc = search_increasing(&g).unwrap();
        let dec = search_decreasing(&g).unwrap();
        let oi = grid_oracle(&g, 1e-5).unwrap();
        let od = grid_oracle_decreasing(&g, 1e-5).unwrap();
        assert!(oracle_agrees(&inc, &oi), "target {i} increasing: {inc:?} vs {oi:?}");
        assert!(oracle_agrees(&dec, &od), "target {i} decreasing: {dec:?} vs {od:?}");
        assert_eq!(oi.brackets.len(), inc.solutions.len() + inc.excluded.len(), "target {i}");
        assert_eq!(od.brackets.len(), dec.solutions.len() + dec.excluded.len(), "target {i}");
    }
}

#[test]
fn residuals_and_gradients_vanish_on_random_catalogs() {
    let mut rng = common::rng(7);
    for i in 0..20 {
        let g = common::continuous_target(&mut rng, 3, 4, -1.0, 2.0);
        let unit = g.to_unit_interval();
        for s in search_increasing(&unit).unwrap().solutions.iter().chain(&search_decreasing(&unit).unwrap().solutions) {
            let r = kink_residuals(&unit, s).unwrap();
            assert!(r.iter().all(|x| x.abs() < 1e-9), "target {i}: {r:?}");
        }
        let cat = enumerate_all(&Target::Piecewise(g), DEFAULT_DEDUP).unwrap();
        assert!(cat.max_grad_norm() < 1e-9, "target {i}: {}", cat.max_grad_norm());
        assert!(cat.max_residual() < 1e-9);
    }
}

#[test]
fn decreasing_equals_reflected_increasing() {
    let mut rng = common::rng(11);
    for _ in 0..20 {
        let g = common::continuous_target(&mut rng, 3, 4, 0.0, 1.0);
        let dec: Vec<f64> = search_decreasing(&g).unwrap().solutions.iter().map(|s| s.q).collect();
        let mut refl: Vec<f64> = search_increasing(&g.reflect()).unwrap().solutions.iter().map(|s| 1.0 - s.q).collect();
        refl.sort_by(|x, y| x.partial_cmp(y).unwrap());
        assert_eq!(dec.len(), refl.len());
        for (a, b) in dec.iter().zip(&refl) {
            assert!((a - b).abs() < 1e-10);
        }
    }
}

#[test]
fn boundary_kinks_reduce_to_affine_and_constant() {
    let mut rng = common::rng(5);
    for _ in 0..10 {
        let g = common::continuous_target(&mut rng, 3, 3, 0.0, 2.0);
        let t = Target::Piecewise(g);
        let cat = enumerate_all(&t, DEFAULT_DEDUP).unwrap();
        let find = |k: EntryKind| cat.entries.iter().find(|e| e.kind == k).unwrap().realization.clone();
        let affine = find(EntryKind::Affine);
        let constant = find(EntryKind::Constant);
        let (a, b) = (0.0, 2.0);
        let slope = affine.eval(b) - affine.eval(a);
        let at_a = KinkSolution { q: 0.0, c: affine.eval(a), vw: slope, orientation: Orientation::Increasing };
        let at_b = KinkSolution { q: 1.0, c: constant.eval(a), vw: 1.0, orientation: Orientation::Increasing };
        assert!(at_a.realization(a, b).l2_distance(&affine).unwrap() < 1e-12);
        assert!(at_b.realization(a, b).l2_distance(&constant).unwrap() < 1e-12);
        let risk_a = reluland::landscape::risk(&at_a.lift(a, b), &t).unwrap();
        let want = cat.entries.iter().find(|e| e.kind == EntryKind::Affine).unwrap().risk;
        assert!((risk_a - want).abs() < 1e-12);
    }
}

#[test]
fn square_catalog_contents() {
    let cat = enumerate_all(&common::square(), DEFAULT_DEDUP).unwrap();
    assert_eq!(cat.entries.len(), 3);
    let kink = cat.entries.iter().find(|e| e.kind == EntryKind::KinkIncreasing).unwrap();
    let want = Realization::from_kink_deltas(0.0, 1.0, 1.0 / 27.0, 0.0, vec![(1.0 / 3.0, 4.0 / 3.0)]);
    assert!(kink.realization.l2_distance(&want).unwrap() < 1e-12);
    assert_eq!(cat.global_min().unwrap().kind, EntryKind::KinkIncreasing);
}

#[test]
fn constant_target_single_entry() {
    let t = Target::polynomial(&[-0.4], -1.0, 3.0).unwrap();
    let cat = enumerate_all(&t, DEFAULT_DEDUP).unwrap();
    assert_eq!(cat.entries.len(), 1);
    assert_eq!(cat.entries[0].kind, EntryKind::Constant);
    assert!(cat.entries[0].risk.abs() < 1e-15);
}
