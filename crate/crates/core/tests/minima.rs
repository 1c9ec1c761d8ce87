mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use reluland::minima::{
    gap_certificate, grad_norm, hessian_certificate, minima_risk, sample_grid, sample_m, witness_margin,
};
use reluland::quad::{Backend, DEFAULT_TOL};
use reluland::{BenchmarkTarget, Landscape, Target};

#[test]
fn risk_constant_across_twenty_samples() {
    for t in [BenchmarkTarget::standard(), BenchmarkTarget::new(0.2, 0.75, -2.0, 1.0).unwrap().with_scale(-1.5)] {
        let land = Landscape::new(Target::Benchmark(t.clone()));
        let m = minima_risk(&t, DEFAULT_TOL).unwrap();
        let lo = t.alpha() + 0.01 * (t.beta() - t.alpha());
        let hi = t.beta() - 0.01 * (t.beta() - t.alpha());
        for s in sample_grid(&t, 3, lo, hi, 20, 99).unwrap() {
            let r = land.risk(&s.theta).unwrap();
            assert!((r - m).abs() <= 1e-9 * m.abs(), "x={}: {r} vs {m}", s.x);
        }
    }
}

#[test]
fn gradient_vanishes_for_all_widths() {
    let t = BenchmarkTarget::standard();
    for h in [1, 2, 4, 8] {
        for s in sample_grid(&t, h, 0.34, 0.66, 15, h as u64).unwrap() {
            let g = grad_norm(&t, &s.theta);
            assert!(g < 1e-10, "H={h} x={}: {g}", s.x);
        }
    }
}

#[test]
fn hessian_certificate_on_nonstandard_window() {
    let t = BenchmarkTarget::new(0.3, 0.6, 0.0, 2.0).unwrap();
    for s in sample_grid(&t, 4, 0.32, 0.58, 5, 4).unwrap() {
        let c = hessian_certificate(&t, &s).unwrap();
        assert_eq!(c.full.numerical_rank, 2, "x={}", s.x);
        assert!(c.full.min_eigenvalue() > -1e-8);
        assert!(c.max_rel_deviation < 1e-5, "x={}: {}", s.x, c.max_rel_deviation);
        assert_eq!(c.closed_form.matrix[3][3], 4.0);
    }
}

#[test]
fn distinct_kinks_give_distinct_realizations() {
    let t = BenchmarkTarget::standard();
    let land = Landscape::new(Target::Benchmark(t.clone()));
    let reals: Vec<_> = sample_grid(&t, 2, 0.34, 0.66, 12, 1)
        .unwrap()
        .into_iter()
        .map(|s| land.realization(&s.theta))
        .collect();
    for i in 0..reals.len() {
        for j in i + 1..reals.len() {
            assert!(reals[i].l2_distance(&reals[j]).unwrap() > 0.0, "{i} and {j} coincide");
        }
    }
}

#[test]
fn gap_positive_on_parameter_grid() {
    let t = BenchmarkTarget::standard();
    let mut checked = 0;
    for p in [0.4, 0.45, 0.5, 0.55, 0.6] {
        for eps in [0.01, 0.03, 0.05] {
            if witness_margin(&t, p, eps) <= 0.0 {
                continue;
            }
            let c = gap_certificate(&t, 4, p, eps, 3, Backend::GaussKronrod).unwrap();
            assert!(c.gap > 0.0, "p={p} eps={eps}: {}", c.gap);
            checked += 1;
        }
    }
    assert_eq!(checked, 15);
}

#[test]
fn local_min_probe_on_scaled_target() {
    let t = BenchmarkTarget::new(0.3, 0.7, -1.0, 1.0).unwrap().with_scale(2.0);
    let land = Landscape::new(Target::Benchmark(t.clone()));
    let s = sample_m(&t, 3, 0.5, 1.3, 8).unwrap();
    let r0 = land.risk(&s.theta).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..2000 {
        let mut p = s.theta.clone();
        for x in p.theta_mut() {
            *x += rng.random_range(-5e-5..5e-5);
        }
        assert!(land.risk(&p).unwrap() >= r0 - 1e-9);
    }
}

#[test]
fn minima_risk_pinned() {
    let r = minima_risk(&BenchmarkTarget::standard(), DEFAULT_TOL).unwrap();
    assert!((r - 4.149_993_347_264_083e-3).abs() < 1e-15, "{r:.17e}");
}
