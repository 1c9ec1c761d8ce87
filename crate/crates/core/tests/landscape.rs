#![allow(clippy::needless_range_loop)]

mod common;

use proptest::prelude::*;
use rand::Rng;
use reluland::landscape::max_norm;
use reluland::{BenchmarkTarget, Landscape, Target};

fn targets() -> Vec<Target> {
    vec![
        common::square(),
        Target::polynomial(&[0.3, -1.0, 0.0, 2.0], -1.0, 1.0).unwrap(),
        Target::Benchmark(BenchmarkTarget::standard()),
        Target::Benchmark(BenchmarkTarget::new(0.25, 0.7, -1.0, 3.0).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn gradient_matches_central_differences(seed in any::<u64>(), ti in 0usize..4, h in 1usize..6) {
        let t = targets().swap_remove(ti);
        let land = Landscape::new(t);
        let (a, b) = land.domain();
        let mut rng = common::rng(seed);
        let p = common::generic_params(&mut rng, h, a, b, 1e-3 * (b - a));
        let g = land.grad(&p);
        let step = 1e-6;
        let mut worst = 0.0_f64;
        for k in 0..p.dim() {
            let (mut up, mut dn) = (p.clone(), p.clone());
            up.theta_mut()[k] += step;
            dn.theta_mut()[k] -= step;
            let fd = (land.risk(&up).unwrap() - land.risk(&dn).unwrap()) / (2.0 * step);
            worst = worst.max((fd - g[k]).abs());
        }
        prop_assert!(worst < 1e-5 * (1.0 + max_norm(&g)), "FD deviation {worst}");
    }

    #[test]
    fn risk_scales_quadratically(seed in any::<u64>(), ti in 0usize..4, c in prop::sample::select(vec![0.5, 2.0, -3.0, 0.1, 7.0])) {
        let t = targets().swap_remove(ti);
        let (a, b) = t.domain();
        let mut rng = common::rng(seed);
        let h = rng.random_range(1..5);
        let p = common::generic_params(&mut rng, h, a, b, 0.0);
        let base = Landscape::new(t.clone()).risk(&p).unwrap();
        let mut q = p.clone();
        for j in 0..h {
            q.theta_mut()[2 * h + j] *= c;
        }
        q.theta_mut()[3 * h] *= c;
        let scaled = Landscape::new(t.scaled(c)).risk(&q).unwrap();
        prop_assert!((scaled - c * c * base).abs() <= 1e-10 * (c * c * base).abs(), "{scaled} vs {}", c * c * base);
    }
}

#[test]
fn smooth_gradient_close_to_exact() {
    let mut rng = common::rng(17);
    for i in 0..100 {
        let t = targets().swap_remove(i % 4);
        let land = Landscape::new(t);
        let (a, b) = land.domain();
        let p = common::generic_params(&mut rng, 1 + i % 4, a, b, 1e-2);
        let g = land.grad(&p);
        let gs = land.grad_smooth(&p, 1e6, 1e-10).unwrap();
        let d = g.iter().zip(&gs).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        // The smoothing error is O(ln r / r) times the size of the integrand,
        // so the absolute bound only applies on the unit domain.
        let bound = if (a, b) == (0.0, 1.0) { 1e-3 } else { 1e-3 * (1.0 + max_norm(&g)) };
        assert!(d < bound, "sample {i}: {d}");
    }
}

#[test]
fn smooth_risk_converges_to_exact() {
    let mut rng = common::rng(18);
    let land = Landscape::new(Target::Benchmark(BenchmarkTarget::standard()));
    let p = common::generic_params(&mut rng, 3, 0.0, 1.0, 1e-2);
    let exact = land.risk(&p).unwrap();
    let errs: Vec<f64> = [1e2, 1e4, 1e6].iter().map(|&r| (land.risk_smooth(&p, r, 1e-11).unwrap() - exact).abs()).collect();
    assert!(errs[2] < errs[0] && errs[2] < 1e-4, "{errs:?}");
}
