#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use reluland::{Params, PiecewisePolynomial, Polynomial, Target};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Parameters with every kink at least `margin` away from `a` and `b` and
/// no near-zero inner weight.
pub fn generic_params(rng: &mut ChaCha8Rng, h: usize, a: f64, b: f64, margin: f64) -> Params {
    loop {
        let theta: Vec<f64> = (0..3 * h + 1).map(|_| rng.random_range(-2.0..2.0)).collect();
        let p = Params::new(h, theta).unwrap();
        let ok = (0..h).all(|j| {
            let w = p.w(j);
            if w.abs() < 1e-2 {
                return false;
            }
            let k = -p.b(j) / w;
            (k - a).abs() > margin && (k - b).abs() > margin
        });
        if ok {
            return p;
        }
    }
}

/// Continuous piecewise polynomial on `[lo, hi]` with up to `max_pieces`
/// pieces of degree at most `max_deg`.
pub fn continuous_target(rng: &mut ChaCha8Rng, max_pieces: usize, max_deg: usize, lo: f64, hi: f64) -> PiecewisePolynomial {
    let n = rng.random_range(1..=max_pieces);
    let mut cuts: Vec<f64> = (1..n).map(|_| rng.random_range(0.1..0.9)).collect();
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    cuts.dedup_by(|x, y| (*x - *y).abs() < 0.05);
    let mut bp = vec![lo];
    bp.extend(cuts.iter().map(|c| lo + c * (hi - lo)));
    bp.push(hi);
    let mut pieces = Vec::new();
    let mut level = rng.random_range(-1.0..1.0);
    for j in 0..bp.len() - 1 {
        let deg = rng.random_range(0..=max_deg);
        let mut local = vec![level];
        local.extend((0..deg).map(|_| rng.random_range(-2.0..2.0)));
        // p(x) = Σ c_k (x − bp_j)^k
        let p = Polynomial::new(local).compose_affine(1.0, -bp[j]);
        level = p.eval(bp[j + 1]);
        pieces.push(p);
    }
    PiecewisePolynomial::new(bp, pieces).unwrap()
}

pub fn square() -> Target {
    Target::polynomial(&[0.0, 0.0, 1.0], 0.0, 1.0).unwrap()
}
