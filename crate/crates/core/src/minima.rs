//! The single-kink family of non-global local minima for the benchmark
//! target: sampling, certification, and a two-kink witness with lower risk.
//!
//! A member has one active neuron with normalized kink `x ∈ (α, β)` and inner
//! scale `y > 0`:
//!
//! ```text
//! w_1 = y/(b−a)    b_1 = −y (x + a/(b−a))
//! v_1 = 1/(2y (1−x)^{3/2} (1+3x)^{1/2})    c = −(1−x)^{1/2}/(4 (1+3x)^{1/2})
//! ```
//!
//! and every other neuron is inactive on all of `[a, b]`. The realization
//! depends only on `x`, not on `y` or on the inactive neurons.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::landscape::{closed_hessian_m, max_norm, HessianCoords, HessianReport, Landscape, DEFAULT_FD_STEP};
use crate::network::Params;
use crate::quad::Backend;
use crate::target::{BenchmarkTarget, Target};

/// Grid size for the witness feasibility check.
pub const WITNESS_GRID: usize = 1000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinimaSample {
    /// Normalized kink in `(α, β)`.
    pub x: f64,
    /// Inner scale.
    pub y: f64,
    pub theta: Params,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapCertificate {
    pub theta: Params,
    pub witness: Params,
    pub risk_theta: f64,
    pub risk_witness: f64,
    pub gap: f64,
}

/// Outcome of the Hessian checks at one member of the family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HessianCertificate {
    pub full: HessianReport,
    pub restricted: HessianReport,
    pub closed_form: HessianReport,
    /// Largest entrywise relative deviation of `restricted` from `closed_form`.
    pub max_rel_deviation: f64,
}

/// Value of the family's realization at the kink (unit coordinates).
fn level(q: f64) -> f64 {
    -(1.0 - q).sqrt() / (4.0 * (1.0 + 3.0 * q).sqrt())
}

/// `(1−q)^{3/2} (1+3q)^{1/2}`.
fn slope_den(q: f64) -> f64 {
    (1.0 - q).powf(1.5) * (1.0 + 3.0 * q).sqrt()
}

/// Draws an inactive neuron: `w ∈ [−2, −1]`, margin `u ∈ [0.1, 1]`, and
/// `b = −u − max(0, w a)`, so that `w x + b ≤ −u` on `[a, b]` and `b < 0`.
fn inactive_neuron(rng: &mut ChaCha8Rng, a: f64) -> (f64, f64) {
    let w = rng.random_range(-2.0..=-1.0);
    let u = rng.random_range(0.1..=1.0);
    (w, -u - (w * a).max(0.0))
}

fn check_inactive(p: &Params, j: usize, a: f64, b: f64) -> Result<()> {
    let (w, bias) = (p.w(j), p.b(j));
    if (w * a + bias).max(w * b + bias) < 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("neuron {j} is not strictly inactive")))
    }
}

/// A member of the family with `H` neurons; neurons `2..H` are drawn from `seed`.
pub fn sample_m(t: &BenchmarkTarget, h: usize, x: f64, y: f64, seed: u64) -> Result<MinimaSample> {
    if h == 0 {
        return domain("width H must be at least 1");
    }
    if !(x > t.alpha() && x < t.beta()) {
        return domain(format!("x = {x} outside ({}, {})", t.alpha(), t.beta()));
    }
    if !(y > 0.0 && y.is_finite()) {
        return domain(format!("y must be positive, got {y}"));
    }
    let (a, b) = (t.a(), t.b());
    let width = b - a;
    let s = t.scale();
    let mut p = Params::zeros(h);
    p.set_neuron(0, y / width, -y * (x + a / width), s / (2.0 * y * slope_den(x)));
    p.set_c(s * level(x));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for j in 1..h {
        let (w, bias) = inactive_neuron(&mut rng, a);
        let v = rng.random_range(-1.0..=1.0);
        p.set_neuron(j, w, bias, v);
        check_inactive(&p, j, a, b)?;
    }
    Ok(MinimaSample { x, y, theta: p })
}

/// `n` members with kinks evenly spaced on `[x_lo, x_hi]` and inner scales
/// drawn from `[0.5, 2]`.
pub fn sample_grid(t: &BenchmarkTarget, h: usize, x_lo: f64, x_hi: f64, n: usize, seed: u64) -> Result<Vec<MinimaSample>> {
    let xs: Vec<f64> = (0..n)
        .map(|i| if n == 1 { 0.5 * (x_lo + x_hi) } else { x_lo + (x_hi - x_lo) * i as f64 / (n - 1) as f64 })
        .collect();
    sample_at(t, h, &xs, seed)
}

/// One member per kink in `xs`, inner scales drawn from `[0.5, 2]`.
pub fn sample_at(t: &BenchmarkTarget, h: usize, xs: &[f64], seed: u64) -> Result<Vec<MinimaSample>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let y = rng.random_range(0.5..=2.0);
            sample_m(t, h, x, y, seed.wrapping_add(1 + i as u64))
        })
        .collect()
}

/// Common risk of every member: `s² (b−a) (∫₀¹ f² − 1/48)`.
pub fn minima_risk(t: &BenchmarkTarget, tol: f64) -> Result<f64> {
    minima_risk_with(t, tol, Backend::GaussKronrod)
}

pub fn minima_risk_with(t: &BenchmarkTarget, tol: f64, backend: Backend) -> Result<f64> {
    if !(tol > 0.0) {
        return domain(format!("tolerance must be positive, got {tol}"));
    }
    let f2 = t.unit_sq_int(0.0, 1.0, tol, backend)?;
    Ok(t.scale() * t.scale() * t.width() * (f2 - 1.0 / 48.0))
}

/// `(∫₀^q (N−f), ∫_q^1 (N−f), ∫_q^1 x (N−f))` on the unit interval for the
/// family's realization with kink `q`; all three vanish.
pub fn verify_zero_integrals(t: &BenchmarkTarget, q: f64) -> Result<[f64; 3]> {
    if !(q > t.alpha() && q < t.beta()) {
        return domain(format!("q = {q} outside ({}, {})", t.alpha(), t.beta()));
    }
    let k0 = level(q);
    let kappa = 1.0 / (2.0 * slope_den(q));
    let (left0, _) = t.unit_moments(0.0, q);
    let (right0, right1) = t.unit_moments(q, 1.0);
    let omq = 1.0 - q;
    let r1 = k0 * q - left0;
    let r2 = k0 * omq + 0.5 * kappa * omq * omq - right0;
    // ∫_q^1 x (x − q) dx
    let m = (1.0 - q * q * q) / 3.0 - 0.5 * q * (1.0 - q * q);
    let r3 = 0.5 * k0 * (1.0 - q * q) + kappa * m - right1;
    Ok([r1, r2, r3])
}

/// Smallest margin of the witness feasibility inequality
/// `f(x) > level(p) + (x − p + ε)/(4 (1−p)^{3/2} (1+3p)^{1/2})` on a grid of
/// `(p − ε, p + ε)`.
pub fn witness_margin(t: &BenchmarkTarget, p: f64, eps: f64) -> f64 {
    let k = level(p);
    let l = slope_den(p);
    (1..=WITNESS_GRID)
        .map(|i| {
            let x = p - eps + 2.0 * eps * i as f64 / (WITNESS_GRID + 1) as f64;
            t.eval_unit(x) - (k + (x - p + eps) / (4.0 * l))
        })
        .fold(f64::INFINITY, f64::min)
}

/// Two-kink parameter vector (kinks at `p ± ε`, normalized) whose risk is
/// strictly below the family's common risk. Neurons `3..H` have all
/// parameters negative and are inactive.
pub fn two_kink_witness(t: &BenchmarkTarget, h: usize, p: f64, eps: f64, seed: u64) -> Result<Params> {
    if h < 2 {
        return Err(Error::Witness(format!("needs H >= 2, got {h}")));
    }
    if !(eps > 0.0) {
        return Err(Error::Witness(format!("eps must be positive, got {eps}")));
    }
    if !(p - eps > t.alpha() && p + eps < t.beta()) {
        return Err(Error::Witness(format!(
            "({}, {}) is not inside ({}, {})",
            p - eps,
            p + eps,
            t.alpha(),
            t.beta()
        )));
    }
    let margin = witness_margin(t, p, eps);
    if !(margin > 0.0) {
        return Err(Error::Witness(format!("eps = {eps} too large: feasibility margin {margin:e}")));
    }
    let (a, b) = (t.a(), t.b());
    let width = b - a;
    let s = t.scale();
    let v = s / (4.0 * slope_den(p));
    let mut theta = Params::zeros(h);
    theta.set_neuron(0, 1.0 / width, -a / width - p + eps, v);
    theta.set_neuron(1, 1.0 / width, -a / width - p - eps, v);
    theta.set_c(s * level(p));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for j in 2..h {
        let (w, bias) = inactive_neuron(&mut rng, a);
        let vj = rng.random_range(-1.0..=-0.1);
        theta.set_neuron(j, w, bias, vj);
        check_inactive(&theta, j, a, b).map_err(|e| Error::Witness(e.to_string()))?;
    }
    Ok(theta)
}

/// Risk gap between the family member with kink `p` and the two-kink witness.
pub fn gap_certificate(t: &BenchmarkTarget, h: usize, p: f64, eps: f64, seed: u64, backend: Backend) -> Result<GapCertificate> {
    let theta = sample_m(t, h, p, 1.0, seed)?.theta;
    let witness = two_kink_witness(t, h, p, eps, seed)?;
    let land = Landscape::with_tolerance(Target::Benchmark(t.clone()), crate::quad::DEFAULT_TOL, backend);
    let risk_theta = land.risk(&theta)?;
    let risk_witness = land.risk(&witness)?;
    Ok(GapCertificate { theta, witness, risk_theta, risk_witness, gap: risk_theta - risk_witness })
}

/// Full and restricted finite-difference Hessians at a member, compared
/// with the closed form.
pub fn hessian_certificate(t: &BenchmarkTarget, sample: &MinimaSample) -> Result<HessianCertificate> {
    let land = Landscape::new(Target::Benchmark(t.clone()));
    let full = land.hessian_fd(&sample.theta, DEFAULT_FD_STEP, HessianCoords::All)?;
    let restricted = land.hessian_fd(&sample.theta, DEFAULT_FD_STEP, HessianCoords::Restricted4)?;
    let closed_form = closed_hessian_m(sample.x, sample.theta.w(0), t)?;
    let scale = closed_form.matrix.iter().flatten().fold(0.0_f64, |m, v| m.max(v.abs()));
    let mut dev = 0.0_f64;
    for (r1, r2) in restricted.matrix.iter().zip(&closed_form.matrix) {
        for (x, y) in r1.iter().zip(r2) {
            dev = dev.max((x - y).abs() / y.abs().max(1e-8 * scale));
        }
    }
    Ok(HessianCertificate { full, restricted, closed_form, max_rel_deviation: dev })
}

/// Max-norm of the generalized gradient at a sample.
pub fn grad_norm(t: &BenchmarkTarget, p: &Params) -> f64 {
    max_norm(&Landscape::new(Target::Benchmark(t.clone())).grad(p))
}
