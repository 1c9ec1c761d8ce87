//! Risk, generalized gradient, smoothed risk, Hessians and the
//! Hessian-based critical point classifier.
//!
//! With `e = N − f` and `I_j = {x ∈ [a, b] : w_j x + b_j > 0}`:
//!
//! ```text
//! G_wj = 2 v_j ∫_{I_j} x e     G_bj = 2 v_j ∫_{I_j} e
//! G_vj = 2 ∫_{I_j} (w_j x + b_j) e     G_c = 2 ∫ e
//! ```
//!
//! All of these are closed-form for both target kinds.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::linalg::{symmetric_eigenvalues, symmetrize};
use crate::network::{Params, Realization, SmoothActivation};
use crate::quad::{self, Backend};
use crate::target::{BenchmarkTarget, Target};

/// Default relative threshold separating zero from nonzero eigenvalues.
pub const DEFAULT_RANK_TOL: f64 = 1e-6;
/// Default finite-difference step for Hessians.
pub const DEFAULT_FD_STEP: f64 = 1e-5;
/// Gradient max-norm above which `classify` refuses to label a point.
pub const CRITICAL_GRAD_TOL: f64 = 1e-6;

/// Max-norm of a vector.
pub fn max_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

/// Risk landscape of a fixed target. Caches `∫ f²`, so repeated risk
/// evaluations cost only closed-form integrals.
#[derive(Debug)]
pub struct Landscape {
    target: Target,
    a: f64,
    b: f64,
    tol: f64,
    backend: Backend,
    f_sq: OnceLock<Result<f64>>,
}

impl Clone for Landscape {
    fn clone(&self) -> Self {
        let f_sq = OnceLock::new();
        if let Some(v) = self.f_sq.get() {
            let _ = f_sq.set(v.clone());
        }
        Landscape { target: self.target.clone(), a: self.a, b: self.b, tol: self.tol, backend: self.backend, f_sq }
    }
}

/// Coordinates covered by a Hessian report.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HessianCoords {
    All,
    /// `(w_1, b_1, v_1, c)`.
    Restricted4,
}

impl HessianCoords {
    pub fn indices(self, h: usize) -> Vec<usize> {
        match self {
            HessianCoords::All => (0..3 * h + 1).collect(),
            HessianCoords::Restricted4 => vec![0, h, 2 * h, 3 * h],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HessianReport {
    pub matrix: Vec<Vec<f64>>,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub numerical_rank: usize,
    pub rank_tol: f64,
    /// Parameter indices of the rows/columns.
    pub coords: Vec<usize>,
}

impl HessianReport {
    pub fn from_matrix(mut matrix: Vec<Vec<f64>>, coords: Vec<usize>, rank_tol: f64) -> Self {
        symmetrize(&mut matrix);
        let eigenvalues = symmetric_eigenvalues(&matrix);
        let numerical_rank = count_nonzero(&eigenvalues, rank_tol);
        HessianReport { matrix, eigenvalues, numerical_rank, rank_tol, coords }
    }

    pub fn max_abs_eigenvalue(&self) -> f64 {
        max_norm(&self.eigenvalues)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn corank(&self) -> usize {
        self.eigenvalues.len() - self.numerical_rank
    }
}

fn count_nonzero(ev: &[f64], rank_tol: f64) -> usize {
    let cut = rank_tol * max_norm(ev);
    ev.iter().filter(|l| l.abs() > cut).count()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CritClass {
    LocalMin,
    LocalMax,
    Saddle,
    Degenerate,
}

/// Labels a critical point from its Hessian spectrum.
///
/// This is a numerical heuristic: a zero eigenvalue cluster of the expected
/// size is taken as the tangent space of a manifold of critical points,
/// which cannot itself be verified numerically. Outside families with a
/// known structure the label is advisory.
pub fn classify(report: &HessianReport, grad_norm: f64, expected_corank: Option<usize>) -> Result<CritClass> {
    if !(grad_norm < CRITICAL_GRAD_TOL) {
        return Err(Error::NotCritical(grad_norm));
    }
    let scale = report.max_abs_eigenvalue();
    if scale == 0.0 {
        return Ok(CritClass::Degenerate);
    }
    let cut = report.rank_tol * scale;
    let pos = report.eigenvalues.iter().filter(|&&l| l > cut).count();
    let neg = report.eigenvalues.iter().filter(|&&l| l < -cut).count();
    let zero = report.eigenvalues.len() - pos - neg;
    if pos > 0 && neg > 0 {
        return Ok(CritClass::Saddle);
    }
    if let Some(k) = expected_corank {
        if zero != k {
            return Ok(CritClass::Degenerate);
        }
    }
    Ok(if neg == 0 { CritClass::LocalMin } else { CritClass::LocalMax })
}

/// `(∫ N, ∫ x N)` over `[lo, hi]` for a piecewise-linear realization.
fn realization_moments(segs: &[(f64, f64, f64, f64)], lo: f64, hi: f64) -> (f64, f64) {
    let mut i0 = 0.0;
    let mut i1 = 0.0;
    for &(s, e, m, k) in segs {
        let s = s.max(lo);
        let e = e.min(hi);
        if s >= e {
            continue;
        }
        let (s2, e2) = (s * s, e * e);
        i0 += 0.5 * m * (e2 - s2) + k * (e - s);
        i1 += m * (e2 * e - s2 * s) / 3.0 + 0.5 * k * (e2 - s2);
    }
    (i0, i1)
}

/// Active interval of a neuron clipped to `[a, b]`, or `None` when empty.
fn active_interval(w: f64, bias: f64, a: f64, b: f64) -> Option<(f64, f64)> {
    if w == 0.0 {
        return if bias > 0.0 { Some((a, b)) } else { None };
    }
    let k = -bias / w;
    let (lo, hi) = if w > 0.0 { (k.max(a), b) } else { (a, k.min(b)) };
    if lo < hi {
        Some((lo, hi))
    } else {
        None
    }
}

impl Landscape {
    pub fn new(target: Target) -> Self {
        Landscape::with_tolerance(target, quad::DEFAULT_TOL, Backend::GaussKronrod)
    }

    pub fn with_tolerance(target: Target, tol: f64, backend: Backend) -> Self {
        let (a, b) = target.domain();
        Landscape { target, a, b, tol, backend, f_sq: OnceLock::new() }
    }

    pub fn target(&self) -> &Target {
        &self.target
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    /// `∫_a^b f²`, computed once.
    pub fn target_sq(&self) -> Result<f64> {
        self.f_sq
            .get_or_init(|| self.target.sq_int_with(self.a, self.b, self.tol, self.backend))
            .clone()
    }

    fn moments(&self, lo: f64, hi: f64) -> (f64, f64) {
        self.target
            .moments(lo, hi)
            .expect("integration interval is clipped to the target domain")
    }

    pub fn realization(&self, p: &Params) -> Realization {
        p.canonical(self.a, self.b)
    }

    /// Exact risk `∫ (N − f)²`.
    pub fn risk(&self, p: &Params) -> Result<f64> {
        let segs = self.realization(p).segments();
        let mut nn = 0.0;
        let mut nf = 0.0;
        for &(s, e, m, k) in &segs {
            // ∫ (m x + k)² over [s, e] via the midpoint form to limit cancellation.
            let h = e - s;
            let mid = m * 0.5 * (s + e) + k;
            nn += h * (mid * mid + m * m * h * h / 12.0);
            let (i0, i1) = self.moments(s, e);
            nf += m * i1 + k * i0;
        }
        Ok((nn - 2.0 * nf + self.target_sq()?).max(0.0))
    }

    /// Generalized gradient, defined at every `θ`.
    pub fn grad(&self, p: &Params) -> Vec<f64> {
        let h = p.width();
        let (a, b) = (self.a, self.b);
        let segs = self.realization(p).segments();
        let mut g = vec![0.0; p.dim()];
        for j in 0..h {
            let (w, bias, v) = (p.w(j), p.b(j), p.v(j));
            if let Some((lo, hi)) = active_interval(w, bias, a, b) {
                let (n0, n1) = realization_moments(&segs, lo, hi);
                let (f0, f1) = self.moments(lo, hi);
                let e0 = n0 - f0;
                let e1 = n1 - f1;
                g[j] = 2.0 * v * e1;
                g[h + j] = 2.0 * v * e0;
                g[2 * h + j] = 2.0 * (w * e1 + bias * e0);
            }
        }
        let (n0, _) = realization_moments(&segs, a, b);
        let (f0, _) = self.moments(a, b);
        g[3 * h] = 2.0 * (n0 - f0);
        g
    }

    /// Quadrature breakpoints for smoothed integrands: target breaks, kinks
    /// and the edges of each neuron's transition zone.
    fn smooth_breaks(&self, p: &Params, act: SmoothActivation) -> Vec<f64> {
        let mut br = self.target.breakpoints();
        let r = act.r();
        let shift = act.transition_width();
        for j in 0..p.width() {
            let (w, bias) = (p.w(j), p.b(j));
            if w == 0.0 {
                continue;
            }
            for z in [-30.0 / r, 0.0, shift, shift + 30.0 / r] {
                let x = (z - bias) / w;
                if x > self.a && x < self.b {
                    br.push(x);
                }
            }
        }
        br
    }

    fn target_at(&self, x: f64) -> f64 {
        self.target.eval(x.clamp(self.a, self.b)).expect("clamped into domain")
    }

    /// Risk with the smoothed activation `A_r`, by adaptive quadrature.
    pub fn risk_smooth(&self, p: &Params, r: f64, tol: f64) -> Result<f64> {
        let act = SmoothActivation::new(r)?;
        let br = self.smooth_breaks(p, act);
        quad::integrate(
            |x| {
                let e = p.realize_smooth(x, act) - self.target_at(x);
                e * e
            },
            self.a,
            self.b,
            &br,
            tol,
            self.backend,
        )
    }

    /// Gradient of the smoothed risk (analytic partials, one vector quadrature).
    pub fn grad_smooth(&self, p: &Params, r: f64, tol: f64) -> Result<Vec<f64>> {
        let act = SmoothActivation::new(r)?;
        let br = self.smooth_breaks(p, act);
        let h = p.width();
        let n = p.dim();
        let v = quad::integrate_vec(
            |x, out| {
                let e = p.realize_smooth(x, act) - self.target_at(x);
                for j in 0..h {
                    let z = p.w(j) * x + p.b(j);
                    let d = act.derivative(z);
                    out[j] = 2.0 * e * p.v(j) * d * x;
                    out[h + j] = 2.0 * e * p.v(j) * d;
                    out[2 * h + j] = 2.0 * e * act.eval(z);
                }
                out[3 * h] = 2.0 * e;
            },
            n,
            self.a,
            self.b,
            &br,
            tol,
        )?;
        Ok(v)
    }

    /// Hessian by symmetrized central differences of the exact gradient.
    pub fn hessian_fd(&self, p: &Params, step: f64, coords: HessianCoords) -> Result<HessianReport> {
        if !(step > 0.0) {
            return domain(format!("finite-difference step must be positive, got {step}"));
        }
        if !p.is_differentiable_on(self.a, self.b) {
            return Err(Error::NonSmooth("a neuron switches at an endpoint of the domain".into()));
        }
        let idx = coords.indices(p.width());
        let mut matrix = vec![vec![0.0; idx.len()]; idx.len()];
        for (col, &i) in idx.iter().enumerate() {
            let mut plus = p.clone();
            plus.theta_mut()[i] += step;
            let mut minus = p.clone();
            minus.theta_mut()[i] -= step;
            let gp = self.grad(&plus);
            let gm = self.grad(&minus);
            for (row, &k) in idx.iter().enumerate() {
                matrix[row][col] = (gp[k] - gm[k]) / (2.0 * step);
            }
        }
        Ok(HessianReport::from_matrix(matrix, idx, DEFAULT_RANK_TOL))
    }
}

/// Exact risk of `p` against `t`.
pub fn risk(p: &Params, t: &Target) -> Result<f64> {
    Landscape::new(t.clone()).risk(p)
}

/// Generalized gradient of the risk of `p` against `t`.
pub fn grad(p: &Params, t: &Target) -> Vec<f64> {
    Landscape::new(t.clone()).grad(p)
}

/// Closed-form restricted Hessian in the coordinates `(w_1, b_1, v_1, c)` at
/// a point of the single-kink family with normalized kink `q` and inner
/// scale `theta1`.
pub fn closed_hessian_m(q: f64, theta1: f64, t: &BenchmarkTarget) -> Result<HessianReport> {
    if !(q > t.alpha() && q < t.beta()) {
        return domain(format!("q = {q} outside ({}, {})", t.alpha(), t.beta()));
    }
    if !(theta1 > 0.0) {
        return domain(format!("theta1 must be positive, got {theta1}"));
    }
    let (a, b) = (t.a(), t.b());
    let w = b - a;
    let t1 = theta1;
    let omq = 1.0 - q;
    let opq = 1.0 + 3.0 * q;
    let den = t1 * t1 * w * omq * omq * opq * opq;
    let h11 = (a * a * omq * omq + b * b * (1.0 + 2.0 * q).powi(2) + a * b * (1.0 + 4.0 * q - 5.0 * q * q)) / (6.0 * den);
    let h12 = (a * (1.0 - q * q) + b * (1.0 + 4.0 * q + q * q)) / (4.0 * den);
    let h13 = w * omq.sqrt() * (a * omq + b * (2.0 + q)) / (6.0 * opq.sqrt());
    let h14 = (a * omq + b * (1.0 + q)) / (2.0 * t1 * omq.sqrt() * opq.sqrt());
    let h22 = (1.0 + 2.0 * q) / (2.0 * den);
    let h23 = w * omq.sqrt() / (2.0 * opq.sqrt());
    let h24 = 1.0 / (t1 * omq.sqrt() * opq.sqrt());
    let h33 = 2.0 / 3.0 * t1 * t1 * w.powi(3) * omq.powi(3);
    let h34 = t1 * w * w * omq * omq;
    let h44 = 2.0 * w;
    let matrix = vec![
        vec![h11, h12, h13, h14],
        vec![h12, h22, h23, h24],
        vec![h13, h23, h33, h34],
        vec![h14, h24, h34, h44],
    ];
    Ok(HessianReport::from_matrix(matrix, vec![0, 1, 2, 3], DEFAULT_RANK_TOL))
}
