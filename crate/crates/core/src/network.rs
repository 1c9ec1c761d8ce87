//! One-hidden-layer ReLU networks with scalar input: parameters, exact and
//! smoothed realizations, and canonical piecewise-linear forms.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::polyalg::{PiecewisePolynomial, Polynomial};

/// Kinks closer than this are merged.
pub const KINK_MERGE_TOL: f64 = 1e-12;

/// Parameter vector of a width-`H` network.
///
/// Layout (0-based): `w_j = θ[j]`, `b_j = θ[H+j]`, `v_j = θ[2H+j]`,
/// `c = θ[3H]`; the realization is `c + Σ_j v_j max(w_j x + b_j, 0)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ParamsRepr", into = "ParamsRepr")]
pub struct Params {
    h: usize,
    theta: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct ParamsRepr {
    #[serde(rename = "H")]
    h: usize,
    theta: Vec<f64>,
}

impl TryFrom<ParamsRepr> for Params {
    type Error = Error;
    fn try_from(r: ParamsRepr) -> Result<Self> {
        Params::new(r.h, r.theta)
    }
}

impl From<Params> for ParamsRepr {
    fn from(p: Params) -> Self {
        ParamsRepr { h: p.h, theta: p.theta }
    }
}

impl Params {
    pub fn new(h: usize, theta: Vec<f64>) -> Result<Self> {
        if h == 0 {
            return Err(Error::InvalidSpec("width H must be at least 1".into()));
        }
        if theta.len() != 3 * h + 1 {
            return Err(Error::InvalidSpec(format!(
                "H = {h} needs {} parameters, got {}",
                3 * h + 1,
                theta.len()
            )));
        }
        Ok(Params { h, theta })
    }

    pub fn zeros(h: usize) -> Self {
        Params::new(h, vec![0.0; 3 * h + 1]).expect("H >= 1")
    }

    /// Builds from per-neuron slices; all three must have the same length.
    pub fn from_parts(w: &[f64], b: &[f64], v: &[f64], c: f64) -> Result<Self> {
        if w.len() != b.len() || w.len() != v.len() {
            return Err(Error::InvalidSpec("w, b, v must have equal length".into()));
        }
        let mut theta = Vec::with_capacity(3 * w.len() + 1);
        theta.extend_from_slice(w);
        theta.extend_from_slice(b);
        theta.extend_from_slice(v);
        theta.push(c);
        Params::new(w.len(), theta)
    }

    pub fn width(&self) -> usize {
        self.h
    }

    pub fn dim(&self) -> usize {
        self.theta.len()
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn theta_mut(&mut self) -> &mut [f64] {
        &mut self.theta
    }

    pub fn w(&self, j: usize) -> f64 {
        self.theta[j]
    }
    pub fn b(&self, j: usize) -> f64 {
        self.theta[self.h + j]
    }
    pub fn v(&self, j: usize) -> f64 {
        self.theta[2 * self.h + j]
    }
    pub fn c(&self) -> f64 {
        self.theta[3 * self.h]
    }

    pub fn set_neuron(&mut self, j: usize, w: f64, b: f64, v: f64) {
        let h = self.h;
        self.theta[j] = w;
        self.theta[h + j] = b;
        self.theta[2 * h + j] = v;
    }

    pub fn set_c(&mut self, c: f64) {
        let h = self.h;
        self.theta[3 * h] = c;
    }

    pub fn norm(&self) -> f64 {
        self.theta.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Exact ReLU realization at `x`.
    pub fn realize(&self, x: f64) -> f64 {
        (0..self.h).fold(self.c(), |acc, j| acc + self.v(j) * (self.w(j) * x + self.b(j)).max(0.0))
    }

    /// Smoothed realization at `x`.
    pub fn realize_smooth(&self, x: f64, act: SmoothActivation) -> f64 {
        (0..self.h).fold(self.c(), |acc, j| acc + self.v(j) * act.eval(self.w(j) * x + self.b(j)))
    }

    /// True when no neuron switches at an endpoint of `[a, b]`, the
    /// condition under which the risk is differentiable at `self`.
    pub fn is_differentiable_on(&self, a: f64, b: f64) -> bool {
        (0..self.h).all(|j| self.w(j) * a + self.b(j) != 0.0 && self.w(j) * b + self.b(j) != 0.0)
    }

    /// Like [`is_differentiable_on`](Self::is_differentiable_on) but with a
    /// tolerance: neurons whose pre-activation at an endpoint is within
    /// `tol` of zero count as nonsmooth.
    pub fn near_nonsmooth(&self, a: f64, b: f64, tol: f64) -> bool {
        (0..self.h).any(|j| {
            (self.w(j) * a + self.b(j)).abs() <= tol || (self.w(j) * b + self.b(j)).abs() <= tol
        })
    }

    /// Continuous piecewise-linear form of the realization on `[a, b]`.
    pub fn canonical(&self, a: f64, b: f64) -> Realization {
        let mut slope0 = 0.0;
        let mut offset = self.c();
        let mut kinks: Vec<(f64, f64)> = Vec::new();
        for j in 0..self.h {
            let (w, bj, v) = (self.w(j), self.b(j), self.v(j));
            if v == 0.0 {
                continue;
            }
            if w == 0.0 {
                offset += v * bj.max(0.0);
                continue;
            }
            let k = -bj / w;
            if k > a && k < b {
                if w > 0.0 {
                    kinks.push((k, v * w));
                } else {
                    slope0 += v * w;
                    offset += v * (w * a + bj);
                    kinks.push((k, -v * w));
                }
            } else if w * (0.5 * (a + b)) + bj > 0.0 {
                slope0 += v * w;
                offset += v * (w * a + bj);
            }
        }
        Realization::from_kink_deltas(a, b, offset, slope0, kinks)
    }
}

/// Continuous piecewise-linear function on `[a, b]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Realization {
    pub a: f64,
    pub b: f64,
    /// Strictly increasing interior kinks.
    pub kinks: Vec<f64>,
    /// One slope per segment, `kinks.len() + 1` entries.
    pub slopes: Vec<f64>,
    /// Value at `a`.
    pub offset: f64,
}

impl Realization {
    pub fn constant(a: f64, b: f64, c: f64) -> Self {
        Realization { a, b, kinks: Vec::new(), slopes: vec![0.0], offset: c }
    }

    /// `x -> slope * x + intercept` on `[a, b]`.
    pub fn affine(a: f64, b: f64, slope: f64, intercept: f64) -> Self {
        Realization { a, b, kinks: Vec::new(), slopes: vec![slope], offset: slope * a + intercept }
    }

    /// Builds from an initial slope and `(kink, slope change)` pairs; kinks
    /// are sorted, merged within [`KINK_MERGE_TOL`], and dropped when their
    /// slope change vanishes. Kinks at or left of `a` fold into the initial
    /// slope; kinks at or right of `b` are dropped.
    pub fn from_kink_deltas(a: f64, b: f64, offset: f64, slope0: f64, mut kinks: Vec<(f64, f64)>) -> Self {
        let slope0 = slope0 + kinks.iter().filter(|(k, _)| *k <= a).map(|(_, d)| d).sum::<f64>();
        kinks.retain(|(k, d)| *k > a && *k < b && *d != 0.0);
        kinks.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(kinks.len());
        for (k, d) in kinks {
            match merged.last_mut() {
                Some(last) if (k - last.0).abs() <= KINK_MERGE_TOL => last.1 += d,
                _ => merged.push((k, d)),
            }
        }
        let mut out_kinks = Vec::with_capacity(merged.len());
        let mut slopes = vec![slope0];
        for (k, d) in merged {
            let prev = *slopes.last().unwrap();
            let next = prev + d;
            // Cancellation down to rounding level means no kink.
            if (next - prev).abs() <= 1e-15 * prev.abs().max(next.abs()) {
                continue;
            }
            out_kinks.push(k);
            slopes.push(next);
        }
        Realization { a, b, kinks: out_kinks, slopes, offset }
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    /// Segment boundaries `a, kinks…, b`.
    pub fn grid(&self) -> Vec<f64> {
        let mut g = Vec::with_capacity(self.kinks.len() + 2);
        g.push(self.a);
        g.extend_from_slice(&self.kinks);
        g.push(self.b);
        g
    }

    /// Linear pieces `(lo, hi, slope, intercept)` such that the function is
    /// `slope * x + intercept` on `[lo, hi]`.
    pub fn segments(&self) -> Vec<(f64, f64, f64, f64)> {
        let grid = self.grid();
        let mut out = Vec::with_capacity(self.slopes.len());
        let mut value = self.offset;
        for (i, w) in grid.windows(2).enumerate() {
            let s = self.slopes[i];
            out.push((w[0], w[1], s, value - s * w[0]));
            value += s * (w[1] - w[0]);
        }
        out
    }

    pub fn eval(&self, x: f64) -> f64 {
        let mut value = self.offset;
        let grid = self.grid();
        for (i, w) in grid.windows(2).enumerate() {
            if x <= w[1] || i + 1 == self.slopes.len() {
                return value + self.slopes[i] * (x - w[0]);
            }
            value += self.slopes[i] * (w[1] - w[0]);
        }
        value
    }

    pub fn to_piecewise(&self) -> PiecewisePolynomial {
        let segs = self.segments();
        let pieces = segs.iter().map(|s| Polynomial::linear(s.2, s.3)).collect();
        PiecewisePolynomial::new(self.grid(), pieces).expect("kinks are strictly inside the domain")
    }

    /// L² distance on the common domain, computed exactly.
    pub fn l2_distance(&self, other: &Realization) -> Result<f64> {
        if self.a != other.a || self.b != other.b {
            return domain(format!(
                "realization domains differ: [{}, {}] vs [{}, {}]",
                self.a, self.b, other.a, other.b
            ));
        }
        let diff = self.to_piecewise().combine(&other.to_piecewise(), |p, q| {
            let d = p - q;
            &d * &d
        })?;
        Ok(diff.moment(0, self.a, self.b)?.max(0.0).sqrt())
    }

    /// `n + 1` equally spaced samples `(x, y)` including both endpoints.
    pub fn samples(&self, n: usize) -> Vec<(f64, f64)> {
        let n = n.max(1);
        (0..=n)
            .map(|i| {
                let x = self.a + (self.b - self.a) * i as f64 / n as f64;
                (x, self.eval(x))
            })
            .collect()
    }

    pub fn to_csv(&self, n: usize) -> String {
        let mut s = String::from("x,y\n");
        for (x, y) in self.samples(n) {
            let _ = writeln!(s, "{x},{y}");
        }
        s
    }
}

/// Smoothed ReLU `A_r(z) = softplus(r z − ln r) / r`.
///
/// The `ln r` shift makes `A_r'(0) = 1/(1+r) → 0`, matching the
/// left-continuous indicator `1_{(0,∞)}`, while the uniform error against
/// ReLU stays `O(ln r / r)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SmoothActivation {
    r: f64,
    shift: f64,
}

fn softplus(s: f64) -> f64 {
    s.max(0.0) + (-s.abs()).exp().ln_1p()
}

fn sigmoid(s: f64) -> f64 {
    if s >= 0.0 {
        1.0 / (1.0 + (-s).exp())
    } else {
        let e = s.exp();
        e / (1.0 + e)
    }
}

impl SmoothActivation {
    pub fn new(r: f64) -> Result<Self> {
        if !(r >= 1.0 && r.is_finite()) {
            return domain(format!("sharpness r must be >= 1, got {r}"));
        }
        Ok(SmoothActivation { r, shift: r.ln() })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn eval(&self, z: f64) -> f64 {
        softplus(self.r * z - self.shift) / self.r
    }

    pub fn derivative(&self, z: f64) -> f64 {
        sigmoid(self.r * z - self.shift)
    }

    /// Width of the transition zone to the right of a kink: beyond
    /// `ln(r)/r` the activation is within `e^{-…}` of affine.
    pub fn transition_width(&self) -> f64 {
        self.shift / self.r
    }
}
