//! Target functions: piecewise polynomials and the three-piece benchmark
//! target with an affine–analytic–quadratic shape.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::polyalg::{PiecewisePolynomial, Polynomial};
use crate::quad::{self, Backend};

/// The benchmark target on `[0, 1]`, rescaled to `[a, b]` and multiplied by `scale`.
///
/// On the unit interval (with `u = (x - a)/(b - a)`):
///
/// * `[0, α]`: affine,
/// * `(α, β]`: `(3u² − 1) / (4 (1−u)^{1/2} (1+3u)^{3/2})`,
/// * `(β, 1]`: quadratic,
///
/// glued so that the function is continuous.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchmarkTarget {
    alpha: f64,
    beta: f64,
    a: f64,
    b: f64,
    scale: f64,
    left: Polynomial,
    right: Polynomial,
}

/// Middle-piece formula on the unit interval.
pub fn middle(u: f64) -> f64 {
    (3.0 * u * u - 1.0) / (4.0 * (1.0 - u).sqrt() * (1.0 + 3.0 * u).powf(1.5))
}

/// Antiderivative of [`middle`].
fn middle_int(u: f64) -> f64 {
    -u * (1.0 - u).sqrt() / (4.0 * (1.0 + 3.0 * u).sqrt())
}

/// Antiderivative of `u * middle(u)`.
fn middle_xint(u: f64) -> f64 {
    -(3.0 * u * u + 2.0 * u + 1.0) * (1.0 - u).sqrt() / (24.0 * (1.0 + 3.0 * u).sqrt())
}

impl BenchmarkTarget {
    pub fn new(alpha: f64, beta: f64, a: f64, b: f64) -> Result<Self> {
        if !(alpha.is_finite() && beta.is_finite() && 0.0 < alpha && alpha < beta && beta < 1.0) {
            return Err(Error::InvalidSpec(format!("need 0 < alpha < beta < 1, got alpha={alpha}, beta={beta}")));
        }
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::InvalidSpec(format!("need a < b, got [{a}, {b}]")));
        }
        let la = 4.0 * (1.0 - alpha).sqrt() * (1.0 + 3.0 * alpha).powf(1.5);
        let left = Polynomial::new(vec![(3.0 * alpha * alpha - 1.0 - 4.0 * alpha) / la, 4.0 / la]);
        let rb = 4.0 * (1.0 - beta).powf(2.5) * (1.0 + 3.0 * beta).powf(1.5);
        let right = Polynomial::new(vec![
            (3.0 * beta.powi(4) + 10.0 * beta * beta - 1.0) / rb,
            -(18.0 * beta * beta + 8.0 * beta - 2.0) / rb,
            12.0 * beta / rb,
        ]);
        Ok(BenchmarkTarget { alpha, beta, a, b, scale: 1.0, left, right })
    }

    /// The standard instance α = 1/3, β = 2/3 on `[0, 1]`.
    pub fn standard() -> Self {
        BenchmarkTarget::new(1.0 / 3.0, 2.0 / 3.0, 0.0, 1.0).expect("valid constants")
    }

    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }
    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn scale(&self) -> f64 {
        self.scale
    }
    pub fn width(&self) -> f64 {
        self.b - self.a
    }

    /// The affine outer piece on `[0, α]` (unit coordinates).
    pub fn left_piece(&self) -> &Polynomial {
        &self.left
    }

    /// The quadratic outer piece on `(β, 1]` (unit coordinates).
    pub fn right_piece(&self) -> &Polynomial {
        &self.right
    }

    /// Unscaled function on the unit interval.
    pub fn eval_unit(&self, u: f64) -> f64 {
        if u <= self.alpha {
            self.left.eval(u)
        } else if u <= self.beta {
            middle(u)
        } else {
            self.right.eval(u)
        }
    }

    /// Same as [`eval_unit`](Self::eval_unit) but the middle formula is
    /// used on the closed interval `[α, β]` (for continuity checks).
    pub fn eval_unit_piece(&self, piece: usize, u: f64) -> f64 {
        match piece {
            0 => self.left.eval(u),
            1 => middle(u),
            _ => self.right.eval(u),
        }
    }

    fn to_unit(&self, x: f64) -> f64 {
        (x - self.a) / (self.b - self.a)
    }

    /// `(∫ f du, ∫ u f du)` over `[u0, u1] ⊆ [0, 1]`, unscaled.
    pub fn unit_moments(&self, u0: f64, u1: f64) -> (f64, f64) {
        let mut i0 = 0.0;
        let mut i1 = 0.0;
        let (al, be) = (self.alpha, self.beta);
        let s = u0.min(al);
        let e = u1.min(al);
        if s < e {
            i0 += self.left.integrate(s, e);
            i1 += self.left.shift(1).integrate(s, e);
        }
        let s = u0.max(al);
        let e = u1.min(be);
        if s < e {
            i0 += middle_int(e) - middle_int(s);
            i1 += middle_xint(e) - middle_xint(s);
        }
        let s = u0.max(be);
        let e = u1.max(be);
        if s < e {
            i0 += self.right.integrate(s, e);
            i1 += self.right.shift(1).integrate(s, e);
        }
        (i0, i1)
    }

    /// Unscaled `∫ f²` over `[u0, u1] ⊆ [0, 1]`: outer pieces exactly, the
    /// middle piece by quadrature.
    pub fn unit_sq_int(&self, u0: f64, u1: f64, tol: f64, backend: Backend) -> Result<f64> {
        let (al, be) = (self.alpha, self.beta);
        let mut total = 0.0;
        let s = u0.min(al);
        let e = u1.min(al);
        if s < e {
            total += (&self.left * &self.left).integrate(s, e);
        }
        let s = u0.max(al);
        let e = u1.min(be);
        if s < e {
            total += quad::integrate(|u| middle(u).powi(2), s, e, &[], tol, backend)?;
        }
        let s = u0.max(be);
        let e = u1.max(be);
        if s < e {
            total += (&self.right * &self.right).integrate(s, e);
        }
        Ok(total)
    }
}

/// A target function on a bounded interval.
#[derive(Clone, Debug, PartialEq)]
pub enum Target {
    Piecewise(PiecewisePolynomial),
    Benchmark(BenchmarkTarget),
}

impl From<PiecewisePolynomial> for Target {
    fn from(p: PiecewisePolynomial) -> Self {
        Target::Piecewise(p)
    }
}

impl From<BenchmarkTarget> for Target {
    fn from(b: BenchmarkTarget) -> Self {
        Target::Benchmark(b)
    }
}

impl Target {
    /// Single polynomial on `[lo, hi]`, coefficients ascending.
    pub fn polynomial(coeffs: &[f64], lo: f64, hi: f64) -> Result<Self> {
        Ok(Target::Piecewise(PiecewisePolynomial::single(Polynomial::new(coeffs.to_vec()), lo, hi)?))
    }

    pub fn zero(lo: f64, hi: f64) -> Result<Self> {
        Target::polynomial(&[], lo, hi)
    }

    pub fn domain(&self) -> (f64, f64) {
        match self {
            Target::Piecewise(p) => p.domain(),
            Target::Benchmark(b) => (b.a, b.b),
        }
    }

    /// Interior points where the target is not smooth (or may not be).
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            Target::Piecewise(p) => {
                let bp = p.breakpoints();
                bp[1..bp.len() - 1].to_vec()
            }
            Target::Benchmark(b) => vec![b.a + b.alpha * b.width(), b.a + b.beta * b.width()],
        }
    }

    fn check_interval(&self, lo: f64, hi: f64) -> Result<()> {
        let (a, b) = self.domain();
        if !(lo >= a && hi <= b && lo <= hi) {
            return domain(format!("[{lo}, {hi}] is not a subinterval of [{a}, {b}]"));
        }
        Ok(())
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        match self {
            Target::Piecewise(p) => p.eval(x),
            Target::Benchmark(b) => {
                if !(x >= b.a && x <= b.b) {
                    return domain(format!("{x} outside [{}, {}]", b.a, b.b));
                }
                Ok(b.scale * b.eval_unit(b.to_unit(x).clamp(0.0, 1.0)))
            }
        }
    }

    /// `∫_lo^hi f`.
    pub fn int(&self, lo: f64, hi: f64) -> Result<f64> {
        Ok(self.moments(lo, hi)?.0)
    }

    /// `∫_lo^hi x f(x) dx`.
    pub fn xint(&self, lo: f64, hi: f64) -> Result<f64> {
        Ok(self.moments(lo, hi)?.1)
    }

    /// `(∫_lo^hi f, ∫_lo^hi x f)` in one pass.
    pub fn moments(&self, lo: f64, hi: f64) -> Result<(f64, f64)> {
        self.check_interval(lo, hi)?;
        match self {
            Target::Piecewise(p) => Ok((p.moment(0, lo, hi)?, p.moment(1, lo, hi)?)),
            Target::Benchmark(bt) => {
                let w = bt.width();
                let u0 = bt.to_unit(lo).clamp(0.0, 1.0);
                let u1 = bt.to_unit(hi).clamp(0.0, 1.0);
                let (i0, i1) = bt.unit_moments(u0, u1);
                let int = w * i0;
                let xint = w * w * i1 + bt.a * w * i0;
                Ok((bt.scale * int, bt.scale * xint))
            }
        }
    }

    /// `∫_lo^hi f²`; exact for polynomial targets, quadrature (absolute
    /// tolerance `tol`) on the analytic piece of the benchmark target.
    pub fn sq_int(&self, lo: f64, hi: f64, tol: f64) -> Result<f64> {
        self.sq_int_with(lo, hi, tol, Backend::GaussKronrod)
    }

    pub fn sq_int_with(&self, lo: f64, hi: f64, tol: f64, backend: Backend) -> Result<f64> {
        if !(tol > 0.0) {
            return domain(format!("tolerance must be positive, got {tol}"));
        }
        self.check_interval(lo, hi)?;
        match self {
            Target::Piecewise(p) => p.square().moment(0, lo, hi),
            Target::Benchmark(bt) => {
                let w = bt.width();
                let u0 = bt.to_unit(lo).clamp(0.0, 1.0);
                let u1 = bt.to_unit(hi).clamp(0.0, 1.0);
                let s2 = bt.scale * bt.scale;
                // Tolerance is on the x-scale integral.
                let unit_tol = if s2 * w > 0.0 { tol / (s2 * w) } else { tol };
                Ok(s2 * w * bt.unit_sq_int(u0, u1, unit_tol, backend)?)
            }
        }
    }

    /// Pointwise `c · f`.
    pub fn scaled(&self, c: f64) -> Target {
        match self {
            Target::Piecewise(p) => Target::Piecewise(p.scale(c)),
            Target::Benchmark(b) => {
                let s = b.scale * c;
                Target::Benchmark(b.clone().with_scale(s))
            }
        }
    }

    pub fn as_piecewise(&self) -> Option<&PiecewisePolynomial> {
        match self {
            Target::Piecewise(p) => Some(p),
            Target::Benchmark(_) => None,
        }
    }

    pub fn from_json(text: &str) -> Result<Target> {
        let spec: TargetSpec =
            serde_json::from_str(text).map_err(|e| Error::InvalidSpec(format!("target JSON: {e}")))?;
        spec.into_target()
    }

    pub fn to_spec(&self) -> TargetSpec {
        match self {
            Target::Piecewise(p) => TargetSpec::PiecewisePoly {
                breakpoints: p.breakpoints().to_vec(),
                pieces: p.pieces().iter().map(|q| q.coeffs().to_vec()).collect(),
            },
            Target::Benchmark(b) => TargetSpec::Benchmark {
                alpha: b.alpha,
                beta: b.beta,
                a: b.a,
                b: b.b,
                scale: b.scale,
            },
        }
    }
}

fn one() -> f64 {
    1.0
}

/// On-disk target description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TargetSpec {
    PiecewisePoly {
        breakpoints: Vec<f64>,
        pieces: Vec<Vec<f64>>,
    },
    Benchmark {
        alpha: f64,
        beta: f64,
        #[serde(default)]
        a: f64,
        #[serde(default = "one")]
        b: f64,
        #[serde(default = "one")]
        scale: f64,
    },
}

impl TargetSpec {
    pub fn into_target(self) -> Result<Target> {
        match self {
            TargetSpec::PiecewisePoly { breakpoints, pieces } => Ok(Target::Piecewise(PiecewisePolynomial::new(
                breakpoints,
                pieces.into_iter().map(Polynomial::new).collect(),
            )?)),
            TargetSpec::Benchmark { alpha, beta, a, b, scale } => {
                if !scale.is_finite() {
                    return Err(Error::InvalidSpec("scale must be finite".into()));
                }
                Ok(Target::Benchmark(BenchmarkTarget::new(alpha, beta, a, b)?.with_scale(scale)))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn benchmark_value_at_one_third() {
        let t = Target::Benchmark(BenchmarkTarget::standard());
        let want = (3.0 / 9.0 - 1.0) / (4.0 * (2.0f64 / 3.0).sqrt() * 2.0f64.powf(1.5));
        assert_relative_eq!(t.eval(1.0 / 3.0).unwrap(), want, epsilon = 1e-15);
        assert_relative_eq!(want, -0.0721687836, epsilon = 1e-9);
        let bt = BenchmarkTarget::standard();
        assert_relative_eq!(bt.eval_unit_piece(0, 1.0 / 3.0), want, epsilon = 1e-12);
    }

    #[test]
    fn benchmark_continuity() {
        let bt = BenchmarkTarget::standard();
        let (a, b) = (bt.alpha(), bt.beta());
        assert!((bt.eval_unit_piece(0, a) - bt.eval_unit_piece(1, a)).abs() < 1e-12);
        assert!((bt.eval_unit_piece(1, b) - bt.eval_unit_piece(2, b)).abs() < 1e-12);
    }

    #[test]
    fn antiderivatives_differentiate_back() {
        for i in 1..50 {
            let u = 0.02 * i as f64;
            let h = 1e-6;
            let d0 = (middle_int(u + h) - middle_int(u - h)) / (2.0 * h);
            let d1 = (middle_xint(u + h) - middle_xint(u - h)) / (2.0 * h);
            assert!((d0 - middle(u)).abs() < 1e-8, "u={u}");
            assert!((d1 - u * middle(u)).abs() < 1e-8, "u={u}");
        }
    }

    #[test]
    fn polynomial_target_integrals() {
        let t = Target::polynomial(&[0.0, 0.0, 1.0], 0.0, 1.0).unwrap();
        assert_relative_eq!(t.int(0.0, 1.0 / 3.0).unwrap(), 1.0 / 81.0, epsilon = 1e-16);
        assert_relative_eq!(t.eval(0.5).unwrap(), 0.25);
        let two = Target::polynomial(&[2.0], 0.0, 1.0).unwrap();
        assert_relative_eq!(two.xint(0.0, 1.0).unwrap(), 1.0);
        let x = Target::polynomial(&[0.0, 1.0], 0.0, 1.0).unwrap();
        assert_relative_eq!(x.sq_int(0.0, 1.0, 1e-12).unwrap(), 1.0 / 3.0, epsilon = 1e-15);
        assert_eq!(Target::zero(0.0, 1.0).unwrap().sq_int(0.0, 1.0, 1e-12).unwrap(), 0.0);
        assert!(t.int(0.0, 1.5).is_err());
    }

    #[test]
    fn scale_target_examples() {
        let x = Target::polynomial(&[0.0, 1.0], 0.0, 1.0).unwrap();
        assert_eq!(x.scaled(2.0).eval(0.5).unwrap(), 1.0);
        assert_eq!(x.scaled(1.0), x);
        assert_eq!(x.scaled(0.0).eval(0.3).unwrap(), 0.0);
        let bt = Target::Benchmark(BenchmarkTarget::standard());
        assert_eq!(bt.scaled(0.0).eval(0.5).unwrap(), 0.0);
    }

    #[test]
    fn parse_specs() {
        let t = Target::from_json(r#"{"kind":"piecewise_poly","breakpoints":[0,1],"pieces":[[0,0,1]]}"#).unwrap();
        assert_eq!(t.eval(0.5).unwrap(), 0.25);
        let b = Target::from_json(r#"{"kind":"benchmark","alpha":0.3333333333333333,"beta":0.6666666666666666}"#).unwrap();
        assert_eq!(b.domain(), (0.0, 1.0));
        assert!(Target::from_json(r#"{"kind":"piecewise_poly","breakpoints":[0,0],"pieces":[[1]]}"#).is_err());
        assert!(Target::from_json(r#"{"kind":"benchmark","alpha":0.7,"beta":0.6}"#).is_err());
        assert!(Target::from_json(r#"{"kind":"benchmark","alpha":0.0,"beta":0.6}"#).is_err());
        assert!(Target::from_json(r#"{"kind":"nope"}"#).is_err());
        assert!(Target::from_json("not json").is_err());
        let round = Target::from_json(&serde_json::to_string(&b.to_spec()).unwrap()).unwrap();
        assert_eq!(round, b);
    }

    #[test]
    fn middle_piece_moments_match_quadrature() {
        let bt = BenchmarkTarget::new(0.2, 0.9, 0.0, 1.0).unwrap();
        let (i0, i1) = bt.unit_moments(0.0, 1.0);
        let q0 = quad::integrate_gk(|u| bt.eval_unit(u), 0.0, 1.0, &[0.2, 0.9], 1e-13).unwrap();
        let q1 = quad::integrate_gk(|u| u * bt.eval_unit(u), 0.0, 1.0, &[0.2, 0.9], 1e-13).unwrap();
        assert_relative_eq!(i0, q0, epsilon = 1e-12);
        assert_relative_eq!(i1, q1, epsilon = 1e-12);
    }
}
