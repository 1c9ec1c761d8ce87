//! Dense univariate polynomials and piecewise polynomials on an interval.
//!
//! Coefficients are stored in ascending order (`coeffs[k]` multiplies `x^k`).
//! Every integral in the crate that has a closed form goes through the
//! antiderivatives defined here.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Roots closer than this are reported once.
pub const ROOT_CLUSTER_TOL: f64 = 1e-9;

const MAX_NEWTON_STEPS: usize = 30;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "Vec<f64>", into = "Vec<f64>")]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl From<Vec<f64>> for Polynomial {
    fn from(coeffs: Vec<f64>) -> Self {
        Polynomial::new(coeffs)
    }
}

impl From<Polynomial> for Vec<f64> {
    fn from(p: Polynomial) -> Self {
        p.coeffs
    }
}

impl Polynomial {
    /// Builds a polynomial, dropping trailing zero coefficients.
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: f64) -> Self {
        Polynomial::new(vec![c])
    }

    /// `c * x^k`
    pub fn monomial(k: usize, c: f64) -> Self {
        let mut coeffs = vec![0.0; k + 1];
        coeffs[k] = c;
        Polynomial::new(coeffs)
    }

    /// `slope * x + intercept`
    pub fn linear(slope: f64, intercept: f64) -> Self {
        Polynomial::new(vec![intercept, slope])
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree of the polynomial; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// Largest absolute coefficient.
    pub fn max_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0_f64, |m, c| m.max(c.abs()))
    }

    /// `sum |c_k| |x|^k`, the natural rounding scale of `eval(x)`.
    pub fn magnitude_at(&self, x: f64) -> f64 {
        let ax = x.abs();
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, &c| acc * ax + c.abs())
    }

    pub fn scale(&self, c: f64) -> Self {
        Polynomial::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn derivative(&self) -> Self {
        Polynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * k as f64)
                .collect(),
        )
    }

    /// Antiderivative vanishing at zero.
    pub fn antiderivative(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(0.0);
        coeffs.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c / (k + 1) as f64),
        );
        Polynomial::new(coeffs)
    }

    pub fn integrate(&self, lo: f64, hi: f64) -> f64 {
        let a = self.antiderivative();
        a.eval(hi) - a.eval(lo)
    }

    /// Multiplies by `x^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return Polynomial::zero();
        }
        let mut coeffs = vec![0.0; k];
        coeffs.extend_from_slice(&self.coeffs);
        Polynomial::new(coeffs)
    }

    /// The polynomial `x -> p(s * x + t)`.
    pub fn compose_affine(&self, s: f64, t: f64) -> Self {
        let inner = Polynomial::linear(s, t);
        self.coeffs
            .iter()
            .rev()
            .fold(Polynomial::zero(), |acc, &c| &(&acc * &inner) + &Polynomial::constant(c))
    }

    /// Euclidean division. Panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Polynomial) -> (Polynomial, Polynomial) {
        assert!(!divisor.is_zero(), "division by the zero polynomial");
        let dd = divisor.degree();
        let lead = divisor.coeffs[dd];
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Polynomial::zero(), self.clone());
        }
        let mut quot = vec![0.0; rem.len() - dd];
        for i in (0..quot.len()).rev() {
            let factor = rem[i + dd] / lead;
            quot[i] = factor;
            for (j, dc) in divisor.coeffs.iter().enumerate() {
                rem[i + j] -= factor * dc;
            }
            rem[i + dd] = 0.0;
        }
        rem.truncate(dd);
        (Polynomial::new(quot), Polynomial::new(rem))
    }

    /// Divides out the linear factor `(x - r)` by synthetic division and drops the remainder.
    pub fn deflate(&self, r: f64) -> Polynomial {
        if self.coeffs.len() <= 1 {
            return Polynomial::zero();
        }
        let n = self.coeffs.len();
        let mut out = vec![0.0; n - 1];
        let mut carry = 0.0;
        for k in (1..n).rev() {
            carry = carry * r + self.coeffs[k];
            out[k - 1] = carry;
        }
        Polynomial::new(out)
    }

    /// Zeroes coefficients below `rel * max_coeff` and trims.
    pub fn chop(&self, rel: f64) -> Polynomial {
        let cut = rel * self.max_coeff();
        Polynomial::new(
            self.coeffs
                .iter()
                .map(|&c| if c.abs() <= cut { 0.0 } else { c })
                .collect(),
        )
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new(
            (0..n)
                .map(|k| {
                    self.coeffs.get(k).copied().unwrap_or(0.0)
                        + rhs.coeffs.get(k).copied().unwrap_or(0.0)
                })
                .collect(),
        )
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &(-rhs)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(-1.0)
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: Polynomial) -> Polynomial {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// Sign changes of the Sturm chain at `x`, zeros skipped.
fn sign_changes(chain: &[Polynomial], x: f64) -> usize {
    let mut count = 0;
    let mut last = 0.0_f64;
    for p in chain {
        let v = p.eval(x);
        if v == 0.0 {
            continue;
        }
        if last != 0.0 && (v > 0.0) != (last > 0.0) {
            count += 1;
        }
        last = v;
    }
    count
}

fn sturm_chain(p: &Polynomial) -> Vec<Polynomial> {
    let normalize = |q: Polynomial| {
        let m = q.max_coeff();
        if m > 0.0 {
            q.scale(1.0 / m)
        } else {
            q
        }
    };
    let mut chain = vec![normalize(p.clone())];
    let d = p.derivative();
    if d.is_zero() {
        return chain;
    }
    chain.push(normalize(d));
    loop {
        let n = chain.len();
        let (_, r) = chain[n - 2].div_rem(&chain[n - 1]);
        // Chain members are normalized to unit max coefficient, so a
        // remainder at rounding level marks the gcd of a repeated root.
        if r.max_coeff() <= 1e-10 {
            break;
        }
        chain.push(normalize(-&r));
    }
    chain
}

/// Real roots of `p` in `[lo, hi]`, ascending, repeated roots reported once.
///
/// Roots are isolated with Sturm counts and bisection, then polished with at
/// most 30 safeguarded Newton steps. Roots closer than [`ROOT_CLUSTER_TOL`]
/// are merged.
pub fn roots_in(p: &Polynomial, lo: f64, hi: f64, tol: f64) -> Result<Vec<f64>> {
    if !(lo < hi) || !(tol > 0.0) {
        return domain(format!("roots_in needs lo < hi and tol > 0 (got [{lo}, {hi}], tol {tol})"));
    }
    let p = p.chop(1e-15);
    if p.is_zero() {
        return Err(Error::IdenticallyZero { lo, hi });
    }
    if p.degree() == 0 {
        return Ok(Vec::new());
    }
    let chain = sturm_chain(&p);
    let mut roots = Vec::new();
    let at_zero = |x: f64| p.eval(x).abs() <= 4.0 * f64::EPSILON * p.magnitude_at(x);
    if at_zero(lo) {
        roots.push(lo);
    }
    let mut stack = vec![(lo, hi, sign_changes(&chain, lo), sign_changes(&chain, hi))];
    while let Some((a, b, va, vb)) = stack.pop() {
        let count = va.saturating_sub(vb);
        if count == 0 {
            continue;
        }
        if b - a <= tol {
            roots.push(polish(&p, a, b, tol));
            continue;
        }
        if count == 1 && (p.eval(a) * p.eval(b) < 0.0) {
            roots.push(polish(&p, a, b, tol));
            continue;
        }
        let mid = 0.5 * (a + b);
        let vm = sign_changes(&chain, mid);
        stack.push((a, mid, va, vm));
        stack.push((mid, b, vm, vb));
    }
    roots.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let mut out: Vec<f64> = Vec::with_capacity(roots.len());
    for r in roots {
        match out.last() {
            Some(&prev) if (r - prev).abs() < ROOT_CLUSTER_TOL => {}
            _ => out.push(r.clamp(lo, hi)),
        }
    }
    Ok(out)
}

/// Bisection down to `tol` (when the bracket has a sign change) followed by
/// Newton steps that are rejected if they leave the bracket.
fn polish(p: &Polynomial, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let mut fa = p.eval(a);
    let fb = p.eval(b);
    if fa * fb < 0.0 {
        while b - a > tol {
            let m = 0.5 * (a + b);
            let fm = p.eval(m);
            if fm == 0.0 {
                return m;
            }
            if (fm > 0.0) == (fa > 0.0) {
                a = m;
                fa = fm;
            } else {
                b = m;
            }
        }
    }
    let dp = p.derivative();
    let mut x = 0.5 * (a + b);
    for _ in 0..MAX_NEWTON_STEPS {
        let d = dp.eval(x);
        if d == 0.0 {
            break;
        }
        let next = x - p.eval(x) / d;
        if !(next >= a && next <= b) {
            break;
        }
        let done = (next - x).abs() <= f64::EPSILON * x.abs().max(1.0);
        x = next;
        if done {
            break;
        }
    }
    x
}

/// Piecewise polynomial on `[breakpoints[0], breakpoints[n]]`.
///
/// Interior breakpoints belong to the piece on their right; the right end of
/// the domain belongs to the last piece.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PiecewisePolynomial {
    breakpoints: Vec<f64>,
    pieces: Vec<Polynomial>,
}

impl PiecewisePolynomial {
    pub fn new(breakpoints: Vec<f64>, pieces: Vec<Polynomial>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::InvalidSpec("piecewise polynomial needs at least one piece".into()));
        }
        if breakpoints.len() != pieces.len() + 1 {
            return Err(Error::InvalidSpec(format!(
                "{} pieces need {} breakpoints, got {}",
                pieces.len(),
                pieces.len() + 1,
                breakpoints.len()
            )));
        }
        if breakpoints.iter().any(|x| !x.is_finite())
            || pieces.iter().any(|p| p.coeffs().iter().any(|c| !c.is_finite()))
        {
            return Err(Error::InvalidSpec("non-finite breakpoint or coefficient".into()));
        }
        if breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidSpec("breakpoints must be strictly increasing".into()));
        }
        Ok(PiecewisePolynomial { breakpoints, pieces })
    }

    pub fn single(p: Polynomial, lo: f64, hi: f64) -> Result<Self> {
        PiecewisePolynomial::new(vec![lo, hi], vec![p])
    }

    pub fn constant(c: f64, lo: f64, hi: f64) -> Result<Self> {
        PiecewisePolynomial::single(Polynomial::constant(c), lo, hi)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[Polynomial] {
        &self.pieces
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.breakpoints[0], *self.breakpoints.last().unwrap())
    }

    /// Pieces paired with their intervals.
    pub fn segments(&self) -> impl Iterator<Item = (f64, f64, &Polynomial)> + '_ {
        self.breakpoints
            .windows(2)
            .zip(&self.pieces)
            .map(|(w, p)| (w[0], w[1], p))
    }

    fn check_in_domain(&self, x: f64) -> Result<()> {
        let (lo, hi) = self.domain();
        if x >= lo && x <= hi {
            Ok(())
        } else {
            domain(format!("{x} outside [{lo}, {hi}]"))
        }
    }

    /// Index of the piece owning `x` (right-piece convention).
    pub fn piece_index(&self, x: f64) -> usize {
        let n = self.pieces.len();
        let idx = self.breakpoints[1..n].partition_point(|&b| b <= x);
        idx.min(n - 1)
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        self.check_in_domain(x)?;
        Ok(self.pieces[self.piece_index(x)].eval(x))
    }

    /// Checks that neighbouring pieces agree at interior breakpoints within `rel_tol`.
    pub fn is_continuous(&self, rel_tol: f64) -> bool {
        self.pieces.windows(2).enumerate().all(|(i, w)| {
            let x = self.breakpoints[i + 1];
            let (l, r) = (w[0].eval(x), w[1].eval(x));
            let scale = w[0].magnitude_at(x).max(w[1].magnitude_at(x)).max(1.0);
            (l - r).abs() <= rel_tol * scale
        })
    }

    /// `∫_lo^hi x^k p(x) dx`, exact up to rounding.
    pub fn moment(&self, k: usize, lo: f64, hi: f64) -> Result<f64> {
        if lo > hi {
            return domain(format!("moment interval reversed: [{lo}, {hi}]"));
        }
        self.check_in_domain(lo)?;
        self.check_in_domain(hi)?;
        let mut total = 0.0;
        for (a, b, p) in self.segments() {
            let s = a.max(lo);
            let e = b.min(hi);
            if s < e {
                total += p.shift(k).integrate(s, e);
            }
        }
        Ok(total)
    }

    pub fn integral(&self, lo: f64, hi: f64) -> Result<f64> {
        self.moment(0, lo, hi)
    }

    pub fn map_pieces(&self, f: impl Fn(&Polynomial) -> Polynomial) -> Self {
        PiecewisePolynomial {
            breakpoints: self.breakpoints.clone(),
            pieces: self.pieces.iter().map(f).collect(),
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map_pieces(|p| p.scale(c))
    }

    pub fn square(&self) -> Self {
        self.map_pieces(|p| p * p)
    }

    /// Re-expresses the function on `[0, 1]` via `u -> p(lo + (hi - lo) u)`.
    pub fn to_unit_interval(&self) -> Self {
        let (lo, hi) = self.domain();
        let w = hi - lo;
        let mut breakpoints: Vec<f64> = self.breakpoints.iter().map(|x| (x - lo) / w).collect();
        breakpoints[0] = 0.0;
        *breakpoints.last_mut().unwrap() = 1.0;
        PiecewisePolynomial {
            breakpoints,
            pieces: self.pieces.iter().map(|p| p.compose_affine(w, lo)).collect(),
        }
    }

    /// Mirror image `x -> p(lo + hi - x)` on the same domain.
    pub fn reflect(&self) -> Self {
        let (lo, hi) = self.domain();
        let breakpoints = self.breakpoints.iter().rev().map(|x| lo + hi - x).collect();
        let pieces = self
            .pieces
            .iter()
            .rev()
            .map(|p| p.compose_affine(-1.0, lo + hi))
            .collect();
        PiecewisePolynomial { breakpoints, pieces }
    }

    /// Pointwise combination on the merged breakpoint grid. Domains must match.
    pub fn combine(
        &self,
        other: &PiecewisePolynomial,
        op: impl Fn(&Polynomial, &Polynomial) -> Polynomial,
    ) -> Result<Self> {
        let (a0, b0) = self.domain();
        let (a1, b1) = other.domain();
        if a0 != a1 || b0 != b1 {
            return domain(format!("domain mismatch: [{a0}, {b0}] vs [{a1}, {b1}]"));
        }
        let mut grid: Vec<f64> = self
            .breakpoints
            .iter()
            .chain(&other.breakpoints)
            .copied()
            .collect();
        grid.sort_by(|x, y| x.partial_cmp(y).unwrap());
        grid.dedup();
        let pieces = grid
            .windows(2)
            .map(|w| {
                let mid = 0.5 * (w[0] + w[1]);
                op(&self.pieces[self.piece_index(mid)], &other.pieces[other.piece_index(mid)])
            })
            .collect();
        PiecewisePolynomial::new(grid, pieces)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn poly(c: &[f64]) -> Polynomial {
        Polynomial::new(c.to_vec())
    }

    #[test]
    fn trailing_zeros_trimmed() {
        assert_eq!(poly(&[1.0, 2.0, 0.0, 0.0]).coeffs(), &[1.0, 2.0]);
        assert!(poly(&[0.0]).is_zero());
        assert_eq!(poly(&[3.0, 0.0, 5.0]).degree(), 2);
    }

    #[test]
    fn eval_examples() {
        let sq = PiecewisePolynomial::single(Polynomial::monomial(2, 1.0), 0.0, 1.0).unwrap();
        assert_eq!(sq.eval(0.5).unwrap(), 0.25);
        let seven = PiecewisePolynomial::constant(7.0, 0.0, 2.0).unwrap();
        assert_eq!(seven.eval(1.3).unwrap(), 7.0);
        let hat = PiecewisePolynomial::new(
            vec![0.0, 1.0, 2.0],
            vec![poly(&[0.0, 1.0]), poly(&[2.0, -1.0])],
        )
        .unwrap();
        assert_eq!(hat.eval(1.0).unwrap(), 1.0);
        assert_eq!(hat.eval(2.0).unwrap(), 0.0);
        assert!(matches!(hat.eval(2.5), Err(Error::Domain(_))));
        assert!(matches!(hat.eval(-0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn right_piece_owns_breakpoint() {
        let p = PiecewisePolynomial::new(
            vec![0.0, 1.0, 2.0],
            vec![poly(&[0.0]), poly(&[5.0])],
        )
        .unwrap();
        assert_eq!(p.eval(1.0).unwrap(), 5.0);
        assert_eq!(p.piece_index(2.0), 1);
    }

    #[test]
    fn moment_examples() {
        let x = PiecewisePolynomial::single(poly(&[0.0, 1.0]), 0.0, 1.0).unwrap();
        assert_relative_eq!(x.moment(0, 0.0, 1.0).unwrap(), 0.5, epsilon = 1e-15);
        let x2 = PiecewisePolynomial::single(Polynomial::monomial(2, 1.0), 0.0, 1.0).unwrap();
        assert_relative_eq!(x2.moment(1, 0.0, 1.0).unwrap(), 0.25, epsilon = 1e-15);
        assert_relative_eq!(x2.moment(0, 0.0, 1.0 / 3.0).unwrap(), 1.0 / 81.0, epsilon = 1e-16);
        assert!(x2.moment(0, 0.0, 1.5).is_err());
        assert!(x2.moment(0, 0.6, 0.5).is_err());
    }

    #[test]
    fn invalid_construction() {
        assert!(PiecewisePolynomial::new(vec![0.0, 0.0], vec![poly(&[1.0])]).is_err());
        assert!(PiecewisePolynomial::new(vec![0.0, 1.0, 0.5], vec![poly(&[1.0]), poly(&[1.0])]).is_err());
        assert!(PiecewisePolynomial::new(vec![0.0], vec![]).is_err());
        assert!(PiecewisePolynomial::new(vec![0.0, 1.0], vec![poly(&[1.0]), poly(&[2.0])]).is_err());
    }

    #[test]
    fn arithmetic_identities() {
        let p = poly(&[1.0, -2.0, 3.0]);
        let zero = Polynomial::zero();
        let one = Polynomial::constant(1.0);
        assert_eq!(&p + &zero, p);
        assert_eq!(&p * &one, p);
        assert!((&p * &zero).is_zero());
        assert!((&p - &p).is_zero());
        assert_eq!(p.scale(2.0).coeffs(), &[2.0, -4.0, 6.0]);
        assert_eq!(p.compose_affine(1.0, 0.0), p);
        assert_eq!(p.antiderivative().derivative(), p);
        assert_eq!(&poly(&[1.0, 1.0]) * &poly(&[-1.0, 1.0]), poly(&[-1.0, 0.0, 1.0]));
    }

    #[test]
    fn division_and_deflation() {
        // (x - 1)^2 (3x - 1)(x + 1)
        let p = poly(&[-1.0, 4.0, -2.0, -4.0, 3.0]);
        let (q, r) = p.div_rem(&poly(&[-1.0, 1.0]));
        assert!(r.chop(1e-14).is_zero());
        let d = p.deflate(1.0).deflate(1.0);
        for (a, b) in d.coeffs().iter().zip(&[-1.0, 2.0, 3.0]) {
            assert_relative_eq!(*a, *b, epsilon = 1e-14);
        }
        assert_eq!(q.degree(), 3);
    }

    #[test]
    fn roots_examples() {
        let r = roots_in(&poly(&[-0.25, 0.0, 1.0]), 0.0, 1.0, 1e-12).unwrap();
        assert_eq!(r.len(), 1);
        assert_relative_eq!(r[0], 0.5, epsilon = 1e-12);

        let eps = 1e-6;
        let r = roots_in(&poly(&[-1.0, 4.0, -2.0, -4.0, 3.0]), eps, 1.0 - eps, 1e-12).unwrap();
        assert_eq!(r.len(), 1);
        assert_relative_eq!(r[0], 1.0 / 3.0, epsilon = 1e-12);

        assert!(roots_in(&poly(&[1.0, 0.0, 1.0]), 0.0, 1.0, 1e-12).unwrap().is_empty());
        assert!(matches!(
            roots_in(&Polynomial::zero(), 0.0, 1.0, 1e-12),
            Err(Error::IdenticallyZero { .. })
        ));
    }

    #[test]
    fn double_root_reported_once() {
        // (x - 0.4)^2 (x - 0.7)
        let p = &(&poly(&[-0.4, 1.0]) * &poly(&[-0.4, 1.0])) * &poly(&[-0.7, 1.0]);
        let r = roots_in(&p, 0.0, 1.0, 1e-12).unwrap();
        assert_eq!(r.len(), 2);
        assert!((r[0] - 0.4).abs() < 1e-6);
        assert_relative_eq!(r[1], 0.7, epsilon = 1e-12);
    }

    #[test]
    fn endpoint_root_found() {
        let r = roots_in(&poly(&[0.0, 1.0, 1.0]), 0.0, 1.0, 1e-12).unwrap();
        assert_eq!(r, vec![0.0]);
    }

    #[test]
    fn reflect_and_unit_interval() {
        let p = PiecewisePolynomial::new(
            vec![2.0, 3.0, 6.0],
            vec![poly(&[0.0, 1.0]), poly(&[9.0, -2.0])],
        )
        .unwrap();
        let u = p.to_unit_interval();
        assert_eq!(u.domain(), (0.0, 1.0));
        for &t in &[0.0, 0.1, 0.25, 0.5, 0.9, 1.0] {
            assert_relative_eq!(u.eval(t).unwrap(), p.eval(2.0 + 4.0 * t).unwrap(), epsilon = 1e-12);
        }
        let r = p.reflect();
        for &x in &[2.0, 2.5, 3.3, 5.9, 6.0] {
            assert_relative_eq!(r.eval(x).unwrap(), p.eval(8.0 - x).unwrap(), epsilon = 1e-12);
        }
    }

    fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
        // Newton iteration on P_n from Chebyshev guesses.
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        (nodes, weights)
    }

    fn gl_integrate(p: &PiecewisePolynomial, k: usize, lo: f64, hi: f64) -> f64 {
        let (nodes, weights) = gauss_legendre(64);
        let mut total = 0.0;
        for (a, b, piece) in p.segments() {
            let (s, e) = (a.max(lo), b.min(hi));
            if s >= e {
                continue;
            }
            let (m, h) = (0.5 * (s + e), 0.5 * (e - s));
            for (x, w) in nodes.iter().zip(&weights) {
                let t = m + h * x;
                total += h * w * t.powi(k as i32) * piece.eval(t);
            }
        }
        total
    }

    fn arb_piecewise() -> impl Strategy<Value = PiecewisePolynomial> {
        (1usize..5, proptest::collection::vec(proptest::collection::vec(-3.0f64..3.0, 1..7), 4))
            .prop_flat_map(|(n, coeffs)| {
                proptest::collection::vec(0.05f64..1.0, n).prop_map(move |widths| {
                    let mut bps = vec![-0.7];
                    for w in &widths {
                        bps.push(bps.last().unwrap() + w);
                    }
                    let pieces = coeffs.iter().take(n).cloned().map(Polynomial::new).collect();
                    PiecewisePolynomial::new(bps, pieces).unwrap()
                })
            })
    }

    proptest! {
        #[test]
        fn moment_matches_gauss_legendre(p in arb_piecewise(), k in 0usize..4, s in 0.0f64..1.0, t in 0.0f64..1.0) {
            let (a, b) = p.domain();
            let (s, t) = if s < t { (s, t) } else { (t, s) };
            let lo = a + s * (b - a);
            let hi = a + t * (b - a);
            let exact = p.moment(k, lo, hi).unwrap();
            let oracle = gl_integrate(&p, k, lo, hi);
            let scale = gl_integrate(&p.map_pieces(|q| Polynomial::new(q.coeffs().iter().map(|c| c.abs()).collect())), k, lo, hi).abs().max(1.0);
            prop_assert!((exact - oracle).abs() <= 1e-10 * scale, "exact {} oracle {}", exact, oracle);
        }

        #[test]
        fn planted_cubic_roots_recovered(mut r in proptest::collection::vec(0.02f64..0.98, 3), lead in prop_oneof![-5.0f64..-0.2, 0.2f64..5.0]) {
            r.sort_by(|a, b| a.partial_cmp(b).unwrap());
            prop_assume!(r[1] - r[0] > 1e-3 && r[2] - r[1] > 1e-3);
            let p = r.iter().fold(Polynomial::constant(lead), |acc, &x| &acc * &Polynomial::linear(1.0, -x));
            let found = roots_in(&p, 0.0, 1.0, 1e-12).unwrap();
            prop_assert_eq!(found.len(), 3);
            for (a, b) in found.iter().zip(&r) {
                prop_assert!((a - b).abs() < 1e-9, "found {:?} planted {:?}", found, r);
                prop_assert!(p.eval(*a).abs() <= 1e-12 * p.magnitude_at(*a).max(1.0));
            }
        }

        #[test]
        fn compose_affine_pointwise(c in proptest::collection::vec(-2.0f64..2.0, 1..7), s in -3.0f64..3.0, t in -3.0f64..3.0, x in -1.0f64..1.0) {
            let p = Polynomial::new(c);
            let q = p.compose_affine(s, t);
            let lhs = q.eval(x);
            let rhs = p.eval(s * x + t);
            prop_assert!((lhs - rhs).abs() <= 1e-12 * p.magnitude_at(s * x + t).max(1.0));
        }
    }
}
