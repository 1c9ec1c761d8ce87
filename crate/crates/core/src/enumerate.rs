//! Critical realizations of width-one networks against continuous
//! piecewise-polynomial targets.
//!
//! A critical point realizes one of: a constant (the mean), the least-squares
//! affine fit, or a single kink at normalized position `q ∈ (0, 1)`. For an
//! increasing kink (active side `x > q`) on the unit interval, `q` solves
//!
//! ```text
//! D(q) = (1−q)² ∫₀^q g − 2q ∫_q^1 (q + 2 − 3x) g(x) dx = 0
//! ```
//!
//! with `c = (1/q) ∫₀^q g` and `vw = 2 (∫₀¹ g − c) / (1−q)²`; roots with
//! `vw = 0` belong to the constant case. `D` restricted to each piece is a
//! polynomial in `q`, so there are finitely many solutions. Decreasing kinks
//! follow by reflecting the target.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::landscape::{classify, max_norm, CritClass, HessianCoords, Landscape, DEFAULT_FD_STEP};
use crate::network::{Params, Realization};
use crate::polyalg::{roots_in, PiecewisePolynomial, Polynomial, ROOT_CLUSTER_TOL};
use crate::target::Target;

/// Candidates with `|∫₀¹ g − (1/q) ∫₀^q g|` below this are dropped (`vw = 0`).
pub const EXCLUSION_TOL: f64 = 1e-12;
/// Default L² threshold for merging catalog entries.
pub const DEFAULT_DEDUP: f64 = 1e-8;

const ROOT_TOL: f64 = 1e-12;
const CONTINUITY_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// `w > 0`: active to the right of the kink.
    Increasing,
    /// `w < 0`: active to the left of the kink.
    Decreasing,
}

/// A single-kink critical realization on the unit interval:
/// `c + vw·max(x − q, 0)` (increasing) or `c + vw·min(x − q, 0)` (decreasing).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KinkSolution {
    pub q: f64,
    pub c: f64,
    pub vw: f64,
    pub orientation: Orientation,
}

impl KinkSolution {
    /// Realization on `[a, b]`.
    pub fn realization(&self, a: f64, b: f64) -> Realization {
        let kink = a + self.q * (b - a);
        let s = self.vw / (b - a);
        match self.orientation {
            Orientation::Increasing => Realization::from_kink_deltas(a, b, self.c, 0.0, vec![(kink, s)]),
            Orientation::Decreasing => {
                Realization::from_kink_deltas(a, b, self.c - s * (kink - a), s, vec![(kink, -s)])
            }
        }
    }

    /// Width-one parameters (`w = ±1`) realizing the solution on `[a, b]`.
    pub fn lift(&self, a: f64, b: f64) -> Params {
        let kink = a + self.q * (b - a);
        let s = self.vw / (b - a);
        let w = match self.orientation {
            Orientation::Increasing => 1.0,
            Orientation::Decreasing => -1.0,
        };
        Params::new(1, vec![w, -w * kink, s / w, self.c]).expect("H = 1 layout")
    }
}

/// Solutions and the candidate roots dropped because `vw = 0`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct KinkSearch {
    pub solutions: Vec<KinkSolution>,
    pub excluded: Vec<f64>,
}

fn require_unit(g: &PiecewisePolynomial) -> Result<()> {
    if g.domain() != (0.0, 1.0) {
        let (a, b) = g.domain();
        return Err(Error::InvalidSpec(format!("expected a target on [0, 1], got [{a}, {b}]")));
    }
    Ok(())
}

fn target_scale(g: &PiecewisePolynomial) -> f64 {
    g.pieces().iter().fold(0.0_f64, |m, p| m.max(p.max_coeff()))
}

/// Per-piece polynomials in `q`: `(∫₀^q g, ∫_q^1 g, ∫_q^1 x g)`.
fn piece_moment_polys(g: &PiecewisePolynomial, j: usize) -> (Polynomial, Polynomial, Polynomial) {
    let bp = g.breakpoints();
    let (lo, hi) = (bp[j], bp[j + 1]);
    let p = &g.pieces()[j];
    let a0 = p.antiderivative();
    let a1 = p.shift(1).antiderivative();
    let head = g.moment(0, 0.0, lo).expect("inside [0, 1]");
    let tail0 = g.moment(0, hi, 1.0).expect("inside [0, 1]");
    let tail1 = g.moment(1, hi, 1.0).expect("inside [0, 1]");
    let i0 = &Polynomial::constant(head - a0.eval(lo)) + &a0;
    let j0 = &Polynomial::constant(a0.eval(hi) + tail0) - &a0;
    let j1 = &Polynomial::constant(a1.eval(hi) + tail1) - &a1;
    (i0, j0, j1)
}

/// `D` restricted to piece `j`, with the structural factors `q` (first
/// piece) and `(1−q)²` (last piece) divided out.
pub fn piece_residual_poly(g: &PiecewisePolynomial, j: usize) -> Polynomial {
    let (i0, j0, j1) = piece_moment_polys(g, j);
    let omq = Polynomial::linear(-1.0, 1.0);
    let q = Polynomial::linear(1.0, 0.0);
    let k = &(&Polynomial::linear(1.0, 2.0) * &j0) - &j1.scale(3.0);
    let mut d = &(&(&omq * &omq) * &i0) - &(&q * &k).scale(2.0);
    let bp = g.breakpoints();
    if bp[j] == 0.0 {
        d = d.deflate(0.0);
    }
    if bp[j + 1] == 1.0 {
        d = d.deflate(1.0).deflate(1.0);
    }
    d
}

/// Direct evaluation of `D(q)` from target moments (no expansion in `q`).
pub fn residual_increasing(g: &PiecewisePolynomial, q: f64) -> f64 {
    let left = g.moment(0, 0.0, q).expect("q in [0, 1]");
    let r0 = g.moment(0, q, 1.0).expect("q in [0, 1]");
    let r1 = g.moment(1, q, 1.0).expect("q in [0, 1]");
    (1.0 - q).powi(2) * left - 2.0 * q * ((q + 2.0) * r0 - 3.0 * r1)
}

/// Direct evaluation of the decreasing-case residual
/// `q² ∫_q^1 g − 6 (1−q) ∫₀^q (x − q/3) g`.
pub fn residual_decreasing(g: &PiecewisePolynomial, q: f64) -> f64 {
    let r0 = g.moment(0, q, 1.0).expect("q in [0, 1]");
    let l0 = g.moment(0, 0.0, q).expect("q in [0, 1]");
    let l1 = g.moment(1, 0.0, q).expect("q in [0, 1]");
    q * q * r0 - 6.0 * (1.0 - q) * (l1 - q / 3.0 * l0)
}

/// Increasing kinks of a continuous piecewise polynomial on `[0, 1]`.
pub fn enum_kink_increasing(g: &PiecewisePolynomial) -> Result<Vec<KinkSolution>> {
    Ok(search_increasing(g)?.solutions)
}

/// Like [`enum_kink_increasing`] but also reports excluded candidates.
pub fn search_increasing(g: &PiecewisePolynomial) -> Result<KinkSearch> {
    require_unit(g)?;
    let total = g.moment(0, 0.0, 1.0)?;
    let scale = target_scale(g);
    let mut candidates = Vec::new();
    for j in 0..g.pieces().len() {
        let bp = g.breakpoints();
        let (lo, hi) = (bp[j], bp[j + 1]);
        let d = piece_residual_poly(g, j);
        if d.max_coeff() <= 1e-13 * scale {
            // D vanishes on the whole piece; acceptable only if every point
            // of the piece is a vw = 0 candidate.
            let (i0, _, _) = piece_moment_polys(g, j);
            let excl = &Polynomial::linear(total, 0.0) - &i0;
            if excl.max_coeff() <= 1e-13 * scale {
                continue;
            }
            return Err(Error::Degenerate { lo, hi });
        }
        match roots_in(&d, lo, hi, ROOT_TOL) {
            Ok(r) => candidates.extend(r),
            Err(Error::IdenticallyZero { .. }) => return Err(Error::Degenerate { lo, hi }),
            Err(e) => return Err(e),
        }
    }
    candidates.sort_by(|x, y| x.partial_cmp(y).unwrap());
    candidates.dedup_by(|x, y| (*x - *y).abs() < ROOT_CLUSTER_TOL);
    let mut out = KinkSearch::default();
    for q in candidates {
        if !(q > ROOT_TOL && q < 1.0 - ROOT_TOL) {
            continue;
        }
        let c = g.moment(0, 0.0, q)? / q;
        if (total - c).abs() < EXCLUSION_TOL {
            out.excluded.push(q);
            continue;
        }
        let vw = 2.0 * (total - c) / (1.0 - q).powi(2);
        out.solutions.push(KinkSolution { q, c, vw, orientation: Orientation::Increasing });
    }
    Ok(out)
}

/// Decreasing kinks, via the reflected target `g(1 − x)`.
pub fn enum_kink_decreasing(g: &PiecewisePolynomial) -> Result<Vec<KinkSolution>> {
    Ok(search_decreasing(g)?.solutions)
}

pub fn search_decreasing(g: &PiecewisePolynomial) -> Result<KinkSearch> {
    require_unit(g)?;
    let refl = search_increasing(&g.reflect())?;
    let mut solutions: Vec<KinkSolution> = refl
        .solutions
        .into_iter()
        .map(|s| KinkSolution { q: 1.0 - s.q, c: s.c, vw: -s.vw, orientation: Orientation::Decreasing })
        .collect();
    solutions.sort_by(|x, y| x.q.partial_cmp(&y.q).unwrap());
    let mut excluded: Vec<f64> = refl.excluded.into_iter().map(|q| 1.0 - q).collect();
    excluded.sort_by(|x, y| x.partial_cmp(y).unwrap());
    Ok(KinkSearch { solutions, excluded })
}

/// The three moment equations of a kink solution on the unit interval; all
/// vanish at a critical realization.
///
/// Increasing: `∫₀^q (N−g), ∫_q^1 (N−g), ∫_q^1 x (N−g)`.
/// Decreasing: `∫_q^1 (N−g), ∫₀^q (N−g), ∫₀^q x (N−g)`.
pub fn kink_residuals(g: &PiecewisePolynomial, s: &KinkSolution) -> Result<[f64; 3]> {
    require_unit(g)?;
    let (q, c, vw) = (s.q, s.c, s.vw);
    Ok(match s.orientation {
        Orientation::Increasing => {
            let l = q * c - g.moment(0, 0.0, q)?;
            let omq = 1.0 - q;
            let r0 = c * omq + 0.5 * vw * omq * omq - g.moment(0, q, 1.0)?;
            let xm = (1.0 - q.powi(3)) / 3.0 - 0.5 * q * (1.0 - q * q);
            let r1 = 0.5 * c * (1.0 - q * q) + vw * xm - g.moment(1, q, 1.0)?;
            [l, r0, r1]
        }
        Orientation::Decreasing => {
            let r = c * (1.0 - q) - g.moment(0, q, 1.0)?;
            let l0 = c * q - 0.5 * vw * q * q - g.moment(0, 0.0, q)?;
            // ∫₀^q x (x − q) dx = −q³/6
            let l1 = 0.5 * c * q * q - vw * q.powi(3) / 6.0 - g.moment(1, 0.0, q)?;
            [r, l0, l1]
        }
    })
}

/// Mean of the target: the constant critical realization.
pub fn enum_constant(t: &Target) -> Result<Realization> {
    let (a, b) = t.domain();
    Ok(Realization::constant(a, b, t.int(a, b)? / (b - a)))
}

/// Least-squares affine fit `(slope, intercept)`.
pub fn affine_fit(t: &Target) -> Result<(f64, f64)> {
    let (a, b) = t.domain();
    let (i0, i1) = t.moments(a, b)?;
    let m11 = (b * b * b - a * a * a) / 3.0;
    let m10 = 0.5 * (b * b - a * a);
    let m00 = b - a;
    // [m10 m00; m11 m10] [c1; c2] = [i0; i1]; determinant −(b−a)⁴/12.
    let det = m10 * m10 - m00 * m11;
    let c1 = (i0 * m10 - m00 * i1) / det;
    let c2 = (m10 * i1 - m11 * i0) / det;
    Ok((c1, c2))
}

/// The affine critical realization.
pub fn enum_affine(t: &Target) -> Result<Realization> {
    let (a, b) = t.domain();
    let (c1, c2) = affine_fit(t)?;
    Ok(Realization::affine(a, b, c1, c2))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntryKind {
    Constant,
    Affine,
    KinkIncreasing,
    KinkDecreasing,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub kind: EntryKind,
    /// Normalized kink position.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    /// Kink position on `[a, b]`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kink: Option<f64>,
    /// Constant level (constant / kink) or intercept (affine).
    pub c: f64,
    /// Slope of the affine fit.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slope: Option<f64>,
    /// Active-side slope on the unit interval (kinks only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vw: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residuals: Option<[f64; 3]>,
    pub theta: Params,
    pub realization: Realization,
    pub risk: f64,
    pub grad_norm: f64,
    /// Advisory Hessian-based label.
    pub class: Option<CritClass>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalCatalog {
    pub entries: Vec<CatalogEntry>,
}

impl CriticalCatalog {
    pub fn min_risk(&self) -> f64 {
        self.entries.iter().map(|e| e.risk).fold(f64::INFINITY, f64::min)
    }

    /// Entry with the smallest risk.
    pub fn global_min(&self) -> Option<&CatalogEntry> {
        self.entries.iter().min_by(|x, y| x.risk.partial_cmp(&y.risk).unwrap())
    }

    pub fn max_residual(&self) -> f64 {
        self.entries
            .iter()
            .filter_map(|e| e.residuals)
            .flat_map(|r| r.into_iter())
            .fold(0.0_f64, |m, r| m.max(r.abs()))
    }

    pub fn max_grad_norm(&self) -> f64 {
        self.entries.iter().map(|e| e.grad_norm).fold(0.0, f64::max)
    }
}

/// Zero-eigenvalue count expected at a width-one lift: the rescaling
/// `(w, b, v) ↦ (λw, λb, v/λ)` for a kink, the two-dimensional fibres of
/// `(w, b, v, c) ↦ (vw, vb + c)` for an affine fit; none assumed for the
/// constant (its inactive neuron contributes a flat block).
fn expected_corank(kind: EntryKind) -> Option<usize> {
    match kind {
        EntryKind::KinkIncreasing | EntryKind::KinkDecreasing => Some(1),
        EntryKind::Affine => Some(2),
        EntryKind::Constant => None,
    }
}

fn advisory_class(land: &Landscape, theta: &Params, grad_norm: f64, kind: EntryKind) -> Option<CritClass> {
    let rep = land.hessian_fd(theta, DEFAULT_FD_STEP, HessianCoords::All).ok()?;
    classify(&rep, grad_norm, expected_corank(kind)).ok()
}

/// All critical realizations of a width-one network for a continuous
/// piecewise-polynomial target; entries closer than `dedup` in L² are merged.
pub fn enumerate_all(t: &Target, dedup: f64) -> Result<CriticalCatalog> {
    let p = match t {
        Target::Benchmark(_) => {
            return Err(Error::FinitenessViolated(
                "the benchmark target has a non-polynomial piece".into(),
            ))
        }
        Target::Piecewise(p) => p,
    };
    if !p.is_continuous(CONTINUITY_TOL) {
        return Err(Error::InvalidSpec("enumeration needs a continuous target".into()));
    }
    let (a, b) = p.domain();
    let unit = p.to_unit_interval();
    let land = Landscape::new(t.clone());

    let mut raw: Vec<(EntryKind, Option<KinkSolution>, Params, Realization, Option<f64>, f64)> = Vec::new();
    let mean = enum_constant(t)?.offset;
    let const_theta = Params::new(1, vec![1.0, -(b + 1.0), 1.0, mean]).expect("H = 1");
    raw.push((EntryKind::Constant, None, const_theta, Realization::constant(a, b, mean), None, mean));
    let (c1, c2) = affine_fit(t)?;
    let bias = -a + 1.0;
    let aff_theta = Params::new(1, vec![1.0, bias, c1, c2 - c1 * bias]).expect("H = 1");
    raw.push((EntryKind::Affine, None, aff_theta, Realization::affine(a, b, c1, c2), Some(c1), c2));
    for s in enum_kink_increasing(&unit)?.into_iter().chain(enum_kink_decreasing(&unit)?) {
        let kind = match s.orientation {
            Orientation::Increasing => EntryKind::KinkIncreasing,
            Orientation::Decreasing => EntryKind::KinkDecreasing,
        };
        raw.push((kind, Some(s), s.lift(a, b), s.realization(a, b), None, s.c));
    }

    let mut entries: Vec<CatalogEntry> = Vec::new();
    for (kind, sol, theta, realization, slope, c) in raw {
        let mut dup = false;
        for e in &entries {
            if e.realization.l2_distance(&realization)? < dedup {
                dup = true;
                break;
            }
        }
        if dup {
            continue;
        }
        let grad_norm = max_norm(&land.grad(&theta));
        let risk = land.risk(&theta)?;
        let residuals = match &sol {
            Some(s) => Some(kink_residuals(&unit, s)?),
            None => None,
        };
        entries.push(CatalogEntry {
            kind,
            q: sol.map(|s| s.q),
            kink: sol.map(|s| a + s.q * (b - a)),
            c,
            slope,
            vw: sol.map(|s| s.vw),
            residuals,
            class: advisory_class(&land, &theta, grad_norm, kind),
            theta,
            realization,
            risk,
            grad_norm,
        });
    }
    Ok(CriticalCatalog { entries })
}

/// Sign-change brackets of a residual on a uniform grid of `(0, 1)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub brackets: Vec<(f64, f64)>,
    /// The residual vanishes (to rounding) at every grid point.
    pub degenerate: bool,
}

fn scan(f: impl Fn(f64) -> f64, resolution: f64, scale: f64) -> OracleReport {
    let n = (1.0 / resolution).ceil() as usize;
    let xs: Vec<f64> = (1..n).map(|i| i as f64 / n as f64).collect();
    let vals: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let floor = 1e-13 * scale.max(f64::MIN_POSITIVE);
    let degenerate = vals.iter().all(|v| v.abs() <= floor);
    let mut brackets = Vec::new();
    if !degenerate {
        for i in 1..xs.len() {
            let (u, v) = (vals[i - 1], vals[i]);
            if (u < 0.0 && v > 0.0) || (u > 0.0 && v < 0.0) || (v == 0.0 && u != 0.0) {
                brackets.push((xs[i - 1], xs[i]));
            }
        }
    }
    OracleReport { brackets, degenerate }
}

/// Cross-check of a root search against oracle brackets: every solution lies
/// in a bracket and every bracket holds a solution or an excluded candidate.
/// A degenerate oracle is consistent only with an empty search.
pub fn oracle_agrees(search: &KinkSearch, oracle: &OracleReport) -> bool {
    let slack = 1e-12;
    let inside = |q: f64| oracle.brackets.iter().any(|&(lo, hi)| q >= lo - slack && q <= hi + slack);
    if oracle.degenerate {
        return search.solutions.is_empty();
    }
    let all: Vec<f64> = search.solutions.iter().map(|s| s.q).chain(search.excluded.iter().copied()).collect();
    search.solutions.iter().all(|s| inside(s.q))
        && oracle
            .brackets
            .iter()
            .all(|&(lo, hi)| all.iter().any(|&q| q >= lo - slack && q <= hi + slack))
}

/// Brute-force scan of the increasing-kink residual `D(q)`.
pub fn grid_oracle(g: &PiecewisePolynomial, resolution: f64) -> Result<OracleReport> {
    require_unit(g)?;
    if !(resolution > 0.0 && resolution <= 1e-3) {
        return Err(Error::Domain(format!("resolution must be in (0, 1e-3], got {resolution}")));
    }
    Ok(scan(|q| residual_increasing(g, q), resolution, target_scale(g)))
}

/// Brute-force scan of the decreasing-kink residual.
pub fn grid_oracle_decreasing(g: &PiecewisePolynomial, resolution: f64) -> Result<OracleReport> {
    require_unit(g)?;
    if !(resolution > 0.0 && resolution <= 1e-3) {
        return Err(Error::Domain(format!("resolution must be in (0, 1e-3], got {resolution}")));
    }
    Ok(scan(|q| residual_decreasing(g, q), resolution, target_scale(g)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unit(coeffs: &[f64]) -> PiecewisePolynomial {
        PiecewisePolynomial::single(Polynomial::new(coeffs.to_vec()), 0.0, 1.0).unwrap()
    }

    #[test]
    fn constant_examples() {
        let three = Target::polynomial(&[3.0], 0.0, 1.0).unwrap();
        assert_eq!(enum_constant(&three).unwrap().offset, 3.0);
        let x = Target::polynomial(&[0.0, 1.0], 0.0, 1.0).unwrap();
        assert_relative_eq!(enum_constant(&x).unwrap().offset, 0.5);
        let x2 = Target::polynomial(&[0.0, 0.0, 1.0], 0.0, 1.0).unwrap();
        assert_relative_eq!(enum_constant(&x2).unwrap().offset, 1.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn affine_examples() {
        let two_x = Target::polynomial(&[0.0, 2.0], 0.0, 1.0).unwrap();
        let (c1, c2) = affine_fit(&two_x).unwrap();
        assert_relative_eq!(c1, 2.0, epsilon = 1e-14);
        assert!(c2.abs() < 1e-14);
        let x2 = Target::polynomial(&[0.0, 0.0, 1.0], 0.0, 1.0).unwrap();
        let (c1, c2) = affine_fit(&x2).unwrap();
        assert_relative_eq!(c1, 1.0, epsilon = 1e-14);
        assert_relative_eq!(c2, -1.0 / 6.0, epsilon = 1e-14);
        let five = Target::polynomial(&[5.0], 0.0, 1.0).unwrap();
        let (c1, c2) = affine_fit(&five).unwrap();
        assert!(c1.abs() < 1e-13);
        assert_relative_eq!(c2, 5.0, epsilon = 1e-14);
    }

    #[test]
    fn increasing_examples() {
        assert!(enum_kink_increasing(&unit(&[0.0, 1.0])).unwrap().is_empty());
        assert!(enum_kink_increasing(&unit(&[1.0])).unwrap().is_empty());
        let s = enum_kink_increasing(&unit(&[0.0, 0.0, 1.0])).unwrap();
        assert_eq!(s.len(), 1);
        assert_relative_eq!(s[0].q, 1.0 / 3.0, epsilon = 1e-12);
        assert_relative_eq!(s[0].c, 1.0 / 27.0, epsilon = 1e-12);
        assert_relative_eq!(s[0].vw, 4.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn square_residual_polynomial_factors() {
        // D / q for x² is proportional to (q−1)²(3q−1)(q+1); after removing
        // (1−q)² only (3q−1)(q+1) remains.
        let d = piece_residual_poly(&unit(&[0.0, 0.0, 1.0]), 0);
        assert_eq!(d.degree(), 2);
        let r = d.coeffs()[2];
        for (got, want) in d.coeffs().iter().zip(&[-1.0, 2.0, 3.0]) {
            assert_relative_eq!(*got / r * 3.0, *want, epsilon = 1e-12);
        }
    }

    #[test]
    fn decreasing_for_linear_is_empty() {
        assert!(enum_kink_decreasing(&unit(&[0.0, 1.0])).unwrap().is_empty());
    }

    #[test]
    fn symmetric_target_mirrors() {
        // (x − 1/2)², symmetric about 1/2
        let g = unit(&[0.25, -1.0, 1.0]);
        let inc = enum_kink_increasing(&g).unwrap();
        let dec = enum_kink_decreasing(&g).unwrap();
        assert_eq!(inc.len(), dec.len());
        for (i, d) in inc.iter().zip(dec.iter().rev()) {
            assert_relative_eq!(i.q, 1.0 - d.q, epsilon = 1e-10);
            assert_relative_eq!(i.c, d.c, epsilon = 1e-10);
            assert_relative_eq!(i.vw, -d.vw, epsilon = 1e-10);
        }
    }

    #[test]
    fn benchmark_rejected() {
        let t = Target::Benchmark(crate::target::BenchmarkTarget::standard());
        assert!(matches!(enumerate_all(&t, DEFAULT_DEDUP), Err(Error::FinitenessViolated(_))));
    }

    #[test]
    fn oracle_examples() {
        let r = grid_oracle(&unit(&[0.0, 0.0, 1.0]), 1e-4).unwrap();
        assert_eq!(r.brackets.len(), 1);
        assert!(r.brackets[0].0 <= 1.0 / 3.0 && 1.0 / 3.0 <= r.brackets[0].1);
        assert!(grid_oracle(&unit(&[0.0, 1.0]), 1e-4).unwrap().brackets.is_empty());
        let c = grid_oracle(&unit(&[2.0]), 1e-3).unwrap();
        assert!(c.degenerate);
        assert!(grid_oracle(&unit(&[1.0]), 0.1).is_err());
    }

    #[test]
    fn discontinuous_target_rejected() {
        let p = PiecewisePolynomial::new(vec![0.0, 0.5, 1.0], vec![Polynomial::constant(0.0), Polynomial::constant(1.0)]).unwrap();
        assert!(matches!(enumerate_all(&Target::Piecewise(p), DEFAULT_DEDUP), Err(Error::InvalidSpec(_))));
    }
}
