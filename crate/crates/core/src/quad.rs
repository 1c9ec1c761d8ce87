//! Adaptive quadrature for the non-polynomial integrals (benchmark target,
//! smoothed risk).

use crate::error::{Error, Result};

/// Default absolute tolerance for target integrals.
pub const DEFAULT_TOL: f64 = 1e-12;

const MAX_INTERVALS: usize = 2000;
const SIMPSON_MAX_DEPTH: u32 = 40;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Backend {
    /// Globally adaptive Gauss–Kronrod (7/15 points).
    #[default]
    GaussKronrod,
    /// Recursive adaptive Simpson with Richardson correction.
    Simpson,
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// One G7K15 panel: (Kronrod estimate, |Kronrod - Gauss|).
fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for i in 0..7 {
        let dx = h * XGK[i];
        let s = f(c - dx) + f(c + dx);
        k += WGK[i] * s;
        if i % 2 == 1 {
            g += WG[i / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// `∫_a^b f` with absolute tolerance `tol`; `breaks` are interior points
/// where `f` is not smooth and are used as initial panel boundaries.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, breaks: &[f64], tol: f64, backend: Backend) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let mut pts = vec![lo];
    let mut inner: Vec<f64> = breaks.iter().copied().filter(|x| *x > lo && *x < hi).collect();
    inner.sort_by(|x, y| x.partial_cmp(y).unwrap());
    inner.dedup();
    pts.extend(inner);
    pts.push(hi);
    let v = match backend {
        Backend::GaussKronrod => gauss_kronrod(&f, &pts, tol)?,
        Backend::Simpson => {
            let per = tol / (pts.len() - 1) as f64;
            let mut total = 0.0;
            for w in pts.windows(2) {
                total += simpson(&f, w[0], w[1], per)?;
            }
            total
        }
    };
    Ok(sign * v)
}

/// Convenience wrapper with the default backend.
pub fn integrate_gk(f: impl Fn(f64) -> f64, a: f64, b: f64, breaks: &[f64], tol: f64) -> Result<f64> {
    integrate(f, a, b, breaks, tol, Backend::GaussKronrod)
}

fn gauss_kronrod(f: &impl Fn(f64) -> f64, pts: &[f64], tol: f64) -> Result<f64> {
    // (a, b, estimate, error)
    let mut panels: Vec<(f64, f64, f64, f64)> = pts
        .windows(2)
        .map(|w| {
            let (v, e) = gk15(f, w[0], w[1]);
            (w[0], w[1], v, e)
        })
        .collect();
    loop {
        let total: f64 = panels.iter().map(|p| p.2).sum();
        let err: f64 = panels.iter().map(|p| p.3).sum();
        if !total.is_finite() {
            return Err(Error::Domain("integrand is not finite".into()));
        }
        // Errors at the rounding floor cannot be reduced further.
        let floor = 50.0 * f64::EPSILON * panels.iter().map(|p| p.2.abs()).sum::<f64>();
        if err <= tol.max(floor) {
            return Ok(total);
        }
        if panels.len() >= MAX_INTERVALS {
            return Err(Error::Accuracy { estimate: total, error: err, tol });
        }
        let (idx, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.partial_cmp(&y.1 .3).unwrap())
            .unwrap();
        let (a, b, _, _) = panels.swap_remove(idx);
        let m = 0.5 * (a + b);
        if !(m > a && m < b) {
            return Err(Error::Accuracy { estimate: total, error: err, tol });
        }
        let (v1, e1) = gk15(f, a, m);
        let (v2, e2) = gk15(f, m, b);
        panels.push((a, m, v1, e1));
        panels.push((m, b, v2, e2));
    }
}

/// Vector-valued G7K15 panel; `f(x, out)` writes `n` integrand components.
fn gk15_vec(f: &impl Fn(f64, &mut [f64]), n: usize, a: f64, b: f64, buf: &mut [f64]) -> (Vec<f64>, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut k = vec![0.0; n];
    let mut g = vec![0.0; n];
    f(c, buf);
    for i in 0..n {
        k[i] = WGK[7] * buf[i];
        g[i] = WG[3] * buf[i];
    }
    for (i, &x) in XGK.iter().enumerate().take(7) {
        let dx = h * x;
        let mut s = vec![0.0; n];
        f(c - dx, buf);
        s.copy_from_slice(&buf[..n]);
        f(c + dx, buf);
        for m in 0..n {
            let v = s[m] + buf[m];
            k[m] += WGK[i] * v;
            if i % 2 == 1 {
                g[m] += WG[i / 2] * v;
            }
        }
    }
    let err = k.iter().zip(&g).fold(0.0_f64, |e, (a, b)| e.max(((a - b) * h).abs()));
    (k.into_iter().map(|v| v * h).collect(), err)
}

/// Componentwise `∫_a^b f` for a vector integrand with `n` components;
/// `tol` bounds the max-norm of the error. Requires `a <= b`.
pub fn integrate_vec(f: impl Fn(f64, &mut [f64]), n: usize, a: f64, b: f64, breaks: &[f64], tol: f64) -> Result<Vec<f64>> {
    if a >= b {
        return Ok(vec![0.0; n]);
    }
    let mut pts = vec![a];
    let mut inner: Vec<f64> = breaks.iter().copied().filter(|x| *x > a && *x < b).collect();
    inner.sort_by(|x, y| x.partial_cmp(y).unwrap());
    inner.dedup();
    pts.extend(inner);
    pts.push(b);
    let mut buf = vec![0.0; n];
    let mut panels: Vec<(f64, f64, Vec<f64>, f64)> = pts
        .windows(2)
        .map(|w| {
            let (v, e) = gk15_vec(&f, n, w[0], w[1], &mut buf);
            (w[0], w[1], v, e)
        })
        .collect();
    loop {
        let mut total = vec![0.0; n];
        let mut mag = 0.0;
        for p in &panels {
            for (t, v) in total.iter_mut().zip(&p.2) {
                *t += v;
                mag += v.abs();
            }
        }
        let err: f64 = panels.iter().map(|p| p.3).sum();
        if total.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("integrand is not finite".into()));
        }
        let floor = 50.0 * f64::EPSILON * mag;
        if err <= tol.max(floor) {
            return Ok(total);
        }
        let estimate = total.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if panels.len() >= MAX_INTERVALS {
            return Err(Error::Accuracy { estimate, error: err, tol });
        }
        let (idx, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.partial_cmp(&y.1 .3).unwrap())
            .unwrap();
        let (pa, pb, _, _) = panels.swap_remove(idx);
        let m = 0.5 * (pa + pb);
        if !(m > pa && m < pb) {
            return Err(Error::Accuracy { estimate, error: err, tol });
        }
        let (v1, e1) = gk15_vec(&f, n, pa, m, &mut buf);
        let (v2, e2) = gk15_vec(&f, n, m, pb, &mut buf);
        panels.push((pa, m, v1, e1));
        panels.push((m, pb, v2, e2));
    }
}

fn simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let mut worst = 0.0_f64;
    let v = simpson_rec(f, a, b, fa, fm, fb, whole, tol, SIMPSON_MAX_DEPTH, &mut worst);
    if !v.is_finite() {
        return Err(Error::Domain("integrand is not finite".into()));
    }
    if worst > tol {
        return Err(Error::Accuracy { estimate: v, error: worst, tol });
    }
    Ok(v)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    worst: &mut f64,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    let floor = 50.0 * f64::EPSILON * (left.abs() + right.abs());
    if delta.abs() <= (15.0 * tol).max(floor) {
        return left + right + delta / 15.0;
    }
    if depth == 0 {
        *worst = worst.max(delta.abs() / 15.0);
        return left + right + delta / 15.0;
    }
    simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, worst)
        + simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, worst)
}
