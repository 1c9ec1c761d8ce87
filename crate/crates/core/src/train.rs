//! Full-batch gradient descent with the exact generalized gradient, seeded
//! ensembles with realization clustering, and gradient-flow integration.
//!
//! Randomness comes from `ChaCha8Rng` (rand_chacha 0.9) seeded with
//! `seed_from_u64`; normal draws use `rand_distr::Normal`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::landscape::{max_norm, Landscape};
use crate::network::{Params, Realization};

/// Parameter norm beyond which a run is declared divergent.
pub const DIVERGENCE_NORM: f64 = 1e8;
/// Pre-activations within this distance of zero at an endpoint count as a
/// nonsmooth configuration.
pub const NONSMOOTH_TOL: f64 = 1e-14;
/// Smallest step the gradient-flow integrator will take.
pub const MIN_GF_STEP: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    #[serde(rename = "H")]
    pub h: usize,
    pub lr: f64,
    /// Max-norm of the gradient at which a run stops.
    pub grad_tol: f64,
    pub max_iters: u64,
    pub weight_var: f64,
    pub dedup_l2: f64,
    pub master_seed: u64,
    pub runs: usize,
}

impl TrainConfig {
    /// Defaults for width `h`: lr 1/20, tolerance 1e−4, variance 2/(1+H).
    pub fn new(h: usize) -> Self {
        TrainConfig {
            h,
            lr: 1.0 / 20.0,
            grad_tol: 1e-4,
            max_iters: 10_000_000,
            weight_var: 2.0 / (1.0 + h as f64),
            dedup_l2: 1e-4,
            master_seed: 42,
            runs: 50,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.h == 0 {
            return domain("H must be at least 1");
        }
        for (name, v) in [("lr", self.lr), ("grad_tol", self.grad_tol), ("weight_var", self.weight_var), ("dedup_l2", self.dedup_l2)] {
            if !(v > 0.0 && v.is_finite()) {
                return domain(format!("{name} must be positive, got {v}"));
            }
        }
        if self.runs == 0 {
            return domain("runs must be positive");
        }
        Ok(())
    }
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig::new(4)
    }
}

/// Weights `w_j, v_j ~ N(0, weight_var)`, biases and offset zero.
pub fn xavier_init(h: usize, weight_var: f64, seed: u64) -> Params {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, weight_var.sqrt()).expect("finite variance");
    let mut p = Params::zeros(h);
    for j in 0..h {
        p.theta_mut()[j] = normal.sample(&mut rng);
    }
    for j in 0..h {
        p.theta_mut()[2 * h + j] = normal.sample(&mut rng);
    }
    p
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainRun {
    pub seed: u64,
    pub iterations: u64,
    pub theta: Params,
    pub grad_norm: f64,
    pub risk: f64,
    pub realization: Realization,
    pub converged: bool,
    pub diverged: bool,
    /// Some iterate had a neuron switching at an endpoint of the domain.
    pub hit_nonsmooth: bool,
}

/// Gradient descent `θ ← θ − lr·G(θ)` until the gradient max-norm drops
/// below `grad_tol`, `max_iters` is reached, or the iterate diverges.
pub fn gd_run(p0: &Params, land: &Landscape, cfg: &TrainConfig, seed: u64) -> Result<TrainRun> {
    let (a, b) = land.domain();
    let mut theta = p0.clone();
    let mut iterations = 0;
    let mut hit_nonsmooth = theta.near_nonsmooth(a, b, NONSMOOTH_TOL);
    let mut diverged = false;
    let mut g = land.grad(&theta);
    let mut gn = max_norm(&g);
    while gn >= cfg.grad_tol && iterations < cfg.max_iters {
        for (t, gi) in theta.theta_mut().iter_mut().zip(&g) {
            *t -= cfg.lr * gi;
        }
        iterations += 1;
        hit_nonsmooth |= theta.near_nonsmooth(a, b, NONSMOOTH_TOL);
        if !(theta.norm() <= DIVERGENCE_NORM) {
            diverged = true;
            break;
        }
        g = land.grad(&theta);
        gn = max_norm(&g);
    }
    let converged = !diverged && gn < cfg.grad_tol;
    let risk = if diverged { f64::INFINITY } else { land.risk(&theta)? };
    Ok(TrainRun {
        seed,
        iterations,
        realization: land.realization(&theta),
        theta,
        grad_norm: gn,
        risk,
        converged,
        diverged,
        hit_nonsmooth,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    /// Seed of the first run in the cluster.
    pub representative: u64,
    pub members: Vec<u64>,
    pub risk: f64,
    pub realization: Realization,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleReport {
    pub config: TrainConfig,
    pub runs: Vec<TrainRun>,
    /// Converged runs grouped by realization, ascending risk.
    pub clusters: Vec<Cluster>,
    pub converged_runs: usize,
    /// Max minus min cluster risk.
    pub risk_spread: f64,
    /// Every converged run landed in one cluster.
    pub all_co_clustered: bool,
}

/// Greedy clustering in run order: a run joins the first cluster whose
/// representative realization is closer than `dedup_l2`.
pub fn cluster_runs(runs: &[TrainRun], dedup_l2: f64) -> Result<Vec<Cluster>> {
    let mut clusters: Vec<Cluster> = Vec::new();
    for run in runs.iter().filter(|r| r.converged) {
        let mut placed = false;
        for c in clusters.iter_mut() {
            if c.realization.l2_distance(&run.realization)? < dedup_l2 {
                c.members.push(run.seed);
                placed = true;
                break;
            }
        }
        if !placed {
            clusters.push(Cluster {
                representative: run.seed,
                members: vec![run.seed],
                risk: run.risk,
                realization: run.realization.clone(),
            });
        }
    }
    clusters.sort_by(|x, y| x.risk.partial_cmp(&y.risk).unwrap().then(x.representative.cmp(&y.representative)));
    Ok(clusters)
}

/// Runs seeds `master_seed .. master_seed + runs` (in parallel; results are
/// ordered by seed) and clusters the converged realizations.
pub fn ensemble(land: &Landscape, cfg: &TrainConfig) -> Result<EnsembleReport> {
    cfg.validate()?;
    let seeds: Vec<u64> = (0..cfg.runs as u64).map(|i| cfg.master_seed.wrapping_add(i)).collect();
    let runs: Vec<TrainRun> = seeds
        .par_iter()
        .map(|&s| gd_run(&xavier_init(cfg.h, cfg.weight_var, s), land, cfg, s))
        .collect::<Result<_>>()?;
    let clusters = cluster_runs(&runs, cfg.dedup_l2)?;
    let converged_runs = runs.iter().filter(|r| r.converged).count();
    let risk_spread = match (clusters.first(), clusters.last()) {
        (Some(lo), Some(hi)) => hi.risk - lo.risk,
        _ => 0.0,
    };
    Ok(EnsembleReport {
        config: cfg.clone(),
        all_co_clustered: clusters.len() == 1,
        runs,
        clusters,
        converged_runs,
        risk_spread,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GfRun {
    pub t_end: f64,
    /// Time actually reached (less than `t_end` after a step underflow).
    pub t_reached: f64,
    pub accepted_steps: u64,
    pub rejected_steps: u64,
    pub min_step: f64,
    /// The step size fell below the floor before `t_end`.
    pub underflow: bool,
    /// `(t, risk)` after every accepted step, starting at `t = 0`.
    pub samples: Vec<(f64, f64)>,
    pub final_risk: f64,
    pub theta: Params,
}

fn rk4_step(land: &Landscape, theta: &[f64], h: usize, dt: f64) -> Vec<f64> {
    let field = |x: &[f64]| -> Vec<f64> {
        let p = Params::new(h, x.to_vec()).expect("layout preserved");
        land.grad(&p).into_iter().map(|g| -g).collect()
    };
    let axpy = |x: &[f64], k: &[f64], s: f64| -> Vec<f64> { x.iter().zip(k).map(|(a, b)| a + s * b).collect() };
    let k1 = field(theta);
    let k2 = field(&axpy(theta, &k1, 0.5 * dt));
    let k3 = field(&axpy(theta, &k2, 0.5 * dt));
    let k4 = field(&axpy(theta, &k3, dt));
    theta
        .iter()
        .enumerate()
        .map(|(i, x)| x + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect()
}

/// Integrates `Θ' = −G(Θ)` with classic RK4 and step doubling: a step is
/// accepted when one full step and two half steps agree within `rtol`
/// (max-norm), and the half-step result is kept.
pub fn gf_run(p0: &Params, land: &Landscape, t_end: f64, rtol: f64) -> Result<GfRun> {
    if !(t_end > 0.0) || !(rtol > 0.0) {
        return domain(format!("need t_end > 0 and rtol > 0, got {t_end}, {rtol}"));
    }
    let h = p0.width();
    let mut theta = p0.theta().to_vec();
    let mut t = 0.0;
    let mut dt = (t_end / 100.0).min(0.1);
    let mut accepted = 0;
    let mut rejected = 0;
    let mut min_step = f64::INFINITY;
    let mut underflow = false;
    let mut samples = vec![(0.0, land.risk(p0)?)];
    while t < t_end {
        let step = dt.min(t_end - t);
        let full = rk4_step(land, &theta, h, step);
        let half = rk4_step(land, &theta, h, 0.5 * step);
        let two = rk4_step(land, &half, h, 0.5 * step);
        let err = full.iter().zip(&two).fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()));
        if err <= rtol {
            theta = two;
            t += step;
            accepted += 1;
            min_step = min_step.min(step);
            let p = Params::new(h, theta.clone()).expect("layout preserved");
            samples.push((t, land.risk(&p)?));
        } else {
            rejected += 1;
        }
        let factor = if err == 0.0 { 2.0 } else { (0.9 * (rtol / err).powf(0.2)).clamp(0.2, 2.0) };
        dt = step * factor;
        if dt < MIN_GF_STEP {
            underflow = true;
            break;
        }
    }
    let theta = Params::new(h, theta).expect("layout preserved");
    Ok(GfRun {
        t_end,
        t_reached: t,
        accepted_steps: accepted,
        rejected_steps: rejected,
        min_step: if accepted > 0 { min_step } else { 0.0 },
        underflow,
        final_risk: samples.last().map(|s| s.1).unwrap_or(f64::NAN),
        samples,
        theta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::target::Target;

    #[test]
    fn xavier_biases_zero_and_deterministic() {
        let p = xavier_init(4, 0.4, 9);
        for j in 0..4 {
            assert_eq!(p.b(j), 0.0);
        }
        assert_eq!(p.c(), 0.0);
        assert_eq!(p, xavier_init(4, 0.4, 9));
        assert_ne!(p, xavier_init(4, 0.4, 10));
    }

    #[test]
    fn xavier_variance() {
        let mut sum = 0.0;
        let mut sq = 0.0;
        let mut n = 0.0;
        for s in 0..12_500u64 {
            let p = xavier_init(4, 0.4, s);
            for j in 0..4 {
                for x in [p.w(j), p.v(j)] {
                    sum += x;
                    sq += x * x;
                    n += 1.0;
                }
            }
        }
        let mean = sum / n;
        let var = sq / n - mean * mean;
        assert!((var - 0.4).abs() < 0.02, "variance {var}");
    }

    #[test]
    fn zero_target_zero_start_is_fixed() {
        let land = Landscape::new(Target::zero(0.0, 1.0).unwrap());
        let run = gd_run(&Params::zeros(3), &land, &TrainConfig::new(3), 0).unwrap();
        assert!(run.converged);
        assert_eq!(run.iterations, 0);
    }

    #[test]
    fn config_validation() {
        let mut c = TrainConfig::new(4);
        assert!(c.validate().is_ok());
        c.lr = 0.0;
        assert!(c.validate().is_err());
        assert!((TrainConfig::new(4).weight_var - 0.4).abs() < 1e-15);
    }
}
