//! `reluland` command-line front end.

mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use reluland::enumerate::{self, grid_oracle, grid_oracle_decreasing, oracle_agrees, search_decreasing, search_increasing};
use reluland::landscape::max_norm;
use reluland::minima::{self, gap_certificate, hessian_certificate, minima_risk_with, sample_at};
use reluland::quad::{Backend, DEFAULT_TOL};
use reluland::train::{self, TrainConfig};
use reluland::{BenchmarkTarget, Landscape, Params, Target};
use serde_json::{json, Value};

use output::{csv, svg_plot, OutDir};

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(name = "reluland", version, about = "Loss-landscape toolkit for one-hidden-layer ReLU networks on an interval")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sample and certify the family of non-global local minima.
    Minima(MinimaArgs),
    /// Enumerate the critical realizations of a width-one network.
    Enumerate(EnumerateArgs),
    /// Gradient-descent ensemble with realization clustering.
    Train(TrainArgs),
    /// Gradient flow from a single initialization.
    Gf(GfArgs),
}

#[derive(Args)]
struct Bench {
    /// Left end of the middle piece, normalized (rational like 1/3 allowed).
    #[arg(long, default_value = "1/3", value_parser = parse_num)]
    alpha: f64,
    #[arg(long, default_value = "2/3", value_parser = parse_num)]
    beta: f64,
    /// Domain `[a, b]`.
    #[arg(long, default_value = "0", value_parser = parse_num, allow_negative_numbers = true)]
    a: f64,
    #[arg(long, default_value = "1", value_parser = parse_num, allow_negative_numbers = true)]
    b: f64,
}

impl Bench {
    fn target(&self) -> Result<BenchmarkTarget> {
        Ok(BenchmarkTarget::new(self.alpha, self.beta, self.a, self.b)?)
    }
}

#[derive(Args)]
struct Output {
    /// Directory for the report and data files (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Replace existing files in the output directory.
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct MinimaArgs {
    #[command(flatten)]
    bench: Bench,
    #[arg(long = "H", default_value_t = 4)]
    h: usize,
    /// Number of evenly spaced kinks (ignored when --x is given).
    #[arg(long, default_value_t = 10)]
    samples: usize,
    /// Explicit normalized kink positions in (alpha, beta).
    #[arg(long, value_parser = parse_num, value_delimiter = ',', allow_negative_numbers = true)]
    x: Vec<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also certify the non-globality gap against a two-kink witness.
    #[arg(long)]
    gap: bool,
    #[arg(long, default_value = "0.5", value_parser = parse_num)]
    p: f64,
    #[arg(long, default_value = "0.05", value_parser = parse_num)]
    eps: f64,
    /// Grid size of the realization CSVs.
    #[arg(long, default_value_t = 201)]
    grid: usize,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct EnumerateArgs {
    /// Target specification (JSON).
    #[arg(long)]
    target: PathBuf,
    /// Oracle grid resolution on the normalized interval.
    #[arg(long, default_value = "1e-5", value_parser = parse_num)]
    resolution: f64,
    /// L² distance below which catalog entries are merged.
    #[arg(long, default_value = "1e-8", value_parser = parse_num)]
    dedup: f64,
    #[arg(long, default_value_t = 201)]
    grid: usize,
    #[arg(long)]
    svg: bool,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct TrainArgs {
    /// Target specification (JSON); the benchmark flags apply when absent.
    #[arg(long)]
    target: Option<PathBuf>,
    #[command(flatten)]
    bench: Bench,
    #[arg(long = "H", default_value_t = 4)]
    h: usize,
    #[arg(long, default_value = "1/20", value_parser = parse_num, allow_negative_numbers = true)]
    lr: f64,
    #[arg(long, default_value = "1e-4", value_parser = parse_num)]
    grad_tol: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 50)]
    runs: usize,
    #[arg(long, default_value_t = 10_000_000)]
    max_iters: u64,
    #[arg(long, default_value = "1e-4", value_parser = parse_num)]
    dedup: f64,
    #[arg(long, default_value_t = 201)]
    grid: usize,
    #[arg(long)]
    svg: bool,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct GfArgs {
    #[arg(long)]
    target: Option<PathBuf>,
    #[command(flatten)]
    bench: Bench,
    #[arg(long = "H", default_value_t = 1)]
    h: usize,
    /// Initial parameters (JSON `{"H", "theta"}`); Xavier draw from --seed otherwise.
    #[arg(long)]
    init: Option<PathBuf>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value = "100", value_parser = parse_num)]
    t_end: f64,
    #[arg(long, default_value = "1e-8", value_parser = parse_num)]
    rtol: f64,
    #[arg(long, default_value_t = 201)]
    grid: usize,
    #[arg(long)]
    svg: bool,
    #[command(flatten)]
    out: Output,
}

/// Accepts decimals and rationals `p/q`.
fn parse_num(s: &str) -> std::result::Result<f64, String> {
    let v = match s.split_once('/') {
        Some((p, q)) => {
            let p: f64 = p.trim().parse().map_err(|e| format!("{s}: {e}"))?;
            let q: f64 = q.trim().parse().map_err(|e| format!("{s}: {e}"))?;
            p / q
        }
        None => s.trim().parse().map_err(|e| format!("{s}: {e}"))?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{s} is not a finite number"))
    }
}

fn load_target(path: &Path) -> Result<Target> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Target::from_json(&text).with_context(|| format!("parsing {}", path.display()))
}

fn target_or_bench(path: &Option<PathBuf>, bench: &Bench) -> Result<Target> {
    match path {
        Some(p) => load_target(p),
        None => Ok(Target::Benchmark(bench.target()?)),
    }
}

fn target_samples(t: &Target, n: usize) -> Vec<(f64, f64)> {
    let (a, b) = t.domain();
    let n = n.max(2);
    (0..n)
        .filter_map(|i| {
            let x = a + (b - a) * i as f64 / (n - 1) as f64;
            t.eval(x).ok().map(|y| (x, y))
        })
        .collect()
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

/// Writes `report.json` plus extra files, or prints the report.
fn emit(out: &Output, report: &Value, files: Vec<(String, String)>) -> Result<()> {
    match &out.out {
        Some(dir) => {
            let mut od = OutDir::new(dir, out.force);
            od.add("report.json", pretty(report));
            for (name, body) in files {
                od.add(&name, body);
            }
            od.commit()
        }
        None => {
            print!("{}", pretty(report));
            Ok(())
        }
    }
}

fn cmd_minima(args: &MinimaArgs) -> Result<bool> {
    let t = args.bench.target()?;
    let xs: Vec<f64> = if args.x.is_empty() {
        if args.samples == 0 {
            bail!("--samples must be positive");
        }
        let (al, be) = (t.alpha(), t.beta());
        let n = args.samples;
        (0..n)
            .map(|i| {
                let f = if n == 1 { 0.5 } else { 0.05 + 0.9 * i as f64 / (n - 1) as f64 };
                al + f * (be - al)
            })
            .collect()
    } else {
        args.x.clone()
    };
    let samples = sample_at(&t, args.h, &xs, args.seed)?;
    let target = Target::Benchmark(t.clone());
    let land = Landscape::new(target.clone());
    let m_risk = minima_risk_with(&t, DEFAULT_TOL, Backend::GaussKronrod)?;
    let m_risk_simpson = minima_risk_with(&t, DEFAULT_TOL, Backend::Simpson)?;

    let mut pass = (m_risk - m_risk_simpson).abs() <= 1e-10 * m_risk.abs().max(1e-300);
    let mut risks = Vec::new();
    let mut grad_norms = Vec::new();
    let mut hess = Vec::new();
    let mut files = Vec::new();
    for (i, s) in samples.iter().enumerate() {
        let r = land.risk(&s.theta)?;
        let g = minima::grad_norm(&t, &s.theta);
        let rel = (r - m_risk).abs() / m_risk.abs().max(1e-300);
        pass &= g < 1e-10 && rel < 1e-9;
        risks.push(r);
        grad_norms.push(g);
        match hessian_certificate(&t, s) {
            Ok(c) => {
                let ok = c.full.numerical_rank == 2 && c.full.min_eigenvalue() > -1e-8 && c.max_rel_deviation < 1e-5;
                pass &= ok;
                hess.push(json!({
                    "x": s.x,
                    "full_rank": c.full.numerical_rank,
                    "full_min_eigenvalue": c.full.min_eigenvalue(),
                    "full_eigenvalues": c.full.eigenvalues,
                    "restricted": c.restricted.matrix,
                    "closed_form": c.closed_form.matrix,
                    "max_rel_deviation": c.max_rel_deviation,
                    "pass": ok,
                }));
            }
            Err(e) => {
                pass = false;
                hess.push(json!({ "x": s.x, "error": e.to_string(), "pass": false }));
            }
        }
        files.push((format!("sample_{i:02}.csv"), land.realization(&s.theta).to_csv(args.grid)));
    }

    let gap = if args.gap {
        let gk = gap_certificate(&t, args.h, args.p, args.eps, args.seed, Backend::GaussKronrod);
        let si = gap_certificate(&t, args.h, args.p, args.eps, args.seed, Backend::Simpson);
        match (gk, si) {
            (Ok(gk), Ok(si)) => {
                let stable = (gk.gap - si.gap).abs() <= 1e-10;
                let ok = gk.gap > 0.0 && si.gap > 0.0 && stable;
                pass &= ok;
                files.push(("witness.csv".into(), land.realization(&gk.witness).to_csv(args.grid)));
                json!({
                    "p": args.p,
                    "eps": args.eps,
                    "risk_theta": gk.risk_theta,
                    "risk_witness": gk.risk_witness,
                    "gap": gk.gap,
                    "gap_simpson": si.gap,
                    "witness": gk.witness,
                    "pass": ok,
                })
            }
            (Err(e), _) | (_, Err(e)) => {
                pass = false;
                json!({ "p": args.p, "eps": args.eps, "error": e.to_string(), "pass": false })
            }
        }
    } else {
        Value::Null
    };

    let report = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "minima",
        "target": target.to_spec(),
        "H": args.h,
        "seed": args.seed,
        "minima_risk": m_risk,
        "minima_risk_simpson": m_risk_simpson,
        "samples": samples,
        "risks": risks,
        "grad_norms": grad_norms,
        "hessian_summary": hess,
        "gap": gap,
        "pass": pass,
    });
    emit(&args.out, &report, files)?;
    Ok(pass)
}

fn cmd_enumerate(args: &EnumerateArgs) -> Result<bool> {
    let t = load_target(&args.target)?;
    let catalog = enumerate::enumerate_all(&t, args.dedup)?;
    let g = t.as_piecewise().ok_or_else(|| anyhow!("piecewise target expected"))?.to_unit_interval();
    let inc = search_increasing(&g)?;
    let dec = search_decreasing(&g)?;
    let oi = grid_oracle(&g, args.resolution)?;
    let od = grid_oracle_decreasing(&g, args.resolution)?;
    let agree_inc = oracle_agrees(&inc, &oi);
    let agree_dec = oracle_agrees(&dec, &od);
    let max_residual = catalog.max_residual();
    let max_grad = catalog.max_grad_norm();
    let pass = max_residual < 1e-9 && max_grad < 1e-9 && agree_inc && agree_dec;

    let mut files = vec![("target.csv".to_string(), csv(&target_samples(&t, args.grid)))];
    let mut series = vec![("target".to_string(), target_samples(&t, args.grid))];
    for (i, e) in catalog.entries.iter().enumerate() {
        files.push((format!("entry_{i:02}.csv"), e.realization.to_csv(args.grid)));
        series.push((format!("entry {i}"), e.realization.samples(args.grid)));
    }
    if args.svg {
        files.push(("plot.svg".into(), svg_plot(&series)));
    }
    let report = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "enumerate",
        "target": t.to_spec(),
        "entries": catalog.entries,
        "min_risk": catalog.min_risk(),
        "max_residual": max_residual,
        "max_grad_norm": max_grad,
        "oracle": {
            "resolution": args.resolution,
            "increasing": oi,
            "decreasing": od,
            "excluded_increasing": inc.excluded,
            "excluded_decreasing": dec.excluded,
            "agrees_increasing": agree_inc,
            "agrees_decreasing": agree_dec,
        },
        "pass": pass,
    });
    emit(&args.out, &report, files)?;
    Ok(pass)
}

fn cmd_train(args: &TrainArgs) -> Result<bool> {
    let t = target_or_bench(&args.target, &args.bench)?;
    let mut cfg = TrainConfig::new(args.h);
    cfg.lr = args.lr;
    cfg.grad_tol = args.grad_tol;
    cfg.master_seed = args.seed;
    cfg.runs = args.runs;
    cfg.max_iters = args.max_iters;
    cfg.dedup_l2 = args.dedup;
    cfg.validate()?;
    let land = Landscape::new(t.clone());
    let rep = train::ensemble(&land, &cfg)?;
    let grads_ok = rep.runs.iter().filter(|r| r.converged).all(|r| r.grad_norm < cfg.grad_tol);
    let min_risk = rep.clusters.first().map(|c| c.risk);
    let separated = rep.clusters.iter().any(|c| min_risk.is_some_and(|m| c.risk - m > 1e-4));
    let pass = rep.converged_runs > 0 && grads_ok;

    let mut files = vec![("target.csv".to_string(), csv(&target_samples(&t, args.grid)))];
    let mut series = vec![("target".to_string(), target_samples(&t, args.grid))];
    for (i, c) in rep.clusters.iter().enumerate() {
        files.push((format!("cluster_{i:02}.csv"), c.realization.to_csv(args.grid)));
        series.push((format!("cluster {i} (risk {:.3e})", c.risk), c.realization.samples(args.grid)));
    }
    if args.svg {
        files.push(("plot.svg".into(), svg_plot(&series)));
    }
    let report = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "train",
        "target": t.to_spec(),
        "config": rep.config,
        "converged_runs": rep.converged_runs,
        "cluster_count": rep.clusters.len(),
        "risk_spread": rep.risk_spread,
        "all_co_clustered": rep.all_co_clustered,
        "distinct_risk_levels": separated,
        "clusters": rep.clusters,
        "runs": rep.runs,
        "pass": pass,
    });
    emit(&args.out, &report, files)?;
    Ok(pass)
}

fn cmd_gf(args: &GfArgs) -> Result<bool> {
    let t = target_or_bench(&args.target, &args.bench)?;
    let p0 = match &args.init {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            serde_json::from_str::<Params>(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        None => {
            if args.h == 0 {
                bail!("--H must be at least 1");
            }
            train::xavier_init(args.h, 2.0 / (1.0 + args.h as f64), args.seed)
        }
    };
    let land = Landscape::new(t.clone());
    let run = train::gf_run(&p0, &land, args.t_end, args.rtol)?;
    let slack = 10.0 * args.rtol;
    let monotone = run.samples.windows(2).all(|w| w[1].1 <= w[0].1 + slack);
    let pass = monotone && !run.underflow;
    let grad_norm = max_norm(&land.grad(&run.theta));

    let mut files = vec![
        ("trajectory.csv".to_string(), csv(&run.samples).replacen("x,y", "t,risk", 1)),
        ("realization.csv".to_string(), land.realization(&run.theta).to_csv(args.grid)),
    ];
    if args.svg {
        let series = vec![
            ("target".to_string(), target_samples(&t, args.grid)),
            ("final".to_string(), land.realization(&run.theta).samples(args.grid)),
        ];
        files.push(("plot.svg".into(), svg_plot(&series)));
    }
    let report = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "gf",
        "target": t.to_spec(),
        "init": p0,
        "t_end": run.t_end,
        "t_reached": run.t_reached,
        "rtol": args.rtol,
        "accepted_steps": run.accepted_steps,
        "rejected_steps": run.rejected_steps,
        "min_step": run.min_step,
        "underflow": run.underflow,
        "monotone": monotone,
        "final_risk": run.final_risk,
        "final_grad_norm": grad_norm,
        "theta": run.theta,
        "trajectory": run.samples,
        "pass": pass,
    });
    emit(&args.out, &report, files)?;
    Ok(pass)
}

fn init_threads() -> Result<()> {
    if let Ok(v) = std::env::var("RELULAND_THREADS") {
        let n: usize = v.trim().parse().with_context(|| format!("RELULAND_THREADS={v}"))?;
        if n == 0 {
            bail!("RELULAND_THREADS must be positive");
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = init_threads().and_then(|_| match &cli.cmd {
        Cmd::Minima(a) => cmd_minima(a),
        Cmd::Enumerate(a) => cmd_enumerate(a),
        Cmd::Train(a) => cmd_train(a),
        Cmd::Gf(a) => cmd_gf(a),
    });
    match res {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("reluland: certificate check failed (see report)");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("reluland: {e:#}");
            ExitCode::from(2)
        }
    }
}
