//! Output directory handling, CSV and SVG writers.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

/// Collects files and writes them only after checking none would be
/// overwritten (unless forced).
pub struct OutDir {
    dir: PathBuf,
    force: bool,
    files: Vec<(PathBuf, String)>,
}

impl OutDir {
    pub fn new(dir: &Path, force: bool) -> Self {
        OutDir { dir: dir.to_path_buf(), force, files: Vec::new() }
    }

    pub fn add(&mut self, name: &str, contents: String) {
        self.files.push((self.dir.join(name), contents));
    }

    /// Paths that already exist and would be replaced.
    pub fn conflicts(&self) -> Vec<PathBuf> {
        self.files.iter().filter(|(p, _)| p.exists()).map(|(p, _)| p.clone()).collect()
    }

    pub fn commit(self) -> Result<()> {
        if !self.force {
            let c = self.conflicts();
            if !c.is_empty() {
                bail!("refusing to overwrite {} (pass --force)", c[0].display());
            }
        }
        fs::create_dir_all(&self.dir).with_context(|| format!("creating {}", self.dir.display()))?;
        for (p, s) in self.files {
            fs::write(&p, s).with_context(|| format!("writing {}", p.display()))?;
        }
        Ok(())
    }
}

pub fn csv(samples: &[(f64, f64)]) -> String {
    let mut s = String::from("x,y\n");
    for (x, y) in samples {
        let _ = writeln!(s, "{x},{y}");
    }
    s
}

const PALETTE: [&str; 8] = ["#d62728", "#ff7f0e", "#2ca02c", "#9467bd", "#1f77b4", "#8c564b", "#e377c2", "#17becf"];

/// Minimal line plot: one polyline per series, the first drawn in black.
pub fn svg_plot(series: &[(String, Vec<(f64, f64)>)]) -> String {
    let (w, h, m) = (640.0, 400.0, 48.0);
    let pts = series.iter().flat_map(|s| s.1.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if x1.partial_cmp(&x0) != Some(std::cmp::Ordering::Greater) {
        x1 = x0 + 1.0;
    }
    if y1.partial_cmp(&y0) != Some(std::cmp::Ordering::Greater) {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let sx = |x: f64| m + (x - x0) / (x1 - x0) * (w - 2.0 * m);
    let sy = |y: f64| h - m - (y - y0) / (y1 - y0) * (h - 2.0 * m);
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {w} {h}" width="{w}" height="{h}">"#);
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<g stroke="black" stroke-width="1"><line x1="{m}" y1="{}" x2="{}" y2="{}"/><line x1="{m}" y1="{m}" x2="{m}" y2="{}"/></g>"#,
        h - m,
        w - m,
        h - m,
        h - m
    );
    let _ = writeln!(s, r#"<g font-family="sans-serif" font-size="10" fill="black">"#);
    for i in 0..=4 {
        let t = i as f64 / 4.0;
        let xv = x0 + t * (x1 - x0);
        let yv = y0 + t * (y1 - y0);
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{:.3}</text>"#, sx(xv), h - m + 14.0, xv);
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{:.3}</text>"#, m - 4.0, sy(yv) + 3.0, yv);
    }
    let _ = writeln!(s, "</g>");
    for (i, (name, pts)) in series.iter().enumerate() {
        let color = if i == 0 { "black" } else { PALETTE[(i - 1) % PALETTE.len()] };
        let coords: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"><title>{}</title></polyline>"#,
            coords.join(" "),
            escape(name)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
