//! Benchmark grids: generate, solve and time every (n, m, seed, ε) point,
//! one CSV row each.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use moldable_core::gen::{generate, GenConfig};
use moldable_core::{solve, Rat, SolveError};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    pub grids: Vec<Grid>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub n: Vec<usize>,
    pub m: Vec<usize>,
    pub seeds: Seeds,
    #[serde(default = "default_epsilon")]
    pub epsilon: Vec<String>,
}

/// Either an explicit list or a count meaning `0..count`.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum Seeds {
    List(Vec<u64>),
    Count(u64),
}

impl Seeds {
    fn values(&self) -> Vec<u64> {
        match self {
            Seeds::List(v) => v.clone(),
            Seeds::Count(k) => (0..*k).collect(),
        }
    }
}

fn default_epsilon() -> Vec<String> {
    vec!["1/20".into()]
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Point {
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    pub epsilon: Rat,
}

impl BenchConfig {
    pub fn parse(text: &str) -> Result<Self, crate::formats::FormatError> {
        Ok(serde_json::from_str(text)?)
    }

    /// All grid points in `(n, m, seed, ε)` order, duplicates removed.
    pub fn points(&self) -> Result<Vec<Point>, String> {
        let mut points = Vec::new();
        for g in &self.grids {
            let eps = g
                .epsilon
                .iter()
                .map(|e| e.parse::<Rat>().map_err(|_| format!("cannot read epsilon {e:?}")))
                .collect::<Result<Vec<_>, _>>()?;
            let seeds = g.seeds.values();
            for &n in &g.n {
                for &m in &g.m {
                    for &seed in &seeds {
                        for e in &eps {
                            points.push(Point { n, m, seed, epsilon: e.clone() });
                        }
                    }
                }
            }
        }
        points.sort();
        points.dedup();
        Ok(points)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BenchRow {
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    pub epsilon: String,
    pub makespan: Option<f64>,
    pub accepted_d: Option<f64>,
    pub lambda_used: Option<f64>,
    pub ratio_vs_lower_bound: Option<f64>,
    pub wall_ms: f64,
    pub iterations: Option<usize>,
    pub status: String,
}

pub fn run_point(p: &Point) -> BenchRow {
    let started = Instant::now();
    let outcome = generate(&GenConfig::new(p.n, p.m, p.seed))
        .map_err(SolveError::from)
        .and_then(|inst| solve(&inst, &p.epsilon));
    let wall_ms = started.elapsed().as_secs_f64() * 1e3;
    let mut row = BenchRow {
        n: p.n,
        m: p.m,
        seed: p.seed,
        epsilon: p.epsilon.to_string(),
        makespan: None,
        accepted_d: None,
        lambda_used: None,
        ratio_vs_lower_bound: None,
        wall_ms,
        iterations: None,
        status: String::new(),
    };
    match outcome {
        Ok(r) => {
            row.makespan = Some(r.makespan.to_f64());
            row.accepted_d = Some(r.accepted_d.to_f64());
            row.lambda_used = Some(r.lambda_used.to_f64());
            row.ratio_vs_lower_bound = r.lower_bound.is_positive().then(|| (&r.makespan / &r.lower_bound).to_f64());
            row.iterations = Some(r.iterations);
            row.status = "ok".into();
        }
        Err(SolveError::InvalidInstance(_)) => row.status = "invalid_instance".into(),
        Err(SolveError::Contract(_)) => row.status = "contract_violation".into(),
        Err(SolveError::Invariant(_)) => row.status = "invariant_violation".into(),
    }
    row
}

/// Runs every point on a pool of `workers` threads. Rows come back in
/// point order whatever the scheduling.
pub fn run_bench(points: &[Point], workers: usize) -> Result<Vec<BenchRow>, rayon::ThreadPoolBuildError> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build()?;
    Ok(pool.install(|| points.par_iter().map(run_point).collect()))
}

pub fn write_csv<W: std::io::Write>(rows: &[BenchRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let k = values.len();
    if k % 2 == 1 {
        values[k / 2]
    } else {
        (values[k / 2 - 1] + values[k / 2]) / 2.0
    }
}

/// Median wall time per grid point, drawn on log-log axes. The x axis is
/// whichever of n and m varies more; the other one picks the series.
pub fn plot_trend(rows: &[BenchRow]) -> String {
    let ok: Vec<&BenchRow> = rows.iter().filter(|r| r.status == "ok").collect();
    let distinct = |f: fn(&BenchRow) -> usize| {
        let mut v: Vec<usize> = ok.iter().map(|r| f(r)).collect();
        v.sort_unstable();
        v.dedup();
        v.len()
    };
    let by_n = distinct(|r| r.n) >= distinct(|r| r.m);
    let (x_name, series_name) = if by_n { ("n", "m") } else { ("m", "n") };

    let mut series: BTreeMap<usize, BTreeMap<usize, Vec<f64>>> = BTreeMap::new();
    for r in &ok {
        let (x, s) = if by_n { (r.n, r.m) } else { (r.m, r.n) };
        series.entry(s).or_default().entry(x.max(1)).or_default().push(r.wall_ms.max(1e-3));
    }
    let lines: Vec<(usize, Vec<(f64, f64)>)> = series
        .into_iter()
        .map(|(s, pts)| (s, pts.into_iter().map(|(x, mut v)| (x as f64, median(&mut v))).collect()))
        .collect();

    let (w, h, pad) = (720.0, 480.0, 60.0);
    let all: Vec<(f64, f64)> = lines.iter().flat_map(|(_, p)| p.iter().copied()).collect();
    let mut svg = String::new();
    let _ = writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
    let _ = writeln!(svg, r#"<g font-family="sans-serif" font-size="11">"#);
    let _ = writeln!(svg, r#"<text x="{pad}" y="24">median wall time (ms) against {x_name}, log-log</text>"#);
    if all.is_empty() {
        svg.push_str("</g>\n</svg>\n");
        return svg;
    }
    let lx = |v: f64| v.log10();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for &(x, y) in &all {
        x0 = x0.min(lx(x));
        x1 = x1.max(lx(x));
        y0 = y0.min(lx(y));
        y1 = y1.max(lx(y));
    }
    if x1 - x0 < 1e-9 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    if y1 - y0 < 1e-9 {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let sx = |x: f64| pad + (lx(x) - x0) / (x1 - x0) * (w - 2.0 * pad);
    let sy = |y: f64| h - pad - (lx(y) - y0) / (y1 - y0) * (h - 2.0 * pad);
    let _ = writeln!(
        svg,
        r#"<rect x="{pad}" y="{pad}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        w - 2.0 * pad,
        h - 2.0 * pad
    );
    let _ = writeln!(svg, r#"<text x="{pad}" y="{}">{:.0}</text>"#, h - pad + 16.0, 10f64.powf(x0));
    let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="end">{:.0}</text>"#, w - pad, h - pad + 16.0, 10f64.powf(x1));
    let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="end">{:.1}</text>"#, pad - 4.0, h - pad, 10f64.powf(y0));
    let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="end">{:.1}</text>"#, pad - 4.0, pad + 4.0, 10f64.powf(y1));

    const COLOURS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];
    for (i, (s, pts)) in lines.iter().enumerate() {
        let colour = COLOURS[i % COLOURS.len()];
        let path: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.1},{:.1}", sx(x), sy(y))).collect();
        let _ = writeln!(svg, r#"<polyline points="{}" fill="none" stroke="{colour}" stroke-width="1.5"/>"#, path.join(" "));
        for &(x, y) in pts {
            let _ = writeln!(svg, r#"<circle cx="{:.1}" cy="{:.1}" r="3" fill="{colour}"/>"#, sx(x), sy(y));
        }
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" fill="{colour}">{series_name} = {s}</text>"#,
            w - pad + 4.0 - 120.0,
            pad + 16.0 + 14.0 * i as f64
        );
    }
    svg.push_str("</g>\n</svg>\n");
    svg
}
