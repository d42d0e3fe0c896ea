use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::Serialize;
use serde_json::{json, Value};

use pelastica::curves::{endpoint_constants, exact_cone_minimizer, h_star, profile_u0};
use pelastica::diagnostics::diagnose;
use pelastica::energy::{AlgebraicSigmoid, ShapeFunction};
use pelastica::solver::{minimize, nonexistence_bound, nonexistence_h, threshold_verdict, Existence};
use pelastica::{EuP, GridFunction, Obstacle, PElasticaCurve};

use crate::config::{Command, Format, ObstacleKind, RunConfig, Shape};
use crate::error::{CliError, Result};
use crate::output::{num, svg_plot, write_atomic, write_json, Csv, Series, PALETTE};

/// What a finished run wrote.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub manifest: PathBuf,
    pub results: Value,
    /// Labels of solves that stopped before reaching the tolerance.
    pub nonconverged: Vec<String>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.nonconverged.is_empty() {
            0
        } else {
            4
        }
    }
}

/// Collects written files relative to the output directory.
struct Sink {
    root: PathBuf,
    files: Mutex<Vec<String>>,
}

impl Sink {
    fn write(&self, rel: &str, contents: &[u8]) -> Result<()> {
        write_atomic(&self.root.join(rel), contents)?;
        self.files.lock().unwrap().push(rel.to_string());
        Ok(())
    }

    fn json<S: Serialize + ?Sized>(&self, rel: &str, value: &S) -> Result<()> {
        write_json(&self.root.join(rel), value)?;
        self.files.lock().unwrap().push(rel.to_string());
        Ok(())
    }

    fn csv(&self, rel: &str, csv: &Csv) -> Result<()> {
        self.write(rel, csv.as_str().as_bytes())
    }
}

/// Validates `cfg`, runs its command and writes `manifest.json`.
pub fn run(cfg: &RunConfig) -> Result<Outcome> {
    cfg.validate()?;
    std::fs::create_dir_all(&cfg.out).map_err(CliError::io(&cfg.out))?;
    let sink = Sink { root: cfg.out.clone(), files: Mutex::new(Vec::new()) };
    let mut nonconverged = Vec::new();
    let results = match cfg.command {
        Command::Curve => curve(cfg, &sink)?,
        Command::Solve => solve(cfg, &sink, &mut nonconverged)?,
        Command::Threshold => threshold(cfg, &sink)?,
        Command::Hbound => hbound(cfg, &sink)?,
        Command::Sweep => sweep(cfg, &sink, &mut nonconverged)?,
    };
    let mut files = sink.files.into_inner().unwrap();
    files.sort();
    let manifest = json!({
        "command": cfg.command.as_str(),
        "version": pelastica::VERSION,
        "config": cfg,
        "outputs": files,
        "nonconverged": nonconverged,
        "results": results,
    });
    let path = cfg.out.join("manifest.json");
    write_json(&path, &manifest)?;
    Ok(Outcome { manifest: path, results, nonconverged })
}

fn shape(kind: Shape, p: f64) -> Result<Box<dyn ShapeFunction<f64>>> {
    Ok(match kind {
        Shape::EuP => Box::new(EuP::new(p)?),
        Shape::AlgebraicSigmoid => Box::new(AlgebraicSigmoid),
    })
}

fn uniform(n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |k| k as f64 / (n - 1) as f64)
}

fn curve(cfg: &RunConfig, sink: &Sink) -> Result<Value> {
    let curve = PElasticaCurve::new(cfg.p, cfg.lambda)?;
    let smp = curve.samples(cfg.samples)?;
    let mut csv = Csv::new(&["s", "X", "Y", "k", "theta", "tan_pw"]);
    for i in 0..smp.s.len() {
        csv.row(&[smp.s[i], smp.x[i], smp.y[i], smp.k[i], smp.theta[i], smp.tan_pw[i]]);
    }
    sink.csv("curve.csv", &csv)?;

    let g = shape(cfg.shape, cfg.p)?;
    let mut u0 = Vec::with_capacity(cfg.samples);
    for x in uniform(cfg.samples) {
        u0.push((x, profile_u0(g.as_ref(), x)?));
    }
    let mut csv = Csv::new(&["x", "u0"]);
    for &(x, u) in &u0 {
        csv.row(&[x, u]);
    }
    sink.csv("u0_profile.csv", &csv)?;
    let peak = profile_u0(g.as_ref(), 0.5)?;
    let concave = u0.windows(3).all(|w| w[0].1 - 2.0 * w[1].1 + w[2].1 <= 1e-12);

    match cfg.format {
        Format::Csv => {}
        Format::Json => {
            sink.json("curve.json", &json!({ "s": smp.s, "X": smp.x, "Y": smp.y, "k": smp.k, "theta": smp.theta, "tan_pw": smp.tan_pw }))?;
            let (x, u): (Vec<f64>, Vec<f64>) = u0.iter().copied().unzip();
            sink.json("u0_profile.json", &json!({ "x": x, "u0": u }))?;
        }
        Format::Svg => {
            let pts = smp.x.iter().copied().zip(smp.y.iter().copied()).collect();
            let title = format!("free p-elastica, p = {}, λ = {}", cfg.p, cfg.lambda);
            sink.write("curve.svg", svg_plot(&title, &[Series::new("Γ_λ", pts, PALETTE[0])], true).as_bytes())?;
            let title = format!("U_0 profile, p = {}", cfg.p);
            sink.write("u0_profile.svg", svg_plot(&title, &[Series::new("U_0", u0.clone(), PALETTE[1])], false).as_bytes())?;
        }
    }
    let half = curve.half_period();
    Ok(json!({
        "p": cfg.p,
        "lambda": cfg.lambda,
        "half_period": half,
        "total_length": 2.0 * half,
        "u0_peak": peak,
        "u0_concave": concave,
    }))
}

struct Job {
    label: String,
    h: Option<f64>,
    obstacle: Obstacle,
}

fn solve_jobs(cfg: &RunConfig) -> Result<Vec<Job>> {
    let o = &cfg.obstacle;
    let kind = cfg.obstacle_kind().ok_or_else(|| CliError::Config("missing obstacle".into()))?;
    if kind == ObstacleKind::Sampled {
        return Ok(vec![Job { label: "sampled".into(), h: None, obstacle: Obstacle::sampled(o.values.clone())? }]);
    }
    o.h.iter()
        .map(|&h| {
            let obstacle = match kind {
                ObstacleKind::Cone => Obstacle::cone(o.theta, o.left, o.right, h)?,
                _ => Obstacle::symmetric_cone(h, o.endpoint)?,
            };
            Ok(Job { label: format!("h_{h}"), h: Some(h), obstacle })
        })
        .collect()
}

fn grid_csv(header: [&str; 2], u: &GridFunction) -> Csv {
    nodal_csv(header, u.values())
}

fn nodal_csv(header: [&str; 2], values: &[f64]) -> Csv {
    let mut csv = Csv::new(&header);
    for (x, v) in nodal_points(values) {
        csv.row(&[x, v]);
    }
    csv
}

fn nodal_points(values: &[f64]) -> Vec<(f64, f64)> {
    let n = values.len() - 1;
    values.iter().enumerate().map(|(i, &v)| (i as f64 / n as f64, v)).collect()
}

fn points(u: &GridFunction) -> Vec<(f64, f64)> {
    nodal_points(u.values())
}

fn solve(cfg: &RunConfig, sink: &Sink, nonconverged: &mut Vec<String>) -> Result<Value> {
    let jobs = solve_jobs(cfg)?;
    let g = shape(cfg.shape, cfg.p)?;
    let opts = cfg.minimize_options();
    let nested = jobs.len() > 1;
    let mut results = Vec::new();
    let mut overview = Vec::new();
    for (k, job) in jobs.iter().enumerate() {
        let prefix = if nested { format!("{}/", job.label) } else { String::new() };
        let path = |name: &str| format!("{prefix}{name}");
        let threshold = match (cfg.shape, job.obstacle.is_symmetric() && job.h.is_some()) {
            (Shape::EuP, true) => Some(threshold_verdict(cfg.p, &job.obstacle)?),
            _ => None,
        };
        let verdict = threshold.map_or("not_asserted", |t| t.verdict.as_str());
        sink.write(&path("verdict.txt"), format!("{verdict}\n").as_bytes())?;
        let absent = threshold.is_some_and(|t| t.verdict == Existence::NoMinimizer);
        if absent && !cfg.force {
            results.push(json!({
                "label": job.label,
                "h": job.h,
                "h_star": threshold.map(|t| t.h_star),
                "verdict": verdict,
                "solved": false,
            }));
            continue;
        }

        let report = minimize(g.as_ref(), cfg.p, &job.obstacle, &opts)?;
        let u = &report.minimizer;
        sink.csv(&path("minimizer.csv"), &grid_csv(["x", "u"], u))?;
        let psi = job.obstacle.nodal(u.n());
        sink.csv(&path("obstacle.csv"), &nodal_csv(["x", "psi"], &psi))?;
        sink.json(&path("solve_report.json"), &report)?;
        let diag = diagnose(g.as_ref(), cfg.p, u, Some(&job.obstacle))?;
        sink.json(&path("diagnostics.json"), &diag)?;
        sink.write(&path("diagnostics.txt"), diag.to_string().as_bytes())?;

        let mut exact_grid = None;
        let mut gap = Value::Null;
        let mut energy_gap = Value::Null;
        if cfg.with_exact {
            match (threshold, job.h) {
                (Some(t), Some(h)) if t.verdict == Existence::ExistsUnique => {
                    let exact = exact_cone_minimizer(cfg.p, h)?;
                    let e = exact.sample(u.n())?;
                    sink.csv(&path("exact.csv"), &grid_csv(["x", "u"], &e))?;
                    gap = json!(u.sup_distance(&e)?);
                    energy_gap = json!((report.energy - exact.energy).abs() / exact.energy);
                    exact_grid = Some(e);
                }
                _ => {}
            }
        }
        if cfg.format == Format::Svg {
            let mut series = vec![
                Series::new("minimizer", points(u), PALETTE[0]),
                Series::new("obstacle", nodal_points(&psi), PALETTE[1]),
            ];
            if let Some(e) = &exact_grid {
                series.push(Series::new("exact", points(e), PALETTE[2]));
            }
            let title = format!("p = {}, {}", cfg.p, job.label);
            sink.write(&path("minimizer.svg"), svg_plot(&title, &series, false).as_bytes())?;
        }
        overview.push(Series::new(job.label.clone(), points(u), PALETTE[k % PALETTE.len()]));
        if !report.converged {
            nonconverged.push(job.label.clone());
        }
        let peak = u.values().iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v));
        results.push(json!({
            "label": job.label,
            "h": job.h,
            "h_star": report.h_star,
            "verdict": verdict,
            "solved": true,
            "converged": report.converged,
            "iterations": report.iterations,
            "energy": report.energy,
            "kkt_residual": report.kkt_residual,
            "peak": peak,
            "concave": diag.concavity.concave,
            "passes_core": diag.passes_core(),
            "coincidence_nodes": report.coincidence_nodes,
            "gap": gap,
            "energy_gap": energy_gap,
        }));
    }
    if nested && cfg.format == Format::Svg && !overview.is_empty() {
        let title = format!("minimizers, p = {}", cfg.p);
        sink.write("minimizers.svg", svg_plot(&title, &overview, false).as_bytes())?;
    }
    Ok(Value::Array(results))
}

fn threshold(cfg: &RunConfig, sink: &Sink) -> Result<Value> {
    let header = ["p", "h_star", "c_p", "X1_L1", "Y1_L1", "ratio", "ratio_minus_2h_star"];
    let mut csv = Csv::new(&header);
    let mut rows = Vec::new();
    for p in cfg.ps() {
        let hs = h_star(p)?;
        let cp = EuP::new(p)?.c_p();
        let (x1, y1) = endpoint_constants(p)?;
        let ratio = y1 / x1;
        let row = [p, hs, cp, x1, y1, ratio, ratio - 2.0 * hs];
        csv.row(&row);
        rows.push(header.iter().zip(row).map(|(k, v)| (k.to_string(), json!(v))).collect::<serde_json::Map<String, Value>>());
    }
    sink.csv("threshold.csv", &csv)?;
    if cfg.format == Format::Json {
        sink.json("threshold.json", &rows)?;
    }
    Ok(json!(rows))
}

fn hbound(cfg: &RunConfig, sink: &Sink) -> Result<Value> {
    let g = shape(cfg.shape, cfg.p)?;
    let bound = nonexistence_bound(g.as_ref(), cfg.p)?;
    let samples = if cfg.a_grid.is_empty() {
        bound.samples.clone()
    } else {
        cfg.a_grid.iter().map(|&a| Ok((a, nonexistence_h(g.as_ref(), cfg.p, a)?))).collect::<Result<_>>()?
    };
    let mut csv = Csv::new(&["A", "H"]);
    for &(a, h) in &samples {
        csv.row(&[a, h]);
    }
    csv.raw(&["inf".to_string(), num(bound.limit)]);
    sink.csv("hbound.csv", &csv)?;
    match cfg.format {
        Format::Csv => {}
        Format::Json => sink.json("hbound.json", &json!({ "samples": samples, "limit": bound.limit }))?,
        Format::Svg => {
            let pts = samples.iter().map(|&(a, h)| (a.log10(), h)).collect();
            let title = format!("H(A) against log10 A, p = {}", cfg.p);
            sink.write("hbound.svg", svg_plot(&title, &[Series::new("H", pts, PALETTE[0])], false).as_bytes())?;
        }
    }
    let hs = match cfg.shape {
        Shape::EuP => Some(h_star(cfg.p)?),
        Shape::AlgebraicSigmoid => None,
    };
    Ok(json!({
        "p": cfg.p,
        "limit": bound.limit,
        "sup": bound.sup,
        "bound": bound.bound,
        "h_star": hs,
        "two_h_star": hs.map(|h| 2.0 * h),
    }))
}

#[derive(Debug, Clone, Serialize)]
struct Cell {
    p: f64,
    h: f64,
    h_star: f64,
    exists: bool,
    converged: Option<bool>,
    energy: Option<f64>,
    kkt_residual: Option<f64>,
    file: Option<String>,
}

fn sweep_cell(cfg: &RunConfig, sink: &Sink, p: f64, h: f64) -> Result<Cell> {
    let hs = h_star(p)?;
    let exists = h < hs;
    let mut cell = Cell { p, h, h_star: hs, exists, converged: None, energy: None, kkt_residual: None, file: None };
    if exists && cfg.sweep_solve {
        let g = EuP::new(p)?;
        let psi = Obstacle::symmetric_cone(h, cfg.obstacle.endpoint)?;
        let report = minimize(&g, p, &psi, &cfg.minimize_options())?;
        let file = format!("cells/p_{p}_h_{h}.csv");
        sink.csv(&file, &grid_csv(["x", "u"], &report.minimizer))?;
        cell.converged = Some(report.converged);
        cell.energy = Some(report.energy);
        cell.kkt_residual = Some(report.kkt_residual);
        cell.file = Some(file);
    }
    Ok(cell)
}

fn sweep(cfg: &RunConfig, sink: &Sink, nonconverged: &mut Vec<String>) -> Result<Value> {
    if cfg.shape != Shape::EuP {
        return Err(CliError::Config("sweep classifies cones for G = eu_p only".into()));
    }
    let ps = cfg.ps();
    let cells: Vec<(f64, f64)> = ps.iter().flat_map(|&p| cfg.h_list.iter().map(move |&h| (p, h))).collect();
    let workers = match cfg.threads {
        0 => std::thread::available_parallelism().map_or(1, |n| n.get()),
        t => t,
    }
    .min(cells.len())
    .max(1);
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Result<Cell>>>> = Mutex::new((0..cells.len()).map(|_| None).collect());
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= cells.len() {
                    break;
                }
                let (p, h) = cells[i];
                let r = sweep_cell(cfg, sink, p, h);
                slots.lock().unwrap()[i] = Some(r);
            });
        }
    });
    let done: Vec<Cell> = slots.into_inner().unwrap().into_iter().map(|c| c.expect("every cell runs")).collect::<Result<_>>()?;

    let opt = |v: Option<f64>| v.map_or(String::new(), num);
    let mut csv = Csv::new(&["p", "h", "h_star", "exists", "converged", "energy", "kkt_residual"]);
    for c in &done {
        csv.raw(&[
            num(c.p),
            num(c.h),
            num(c.h_star),
            yes_no(c.exists).into(),
            c.converged.map_or(String::new(), |b| b.to_string()),
            opt(c.energy),
            opt(c.kkt_residual),
        ]);
        if c.converged == Some(false) {
            nonconverged.push(format!("p_{}_h_{}", c.p, c.h));
        }
    }
    sink.csv("sweep.csv", &csv)?;

    let mut header = vec!["p".to_string()];
    header.extend(cfg.h_list.iter().map(|&h| num(h)));
    let mut matrix = Csv::new(&header.iter().map(String::as_str).collect::<Vec<_>>());
    for (k, &p) in ps.iter().enumerate() {
        let mut row = vec![num(p)];
        row.extend(done[k * cfg.h_list.len()..(k + 1) * cfg.h_list.len()].iter().map(|c| yes_no(c.exists).to_string()));
        matrix.raw(&row);
    }
    sink.csv("verdict_matrix.csv", &matrix)?;
    if cfg.format == Format::Json {
        sink.json("sweep.json", &done)?;
    }
    Ok(json!(done))
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

/// Reads a two-column CSV written by this crate.
pub fn read_xy(path: &Path) -> Result<Vec<(f64, f64)>> {
    let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
    let bad = || CliError::Config(format!("{}: malformed CSV", path.display()));
    text.lines()
        .skip(1)
        .map(|l| {
            let (a, b) = l.split_once(',').ok_or_else(bad)?;
            Ok((a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?))
        })
        .collect()
}
