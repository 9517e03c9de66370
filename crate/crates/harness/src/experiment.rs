//! Runs a configured experiment and writes its artifacts.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use fistashift::lyapunov::{empirical_rate, normalized_traces, NormalizedTraces};
use fistashift::solvers::{self, SolverConfig, SolverRun};
use fistashift::{Algorithm, Error as CoreError, InstanceParams, QuadraticInstance};

use crate::config::{AlgorithmSpec, ExperimentConfig};
use crate::csv::emit_csv;
use crate::error::{HarnessError, Result};
use crate::plot::{chart_for_instance, emit_plot};
use crate::region::emit_region_map;

/// Window of the trailing geometric mean used for empirical rates.
pub const RATE_WINDOW: usize = 50;

/// Normalized Lyapunov values below this are at the rounding floor.
pub const LYAPUNOV_FLOOR: f64 = 1e2 * f64::EPSILON;

#[derive(Debug, Clone)]
pub struct RunReport {
    pub label: String,
    pub algorithm: Algorithm,
    pub delta: Option<f64>,
    pub run: SolverRun,
    pub traces: NormalizedTraces,
    pub certificate_rate: Option<f64>,
    /// Observed contraction of the Lyapunov trace.
    pub empirical_rate: Option<f64>,
    pub csv_path: Option<PathBuf>,
}

impl RunReport {
    pub fn ell(&self) -> Option<&[f64]> {
        self.traces.ell.as_deref()
    }
}

#[derive(Debug, Clone)]
pub struct InstanceReport {
    pub label: String,
    pub params: InstanceParams,
    pub lipschitz: f64,
    pub mu: f64,
    pub runs: Vec<RunReport>,
    pub plot_path: Option<PathBuf>,
}

impl InstanceReport {
    pub fn run(&self, label: &str) -> Option<&RunReport> {
        self.runs.iter().find(|r| r.label == label)
    }

    /// Index at which Lyapunov values are compared across runs: the first `k`
    /// at which some run's normalized Lyapunov value drops below
    /// [`LYAPUNOV_FLOOR`], or the end of the shortest trace. Past that point
    /// the fastest run only shows rounding noise.
    pub fn comparison_horizon(&self) -> usize {
        let traces: Vec<&[f64]> = self.runs.iter().filter_map(|r| r.ell()).collect();
        let shortest = traces.iter().map(|t| t.len() - 1).min().unwrap_or(0);
        traces
            .iter()
            .filter_map(|t| t.iter().position(|&v| v < LYAPUNOV_FLOOR))
            .min()
            .unwrap_or(shortest)
            .min(shortest)
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub name: String,
    pub instances: Vec<InstanceReport>,
    pub summary_path: Option<PathBuf>,
    pub region_path: Option<PathBuf>,
}

impl ExperimentReport {
    pub fn instance(&self, label: &str) -> Option<&InstanceReport> {
        self.instances.iter().find(|i| i.label == label)
    }
}

/// Replaces characters that are awkward in file names.
pub fn file_stem(label: &str) -> String {
    label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '.' { c } else { '_' })
        .collect()
}

fn solver_config(spec: &AlgorithmSpec, max_iters: usize, delta: Option<f64>) -> SolverConfig {
    let mut cfg = SolverConfig::new(spec.algorithm, max_iters).record_z(false).point_stride(0);
    cfg.gamma = spec.gamma;
    cfg.alpha = spec.alpha;
    cfg.c_coupling = spec.c_coupling;
    cfg.delta = delta;
    cfg.stop_tolerance = spec.stop_tolerance.unwrap_or(0.0);
    cfg
}

fn run_one(inst: &QuadraticInstance, instance_label: &str, spec: &AlgorithmSpec, max_iters: usize) -> Result<RunReport> {
    let label = spec.label();
    let tag = format!("{instance_label}/{label}");
    let delta = spec
        .delta
        .as_ref()
        .map(|d| d.resolve(inst.mu(), inst.rho()))
        .transpose()
        .map_err(|m| HarnessError::Config(format!("{tag}: {m}")))?;
    let problem = inst.problem();
    let cfg = solver_config(spec, max_iters, delta);
    let x0 = fistashift::Point::zeros(inst.dimension());
    let run = solvers::run(&problem, &cfg, &x0).map_err(|e| match e {
        CoreError::Divergence { .. } => HarnessError::Divergence { label: tag.clone(), source: e },
        other => HarnessError::Config(format!("{tag}: {other}")),
    })?;
    let traces = normalized_traces(&run, &problem).map_err(|e| HarnessError::Config(format!("{tag}: {e}")))?;
    let empirical = run
        .lyapunov
        .as_ref()
        .and_then(|l| empirical_rate(l, RATE_WINDOW).ok());
    Ok(RunReport {
        label,
        algorithm: spec.algorithm,
        delta: run.delta,
        certificate_rate: run.certificate.as_ref().map(|c| c.contraction),
        empirical_rate: empirical,
        traces,
        run,
        csv_path: None,
    })
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))
}

/// Runs every algorithm on every instance. With `out_dir`, writes
/// `<out_dir>/<name>/` containing one CSV per run, one SVG per instance, a
/// `summary.csv` and, when configured, the rate region map.
pub fn run_experiment(cfg: &ExperimentConfig, out_dir: Option<&Path>) -> Result<ExperimentReport> {
    cfg.check()?;
    let dir = out_dir.map(|d| d.join(file_stem(&cfg.name)));
    if let Some(d) = &dir {
        create_dir(d)?;
    }
    let mut instances = Vec::new();
    for spec in &cfg.instances {
        let label = spec.label();
        let params = spec.params();
        let inst = QuadraticInstance::generate(&params)
            .map_err(|e| HarnessError::Config(format!("instance {label}: {e}")))?;
        let mut runs = Vec::new();
        for alg in &cfg.algorithms {
            let mut report = run_one(&inst, &label, alg, cfg.max_iters)?;
            if let (Some(d), true) = (&dir, cfg.outputs.csv) {
                let path = d.join(format!("{}__{}.csv", file_stem(&label), file_stem(&report.label)));
                let meta = csv_metadata(&cfg.name, &label, &params, &inst, &report);
                emit_csv(&report.run, Some(&report.traces), &meta, &path)?;
                report.csv_path = Some(path);
            }
            runs.push(report);
        }
        let mut ir = InstanceReport {
            label,
            params,
            lipschitz: inst.lipschitz(),
            mu: inst.mu(),
            runs,
            plot_path: None,
        };
        if let (Some(d), true) = (&dir, cfg.outputs.plot) {
            let path = d.join(format!("{}.svg", file_stem(&ir.label)));
            let chart = chart_for_instance(&cfg.name, &ir, &cfg.outputs.plot_series);
            emit_plot(&chart, &path)?;
            ir.plot_path = Some(path);
        }
        instances.push(ir);
    }
    let mut report = ExperimentReport {
        name: cfg.name.clone(),
        instances,
        summary_path: None,
        region_path: None,
    };
    if let Some(d) = &dir {
        let path = d.join("summary.csv");
        fs::write(&path, summary_csv(&report)).map_err(|e| HarnessError::io(&path, e))?;
        report.summary_path = Some(path);
        if let Some(steps) = cfg.outputs.region_grid {
            let path = d.join("region_map.csv");
            emit_region_map(steps, steps, &path, Some(&d.join("region_map.svg")))?;
            report.region_path = Some(path);
        }
    }
    Ok(report)
}

fn csv_metadata(
    experiment: &str,
    instance: &str,
    params: &InstanceParams,
    inst: &QuadraticInstance,
    report: &RunReport,
) -> Vec<(String, String)> {
    let run = &report.run;
    let mut meta = vec![
        ("experiment".to_string(), experiment.to_string()),
        ("instance".into(), instance.to_string()),
        ("seed".into(), params.seed.to_string()),
        ("n".into(), params.n.to_string()),
        ("m".into(), params.m.to_string()),
        ("a".into(), params.a.to_string()),
        ("b".into(), params.b.to_string()),
        ("rho".into(), params.rho.to_string()),
        ("L".into(), inst.lipschitz().to_string()),
        ("mu".into(), inst.mu().to_string()),
        ("algorithm".into(), report.algorithm.name().to_string()),
        ("label".into(), report.label.clone()),
        ("gamma".into(), run.gamma.to_string()),
        ("alpha".into(), run.alpha.to_string()),
    ];
    if let Some(d) = run.delta {
        meta.push(("delta".into(), d.to_string()));
    }
    if let Some(c) = run.c_coupling {
        meta.push(("c".into(), c.to_string()));
    }
    meta.push((
        "certificate_rate".into(),
        report.certificate_rate.map_or("none".into(), |r| r.to_string()),
    ));
    meta.push(("iterations".into(), run.iterations.to_string()));
    for note in &run.notes {
        meta.push(("note".into(), note.clone()));
    }
    meta
}

fn opt(v: Option<f64>) -> String {
    v.map_or(String::new(), |x| format!("{x:.6e}"))
}

pub fn summary_csv(report: &ExperimentReport) -> String {
    let mut out = String::from(
        "instance,algorithm,label,delta,gamma,alpha,iterations,certificate_rate,empirical_rate,horizon,ell_at_horizon,e_final,v_final\n",
    );
    for inst in &report.instances {
        let h = inst.comparison_horizon();
        for r in &inst.runs {
            let ell = r.ell().map(|l| l[h.min(l.len() - 1)]);
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{},{}",
                inst.label,
                r.algorithm.name(),
                r.label,
                r.delta.map_or(String::new(), |d| d.to_string()),
                r.run.gamma,
                r.run.alpha,
                r.run.iterations,
                opt(r.certificate_rate),
                opt(r.empirical_rate),
                h,
                opt(ell),
                opt(r.traces.e.last().copied()),
                opt(r.traces.v.last().copied()),
            );
        }
    }
    out
}

/// Human-readable version of the summary.
pub fn summary_table(report: &ExperimentReport) -> String {
    let mut out = format!("experiment {}\n", report.name);
    for inst in &report.instances {
        let h = inst.comparison_horizon();
        let _ = writeln!(
            out,
            "\n{}  (n = {}, L = {:.6}, mu = {:.4e}, rho = {})  Lyapunov compared at k = {h}",
            inst.label, inst.params.n, inst.lipschitz, inst.mu, inst.params.rho
        );
        let _ = writeln!(
            out,
            "  {:<14} {:>10} {:>10} {:>12} {:>12} {:>12}",
            "algorithm", "cert. r", "empirical", "ell(k)", "e_final", "v_final"
        );
        for r in &inst.runs {
            let ell = r.ell().map(|l| l[h.min(l.len() - 1)]);
            let _ = writeln!(
                out,
                "  {:<14} {:>10} {:>10} {:>12} {:>12} {:>12}",
                r.label,
                r.certificate_rate.map_or("-".into(), |v| format!("{v:.6}")),
                r.empirical_rate.map_or("-".into(), |v| format!("{v:.6}")),
                ell.map_or("-".into(), |v| format!("{v:.4e}")),
                r.traces.e.last().map_or("-".into(), |v| format!("{v:.4e}")),
                r.traces.v.last().map_or("-".into(), |v| format!("{v:.4e}")),
            );
        }
    }
    out
}
