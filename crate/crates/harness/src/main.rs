use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fistashift::rates::{fbs_certificate, fista_certificate, fista_delta_certificate, RateCertificate};
use fistashift::{validate_problem, QuadraticInstance};
use fistashift_harness::config::{preset_text, ExperimentConfig};
use fistashift_harness::experiment::{run_experiment, summary_table};
use fistashift_harness::region::emit_region_map;
use fistashift_harness::{HarnessError, Result};

/// Environment variable naming the default output directory.
const OUT_DIR_ENV: &str = "FISTASHIFT_OUT_DIR";

#[derive(Parser)]
#[command(name = "fistashift", version, about = "FBS and FISTA experiments with Lyapunov rate certificates")]
struct Cli {
    /// Replace every instance seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Replace the configured iteration cap.
    #[arg(long, global = true)]
    max_iters: Option<usize>,
    /// Output directory (default: $FISTASHIFT_OUT_DIR, then ./fistashift-out).
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[arg(long, short, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment described by a TOML file.
    Run { config: PathBuf },
    /// Run a built-in experiment: fig1, fig2, fig3 or fig4.
    Preset { name: String },
    /// Print rate certificates for the given constants.
    Rates {
        #[arg(long)]
        mu: f64,
        #[arg(long)]
        rho: f64,
        #[arg(long = "L", alias = "l", default_value_t = 1.0)]
        lipschitz: f64,
        #[arg(long, allow_hyphen_values = true)]
        delta: Option<f64>,
    },
    /// Write the FBS versus FISTA region map over [0,1] x [0,5].
    Region {
        #[arg(long, default_value_t = 101)]
        steps: usize,
        /// Steps along rho (default: same as --steps).
        #[arg(long)]
        rho_steps: Option<usize>,
        /// Also write an SVG rendering.
        #[arg(long)]
        svg: bool,
    },
    /// Check a configuration and the hypotheses of its instances.
    Validate {
        config: PathBuf,
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
}

fn out_dir(cli: &Cli) -> PathBuf {
    cli.out_dir
        .clone()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("fistashift-out"))
}

/// Reads a config file; a bare preset name is accepted too.
fn load_config(path: &Path, cli: &Cli) -> Result<ExperimentConfig> {
    let mut cfg = match std::fs::read_to_string(path) {
        Ok(text) => ExperimentConfig::from_toml(&text)?,
        Err(e) => match path.to_str().and_then(preset_text) {
            Some(text) => ExperimentConfig::from_toml(text)?,
            None => return Err(HarnessError::Config(format!("cannot read {}: {e}", path.display()))),
        },
    };
    apply_overrides(&mut cfg, cli);
    Ok(cfg)
}

fn apply_overrides(cfg: &mut ExperimentConfig, cli: &Cli) {
    if let Some(seed) = cli.seed {
        cfg.override_seed(seed);
    }
    if let Some(k) = cli.max_iters {
        cfg.max_iters = k;
    }
}

fn run(cli: &Cli, cfg: &ExperimentConfig) -> Result<()> {
    let dir = out_dir(cli);
    let report = run_experiment(cfg, Some(&dir))?;
    if !cli.quiet {
        print!("{}", summary_table(&report));
        if let Some(p) = &report.summary_path {
            println!("\nwrote {}", p.parent().unwrap_or(p).display());
        }
    }
    Ok(())
}

fn print_certificate(c: &RateCertificate) {
    println!(
        "{:<12} delta = {:<8} rate = {:.12}  alpha = {:.12}  gamma = {:.6}  c = {:.6}{}",
        c.algorithm.name(),
        c.delta,
        c.contraction,
        c.inertia_alpha,
        c.step_gamma,
        c.coupling_c,
        if c.degenerate { "  (no linear rate)" } else { "" }
    );
    println!("{:<12} {}", "", c.formula);
}

fn validate(cli: &Cli, path: &Path, samples: usize) -> Result<()> {
    let cfg = load_config(path, cli)?;
    let mut failures = Vec::new();
    for spec in &cfg.instances {
        let inst = QuadraticInstance::generate(&spec.params())
            .map_err(|e| HarnessError::Config(format!("instance {}: {e}", spec.label())))?;
        let report = validate_problem(&inst.problem(), samples, spec.seed);
        if !cli.quiet {
            println!("{} (L = {}, mu = {:e}, rho = {})", spec.label(), inst.lipschitz(), inst.mu(), inst.rho());
            print!("{report}");
        }
        if !report.all_passed() {
            failures.push(format!("{}: hypothesis checks failed", spec.label()));
        }
        for alg in &cfg.algorithms {
            if let Some(d) = &alg.delta {
                let delta = d.resolve(inst.mu(), inst.rho()).map_err(HarnessError::Config)?;
                if !(delta >= -inst.mu() && delta <= inst.rho()) {
                    failures.push(format!(
                        "{}/{}: delta = {delta} outside [-mu, rho] = [{:e}, {}]",
                        spec.label(),
                        alg.label(),
                        -inst.mu(),
                        inst.rho()
                    ));
                }
            }
        }
    }
    if failures.is_empty() {
        if !cli.quiet {
            println!("config {} is valid", cfg.name);
        }
        Ok(())
    } else {
        Err(HarnessError::Config(failures.join("; ")))
    }
}

fn dispatch(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Run { config } => {
            let cfg = load_config(config, cli)?;
            run(cli, &cfg)
        }
        Command::Preset { name } => {
            let mut cfg = ExperimentConfig::preset(name)?;
            apply_overrides(&mut cfg, cli);
            run(cli, &cfg)
        }
        Command::Rates { mu, rho, lipschitz, delta } => {
            print_certificate(&fbs_certificate(*mu, *rho, *lipschitz)?);
            print_certificate(&fista_certificate(*mu, *rho, *lipschitz)?);
            print_certificate(&fista_delta_certificate(*mu, *rho, *lipschitz, delta.unwrap_or(*rho))?);
            Ok(())
        }
        Command::Region { steps, rho_steps, svg } => {
            let dir = out_dir(cli);
            std::fs::create_dir_all(&dir).map_err(|e| HarnessError::Io { path: dir.clone(), source: e })?;
            let csv = dir.join("region_map.csv");
            let svg_path = svg.then(|| dir.join("region_map.svg"));
            emit_region_map(*steps, rho_steps.unwrap_or(*steps), &csv, svg_path.as_deref())?;
            if !cli.quiet {
                println!("wrote {}", csv.display());
            }
            Ok(())
        }
        Command::Validate { config, samples } => validate(cli, config, *samples),
    }
}

fn main() -> ExitCode {
    // Usage errors are config errors; clap would otherwise exit with 2.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
