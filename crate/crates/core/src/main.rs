use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cardylab::experiment::{self, ConfigLayer, Experiment, ExperimentConfig, OutputFormat, Reals};
use cardylab::lattice::FamilyTag;

/// Crossing probabilities of critical site percolation in triangles, and
/// how they depend on the lattice.
#[derive(Parser)]
#[command(name = "cardylab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate crossing probabilities on the equilateral lattice and compare with Cardy's formula.
    VerifyCardy(Common),
    /// Check that a stretched or rotated lattice crosses in exactly the same samples as the equilateral one.
    Coupling(Common),
    /// Show that Cardy's formula fails on a stretched lattice, with the equilateral lattice as control.
    Violation(Common),
    /// Crossing probabilities over a grid of p and mesh sizes.
    Sweep(Common),
    /// Conformal predictions and the derivative-ratio residual over x.
    Predict(Common),
    /// Check lattice requirements and period vectors on a finite window.
    ValidateLattice(Common),
}

#[derive(Args)]
struct Common {
    /// JSON configuration file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_parser = parse_family)]
    family: Option<FamilyTag>,
    /// Shape parameter of the triangular family (comma-separated list allowed).
    #[arg(long, value_delimiter = ',', value_parser = parse_real)]
    k: Vec<f64>,
    /// Mesh size; fractions such as 1/64 are accepted.
    #[arg(long, value_delimiter = ',', value_parser = parse_real)]
    delta: Vec<f64>,
    /// Mesh of the equilateral reference lattice in coupling runs.
    #[arg(long, value_parser = parse_real)]
    pair_delta: Option<f64>,
    /// Marked-point positions on the base, in (0, 1).
    #[arg(long, value_delimiter = ',', value_parser = parse_real)]
    x: Vec<f64>,
    /// Site-open probability.
    #[arg(long, value_delimiter = ',', value_parser = parse_real)]
    p: Vec<f64>,
    /// Number of samples.
    #[arg(long, value_parser = parse_count)]
    n: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output file (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    #[arg(long)]
    window_radius: Option<i64>,
    /// Candidate period vector "x,y"; repeatable.
    #[arg(long, value_parser = parse_pair)]
    period: Vec<[f64; 2]>,
}

fn parse_real(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let v = match s.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a.trim().parse().map_err(|e| format!("{s}: {e}"))?;
            let b: f64 = b.trim().parse().map_err(|e| format!("{s}: {e}"))?;
            a / b
        }
        None => s.parse().map_err(|e| format!("{s}: {e}"))?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{s} is not a finite number"))
    }
}

/// Accepts plain integers and exact forms like 1e5.
fn parse_count(s: &str) -> Result<u64, String> {
    if let Ok(n) = s.parse() {
        return Ok(n);
    }
    let v: f64 = s.parse().map_err(|_| format!("{s} is not a sample count"))?;
    if v >= 0.0 && v.fract() == 0.0 && v <= u64::MAX as f64 {
        Ok(v as u64)
    } else {
        Err(format!("{s} is not a sample count"))
    }
}

fn parse_pair(s: &str) -> Result<[f64; 2], String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("{s}: expected x,y"))?;
    Ok([parse_real(a)?, parse_real(b)?])
}

fn parse_family(s: &str) -> Result<FamilyTag, String> {
    s.parse::<FamilyTag>().map_err(|e| e.to_string())
}

impl Common {
    fn layer(self) -> (Option<PathBuf>, ConfigLayer) {
        let list = |v: Vec<f64>| (!v.is_empty()).then_some(Reals::Many(v));
        let layer = ConfigLayer {
            experiment: None,
            family: self.family,
            k: list(self.k),
            delta: list(self.delta),
            pair_delta: self.pair_delta,
            x_params: (!self.x.is_empty()).then_some(self.x),
            p: list(self.p),
            n_samples: self.n,
            seed: self.seed,
            out: self.out,
            format: self.format,
            window_radius: self.window_radius,
            periods: (!self.period.is_empty()).then_some(self.period),
        };
        (self.config, layer)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (experiment, common) = match cli.command {
        Command::VerifyCardy(c) => (Experiment::VerifyCardy, c),
        Command::Coupling(c) => (Experiment::Coupling, c),
        Command::Violation(c) => (Experiment::Violation, c),
        Command::Sweep(c) => (Experiment::Sweep, c),
        Command::Predict(c) => (Experiment::Predict, c),
        Command::ValidateLattice(c) => (Experiment::ValidateLattice, c),
    };
    ExitCode::from(run(experiment, common) as u8)
}

fn run(experiment: Experiment, common: Common) -> i32 {
    let (config_path, cli_layer) = common.layer();
    let cfg = config_path
        .map(|p| ConfigLayer::from_file(&p))
        .transpose()
        .and_then(|file| ExperimentConfig::resolve(experiment, file, cli_layer));
    let cfg = match cfg {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let report = match experiment::run(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let text = report.render(cfg.format);
    let written = match &cfg.out {
        Some(path) => std::fs::write(path, &text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write output: {e}");
        return 2;
    }
    eprintln!("{experiment}: {}", report.verdict);
    report.exit_code()
}
