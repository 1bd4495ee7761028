use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context as _, Result};
use clap::builder::PossibleValuesParser;
use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use convlim::convex::{degeneracy_check, DegeneracyCheck};
use convlim::duals::{dual_norm_oracle, DualFunctional};
use convlim::limcore::{degenerate_perturbation, ScalarFn};
use convlim::report::{format_f64, to_stable_json};
use convlim::suites::{Registry, SuiteConfig, VerifyReport, ALL};
use convlim::{CompositeNorm, CoreNorm};

#[derive(Parser)]
#[command(name = "convlim", version, about = "Verification suites for spaces of functions converging at infinity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

fn suite_names() -> Vec<&'static str> {
    let mut names = Registry::builtin().names();
    names.push(ALL);
    names
}

#[derive(Subcommand)]
enum Command {
    /// Run a property suite and report per-property results.
    Verify {
        #[arg(long, value_parser = PossibleValuesParser::new(suite_names()))]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        count: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Flip one tolerance so that its property fails.
        #[arg(long)]
        inject_failure: bool,
    },
    /// Perturbations of z(t) = -1/(1+t) leaving the nonpositive cone, and the
    /// subgradient comparison between C0 and C_lim.
    Degeneracy {
        #[arg(long, default_value_t = 10)]
        n_max: u32,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Dual norm of a functional: oracle value against the two formulas.
    Dualnorm {
        spec_file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DualNormSpec {
    functional: DualFunctional,
    primal: CompositeNorm,
    #[serde(default = "default_core")]
    core: CoreNorm,
    #[serde(default)]
    grid: Option<Vec<f64>>,
}

fn default_core() -> CoreNorm {
    CoreNorm::Sup
}

#[derive(Serialize)]
struct DegeneracyRow {
    n: u32,
    sup_dist: f64,
    witness: f64,
}

#[derive(Serialize)]
struct DegeneracyReport {
    z: &'static str,
    rows: Vec<DegeneracyRow>,
    /// Columns equal `2|z(2n)|` and `|z(2n)|` and `sup_dist` decreases.
    verified: bool,
    c0_vs_clim: DegeneracyCheck,
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(stdout.flush()?)
        }
    }
}

fn verify_csv(report: &VerifyReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["suite", "property", "kind", "passed", "checked", "failures", "max_error", "tolerance"])?;
    for s in &report.suites {
        for p in &s.properties {
            let kind = serde_json::to_value(p.kind)?.as_str().unwrap_or_default().to_string();
            w.write_record([
                s.suite.clone(),
                p.name.clone(),
                kind,
                p.passed.to_string(),
                p.checked.to_string(),
                p.failures.to_string(),
                format_f64(p.max_error),
                format_f64(p.tolerance),
            ])?;
        }
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn z() -> ScalarFn {
    std::sync::Arc::new(|t| -1.0 / (1.0 + t))
}

fn degeneracy(n_max: u32) -> Result<DegeneracyReport> {
    let mut rows = Vec::new();
    let mut verified = true;
    for n in 1..=n_max {
        let p = degenerate_perturbation(z(), n)?;
        let zt = (z())(2.0 * f64::from(n));
        let row = DegeneracyRow { n, sup_dist: p.sup_dist(), witness: p.witness() };
        let close = |a: f64, b: f64| (a - b).abs() <= 4.0 * f64::EPSILON * b.abs();
        verified &= close(row.sup_dist, 2.0 * zt.abs()) && close(row.witness, zt.abs()) && row.witness > 0.0;
        if let Some(prev) = rows.last().map(|r: &DegeneracyRow| r.sup_dist) {
            verified &= row.sup_dist < prev;
        }
        rows.push(row);
    }
    let grid: Vec<f64> = (0..=4000).map(|i| f64::from(i) * 0.05).collect();
    let c0_vs_clim = degeneracy_check(&z(), 0.0, &grid)?;
    Ok(DegeneracyReport { z: "-1/(1+t)", rows, verified, c0_vs_clim })
}

fn degeneracy_csv(report: &DegeneracyReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["n", "sup_dist", "witness"])?;
    for r in &report.rows {
        w.write_record([r.n.to_string(), format_f64(r.sup_dist), format_f64(r.witness)])?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Verify { suite, seed, count, out, format, inject_failure } => {
            let cfg = SuiteConfig { seed, count, inject_failure };
            let report = Registry::builtin().run(&suite, &cfg)?;
            let text = match format {
                Format::Json => to_stable_json(&report)? + "\n",
                Format::Csv => verify_csv(&report)?,
            };
            emit(out.as_deref(), &text)?;
            Ok(if report.passed { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Degeneracy { n_max, out, format } => {
            let report = degeneracy(n_max)?;
            let text = match format {
                Format::Json => to_stable_json(&report)? + "\n",
                Format::Csv => degeneracy_csv(&report)?,
            };
            emit(out.as_deref(), &text)?;
            Ok(if report.verified { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Dualnorm { spec_file, out } => {
            let raw = fs::read_to_string(&spec_file).with_context(|| format!("reading {}", spec_file.display()))?;
            let spec: DualNormSpec = serde_json::from_str(&raw).with_context(|| format!("parsing {}", spec_file.display()))?;
            let report = dual_norm_oracle(&spec.functional, spec.primal, spec.core, spec.grid.as_deref())?;
            emit(out.as_deref(), &(to_stable_json(&report)? + "\n"))?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
