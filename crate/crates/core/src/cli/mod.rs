//! Command-line front end.
//!
//! Exit codes: 0 success, 1 I/O or parse failure, 2 validation or domain
//! error, 3 classification flagged as ambiguous (the report is still written).

pub mod verify;

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::Error;
use crate::exponents::exponent_report;
use crate::params::{ParamsDoc, SpectralParams, ValidationFlags};
use crate::process::{covariance_grid, oss_check, simulate, QuadratureConfig};
use crate::symmetry::analyze;
use crate::tol::ToleranceConfig;

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_AMBIGUOUS: i32 = 3;

/// Built-in parameter files for the worked examples.
pub const FIXTURES: [(&str, &str); 8] = [
    ("example_2_1", include_str!("../../fixtures/example_2_1.json")),
    ("example_5_1", include_str!("../../fixtures/example_5_1.json")),
    ("example_5_2", include_str!("../../fixtures/example_5_2.json")),
    ("example_5_3", include_str!("../../fixtures/example_5_3.json")),
    ("example_5_4", include_str!("../../fixtures/example_5_4.json")),
    ("example_5_5", include_str!("../../fixtures/example_5_5.json")),
    ("example_5_6", include_str!("../../fixtures/example_5_6.json")),
    ("example_6_1", include_str!("../../fixtures/example_6_1.json")),
];

pub fn fixture(name: &str) -> Option<&'static str> {
    FIXTURES.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

#[derive(Debug, Parser)]
#[command(name = "ofbm", version, about = "Symmetry groups and exponents of operator fractional Brownian motion")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify the symmetry group and write a JSON report.
    Classify(ClassifyArgs),
    /// Write the exponent set and a commuting exponent as JSON.
    Exponents(ClassifyArgs),
    /// Covariance Γ(tᵢ,tⱼ) on a uniform grid, as JSON.
    Covariance(GridArgs),
    /// Simulate sample paths and write them as CSV.
    Simulate(SimulateArgs),
    /// Print the largest relative error of the scaling identity Γ(ct,cs) = c^H Γ(t,s) c^{H*}.
    OssCheck(OssArgs),
    /// Run the built-in reproduction suite.
    VerifyPaper(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub params: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Overrides the clustering, nullspace and verification tolerances.
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Args)]
pub struct QuadArgs {
    #[arg(long, default_value_t = 1e4)]
    pub x_max: f64,
    #[arg(long, default_value_t = 40)]
    pub panels: usize,
    /// Rescale so that tr Γ(1,1) = n.
    #[arg(long)]
    pub normalize: bool,
}

impl QuadArgs {
    fn config(&self, base: QuadratureConfig) -> QuadratureConfig {
        QuadratureConfig { x_max: self.x_max, panels: self.panels, normalize: self.normalize, ..base }
    }
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[arg(long)]
    pub params: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    pub t_max: f64,
    #[arg(long, default_value_t = 5)]
    pub steps: usize,
    #[command(flatten)]
    pub quad: QuadArgs,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, default_value_t = 100)]
    pub paths: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct OssArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, default_value_t = 2.0)]
    pub c: f64,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Print the criteria without running them.
    #[arg(long)]
    pub list: bool,
    /// Overrides the clustering, nullspace and verification tolerances.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Seed for the randomized criteria.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

/// A failure carrying its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure { code: EXIT_VALIDATION, message: e.to_string() }
    }
}

fn io_failure(what: &str, e: impl std::fmt::Display) -> Failure {
    Failure { code: EXIT_IO, message: format!("{what}: {e}") }
}

pub fn apply_tol(t: ToleranceConfig, v: Option<f64>) -> ToleranceConfig {
    match v {
        Some(v) => ToleranceConfig { cluster: v, null: v, verify: v, ..t },
        None => t,
    }
}

pub fn load_params(path: &PathBuf, tol: Option<f64>) -> Result<SpectralParams, Failure> {
    let text = fs::read_to_string(path).map_err(|e| io_failure(&path.display().to_string(), e))?;
    let mut doc = ParamsDoc::from_json(&text).map_err(|e| io_failure(&path.display().to_string(), e))?;
    doc.tolerances = Some(apply_tol(doc.tolerances.unwrap_or_default(), tol));
    Ok(doc.build(ValidationFlags::default())?)
}

fn emit(out: &Option<PathBuf>, body: &str) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, body).map_err(|e| io_failure(&p.display().to_string(), e)),
        None => std::io::stdout().write_all(body.as_bytes()).map_err(|e| io_failure("stdout", e)),
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

fn grid(t_max: f64, steps: usize, with_zero: bool) -> Result<Vec<f64>, Failure> {
    if !(t_max > 0.0) || steps == 0 {
        return Err(Error::Domain(format!("need --t-max > 0 and --steps >= 1, got {t_max} and {steps}")).into());
    }
    let start = if with_zero { 0 } else { 1 };
    Ok((start..=steps).map(|k| t_max * k as f64 / steps as f64).collect())
}

fn require_domain(p: &SpectralParams) -> Result<(), Failure> {
    if !p.in_domain {
        return Err(Error::Validation(format!(
            "eigenvalues of D must have real part in (-1/2, 1/2), got {:?}",
            p.d_eig_re
        ))
        .into());
    }
    Ok(())
}

pub fn cmd_classify(a: &ClassifyArgs) -> Result<i32, Failure> {
    let p = load_params(&a.params, a.tol)?;
    let c = analyze(&p)?.classification;
    emit(&a.out, &to_json(&c.report()))?;
    Ok(if c.ambiguous { EXIT_AMBIGUOUS } else { EXIT_OK })
}

pub fn cmd_exponents(a: &ClassifyArgs) -> Result<i32, Failure> {
    let p = load_params(&a.params, a.tol)?;
    let c = analyze(&p)?.classification;
    emit(&a.out, &to_json(&exponent_report(&p, &c)))?;
    Ok(if c.ambiguous { EXIT_AMBIGUOUS } else { EXIT_OK })
}

pub fn cmd_covariance(a: &GridArgs) -> Result<i32, Failure> {
    let p = load_params(&a.params, None)?;
    require_domain(&p)?;
    let times = grid(a.t_max, a.steps, false)?;
    let g = covariance_grid(&p, &times, a.quad.config(QuadratureConfig::default()))?;
    emit(&a.out, &to_json(&g.to_json()))?;
    Ok(EXIT_OK)
}

pub fn cmd_simulate(a: &SimulateArgs) -> Result<i32, Failure> {
    let p = load_params(&a.grid.params, None)?;
    require_domain(&p)?;
    let times = grid(a.grid.t_max, a.grid.steps, true)?;
    let q = a.grid.quad.config(QuadratureConfig::monte_carlo());
    let paths = simulate(&p, &times, a.paths, a.seed, q)?;
    emit(&a.grid.out, &paths.to_csv())?;
    Ok(EXIT_OK)
}

pub fn cmd_oss_check(a: &OssArgs) -> Result<i32, Failure> {
    let p = load_params(&a.grid.params, None)?;
    require_domain(&p)?;
    let times = grid(a.grid.t_max, a.grid.steps, false)?;
    let err = oss_check(&p, a.c, &times, a.grid.quad.config(QuadratureConfig::default()))?;
    emit(&a.grid.out, &format!("{err:e}\n"))?;
    Ok(EXIT_OK)
}

pub fn cmd_verify_paper(a: &VerifyArgs) -> Result<i32, Failure> {
    if a.list {
        let mut s = String::new();
        for c in verify::CRITERIA {
            s.push_str(&format!("{:>2}  {}\n", c.id, c.name));
        }
        emit(&None, &s)?;
        return Ok(EXIT_OK);
    }
    let outcomes = verify::run_all(a.tol, a.seed);
    let mut s = String::new();
    for o in &outcomes {
        s.push_str(&format!("{:>2}  {}  {}  {}\n", o.id, if o.pass { "PASS" } else { "FAIL" }, o.name, o.detail));
    }
    let passed = outcomes.iter().filter(|o| o.pass).count();
    s.push_str(&format!("{passed}/{} passed\n", outcomes.len()));
    emit(&None, &s)?;
    Ok(if passed == outcomes.len() { EXIT_OK } else { EXIT_VALIDATION })
}

pub fn run(cli: &Cli) -> i32 {
    let r = match &cli.command {
        Command::Classify(a) => cmd_classify(a),
        Command::Exponents(a) => cmd_exponents(a),
        Command::Covariance(a) => cmd_covariance(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::OssCheck(a) => cmd_oss_check(a),
        Command::VerifyPaper(a) => cmd_verify_paper(a),
    };
    match r {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}
