use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use civic_core::report::{self, SweepAxis};
use civic_core::scenario::Scenario;
use civic_core::verify;
use civic_core::ErrorClass;
use clap::{Args, Parser, Subcommand, ValueEnum};

const EXIT_CONFIG: u8 = 1;
const EXIT_HYPOTHESIS: u8 = 2;
const EXIT_ORACLE: u8 = 3;

#[derive(Parser)]
#[command(name = "civic", version, about = "Solve, sweep and verify specialist/integrator economies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Scenario file (flat `key = value` format).
    #[arg(long)]
    config: PathBuf,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Productive optimum, political equilibrium and welfare.
    Solve(Common),
    /// One CSV row per grid point along a reform or parameter axis.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        axis: Axis,
    },
    /// Runs the full oracle suite.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Overrides `oracle.seed`.
        #[arg(long)]
        seed: Option<u64>,
        /// Tightens every tolerance tenfold.
        #[arg(long)]
        strict: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Axis {
    B,
    Alpha,
    Theta,
}

impl From<Axis> for SweepAxis {
    fn from(a: Axis) -> Self {
        match a {
            Axis::B => SweepAxis::B,
            Axis::Alpha => SweepAxis::Alpha,
            Axis::Theta => SweepAxis::Theta,
        }
    }
}

struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl From<civic_core::Error> for Failure {
    fn from(e: civic_core::Error) -> Self {
        let code = match e.class() {
            ErrorClass::Input => EXIT_CONFIG,
            ErrorClass::Hypothesis => EXIT_HYPOTHESIS,
            ErrorClass::Numerical => EXIT_ORACLE,
        };
        Self {
            code,
            error: e.into(),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        Self {
            code: EXIT_CONFIG,
            error,
        }
    }
}

fn open_out(out: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(File::create(p).with_context(|| format!("cannot create {}", p.display()))?),
        None => Box::new(io::stdout().lock()),
    })
}

fn solve(common: &Common) -> Result<u8, Failure> {
    let scenario = Scenario::load(&common.config)?;
    let s = report::solve(&scenario.econ)?;
    let o = &s.optimum;
    let w = &s.welfare;
    let p = &w.outcome;
    println!("theta = {} (cutoff {})", s.theta, s.theta_bar);
    println!(
        "productive optimum: m* = {}, Y* = {}, H(h*) = {}, D(q) = {}, h* = {:?}",
        o.m_star,
        o.y_star,
        o.h_hstar,
        o.d_q,
        o.h_star.as_slice()
    );
    println!(
        "political equilibrium: e = {}, z = {}, t_S = {}, t_M = {}, R = {}",
        p.e_pol, p.z_pol, p.t_s, p.t_m, p.r
    );
    println!("group knowledge: B_S = {}, B_M = {}, B_soc = {}", p.b_s, p.b_m, p.b_soc);
    println!(
        "welfare: W = {}, services = {}, dispersion = {}",
        w.total, w.service_welfare, w.dispersion
    );
    println!(
        "residuals: output {:e}, integration slack {:e}, first-order {:e}",
        s.output_gap, s.slack, s.kkt
    );
    if let Some(path) = &common.out {
        s.table().write_csv(open_out(Some(path))?)?;
    }
    Ok(0)
}

fn sweep(common: &Common, axis: Axis) -> Result<u8, Failure> {
    let scenario = Scenario::load(&common.config)?;
    let table = report::sweep(&scenario, axis.into())?;
    table.write_csv(open_out(common.out.as_deref())?)?;
    Ok(0)
}

fn run_verify(common: &Common, seed: Option<u64>, strict: bool) -> Result<u8, Failure> {
    let scenario = Scenario::load(&common.config)?;
    let report = verify::run_scenario(&scenario, strict, seed);
    let text = report.render();
    let mut out = open_out(common.out.as_deref())?;
    out.write_all(text.as_bytes()).context("cannot write report")?;
    out.flush().context("cannot write report")?;
    if report.all_pass() {
        Ok(0)
    } else {
        for c in report.checks.iter().filter(|c| c.status == verify::Status::Fail) {
            eprintln!("failed: {}: {}", c.anchor, c.detail);
        }
        Ok(EXIT_ORACLE)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let result = match &cli.command {
        Command::Solve(common) => solve(common),
        Command::Sweep { common, axis } => sweep(common, *axis),
        Command::Verify {
            common,
            seed,
            strict,
        } => run_verify(common, *seed, *strict),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            log::debug!("exit code {}", f.code);
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
