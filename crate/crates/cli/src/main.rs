mod config;
mod report;
mod sweep;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use log::info;
use minmotion::{
    check_samples, samples_from_csv, samples_to_csv, solve_mdt, solve_mtt, solve_mtt_traced,
    MdtRequest, MttSolution, ViolationKind,
};

use config::{Mode, ProblemConfig};
use sweep::SweepParam;

#[derive(Parser)]
#[command(
    name = "minmotion",
    version,
    about = "Minimum-time and minimum-derivative motion planning"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the problem named by the config's `mode`.
    Run(SolveArgs),
    /// Minimum-time solve, ignoring any horizon in the config.
    Mtt(SolveArgs),
    /// Minimum-derivative solve; the config must use `mode = "mdt"`.
    Mdt(SolveArgs),
    /// Write a sampled trajectory as CSV.
    Sample {
        config: PathBuf,
        /// Sampling step in seconds; defaults to the config's `sample_step`.
        #[arg(long)]
        step: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a sampled trajectory against the config's bounds.
    Check {
        csv: PathBuf,
        #[arg(long)]
        config: PathBuf,
    },
    /// Minimum time over a range of one bound.
    Sweep {
        config: PathBuf,
        /// `wK=lo:hi:COUNT`, with `log` after COUNT for log spacing.
        #[arg(long)]
        param: SweepParam,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(clap::Args)]
struct SolveArgs {
    config: PathBuf,
    /// Destination of the CSV when the config's `output` includes it.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Fixed decimals in the summary instead of round-trip form.
    #[arg(long)]
    precision: Option<usize>,
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?;
            info!("wrote {}", path.display());
        }
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn solve(cfg: &ProblemConfig) -> Result<MttSolution> {
    Ok(match cfg.mode {
        Mode::Mtt => solve_mtt(&cfg.spec)?,
        Mode::Mdt {
            horizon,
            target_order,
        } => solve_mdt(&MdtRequest::new(cfg.spec.clone(), horizon, target_order)?)?,
    })
}

fn sampled_csv(sol: &MttSolution, step: f64) -> Result<String> {
    let profile = sol.profile();
    let samples = profile.sample_with_breakpoints(step)?;
    Ok(samples_to_csv(&samples, profile.order()))
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Solver {
    Configured,
    MinimumTime,
    MinimumDerivative,
}

fn run_solve(args: &SolveArgs, solver: Solver) -> Result<()> {
    let mut cfg = ProblemConfig::load(&args.config)?;
    match solver {
        Solver::MinimumTime => cfg.mode = Mode::Mtt,
        Solver::MinimumDerivative if cfg.mode == Mode::Mtt => {
            bail!("mode: the mdt command needs mode = \"mdt\" with horizon and target_order")
        }
        _ => {}
    }
    let (summary, sol) = match cfg.mode {
        Mode::Mtt => {
            let trace = solve_mtt_traced(&cfg.spec)?;
            let text = report::mtt_summary(&cfg, &trace, args.precision);
            (text, trace.solution)
        }
        Mode::Mdt { .. } => {
            let minimum = solve_mtt(&cfg.spec)?;
            let sol = solve(&cfg)?;
            (
                report::mdt_summary(&cfg, &minimum, &sol, args.precision),
                sol,
            )
        }
    };
    if cfg.output.summary() {
        print!("{summary}");
    }
    if cfg.output.csv() {
        let step = cfg
            .sample_step
            .context("sample_step: required when output includes csv")?;
        emit(args.out.as_deref(), &sampled_csv(&sol, step)?)?;
    }
    Ok(())
}

fn run_check(csv: &Path, config: &Path) -> Result<bool> {
    let cfg = ProblemConfig::load(config)?;
    let text = fs::read_to_string(csv).with_context(|| format!("cannot read {}", csv.display()))?;
    let (order, samples) =
        samples_from_csv(&text).with_context(|| format!("in {}", csv.display()))?;
    if order != cfg.order() {
        bail!(
            "{}: order {order} does not match config order {}",
            csv.display(),
            cfg.order()
        );
    }
    let report = check_samples(&samples, &cfg.spec);
    let mut table = report::Table::new(None);
    table.text("samples", report.samples.to_string());
    table.numbers("max |x|", &report.peaks[1..]);
    table.numbers("bounds w", cfg.spec.bounds());
    table.numbers("excess", &report.excess);
    print!("{}", table.render());
    for v in &report.violations {
        let what = match v.kind {
            ViolationKind::Bound => "exceeds its bound",
            ViolationKind::Start => "is not at rest at the start",
            ViolationKind::End => "is not at rest at the end",
            ViolationKind::Distance => "misses the distance",
        };
        println!(
            "violation: x{} {what} (relative {:e})",
            v.order, v.magnitude
        );
    }
    let ok = report.is_admissible();
    println!("{}", if ok { "admissible" } else { "not admissible" });
    Ok(ok)
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Run(args) => run_solve(&args, Solver::Configured)?,
        Command::Mtt(args) => run_solve(&args, Solver::MinimumTime)?,
        Command::Mdt(args) => run_solve(&args, Solver::MinimumDerivative)?,
        Command::Sample { config, step, out } => {
            let cfg = ProblemConfig::load(&config)?;
            let step = step
                .or(cfg.sample_step)
                .context("--step: required when the config has no sample_step")?;
            emit(out.as_deref(), &sampled_csv(&solve(&cfg)?, step)?)?;
        }
        Command::Check { csv, config } => {
            if !run_check(&csv, &config)? {
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Sweep { config, param, out } => {
            let cfg = ProblemConfig::load(&config)?;
            emit(out.as_deref(), &sweep::run(&cfg.spec, &param)?)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match dispatch(Cli::parse()) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            let horizon = err.chain().any(|e| {
                matches!(
                    e.downcast_ref::<minmotion::Error>(),
                    Some(minmotion::Error::InfeasibleHorizon { .. })
                )
            });
            ExitCode::from(if horizon { 2 } else { 1 })
        }
    }
}
