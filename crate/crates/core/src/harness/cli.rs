use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use super::validate::{render, run_all, ValidateSizes};
use super::{fmt_num, records_csv, run_experiment, summarize, summary_csv, summary_table, write_text, ExperimentConfig, Sweep};
use crate::error::{Error, Result};
use crate::model::{sample_channel, CMat};
use crate::optimizers::{optimize, Scheme};
use crate::relay_eval::{BeamformingSolution, RelayStrategy};

#[derive(Parser, Debug)]
#[command(name = "twr-swipt", version, about = "Two-way relay SWIPT beamforming and power-splitting optimiser")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Optimise one channel draw and print the full solution
    Solve(SolveArgs),
    /// Monte-Carlo sweep over the relay power
    Sweep(SweepArgs),
    /// Run the built-in oracle and property checks
    Validate(ValidateArgs),
}

#[derive(Args, Debug)]
struct Common {
    /// key = value file with system and experiment settings
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    scheme: Option<Scheme>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value = "af")]
    strategy: RelayStrategy,
    /// Relay antennas
    #[arg(long)]
    n: Option<usize>,
    /// Relay power in dBm
    #[arg(long, default_value_t = 20.0)]
    pr_dbm: f64,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    /// Comma-separated strategies
    #[arg(long, value_delimiter = ',')]
    strategy: Vec<RelayStrategy>,
    #[arg(long)]
    trials: Option<usize>,
    /// lo:hi:step in dBm
    #[arg(long)]
    pr_dbm_range: Option<String>,
    /// Per-trial CSV
    #[arg(long)]
    out: Option<PathBuf>,
    /// Summary CSV; defaults to the trial CSV path with a `.summary.csv` suffix
    #[arg(long)]
    summary_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    /// Small suite sizes
    #[arg(long)]
    quick: bool,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

const EXIT_INFEASIBLE: i32 = 1;
const EXIT_USAGE: i32 = 2;

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config { .. } | Error::Io { .. } | Error::InvalidParams(_) | Error::Domain(_) => EXIT_USAGE,
        _ => EXIT_INFEASIBLE,
    }
}

fn load(common: &Common) -> Result<ExperimentConfig> {
    let mut cfg = match &common.config {
        Some(path) => ExperimentConfig::from_file(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = common.scheme {
        cfg.schemes = vec![s];
    }
    if let Some(seed) = common.seed {
        cfg.base_seed = seed;
    }
    Ok(cfg)
}

fn write_matrix(out: &mut String, name: &str, m: &CMat) {
    let _ = writeln!(out, "{name}:");
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| format!("{}{:+.11e}i", fmt_num(m[(i, j)].re), m[(i, j)].im)).collect();
        let _ = writeln!(out, "  {}", row.join("  "));
    }
}

fn solve(args: &SolveArgs, out: &mut dyn Write) -> Result<i32> {
    let mut cfg = load(&args.common)?;
    if let Some(n) = args.n {
        cfg.params.n_antennas = n;
    }
    cfg.validate()?;
    let params = cfg.params_at(args.pr_dbm);
    let ch = sample_channel(&params, cfg.base_seed)?;
    let scheme = cfg.schemes[0];
    let mut text = format!(
        "strategy {} scheme {} n {} seed {} p_r_dbm {}\nchannel_hash {:016x}\n",
        args.strategy,
        scheme,
        params.n_antennas,
        cfg.base_seed,
        fmt_num(args.pr_dbm),
        ch.fingerprint()
    );
    let res = match optimize(&ch, &params, args.strategy, scheme, cfg.rates(), &cfg.options) {
        Ok(res) => res,
        Err(e @ (Error::Infeasible(_) | Error::InfeasibleRate { .. })) => {
            text.push_str(&format!("status infeasible\nreason {e}\n"));
            out.write_all(text.as_bytes()).ok();
            return Ok(EXIT_INFEASIBLE);
        }
        Err(e) => return Err(e),
    };
    let m = &res.metrics;
    let _ = writeln!(text, "status {}\niterations {}", res.status, res.iterations);
    let _ = writeln!(text, "p1 {}\np2 {}\nrho {}", fmt_num(res.split.p1), fmt_num(res.split.p2), fmt_num(res.split.rho));
    let _ = writeln!(text, "objective {}", fmt_num(m.objective));
    for (name, v) in [("energy", m.energy), ("net", m.net), ("sinr", m.sinr), ("tau", params.tau)] {
        let _ = writeln!(text, "{name} {} {}", fmt_num(v[0]), fmt_num(v[1]));
    }
    let _ = writeln!(text, "relay_power {} of {}", fmt_num(m.relay_power), fmt_num(params.p_relay));
    match &res.solution {
        BeamformingSolution::Af { w, qx } => {
            write_matrix(&mut text, "W", w);
            write_matrix(&mut text, "Qx", qx);
        }
        BeamformingSolution::Xor { qs, qx } => {
            write_matrix(&mut text, "Qs", qs);
            write_matrix(&mut text, "Qx", qx);
        }
        BeamformingSolution::Sup { qs1, qs2, qx } => {
            write_matrix(&mut text, "Qs1", qs1);
            write_matrix(&mut text, "Qs2", qs2);
            write_matrix(&mut text, "Qx", qx);
        }
    }
    let trace: Vec<String> = res.trace.iter().map(|v| fmt_num(*v)).collect();
    let _ = writeln!(text, "trace {}", trace.join(" "));
    out.write_all(text.as_bytes()).map_err(|source| Error::Io { path: "<stdout>".into(), source })?;
    Ok(0)
}

fn sweep(args: &SweepArgs, out: &mut dyn Write) -> Result<i32> {
    let mut cfg = load(&args.common)?;
    if !args.strategy.is_empty() {
        cfg.strategies = args.strategy.clone();
    }
    if let Some(t) = args.trials {
        cfg.trials = t;
    }
    if let Some(r) = &args.pr_dbm_range {
        cfg.pr_dbm = Sweep::parse(r)?;
    }
    if let Some(o) = &args.out {
        cfg.output = Some(o.clone());
    }
    let records = run_experiment(&cfg)?;
    let rows = summarize(&records);
    let summary_path = args.summary_out.clone().or_else(|| {
        cfg.output.as_ref().map(|p| {
            let mut s = p.clone().into_os_string();
            s.push(".summary.csv");
            PathBuf::from(s)
        })
    });
    if let Some(path) = summary_path {
        write_text(&path, &summary_csv(&rows))?;
    }
    if cfg.output.is_none() {
        out.write_all(records_csv(&records).as_bytes()).ok();
    }
    out.write_all(summary_table(&rows).as_bytes()).ok();
    Ok(0)
}

fn validate(args: &ValidateArgs, out: &mut dyn Write) -> Result<i32> {
    let sizes = if args.quick { ValidateSizes::quick() } else { ValidateSizes::full() };
    let outcomes = run_all(sizes, args.seed)?;
    out.write_all(render(&outcomes).as_bytes()).ok();
    Ok(if outcomes.iter().all(|o| o.passed) { 0 } else { 1 })
}

/// Runs the CLI on `args` (including the program name), writing normal
/// output to `out` and diagnostics to `err`. Returns the exit code: 0 on
/// success, 1 when the instance is infeasible or a check fails, 2 on usage
/// or configuration errors.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                out.write_all(text.as_bytes()).ok();
            } else {
                err.write_all(text.as_bytes()).ok();
            }
            return if code == 0 { 0 } else { EXIT_USAGE };
        }
    };
    let result = match &cli.command {
        Command::Solve(a) => solve(a, out),
        Command::Sweep(a) => sweep(a, out),
        Command::Validate(a) => validate(a, out),
    };
    result.unwrap_or_else(|e| {
        let _ = writeln!(err, "error: {e}");
        exit_code(&e)
    })
}

pub fn cli_main() -> i32 {
    run_cli(std::env::args_os(), &mut std::io::stdout(), &mut std::io::stderr())
}
