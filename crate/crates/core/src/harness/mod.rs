//! Monte-Carlo experiment runner: sweeps the relay power, runs the selected
//! strategies and schemes on shared channel draws and writes plot-ready CSV.

mod cli;
mod summary;
pub mod validate;

pub use cli::{cli_main, run_cli};
pub use summary::{summarize, summary_csv, summary_table, SummaryRow};

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::model::{dbm_to_watts, parse_kv, r_max, sample_channel, tau_from_rate, SystemParams};
use crate::optimizers::{optimize, OptimizeOptions, OptimizeStatus, Scheme};
use crate::relay_eval::RelayStrategy;

/// Inclusive relay-power sweep in dBm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sweep {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl Sweep {
    pub fn single(value: f64) -> Self {
        Sweep { lo: value, hi: value, step: 1.0 }
    }

    /// Parses `lo:hi:step`, or a single value.
    pub fn parse(text: &str) -> Result<Self> {
        let nums: Vec<f64> = text
            .split(':')
            .map(|p| p.trim().parse::<f64>().map_err(|_| Error::Domain(format!("bad sweep `{text}`"))))
            .collect::<Result<_>>()?;
        let sweep = match nums.as_slice() {
            [v] => Sweep::single(*v),
            [lo, hi, step] => Sweep { lo: *lo, hi: *hi, step: *step },
            _ => return Err(Error::Domain(format!("sweep `{text}` must be lo:hi:step"))),
        };
        sweep.validate()?;
        Ok(sweep)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lo.is_finite() && self.hi.is_finite() && self.step > 0.0 && self.lo <= self.hi) {
            return Err(Error::Domain(format!("empty sweep {}:{}:{}", self.lo, self.hi, self.step)));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<f64> {
        let count = ((self.hi - self.lo) / self.step + 1e-9).floor() as usize + 1;
        (0..count).map(|k| self.lo + k as f64 * self.step).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// Template; `p_relay` and `tau` are overwritten per sweep point.
    pub params: SystemParams,
    pub strategies: Vec<RelayStrategy>,
    pub schemes: Vec<Scheme>,
    pub pr_dbm: Sweep,
    pub trials: usize,
    /// Rate target as a fraction of each source's single-link rate.
    pub gamma: f64,
    pub base_seed: u64,
    pub output: Option<PathBuf>,
    pub options: OptimizeOptions,
}

impl Default for ExperimentConfig {
    /// Symmetric desk-scale preset: both sources 1 m away, equal weights,
    /// `N = 4`, `gamma = 0.1`, relay power 0 to 30 dBm in 5 dB steps.
    fn default() -> Self {
        Self {
            params: SystemParams::default(),
            strategies: RelayStrategy::ALL.to_vec(),
            schemes: vec![Scheme::Joint],
            pr_dbm: Sweep { lo: 0.0, hi: 30.0, step: 5.0 },
            trials: 100,
            gamma: 0.1,
            base_seed: 0,
            output: None,
            options: OptimizeOptions::default(),
        }
    }
}

fn parse_list<T, F>(value: &str, parse: F) -> std::result::Result<Vec<T>, String>
where
    F: Fn(&str) -> std::result::Result<T, String>,
{
    let items: Vec<T> = value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(parse)
        .collect::<std::result::Result<_, _>>()?;
    if items.is_empty() {
        return Err("empty list".into());
    }
    Ok(items)
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.pr_dbm.validate()?;
        self.options.validate()?;
        if self.trials == 0 {
            return Err(Error::InvalidParams("trials must be at least 1".into()));
        }
        if self.strategies.is_empty() || self.schemes.is_empty() {
            return Err(Error::InvalidParams("no strategy or scheme selected".into()));
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return Err(Error::InvalidParams(format!("gamma must be non-negative, got {}", self.gamma)));
        }
        Ok(())
    }

    /// Applies `key = value` text on top of the defaults. System keys are
    /// those of [`SystemParams::apply_key`]; experiment keys are `strategies`,
    /// `schemes`, `pr_dbm_range`, `trials`, `gamma`, `seed`, `out`,
    /// `max_iters` and `rel_tol`.
    pub fn from_config_str(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for entry in parse_kv(text)? {
            let err = |msg: String| Error::Config { line: entry.line, msg };
            if cfg.params.apply_key(&entry.key, &entry.value).map_err(err)? {
                continue;
            }
            let value = entry.value.as_str();
            let number = || value.parse::<f64>().map_err(|_| err(format!("`{}` expects a number", entry.key)));
            let count = || value.parse::<u64>().map_err(|_| err(format!("`{}` expects an integer", entry.key)));
            match entry.key.as_str() {
                "strategies" | "strategy" => cfg.strategies = parse_list(value, |s| s.parse()).map_err(err)?,
                "schemes" | "scheme" => cfg.schemes = parse_list(value, |s| s.parse()).map_err(err)?,
                "pr_dbm_range" | "p_relay_dbm_range" => cfg.pr_dbm = Sweep::parse(value).map_err(|e| err(e.to_string()))?,
                "trials" => cfg.trials = count()? as usize,
                "gamma" => cfg.gamma = number()?,
                "seed" | "base_seed" => cfg.base_seed = count()?,
                "out" | "output" => cfg.output = Some(PathBuf::from(value)),
                "max_iters" => cfg.options.max_iters = count()? as usize,
                "rel_tol" => cfg.options.rel_tol = number()?,
                other => return Err(err(format!("unknown key `{other}`"))),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
        Self::from_config_str(&text)
    }

    /// Rate pair `gamma * R_max,i`.
    pub fn rates(&self) -> [f64; 2] {
        let p = &self.params;
        [0, 1].map(|i| self.gamma * r_max(p.p_max[i], p.sigma_r2))
    }

    /// Parameters at one sweep point: relay power set, and each node's SINR
    /// target derived from the rate of the message it decodes.
    pub fn params_at(&self, pr_dbm: f64) -> SystemParams {
        let rates = self.rates();
        SystemParams {
            p_relay: dbm_to_watts(pr_dbm),
            tau: [tau_from_rate(rates[1]), tau_from_rate(rates[0])],
            ..self.params.clone()
        }
    }
}

/// One optimiser run. Energies are per slot; `net_i = E_i - P_i T / 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub seed: u64,
    pub strategy: RelayStrategy,
    pub scheme: Scheme,
    pub p_r_dbm: f64,
    pub objective: f64,
    pub e1: f64,
    pub e2: f64,
    pub net1: f64,
    pub net2: f64,
    pub p1: f64,
    pub p2: f64,
    pub rho: f64,
    pub sinr1: f64,
    pub sinr2: f64,
    pub iterations: usize,
    pub status: OptimizeStatus,
    pub channel_hash: u64,
}

pub const CSV_HEADER: &str =
    "seed,strategy,scheme,p_r_dbm,objective,e1,e2,net1,net2,p1,p2,rho,sinr1,sinr2,iterations,status,channel_hash";

impl TrialRecord {
    /// Failed runs carry NaN metrics.
    pub fn feasible(&self) -> bool {
        self.objective.is_finite()
    }

    pub fn share(&self) -> Option<f64> {
        let total = self.e1 + self.e2;
        (total > 0.0).then(|| self.e2 / total)
    }

    fn csv_line(&self) -> String {
        let mut s = format!("{},{},{},{}", self.seed, self.strategy, self.scheme, fmt_num(self.p_r_dbm));
        for v in [self.objective, self.e1, self.e2, self.net1, self.net2, self.p1, self.p2, self.rho, self.sinr1, self.sinr2] {
            let _ = write!(s, ",{}", fmt_num(v));
        }
        let _ = write!(s, ",{},{},{:016x}", self.iterations, self.status, self.channel_hash);
        s
    }
}

/// 12 significant digits in scientific notation.
pub fn fmt_num(v: f64) -> String {
    format!("{v:.11e}")
}

pub fn records_csv(records: &[TrialRecord]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&r.csv_line());
        out.push('\n');
    }
    out
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

#[derive(Debug, Clone, Copy)]
struct Job {
    point: usize,
    trial: usize,
    strategy: RelayStrategy,
    scheme: Scheme,
}

fn jobs(cfg: &ExperimentConfig) -> Vec<Job> {
    let mut out = Vec::new();
    for point in 0..cfg.pr_dbm.points().len() {
        for trial in 0..cfg.trials {
            for &strategy in &cfg.strategies {
                for &scheme in &cfg.schemes {
                    out.push(Job { point, trial, strategy, scheme });
                }
            }
        }
    }
    out
}

fn run_job(cfg: &ExperimentConfig, points: &[f64], job: Job) -> Result<TrialRecord> {
    let pr = points[job.point];
    let params = cfg.params_at(pr);
    let seed = cfg.base_seed.wrapping_add(job.trial as u64);
    let ch = sample_channel(&params, seed)?;
    let mut rec = TrialRecord {
        seed,
        strategy: job.strategy,
        scheme: job.scheme,
        p_r_dbm: pr,
        objective: f64::NAN,
        e1: f64::NAN,
        e2: f64::NAN,
        net1: f64::NAN,
        net2: f64::NAN,
        p1: f64::NAN,
        p2: f64::NAN,
        rho: f64::NAN,
        sinr1: f64::NAN,
        sinr2: f64::NAN,
        iterations: 0,
        status: OptimizeStatus::Infeasible,
        channel_hash: ch.fingerprint(),
    };
    match optimize(&ch, &params, job.strategy, job.scheme, cfg.rates(), &cfg.options) {
        Ok(res) => {
            let m = res.metrics;
            rec.objective = m.objective;
            [rec.e1, rec.e2] = m.energy;
            [rec.net1, rec.net2] = m.net;
            [rec.sinr1, rec.sinr2] = m.sinr;
            rec.p1 = res.split.p1;
            rec.p2 = res.split.p2;
            rec.rho = res.split.rho;
            rec.iterations = res.iterations;
            rec.status = res.status;
        }
        Err(Error::Infeasible(_) | Error::InfeasibleRate { .. }) => {}
        Err(Error::Numerical(_) | Error::Degenerate(_)) => rec.status = OptimizeStatus::Stalled,
        Err(e) => return Err(e),
    }
    Ok(rec)
}

fn finish(cfg: &ExperimentConfig, records: Vec<TrialRecord>) -> Result<Vec<TrialRecord>> {
    if let Some(path) = &cfg.output {
        write_text(path, &records_csv(&records))?;
    }
    Ok(records)
}

fn check_output(cfg: &ExperimentConfig) -> Result<()> {
    if let Some(path) = &cfg.output {
        fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|source| Error::Io { path: path.clone(), source })?;
    }
    Ok(())
}

/// Runs every (sweep point, trial, strategy, scheme) combination. Trial `t`
/// uses channel seed `base_seed + t` for every strategy and scheme. Records
/// come back ordered by sweep point, then seed, independent of scheduling.
#[cfg(feature = "parallel")]
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<TrialRecord>> {
    use rayon::prelude::*;
    cfg.validate()?;
    check_output(cfg)?;
    let points = cfg.pr_dbm.points();
    let records = jobs(cfg).into_par_iter().map(|job| run_job(cfg, &points, job)).collect::<Result<Vec<_>>>()?;
    finish(cfg, records)
}

#[cfg(not(feature = "parallel"))]
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<TrialRecord>> {
    run_experiment_sequential(cfg)
}

/// Single-threaded [`run_experiment`]; produces identical records.
pub fn run_experiment_sequential(cfg: &ExperimentConfig) -> Result<Vec<TrialRecord>> {
    cfg.validate()?;
    check_output(cfg)?;
    let points = cfg.pr_dbm.points();
    let records = jobs(cfg).into_iter().map(|job| run_job(cfg, &points, job)).collect::<Result<Vec<_>>>()?;
    finish(cfg, records)
}
