//! Alternating beamforming / power-splitting optimisers for the three relaying
//! strategies, and the two reference schemes that optimise only one tier.
//!
//! Every run starts from full source power (AF) or the smallest powers that
//! support the requested rates (DF), with `rho = 0.5`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_part, trace_product, trace_re, vec as vectorize};
use crate::model::{CMat, ChannelRealization, SystemParams};
use crate::ps::{compute_ps_coefficients, df_sinr_margins, solve_ps, solve_rho_df, RHO_MAX};
use crate::relay_eval::{evaluate, evaluate_af, mac_min_powers, BeamformingSolution, Metrics, PowerSplit, RelayStrategy};
use crate::sdp::{
    build_af_sdp, build_sup_sdp, build_xor_sdp, extract_rank_one, solve_sdp, BlockSpec, Field, SdpProblem, SdpSolution,
    SdpStatus, SdpTolerances,
};

/// Rank ratio above which the principal component is rescaled before use.
pub const RANK_TOL: f64 = 1e-4;
/// A stalled SDP run is still used when its gap and residual are below this.
const FALLBACK_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizeOptions {
    pub max_iters: usize,
    /// Stop once the objective moves by at most `rel_tol * (1 + |objective|)`.
    pub rel_tol: f64,
    /// Starting point for AF runs; `None` means both caps and `rho = 0.5`.
    pub init_split: Option<PowerSplit>,
    pub sdp_tolerances: SdpTolerances,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        Self {
            max_iters: 50,
            rel_tol: 1e-6,
            init_split: None,
            sdp_tolerances: SdpTolerances { gap_tol: 1e-11, feas_tol: 1e-11, max_iters: 200 },
        }
    }
}

impl OptimizeOptions {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::InvalidParams("max_iters must be at least 1".into()));
        }
        if !(self.rel_tol > 0.0) {
            return Err(Error::InvalidParams(format!("rel_tol must be positive, got {}", self.rel_tol)));
        }
        if let Some(s) = &self.init_split {
            s.validate()?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OptimizeStatus {
    Converged,
    MaxIters,
    Infeasible,
    RankRepairFailed,
    /// A later subproblem failed numerically; the best earlier iterate is kept.
    Stalled,
}

impl OptimizeStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            OptimizeStatus::Converged => "converged",
            OptimizeStatus::MaxIters => "max_iters",
            OptimizeStatus::Infeasible => "infeasible",
            OptimizeStatus::RankRepairFailed => "rank_repair_failed",
            OptimizeStatus::Stalled => "stalled",
        }
    }
}

impl fmt::Display for OptimizeStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone)]
pub struct OptimizeResult {
    pub solution: BeamformingSolution,
    pub split: PowerSplit,
    pub metrics: Metrics,
    /// Objective after every half-step: beamforming, then power/splitting.
    pub trace: Vec<f64>,
    pub status: OptimizeStatus,
    pub iterations: usize,
    /// Largest `lambda_2 / lambda_1` over the AF lifted solutions (0 for DF).
    pub rank_ratio: f64,
}

/// Which tiers a run optimises.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    Joint,
    PrecodingOnly,
    AllocationOnly,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::Joint, Scheme::PrecodingOnly, Scheme::AllocationOnly];

    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Joint => "joint",
            Scheme::PrecodingOnly => "precoding",
            Scheme::AllocationOnly => "allocation",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "joint" => Ok(Scheme::Joint),
            "precoding" | "precoding_only" | "precoding-only" => Ok(Scheme::PrecodingOnly),
            "allocation" | "allocation_only" | "allocation-only" => Ok(Scheme::AllocationOnly),
            other => Err(format!("unknown scheme `{other}` (expected joint, precoding or allocation)")),
        }
    }
}

fn solve_checked(problem: &SdpProblem, tol: &SdpTolerances) -> Result<SdpSolution> {
    let sol = solve_sdp(problem, tol)?;
    match sol.status {
        SdpStatus::Optimal => Ok(sol),
        SdpStatus::Infeasible => Err(Error::Infeasible(format!("beamforming problem: {}", sol.message))),
        SdpStatus::NumericalFailure
            if sol.duality_gap <= FALLBACK_TOL && sol.max_constraint_violation <= FALLBACK_TOL =>
        {
            Ok(sol)
        }
        SdpStatus::NumericalFailure => Err(Error::Numerical(sol.message)),
    }
}

/// Outcome of one beamforming half-step.
struct Beam {
    solution: BeamformingSolution,
    /// False when a rank repair left an SINR target unmet.
    usable: bool,
    rank_ratio: f64,
}

impl Beam {
    fn exact(solution: BeamformingSolution) -> Self {
        Beam { solution, usable: true, rank_ratio: 0.0 }
    }
}

fn meets_targets(m: &Metrics, params: &SystemParams) -> bool {
    (0..2).all(|i| m.sinr[i] >= params.tau[i] * (1.0 - 1e-9) - 1e-12)
}

fn af_beam(ch: &ChannelRealization, params: &SystemParams, split: &PowerSplit, tol: &SdpTolerances) -> Result<Beam> {
    let n = ch.n();
    let sol = solve_checked(&build_af_sdp(ch, params, split)?, tol)?;
    let qx = hermitian_part(&sol.blocks[1]);
    let lifted = &sol.blocks[0];
    if trace_re(lifted) <= 1e-10 * (1.0 + trace_re(&qx)) {
        return Ok(Beam::exact(BeamformingSolution::Af { w: CMat::zeros(n, n), qx }));
    }
    let rank = extract_rank_one(lifted)?;
    let mut w = rank.matrix;
    if rank.rank_ratio <= RANK_TOL {
        return Ok(Beam { solution: BeamformingSolution::Af { w, qx }, usable: true, rank_ratio: rank.rank_ratio });
    }
    // stretch the principal component onto the relay budget
    let forward = split.p1 * (&w * &ch.h1).norm_squared()
        + split.p2 * (&w * &ch.h2).norm_squared()
        + params.sigma_r2 * w.norm_squared();
    let room = params.p_relay - trace_re(&qx);
    let kappa = if forward > 0.0 && room > 0.0 { (room / forward).sqrt() } else { 0.0 };
    w = w.scale(kappa);
    let solution = BeamformingSolution::Af { w, qx };
    let usable = meets_targets(&evaluate_af(ch, &solution, split, params)?, params);
    Ok(Beam { solution, usable, rank_ratio: rank.rank_ratio })
}

fn df_beam(ch: &ChannelRealization, params: &SystemParams, strategy: RelayStrategy, rho: f64, tol: &SdpTolerances) -> Result<Beam> {
    let problem = match strategy {
        RelayStrategy::DfXor => build_xor_sdp(ch, params, rho)?,
        RelayStrategy::DfSup => build_sup_sdp(ch, params, rho)?,
        RelayStrategy::Af => return Err(Error::Domain("df_beam called for AF".into())),
    };
    let sol = solve_checked(&problem, tol)?;
    Ok(Beam::exact(df_solution(strategy, sol.blocks.iter().map(hermitian_part).collect())))
}

fn df_solution(strategy: RelayStrategy, mut blocks: Vec<CMat>) -> BeamformingSolution {
    let qx = blocks.pop().expect("at least two blocks");
    match strategy {
        RelayStrategy::DfSup => {
            let qs2 = blocks.pop().expect("three blocks");
            let qs1 = blocks.pop().expect("three blocks");
            BeamformingSolution::Sup { qs1, qs2, qx }
        }
        _ => BeamformingSolution::Xor { qs: blocks.pop().expect("two blocks"), qx },
    }
}

fn af_split_step(ch: &ChannelRealization, params: &SystemParams, sol: &BeamformingSolution) -> Result<PowerSplit> {
    let BeamformingSolution::Af { w, qx } = sol else {
        return Err(Error::Domain("AF split step given a DF design".into()));
    };
    solve_ps(&compute_ps_coefficients(ch, w, qx, params)?)
}

fn df_split_step(ch: &ChannelRealization, params: &SystemParams, sol: &BeamformingSolution, split: &PowerSplit) -> Result<PowerSplit> {
    let (c, d) = df_sinr_margins(ch, sol, params)?;
    Ok(PowerSplit { rho: solve_rho_df(c, d, params)?, ..*split })
}

struct Best {
    solution: BeamformingSolution,
    split: PowerSplit,
    metrics: Metrics,
}

/// Block-coordinate ascent shared by all alternating schemes. `beam` solves
/// for the relay design at a fixed split; `step` returns the next design and
/// split. Failures on the first pass are errors; later ones end the run with
/// the best full iterate so far.
fn alternate<B, S>(ch: &ChannelRealization, params: &SystemParams, opts: &OptimizeOptions, mut split: PowerSplit, mut beam: B, mut step: S) -> Result<OptimizeResult>
where
    B: FnMut(&PowerSplit) -> Result<Beam>,
    S: FnMut(BeamformingSolution, &PowerSplit) -> Result<(BeamformingSolution, PowerSplit)>,
{
    opts.validate()?;
    let mut trace = Vec::with_capacity(2 * opts.max_iters);
    let mut best: Option<Best> = None;
    let mut previous: Option<f64> = None;
    let mut status = OptimizeStatus::MaxIters;
    let mut iterations = 0;
    let mut rank_ratio: f64 = 0.0;

    for it in 1..=opts.max_iters {
        iterations = it;
        let b = match beam(&split) {
            Ok(b) => b,
            Err(e) if best.is_none() => return Err(e),
            Err(_) => {
                status = OptimizeStatus::Stalled;
                break;
            }
        };
        rank_ratio = rank_ratio.max(b.rank_ratio);
        trace.push(evaluate(ch, &b.solution, &split, params)?.objective);
        if !b.usable && best.is_some() {
            status = OptimizeStatus::RankRepairFailed;
            break;
        }
        let (solution, next) = match step(b.solution, &split) {
            Ok(v) => v,
            Err(e) if best.is_none() => return Err(e),
            Err(_) => {
                status = OptimizeStatus::Stalled;
                break;
            }
        };
        split = next;
        let metrics = evaluate(ch, &solution, &split, params)?;
        let value = metrics.objective;
        trace.push(value);
        if best.as_ref().is_none_or(|b| value > b.metrics.objective) {
            best = Some(Best { solution, split, metrics });
        }
        if previous.is_some_and(|p| (value - p).abs() <= opts.rel_tol * (1.0 + value.abs())) {
            status = OptimizeStatus::Converged;
            break;
        }
        previous = Some(value);
    }
    let best = best.expect("first pass either fails or records an iterate");
    Ok(OptimizeResult {
        solution: best.solution,
        split: best.split,
        metrics: best.metrics,
        trace,
        status,
        iterations,
        rank_ratio,
    })
}

fn af_start(params: &SystemParams, opts: &OptimizeOptions) -> PowerSplit {
    opts.init_split.unwrap_or(PowerSplit { p1: params.p_max[0], p2: params.p_max[1], rho: 0.5 })
}

fn df_start(ch: &ChannelRealization, params: &SystemParams, rates: [f64; 2]) -> Result<PowerSplit> {
    let (p1, p2) = mac_min_powers(ch, rates, params)?;
    Ok(PowerSplit { p1, p2, rho: 0.5 })
}

fn af_from(ch: &ChannelRealization, params: &SystemParams, opts: &OptimizeOptions, start: PowerSplit) -> Result<OptimizeResult> {
    let tol = opts.sdp_tolerances;
    alternate(
        ch,
        params,
        opts,
        start,
        |split| af_beam(ch, params, split, &tol),
        |sol, _| {
            let split = af_split_step(ch, params, &sol)?;
            Ok((sol, split))
        },
    )
}

fn df_from(ch: &ChannelRealization, params: &SystemParams, strategy: RelayStrategy, opts: &OptimizeOptions, start: PowerSplit) -> Result<OptimizeResult> {
    let tol = opts.sdp_tolerances;
    alternate(
        ch,
        params,
        opts,
        start,
        |split| df_beam(ch, params, strategy, split.rho, &tol),
        |sol, split| {
            let next = df_split_step(ch, params, &sol, split)?;
            Ok((sol, next))
        },
    )
}

/// Runs `run` from the default start and, when the isotropic baseline finds a
/// different split, again from that split; keeps the better run. The default
/// start wins ties.
fn two_starts<F>(ch: &ChannelRealization, params: &SystemParams, strategy: RelayStrategy, rates: [f64; 2], opts: &OptimizeOptions, default: PowerSplit, run: F) -> Result<OptimizeResult>
where
    F: Fn(PowerSplit) -> Result<OptimizeResult>,
{
    let first = run(default);
    let Ok(warm) = baseline_allocation_only(ch, params, strategy, rates, opts) else { return first };
    if warm.split == default {
        return first;
    }
    match (first, run(warm.split)) {
        (Ok(a), Ok(b)) => Ok(if b.metrics.objective > a.metrics.objective { b } else { a }),
        (Ok(a), Err(_)) => Ok(a),
        (Err(_), Ok(b)) => Ok(b),
        (Err(e), Err(_)) => Err(e),
    }
}

/// AF: alternates the lifted beamforming SDP with the closed-form power and
/// splitting step.
///
/// After the SDP step both SINR targets are usually tight, which pins `rho`
/// where it started. Unless `opts.init_split` is given, the alternation is
/// therefore also started from the isotropic-allocation optimum.
pub fn optimize_af(ch: &ChannelRealization, params: &SystemParams, opts: &OptimizeOptions) -> Result<OptimizeResult> {
    params.validate()?;
    opts.validate()?;
    let start = af_start(params, opts);
    if opts.init_split.is_some() {
        return af_from(ch, params, opts, start);
    }
    two_starts(ch, params, RelayStrategy::Af, [0.0; 2], opts, start, |s| af_from(ch, params, opts, s))
}

/// Largest `1/(1 - rho)` at which the whole relay budget aimed at one
/// receiver still meets its target.
fn df_u_limit(ch: &ChannelRealization, params: &SystemParams) -> f64 {
    let mut u = 1.0 / (1.0 - RHO_MAX);
    for i in 0..2 {
        if params.tau[i] > 0.0 && params.sigma_c2[i] > 0.0 {
            let reach = params.p_relay * ch.g(i).norm_squared() / params.tau[i] - params.sigma_d2[i];
            u = u.min(reach / params.sigma_c2[i]);
        }
    }
    u
}

/// Maximiser of `rho W(rho)`, where `W(rho)` is the DF covariance SDP value at
/// `rho`. `W` is concave and nonincreasing, so the product is concave and its
/// slope (from the SINR multipliers) has a single sign change. Searched in
/// `s = ln(1/(1 - rho))` by Illinois-modified false position.
fn df_best_rho(ch: &ChannelRealization, params: &SystemParams, strategy: RelayStrategy, tol: &SdpTolerances) -> Option<f64> {
    let u_max = df_u_limit(ch, params);
    if !(u_max > 1.0) {
        return None;
    }
    let slope = |s: f64| -> Option<f64> {
        let u = s.exp();
        let rho = 1.0 - 1.0 / u;
        let problem = match strategy {
            RelayStrategy::DfXor => build_xor_sdp(ch, params, rho).ok()?,
            _ => build_sup_sdp(ch, params, rho).ok()?,
        };
        let sol = solve_checked(&problem, tol).ok()?;
        let pull: f64 = (0..2).map(|i| sol.multipliers[i] * params.tau[i] * params.sigma_c2[i]).sum();
        // d(rho W)/ds = (1 - rho) W + rho u dW/du
        Some(sol.objective_value / u + rho * u * pull)
    };
    let (mut a, mut b) = (1e-6, u_max.ln());
    let mut fa = slope(a)?;
    if fa <= 0.0 {
        return Some(1.0 - (-a).exp());
    }
    let mut fb = slope(b);
    if fb.is_some_and(|v| v >= 0.0) {
        return Some(1.0 - (-b).exp());
    }
    let mut side = 0;
    for _ in 0..60 {
        if b - a <= 1e-7 * (1.0 + b) {
            break;
        }
        let s = match fb {
            Some(vb) => {
                let t = (a * vb - b * fa) / (vb - fa);
                if t > a && t < b { t } else { 0.5 * (a + b) }
            }
            None => 0.5 * (a + b),
        };
        match slope(s) {
            Some(v) if v > 0.0 => {
                if side == 1 {
                    fb = fb.map(|vb| 0.5 * vb);
                }
                (a, fa, side) = (s, v, 1);
            }
            Some(v) if v < 0.0 => {
                if side == -1 {
                    fa *= 0.5;
                }
                (b, fb, side) = (s, Some(v), -1);
            }
            Some(_) => return Some(1.0 - (-s).exp()),
            None => (b, fb, side) = (s, None, 0),
        }
    }
    Some(1.0 - (-a).exp())
}

/// DF runs start from `rho = 0.5` and from the maximiser found by
/// [`df_best_rho`]; the better run is kept and the default start wins ties.
fn optimize_df(ch: &ChannelRealization, params: &SystemParams, strategy: RelayStrategy, rates: [f64; 2], opts: &OptimizeOptions) -> Result<OptimizeResult> {
    params.validate()?;
    opts.validate()?;
    let start = df_start(ch, params, rates)?;
    let first = df_from(ch, params, strategy, opts, start);
    let Some(rho) = df_best_rho(ch, params, strategy, &opts.sdp_tolerances) else { return first };
    match (first, df_from(ch, params, strategy, opts, PowerSplit { rho, ..start })) {
        (Ok(a), Ok(b)) => Ok(if b.metrics.objective > a.metrics.objective { b } else { a }),
        (Ok(a), Err(_)) => Ok(a),
        (Err(_), Ok(b)) => Ok(b),
        (Err(e), Err(_)) => Err(e),
    }
}

/// DF-XOR: source powers fixed by the rate pair, then the covariance SDP
/// alternates with the largest splitting ratio meeting both SINR targets.
pub fn optimize_xor(ch: &ChannelRealization, params: &SystemParams, rates: [f64; 2], opts: &OptimizeOptions) -> Result<OptimizeResult> {
    optimize_df(ch, params, RelayStrategy::DfXor, rates, opts)
}

/// DF-SUP counterpart of [`optimize_xor`].
pub fn optimize_sup(ch: &ChannelRealization, params: &SystemParams, rates: [f64; 2], opts: &OptimizeOptions) -> Result<OptimizeResult> {
    optimize_df(ch, params, RelayStrategy::DfSup, rates, opts)
}

/// One beamforming solve at the starting powers and `rho = 0.5`. `rates` is
/// only used by the DF strategies.
pub fn baseline_precoding_only(ch: &ChannelRealization, params: &SystemParams, strategy: RelayStrategy, rates: [f64; 2], opts: &OptimizeOptions) -> Result<OptimizeResult> {
    params.validate()?;
    opts.validate()?;
    let tol = opts.sdp_tolerances;
    let (split, beam) = match strategy {
        RelayStrategy::Af => {
            let split = PowerSplit { rho: 0.5, ..af_start(params, opts) };
            (split, af_beam(ch, params, &split, &tol)?)
        }
        _ => {
            let split = df_start(ch, params, rates)?;
            (split, df_beam(ch, params, strategy, split.rho, &tol)?)
        }
    };
    let metrics = evaluate(ch, &beam.solution, &split, params)?;
    Ok(OptimizeResult {
        status: if beam.usable { OptimizeStatus::Converged } else { OptimizeStatus::RankRepairFailed },
        solution: beam.solution,
        split,
        trace: vec![metrics.objective],
        metrics,
        iterations: 1,
        rank_ratio: beam.rank_ratio,
    })
}

/// Fixed isotropic shapes for every relay block: `W = I` (lifted) for AF and
/// `I / N` for every covariance.
fn isotropic_shapes(strategy: RelayStrategy, n: usize) -> Vec<CMat> {
    let spread = CMat::identity(n, n).unscale(n as f64);
    match strategy {
        RelayStrategy::Af => {
            let v = vectorize(&CMat::identity(n, n));
            vec![&v * v.adjoint(), spread]
        }
        RelayStrategy::DfXor => vec![spread.clone(), spread],
        RelayStrategy::DfSup => vec![spread.clone(), spread.clone(), spread],
    }
}

/// Restricts every block `X_b` of `problem` to `t_b S_b` with `t_b >= 0`,
/// leaving a small LP over the block powers.
fn restrict_to_shapes(problem: &SdpProblem, shapes: &[CMat]) -> SdpProblem {
    let scalar = |m: &Option<CMat>, b: usize| m.as_ref().map(|c| CMat::from_element(1, 1, trace_product(c, &shapes[b]).into()));
    let blocks = problem
        .blocks
        .iter()
        .map(|b| BlockSpec { name: format!("t_{}", b.name), dim: 1, field: Field::Real })
        .collect();
    let mut out = SdpProblem::new(blocks);
    out.objective = problem.objective.iter().enumerate().map(|(b, c)| scalar(c, b)).collect();
    for con in &problem.constraints {
        let terms = con.coeffs.iter().enumerate().filter_map(|(b, c)| scalar(c, b).map(|m| (b, m))).collect();
        out.add_constraint(&con.name, terms, con.sense, con.bound);
    }
    out
}

fn shaped_beam(ch: &ChannelRealization, params: &SystemParams, strategy: RelayStrategy, split: &PowerSplit, tol: &SdpTolerances) -> Result<Beam> {
    let n = ch.n();
    let full = match strategy {
        RelayStrategy::Af => build_af_sdp(ch, params, split)?,
        RelayStrategy::DfXor => build_xor_sdp(ch, params, split.rho)?,
        RelayStrategy::DfSup => build_sup_sdp(ch, params, split.rho)?,
    };
    let shapes = isotropic_shapes(strategy, n);
    let sol = solve_checked(&restrict_to_shapes(&full, &shapes), tol)?;
    let t: Vec<f64> = sol.blocks.iter().map(|b| b[(0, 0)].re.max(0.0)).collect();
    Ok(Beam::exact(match strategy {
        RelayStrategy::Af => BeamformingSolution::Af {
            w: CMat::identity(n, n).scale(t[0].sqrt()),
            qx: shapes[1].scale(t[1]),
        },
        _ => df_solution(strategy, shapes.iter().zip(&t).map(|(s, &t)| s.scale(t)).collect()),
    }))
}

/// Scales `W` by `k` and `Q_x` by `k^2` so the relay budget is met with
/// equality; this only raises SINR and harvested energy.
fn fill_af_budget(params: &SystemParams, ch: &ChannelRealization, sol: BeamformingSolution, split: &PowerSplit) -> Result<BeamformingSolution> {
    let used = evaluate_af(ch, &sol, split, params)?.relay_power;
    let BeamformingSolution::Af { w, qx } = sol else { unreachable!("AF design") };
    if !(used > 0.0) || used >= params.p_relay {
        return Ok(BeamformingSolution::Af { w, qx });
    }
    let k2 = params.p_relay / used;
    Ok(BeamformingSolution::Af { w: w.scale(k2.sqrt()), qx: qx.scale(k2) })
}

/// Isotropic relay shapes with optimised block powers, alternated with the
/// power/splitting step of the strategy.
pub fn baseline_allocation_only(ch: &ChannelRealization, params: &SystemParams, strategy: RelayStrategy, rates: [f64; 2], opts: &OptimizeOptions) -> Result<OptimizeResult> {
    params.validate()?;
    let tol = opts.sdp_tolerances;
    let start = match strategy {
        RelayStrategy::Af => af_start(params, opts),
        _ => df_start(ch, params, rates)?,
    };
    alternate(
        ch,
        params,
        opts,
        start,
        |split| shaped_beam(ch, params, strategy, split, &tol),
        |sol, split| match strategy {
            RelayStrategy::Af => {
                let next = af_split_step(ch, params, &sol)?;
                Ok((fill_af_budget(params, ch, sol, &next)?, next))
            }
            _ => {
                let next = df_split_step(ch, params, &sol, split)?;
                Ok((sol, next))
            }
        },
    )
}

/// Dispatches on strategy and scheme. `rates` is ignored by AF.
pub fn optimize(ch: &ChannelRealization, params: &SystemParams, strategy: RelayStrategy, scheme: Scheme, rates: [f64; 2], opts: &OptimizeOptions) -> Result<OptimizeResult> {
    match (scheme, strategy) {
        (Scheme::Joint, RelayStrategy::Af) => optimize_af(ch, params, opts),
        (Scheme::Joint, RelayStrategy::DfXor) => optimize_xor(ch, params, rates, opts),
        (Scheme::Joint, RelayStrategy::DfSup) => optimize_sup(ch, params, rates, opts),
        (Scheme::PrecodingOnly, s) => baseline_precoding_only(ch, params, s, rates, opts),
        (Scheme::AllocationOnly, s) => baseline_allocation_only(ch, params, s, rates, opts),
    }
}

#[cfg(test)]
mod tests;
