//! Self-checks behind the `validate` subcommand.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::linalg::{trace_identity_sides, unvec, vec as vectorize};
use crate::model::{sample_channel, CMat, CVec, SystemParams};
use crate::ps::{ps_grid_oracle, sample_coefficients, solve_ps_detailed, tight_constraints};
use crate::relay_eval::PowerSplit;
use crate::sdp::{build_af_sdp, extract_rank_one, solve_sdp, BlockSpec, Field, SdpProblem, SdpStatus, SdpTolerances, Sense};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Sizes of the randomized suites.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidateSizes {
    pub identity_cases: usize,
    pub ps_sets: usize,
    pub ps_resolution: usize,
    pub rank_instances: usize,
}

impl ValidateSizes {
    pub fn quick() -> Self {
        Self { identity_cases: 200, ps_sets: 10, ps_resolution: 60, rank_instances: 5 }
    }

    pub fn full() -> Self {
        Self { identity_cases: 1000, ps_sets: 200, ps_resolution: 200, rank_instances: 100 }
    }
}

fn random_matrix(rng: &mut ChaCha8Rng, r: usize, c: usize) -> CMat {
    CMat::from_fn(r, c, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

fn outcome(name: &'static str, passed: bool, detail: String) -> CheckOutcome {
    CheckOutcome { name, passed, detail }
}

/// `Tr(ABCD)` against its vectorised form on random conformable quadruples.
pub fn check_trace_identity(cases: usize, seed: u64) -> Result<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..cases {
        let dims: Vec<usize> = (0..4).map(|_| rng.random_range(1..6)).collect();
        let a = random_matrix(&mut rng, dims[0], dims[1]);
        let b = random_matrix(&mut rng, dims[1], dims[2]);
        let c = random_matrix(&mut rng, dims[2], dims[3]);
        let d = random_matrix(&mut rng, dims[3], dims[0]);
        let (lhs, rhs) = trace_identity_sides(&a, &b, &c, &d)?;
        worst = worst.max((lhs - rhs).norm() / (1.0 + lhs.norm()));
    }
    Ok(outcome("trace-identity", worst <= 1e-10, format!("{cases} cases, worst relative error {worst:.2e}")))
}

pub fn check_vec_round_trip(cases: usize, seed: u64) -> Result<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut exact = true;
    for _ in 0..cases {
        let (r, c) = (rng.random_range(1..7), rng.random_range(1..7));
        let m = random_matrix(&mut rng, r, c);
        exact &= unvec(&vectorize(&m), r, c)? == m;
    }
    Ok(outcome("vec-round-trip", exact, format!("{cases} matrices")))
}

/// Closed-form power/splitting solutions against the exhaustive grid.
pub fn check_ps_oracle(sets: usize, resolution: usize, seed: u64) -> Result<CheckOutcome> {
    let params = SystemParams::default();
    let (mut feasible, mut dominated, mut tight) = (0, 0, 0);
    for k in 0..sets as u64 {
        let c = sample_coefficients(&params, seed.wrapping_add(k))?;
        let Some(grid) = ps_grid_oracle(&c, resolution)? else { continue };
        feasible += 1;
        if let Ok(best) = solve_ps_detailed(&c) {
            dominated += usize::from(best.objective >= grid.objective - 1e-3 * (1.0 + best.objective.abs()));
            tight += usize::from(tight_constraints(&best.split, &c).len() >= 2);
        }
    }
    let passed = dominated == feasible && tight == feasible;
    Ok(outcome(
        "ps-grid-oracle",
        passed,
        format!("{feasible} feasible sets: {dominated} match the grid, {tight} with two tight constraints"),
    ))
}

/// Share of lifted AF solutions that are numerically rank one.
pub fn check_rank_census(instances: usize, seed: u64) -> Result<CheckOutcome> {
    let params = SystemParams::default();
    let tol = SdpTolerances { gap_tol: 1e-10, feas_tol: 1e-10, ..Default::default() };
    let split = PowerSplit { p1: params.p_max[0], p2: params.p_max[1], rho: 0.5 };
    let (mut solved, mut rank_one) = (0, 0);
    let mut worst_gap: f64 = 0.0;
    for k in 0..instances as u64 {
        let ch = sample_channel(&params, seed.wrapping_add(k))?;
        let sol = solve_sdp(&build_af_sdp(&ch, &params, &split)?, &tol)?;
        if sol.status != SdpStatus::Optimal {
            continue;
        }
        solved += 1;
        worst_gap = worst_gap.max(sol.duality_gap);
        if extract_rank_one(&sol.blocks[0]).is_ok_and(|r| r.rank_ratio <= 1e-4) {
            rank_one += 1;
        }
    }
    let passed = solved > 0 && rank_one as f64 >= 0.95 * solved as f64 && worst_gap <= 1e-7;
    Ok(outcome(
        "rank-census",
        passed,
        format!("{rank_one}/{solved} rank one, worst gap {worst_gap:.2e}"),
    ))
}

/// Two analytic SDPs: the trace ball and a diagonal LP.
pub fn check_sdp_analytic() -> Result<CheckOutcome> {
    let tol = SdpTolerances { gap_tol: 1e-10, feas_tol: 1e-10, ..Default::default() };
    let block = |field| BlockSpec { name: "X".into(), dim: 2, field };
    let mut ball = SdpProblem::new(vec![block(Field::Complex)]);
    ball.objective[0] = Some(CMat::identity(2, 2));
    ball.add_constraint("trace", vec![(0, CMat::identity(2, 2))], Sense::Le, 1.0);
    let ball = solve_sdp(&ball, &tol)?.objective_value;

    let diag = |a: f64, b: f64| CMat::from_diagonal(&CVec::from_vec(vec![a.into(), b.into()]));
    let mut lp = SdpProblem::new(vec![block(Field::Real)]);
    lp.objective[0] = Some(diag(1.0, 2.0));
    lp.add_constraint("budget", vec![(0, diag(1.0, 1.0))], Sense::Le, 1.0);
    let lp = solve_sdp(&lp, &tol)?.objective_value;

    let passed = (ball - 1.0).abs() <= 1e-8 && (lp - 2.0).abs() <= 1e-8;
    Ok(outcome("sdp-analytic", passed, format!("trace ball {ball:.10}, diagonal LP {lp:.10}")))
}

pub fn run_all(sizes: ValidateSizes, seed: u64) -> Result<Vec<CheckOutcome>> {
    Ok(vec![
        check_trace_identity(sizes.identity_cases, seed)?,
        check_vec_round_trip(sizes.identity_cases, seed)?,
        check_sdp_analytic()?,
        check_ps_oracle(sizes.ps_sets, sizes.ps_resolution, seed)?,
        check_rank_census(sizes.rank_instances, seed)?,
    ])
}

pub fn render(outcomes: &[CheckOutcome]) -> String {
    let mut out = String::new();
    for o in outcomes {
        out.push_str(&format!("{:<4} {:<16} {}\n", if o.passed { "PASS" } else { "FAIL" }, o.name, o.detail));
    }
    out
}
