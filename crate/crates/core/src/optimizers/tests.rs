use super::*;
use crate::model::{r_max, sample_channel, CVec};
use crate::ps::{ps_grid_oracle, tight_constraints};
use approx::assert_relative_eq;
use num_complex::Complex64;

fn params_n(n: usize) -> SystemParams {
    SystemParams { n_antennas: n, ..SystemParams::default() }
}

fn rates(params: &SystemParams) -> [f64; 2] {
    let r = 0.1 * r_max(params.p_max[0], params.sigma_r2);
    [r, r]
}

fn nondecreasing(trace: &[f64]) -> bool {
    trace.windows(2).all(|w| w[1] >= w[0] - 1e-8 * (1.0 + w[0].abs()))
}

#[test]
fn single_pass_records_two_half_steps() {
    let params = params_n(2);
    let ch = sample_channel(&params, 1).unwrap();
    let opts = OptimizeOptions { max_iters: 1, ..Default::default() };
    let res = optimize_af(&ch, &params, &opts).unwrap();
    assert_eq!(res.trace.len(), 2);
    assert_eq!(res.iterations, 1);
    assert_eq!(res.status, OptimizeStatus::MaxIters);
    let res = optimize_xor(&ch, &params, rates(&params), &opts).unwrap();
    assert_eq!(res.trace.len(), 2);
}

#[test]
fn options_are_validated() {
    let params = params_n(2);
    let ch = sample_channel(&params, 1).unwrap();
    let bad = OptimizeOptions { max_iters: 0, ..Default::default() };
    assert!(matches!(optimize_af(&ch, &params, &bad), Err(Error::InvalidParams(_))));
    let bad = OptimizeOptions { rel_tol: 0.0, ..Default::default() };
    assert!(matches!(optimize_xor(&ch, &params, rates(&params), &bad), Err(Error::InvalidParams(_))));
}

#[test]
fn traces_are_monotone() {
    let params = params_n(2);
    let opts = OptimizeOptions::default();
    for seed in 0..10 {
        let ch = sample_channel(&params, seed).unwrap();
        for res in [
            optimize_af(&ch, &params, &opts).unwrap(),
            optimize_xor(&ch, &params, rates(&params), &opts).unwrap(),
            optimize_sup(&ch, &params, rates(&params), &opts).unwrap(),
        ] {
            assert!(nondecreasing(&res.trace), "seed {seed}: {:?}", res.trace);
            assert_eq!(res.status, OptimizeStatus::Converged, "seed {seed}");
            let last_full = res.trace.iter().skip(1).step_by(2).cloned().fold(f64::MIN, f64::max);
            assert_relative_eq!(res.metrics.objective, last_full, max_relative = 1e-12);
        }
    }
}

#[test]
fn af_result_is_feasible_and_ps_optimal() {
    let params = params_n(3);
    let ch = sample_channel(&params, 4).unwrap();
    let res = optimize_af(&ch, &params, &OptimizeOptions::default()).unwrap();
    let m = &res.metrics;
    assert!(m.sinr[0] >= params.tau[0] * (1.0 - 1e-7) && m.sinr[1] >= params.tau[1] * (1.0 - 1e-7));
    assert!(m.relay_power <= params.p_relay * (1.0 + 1e-7));
    assert!(res.rank_ratio <= RANK_TOL);
    let BeamformingSolution::Af { w, qx } = &res.solution else { panic!("AF design expected") };
    let c = compute_ps_coefficients(&ch, w, qx, &params).unwrap();
    assert!(tight_constraints(&res.split, &c).len() >= 2);
    let grid = ps_grid_oracle(&c, 80).unwrap().unwrap();
    assert!(res.metrics.objective >= grid.objective - 1e-9);
}

#[test]
fn zero_targets_match_the_grid() {
    let params = SystemParams { tau: [0.0, 0.0], ..params_n(2) };
    let ch = sample_channel(&params, 9).unwrap();
    let res = optimize_af(&ch, &params, &OptimizeOptions::default()).unwrap();
    assert!(res.split.rho > 0.0 && res.split.rho < 1.0);
    for (p, cap) in [(res.split.p1, params.p_max[0]), (res.split.p2, params.p_max[1])] {
        assert!(p == cap || p <= 1e-8 * cap, "power {p} is neither at the cap nor at the floor");
    }
    let BeamformingSolution::Af { w, qx } = &res.solution else { panic!("AF design expected") };
    let c = compute_ps_coefficients(&ch, w, qx, &params).unwrap();
    let grid = ps_grid_oracle(&c, 100).unwrap().unwrap();
    assert!(res.metrics.objective >= grid.objective - 1e-9, "{} < {} {:?} {:?} {:?}", res.metrics.objective, grid.objective, res.split, grid.split, res.trace);
}

#[test]
fn df_ratio_leaves_one_target_tight() {
    let params = params_n(3);
    let opts = OptimizeOptions::default();
    for seed in 0..5 {
        let ch = sample_channel(&params, seed).unwrap();
        for res in [
            optimize_xor(&ch, &params, rates(&params), &opts).unwrap(),
            optimize_sup(&ch, &params, rates(&params), &opts).unwrap(),
        ] {
            let m = &res.metrics;
            let slack = (m.sinr[0] - params.tau[0]).min(m.sinr[1] - params.tau[1]);
            assert!(slack.abs() <= 1e-8, "seed {seed}: slack {slack:e}");
        }
    }
}

#[test]
fn larger_relay_budget_never_hurts() {
    let params = params_n(2);
    let doubled = SystemParams { p_relay: 2.0 * params.p_relay, ..params.clone() };
    let opts = OptimizeOptions::default();
    for seed in 0..5 {
        let ch = sample_channel(&params, seed).unwrap();
        for (a, b) in [
            (optimize_xor(&ch, &params, rates(&params), &opts), optimize_xor(&ch, &doubled, rates(&params), &opts)),
            (optimize_sup(&ch, &params, rates(&params), &opts), optimize_sup(&ch, &doubled, rates(&params), &opts)),
        ] {
            let (a, b) = (a.unwrap().metrics.objective, b.unwrap().metrics.objective);
            assert!(b >= a - 1e-8 * (1.0 + a.abs()), "seed {seed}: {b} < {a}");
        }
    }
}

#[test]
fn unreachable_rates_are_infeasible() {
    let params = params_n(2);
    let ch = sample_channel(&params, 2).unwrap();
    let err = optimize_xor(&ch, &params, [20.0, 20.0], &OptimizeOptions::default()).unwrap_err();
    assert!(matches!(err, Error::InfeasibleRate { .. }), "{err}");
    let demanding = SystemParams { tau: [1e6, 1e6], ..params.clone() };
    assert!(matches!(optimize_af(&ch, &demanding, &OptimizeOptions::default()), Err(Error::Infeasible(_))));
}

#[test]
fn precoding_only_keeps_its_fixed_split() {
    let params = params_n(2);
    let opts = OptimizeOptions::default();
    let ch = sample_channel(&params, 6).unwrap();
    for strategy in RelayStrategy::ALL {
        let base = baseline_precoding_only(&ch, &params, strategy, rates(&params), &opts).unwrap();
        let joint = optimize(&ch, &params, strategy, Scheme::Joint, rates(&params), &opts).unwrap();
        assert_eq!(base.split.rho, 0.5);
        assert_eq!(base.trace.len(), 1);
        if strategy == RelayStrategy::Af {
            assert_eq!((base.split.p1, base.split.p2), (params.p_max[0], params.p_max[1]));
        }
        assert!(base.metrics.objective <= joint.metrics.objective + 1e-9, "{strategy}");
    }
}

#[test]
fn allocation_only_is_dominated_and_fills_the_budget() {
    let params = params_n(3);
    let opts = OptimizeOptions::default();
    for seed in 0..3 {
        let ch = sample_channel(&params, seed).unwrap();
        for strategy in RelayStrategy::ALL {
            let alloc = baseline_allocation_only(&ch, &params, strategy, rates(&params), &opts).unwrap();
            let joint = optimize(&ch, &params, strategy, Scheme::Joint, rates(&params), &opts).unwrap();
            assert!(alloc.metrics.objective <= joint.metrics.objective + 1e-9, "{strategy} seed {seed}: {} > {} {:?} {:?} {:?} {:?}", alloc.metrics.objective, joint.metrics.objective, alloc.split, joint.split, alloc.trace, joint.trace);
            assert!(nondecreasing(&alloc.trace));
            if strategy == RelayStrategy::Af {
                assert_relative_eq!(alloc.metrics.relay_power, params.p_relay, max_relative = 1e-9);
                let BeamformingSolution::Af { w, .. } = &alloc.solution else { panic!() };
                assert!((w - CMat::identity(3, 3).scale(w[(0, 0)].re)).norm() <= 1e-15);
            }
        }
    }
}

#[test]
fn single_antenna_allocation_matches_joint() {
    let params = params_n(1);
    let opts = OptimizeOptions { rel_tol: 1e-10, ..Default::default() };
    let v = |re: f64, im: f64| CVec::from_element(1, Complex64::new(re, im));
    let ch = ChannelRealization::new(v(0.9, 0.3), v(-0.4, 0.8), v(0.2, -1.1), v(1.0, 0.1), 0).unwrap();
    for strategy in RelayStrategy::ALL {
        let alloc = optimize(&ch, &params, strategy, Scheme::AllocationOnly, rates(&params), &opts).unwrap();
        let joint = optimize(&ch, &params, strategy, Scheme::Joint, rates(&params), &opts).unwrap();
        assert_relative_eq!(alloc.metrics.objective, joint.metrics.objective, max_relative = 1e-6);
        assert_relative_eq!(alloc.split.rho, joint.split.rho, max_relative = 1e-5);
    }
}

#[test]
fn weights_scale_the_objective_only() {
    let params = params_n(2);
    let scaled = SystemParams { weights: [2.0 * params.weights[0], 2.0 * params.weights[1]], ..params.clone() };
    let opts = OptimizeOptions::default();
    let ch = sample_channel(&params, 8).unwrap();
    for strategy in RelayStrategy::ALL {
        let a = optimize(&ch, &params, strategy, Scheme::Joint, rates(&params), &opts).unwrap();
        let b = optimize(&ch, &scaled, strategy, Scheme::Joint, rates(&params), &opts).unwrap();
        assert_relative_eq!(b.metrics.objective, 2.0 * a.metrics.objective, max_relative = 1e-6);
        assert_relative_eq!(a.split.rho, b.split.rho, epsilon = 1e-6);
        assert_relative_eq!(a.split.p1, b.split.p1, epsilon = 1e-6);
    }
}

#[test]
fn scheme_names_round_trip() {
    for s in Scheme::ALL {
        assert_eq!(s.as_str().parse::<Scheme>().unwrap(), s);
    }
    assert!("greedy".parse::<Scheme>().is_err());
}

#[test]
fn df_beats_a_dense_split_scan() {
    let params = params_n(2);
    let tol = OptimizeOptions::default().sdp_tolerances;
    for seed in 0..3 {
        let ch = sample_channel(&params, 40 + seed).unwrap();
        let start = df_start(&ch, &params, rates(&params)).unwrap();
        for strategy in [RelayStrategy::DfXor, RelayStrategy::DfSup] {
            let res = optimize(&ch, &params, strategy, Scheme::Joint, rates(&params), &OptimizeOptions::default()).unwrap();
            let mut best = f64::NEG_INFINITY;
            for k in 1..=200 {
                let split = PowerSplit { rho: 1.0 - (-0.04 * k as f64).exp(), ..start };
                if let Ok(b) = df_beam(&ch, &params, strategy, split.rho, &tol) {
                    best = best.max(evaluate(&ch, &b.solution, &split, &params).unwrap().objective);
                }
            }
            assert!(res.metrics.objective >= best - 1e-6 * (1.0 + best.abs()), "{strategy} seed {seed}: {} < {best}", res.metrics.objective);
        }
    }
}

#[test]
fn xor_never_loses_to_superposition() {
    let params = params_n(3);
    let opts = OptimizeOptions::default();
    for seed in 0..10 {
        let ch = sample_channel(&params, 60 + seed).unwrap();
        let xor = optimize_xor(&ch, &params, rates(&params), &opts).unwrap().metrics.objective;
        let sup = optimize_sup(&ch, &params, rates(&params), &opts).unwrap().metrics.objective;
        assert!(xor >= sup - 1e-6 * (1.0 + sup.abs()), "seed {seed}: {xor} < {sup}");
    }
}
