use super::cases::curve_powers;
use super::*;
use crate::model::{sample_channel, CVec};
use crate::relay_eval::{evaluate_af, BeamformingSolution};
use approx::assert_relative_eq;
use num_complex::Complex64;

fn scalar_channel(h1: f64, h2: f64, g1: f64, g2: f64) -> ChannelRealization {
    let v = |x: f64| CVec::from_element(1, Complex64::from(x));
    ChannelRealization::new(v(h1), v(h2), v(g1), v(g2), 0).unwrap()
}

fn scalar_params() -> SystemParams {
    SystemParams {
        n_antennas: 1,
        weights: [0.5, 0.5],
        sigma_r2: 1.0,
        sigma_d2: [1.0, 1.0],
        sigma_c2: [1.0, 1.0],
        tau: [1.0, 1.0],
        ..SystemParams::default()
    }
}

/// Symmetric coefficient set for which case 1 is interior.
fn symmetric() -> PsCoefficients {
    PsCoefficients {
        a2: 0.1,
        b2: 0.1,
        c2: 0.1,
        d2: 0.1,
        e2: 2.0,
        f2: 0.1,
        g2: 2.0,
        j2: 1.0,
        k2: 1.0,
        l2: 0.1,
        tau: [0.5, 0.5],
        sigma_c2: [1.0, 1.0],
        weights: [0.5, 0.5],
        p_relay: 100.0,
        p_max: [50.0, 50.0],
        cost: 0.5,
    }
}

fn random_sets(count: u64) -> Vec<PsCoefficients> {
    let params = SystemParams::default();
    (0..count).map(|seed| sample_coefficients(&params, seed).unwrap()).collect()
}

#[test]
fn zero_relay_matrix_gives_zero_gains() {
    let params = SystemParams::default();
    let ch = sample_channel(&params, 3).unwrap();
    let n = ch.n();
    let c = compute_ps_coefficients(&ch, &CMat::zeros(n, n), &CMat::zeros(n, n), &params).unwrap();
    for v in [c.a2, c.b2, c.c2, c.e2, c.g2, c.j2, c.k2, c.l2] {
        assert_eq!(v, 0.0);
    }
    assert_relative_eq!(c.d2, params.tau[0] * params.sigma_d2[0]);
}

#[test]
fn scalar_coefficients() {
    let ch = scalar_channel(1.0, 1.0, 1.0, 1.0);
    let w = CMat::from_element(1, 1, Complex64::from(1.0));
    let qx = CMat::zeros(1, 1);
    let c = compute_ps_coefficients(&ch, &w, &qx, &scalar_params()).unwrap();
    // eta T / 2 = 0.25 and alpha + beta = 1
    assert_relative_eq!(c.a2, 0.25, epsilon = 1e-15);
    assert_relative_eq!(c.b2, 0.25, epsilon = 1e-15);
    assert_relative_eq!(c.e2, 1.0);
    assert_relative_eq!(c.d2, 2.0);
    assert_relative_eq!(c.j2, 1.0);
    assert_relative_eq!(c.l2, 1.0);
}

#[test]
fn coefficients_ignore_channel_phase() {
    let params = SystemParams::default();
    let mut ch = sample_channel(&params, 11).unwrap();
    let n = ch.n();
    let w = CMat::from_fn(n, n, |i, j| Complex64::new(0.3 * i as f64 - 0.1, 0.2 * j as f64 + 0.05));
    let qx = CMat::identity(n, n).scale(0.01);
    let before = compute_ps_coefficients(&ch, &w, &qx, &params).unwrap();
    ch.g1 *= Complex64::from_polar(1.0, 0.7);
    ch.h2 *= Complex64::from_polar(1.0, -2.1);
    let after = compute_ps_coefficients(&ch, &w, &qx, &params).unwrap();
    for (x, y) in [(before.a2, after.a2), (before.b2, after.b2), (before.d2, after.d2), (before.e2, after.e2), (before.g2, after.g2), (before.k2, after.k2)] {
        assert_relative_eq!(x, y, max_relative = 1e-12);
    }
}

#[test]
fn objective_special_points() {
    let c = symmetric();
    let at_zero = ps_objective(&PowerSplit { p1: 2.0, p2: 3.0, rho: 0.0 }, &c);
    assert_relative_eq!(at_zero, -c.cost * (0.5 * 2.0 + 0.5 * 3.0));
    let zero = PsCoefficients { a2: 0.0, b2: 0.0, c2: 0.0, ..c };
    let f = ps_objective(&PowerSplit { p1: 2.0, p2: 3.0, rho: 0.7 }, &zero);
    assert_relative_eq!(f, at_zero);
}

#[test]
fn objective_matches_evaluator() {
    let params = SystemParams::default();
    for seed in 0..5 {
        let ch = sample_channel(&params, seed).unwrap();
        let n = ch.n();
        let w = CMat::from_fn(n, n, |i, j| Complex64::new((i + 2 * j) as f64 * 0.1, 0.05 * seed as f64));
        let qx = CMat::identity(n, n).scale(0.02);
        let c = compute_ps_coefficients(&ch, &w, &qx, &params).unwrap();
        let split = PowerSplit { p1: 1.3, p2: 0.4, rho: 0.6 };
        let m = evaluate_af(&ch, &BeamformingSolution::Af { w: w.clone(), qx: qx.clone() }, &split, &params).unwrap();
        assert_relative_eq!(ps_objective(&split, &c), m.objective, max_relative = 1e-12);
        // the SINR rows are the evaluator's SINR targets
        let (r1, _) = residual(PsConstraint::Sinr1, split.p1, split.p2, split.rho, &c);
        let (r2, _) = residual(PsConstraint::Sinr2, split.p1, split.p2, split.rho, &c);
        assert_eq!(r1 >= 0.0, m.sinr[0] >= params.tau[0] - 1e-12);
        assert_eq!(r2 >= 0.0, m.sinr[1] >= params.tau[1] - 1e-12);
        let (rp, _) = residual(PsConstraint::RelayPower, split.p1, split.p2, split.rho, &c);
        assert_relative_eq!(rp, params.p_relay - m.relay_power, max_relative = 1e-10);
    }
}

#[test]
fn symmetric_case_one_is_balanced() {
    let c = symmetric();
    let cand = solve_ps_case(1, &c).expect("case 1 interior");
    assert_relative_eq!(cand.split.p1, cand.split.p2, max_relative = 1e-12);
    assert!(cand.feasible, "{:?}", cand.violated);
    let tight = tight_constraints(&cand.split, &c);
    assert!(tight.contains(&PsConstraint::Sinr1) && tight.contains(&PsConstraint::Sinr2));
}

#[test]
fn case_one_rejected_outside_its_region() {
    // a heavy transmit cost pushes the stationary point out of (0, 1)
    let c = PsCoefficients { cost: 1e6, ..symmetric() };
    assert!(solve_ps_case(1, &c).is_none());
}

#[test]
fn case_eight_is_exactly_at_the_caps() {
    let c = symmetric();
    let cand = solve_ps_case(8, &c).unwrap();
    assert_eq!((cand.split.p1, cand.split.p2), (c.p_max[0], c.p_max[1]));
    let (r1, _) = residual(PsConstraint::Sinr1, cand.split.p1, cand.split.p2, cand.split.rho, &c);
    let (r2, _) = residual(PsConstraint::Sinr2, cand.split.p1, cand.split.p2, cand.split.rho, &c);
    assert!(r1.abs().min(r2.abs()) <= 1e-12, "{r1} {r2}");
}

#[test]
fn huge_relay_budget_leaves_only_full_power() {
    // cheap power and a slack relay: the optimum sits at both caps
    let c = PsCoefficients { p_relay: 1e9, cost: 1e-3, p_max: [2.0, 2.0], ..symmetric() };
    let best = solve_ps(&c).unwrap();
    assert_eq!((best.p1, best.p2), (c.p_max[0], c.p_max[1]));
    let at_caps = solve_ps_case(8, &c).unwrap();
    assert_eq!(best.rho, at_caps.split.rho);
}

#[test]
fn infeasible_targets_are_reported() {
    let c = PsCoefficients { tau: [1e9, 1e9], ..symmetric() };
    match solve_ps(&c) {
        Err(Error::Infeasible(_)) => {}
        other => panic!("expected infeasible, got {other:?}"),
    }
    assert!(ps_grid_oracle(&c, 50).unwrap().is_none());
}

#[test]
fn grid_rejects_coarse_resolution() {
    assert!(matches!(ps_grid_oracle(&symmetric(), 10), Err(Error::Domain(_))));
}

#[test]
fn closed_forms_dominate_the_grid() {
    for (i, c) in random_sets(12).iter().enumerate() {
        let grid = ps_grid_oracle(c, 60).unwrap();
        match (solve_ps_detailed(c), grid) {
            (Ok(best), Some(g)) => {
                assert!(best.objective >= g.objective - 1e-9 * (1.0 + g.objective.abs()), "set {i}: {} < {}", best.objective, g.objective);
            }
            (Ok(_), None) | (Err(_), None) => {}
            (Err(e), Some(g)) => panic!("set {i}: solver failed ({e}) but grid found {:?}", g.split),
        }
    }
}

#[test]
fn grid_refinement_never_loses() {
    let c = random_sets(4).into_iter().find(|c| solve_ps(c).is_ok()).unwrap();
    let coarse = ps_grid_oracle(&c, 50).unwrap().unwrap();
    let fine = ps_grid_oracle(&c, 100).unwrap().unwrap();
    assert!(fine.objective >= coarse.objective);
}

fn along_curve(k: u8, c: &PsCoefficients, rho: f64) -> f64 {
    let (p1, p2) = curve_powers(k, c, rho).unwrap();
    ps_objective(&PowerSplit { p1, p2, rho }, c)
}

#[test]
fn closed_forms_are_stationary_on_their_curves() {
    let mut seen = [false; 5];
    let mut sets = random_sets(60);
    sets.push(symmetric());
    for c in &sets {
        for k in 1..=5u8 {
            let Some(cand) = solve_ps_case(k, c) else { continue };
            let rho = cand.split.rho;
            let h = 1e-5 * rho.min(1.0 - rho);
            let f0 = along_curve(k, c, rho);
            let (fm, fp) = (along_curve(k, c, rho - h), along_curve(k, c, rho + h));
            let slope = (fp - fm) / (2.0 * h);
            let scale = (fp - 2.0 * f0 + fm).abs() / h + 1e-12 * f0.abs().max(1.0) / h;
            assert!(slope.abs() <= 10.0 * scale.max(1e-9), "case {k}: slope {slope:e}, scale {scale:e}");
            assert!(f0 >= fm.max(fp) - 1e-12 * f0.abs().max(1.0), "case {k} is not a local maximum");
            assert_relative_eq!(cand.split.p1, curve_powers(k, c, rho).unwrap().0, max_relative = 1e-9);
            seen[k as usize - 1] = true;
        }
    }
    assert!(seen[0], "no instance exercised case 1");
}

#[test]
fn optimum_has_two_tight_constraints() {
    let mut checked = 0;
    for c in random_sets(60) {
        let Ok(best) = solve_ps_detailed(&c) else { continue };
        let tight = tight_constraints(&best.split, &c);
        assert!(tight.len() >= 2 || best.split.rho >= RHO_MAX, "case {}: tight {:?}", best.case_id, tight);
        checked += 1;
    }
    assert!(checked >= 10, "only {checked} feasible sets");
}

#[test]
fn df_ratio_examples() {
    let params = SystemParams { tau: [1.0, 1.0], sigma_c2: [1.0, 1.0], ..SystemParams::default() };
    assert_relative_eq!(solve_rho_df(2.0, 2.0, &params).unwrap(), 0.5);
    assert_relative_eq!(solve_rho_df(4.0, 2.0, &params).unwrap(), 0.5);
    assert!(matches!(solve_rho_df(0.5, 2.0, &params), Err(Error::Infeasible(_))));
    let free = SystemParams { tau: [0.0, 0.0], ..params };
    assert_eq!(solve_rho_df(0.0, 0.0, &free).unwrap(), RHO_MAX);
}

#[test]
fn df_ratio_meets_the_binding_target() {
    let params = SystemParams::default();
    let ch = sample_channel(&params, 5).unwrap();
    let n = ch.n();
    let qs = CMat::identity(n, n).scale(params.p_relay / n as f64);
    let sol = BeamformingSolution::Xor { qs, qx: CMat::zeros(n, n) };
    let (m1, m2) = df_sinr_margins(&ch, &sol, &params).unwrap();
    let rho = solve_rho_df(m1, m2, &params).unwrap();
    let slack = |m: f64, i: usize| m * (1.0 - rho) - params.tau[i] * params.sigma_c2[i];
    let (s1, s2) = (slack(m1, 0), slack(m2, 1));
    assert!(s1 >= -1e-10 * m1 && s2 >= -1e-10 * m2);
    assert!(s1.min(s2).abs() <= 1e-10 * m1.max(m2));
    let af = BeamformingSolution::zeros(crate::relay_eval::RelayStrategy::Af, n);
    assert!(df_sinr_margins(&ch, &af, &params).is_err());
}

#[test]
fn zero_targets_allow_silent_sources() {
    let c = PsCoefficients { tau: [0.0, 0.0], d2: 0.0, f2: 0.0, cost: 10.0, ..symmetric() };
    let best = solve_ps(&c).unwrap();
    assert!(best.p1 <= POWER_FLOOR * c.p_max[0] * 1.000001 && best.p2 <= POWER_FLOOR * c.p_max[1] * 1.000001);
    let grid = ps_grid_oracle(&c, 50).unwrap().unwrap();
    assert!(ps_objective(&best, &c) >= grid.objective);
}
