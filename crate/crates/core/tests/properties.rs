use num_complex::Complex64;
use proptest::prelude::*;

use twr_swipt::linalg::{trace_identity_sides, unvec, vec as vectorize};
use twr_swipt::model::CMat;
use twr_swipt::ps::{ps_objective, sample_coefficients, solve_ps_detailed, violations};
use twr_swipt::{PowerSplit, SystemParams};

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = CMat> {
    prop::collection::vec((-2.0..2.0f64, -2.0..2.0f64), rows * cols)
        .prop_map(move |v| CMat::from_iterator(rows, cols, v.into_iter().map(|(re, im)| Complex64::new(re, im))))
}

fn chain() -> impl Strategy<Value = (CMat, CMat, CMat, CMat)> {
    (1..5usize, 1..5usize, 1..5usize, 1..5usize)
        .prop_flat_map(|(m, n, p, q)| (matrix(m, n), matrix(n, p), matrix(p, q), matrix(q, m)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn trace_identity_holds((a, b, c, d) in chain()) {
        let (lhs, rhs) = trace_identity_sides(&a, &b, &c, &d).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-10 * (1.0 + lhs.norm()));
    }

    #[test]
    fn vec_round_trips(m in (1..6usize, 1..6usize).prop_flat_map(|(r, c)| matrix(r, c))) {
        let v = vectorize(&m);
        prop_assert_eq!(v.len(), m.len());
        prop_assert_eq!(unvec(&v, m.nrows(), m.ncols()).unwrap(), m);
    }

    #[test]
    fn no_feasible_point_beats_the_closed_form(seed in 0..400u64, points in prop::collection::vec((0.0..1.0f64, 0.0..1.0f64, 0.0..1.0f64), 64)) {
        let c = sample_coefficients(&SystemParams::default(), seed).unwrap();
        let best = solve_ps_detailed(&c);
        for (x, y, rho) in points {
            let (p1, p2) = (x * c.p_max[0], y * c.p_max[1]);
            if p1 > 0.0 && p2 > 0.0 && violations(p1, p2, rho, &c).is_empty() {
                let value = ps_objective(&PowerSplit { p1, p2, rho }, &c);
                let best = best.as_ref().expect("a feasible point exists");
                prop_assert!(value <= best.objective + 1e-9 * (1.0 + best.objective.abs()));
            }
        }
        if let Ok(best) = &best {
            prop_assert!(best.feasible);
            prop_assert!(violations(best.split.p1, best.split.p2, best.split.rho, &c).is_empty());
        }
    }
}
