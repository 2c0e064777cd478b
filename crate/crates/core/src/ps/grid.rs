use super::{ps_objective, residual, PsCandidate, PsCoefficients, PsConstraint, FEAS_TOL};
use crate::error::{Error, Result};
use crate::relay_eval::PowerSplit;

fn feasible(p1: f64, p2: f64, rho: f64, c: &PsCoefficients) -> bool {
    PsConstraint::ALL.iter().all(|&con| residual(con, p1, p2, rho, c).0 >= -FEAS_TOL)
}

/// Best point of `k` against a running best; equal objectives keep the earlier index.
fn better(a: Option<(f64, usize)>, b: Option<(f64, usize)>) -> Option<(f64, usize)> {
    match (a, b) {
        (Some(x), Some(y)) => Some(if y.0 > x.0 || (y.0 == x.0 && y.1 < x.1) { y } else { x }),
        (x, None) => x,
        (None, y) => y,
    }
}

/// Exhaustive search over the lattice `P_i = Pmax_i k / res` (`k = 1..=res`),
/// `rho = k / res` (`k = 1..res`). Returns the feasible lattice maximiser.
pub fn ps_grid_oracle(c: &PsCoefficients, resolution: usize) -> Result<Option<PsCandidate>> {
    if resolution < 50 {
        return Err(Error::Domain(format!("grid resolution {resolution} below 50")));
    }
    let res = resolution as f64;
    let row = |i: usize| -> Option<(f64, usize)> {
        let p1 = c.p_max[0] * (i + 1) as f64 / res;
        let mut best = None;
        for j in 0..resolution {
            let p2 = c.p_max[1] * (j + 1) as f64 / res;
            for k in 1..resolution {
                let rho = k as f64 / res;
                if feasible(p1, p2, rho, c) {
                    let f = ps_objective(&PowerSplit { p1, p2, rho }, c);
                    best = better(best, Some((f, (i * resolution + j) * resolution + k)));
                }
            }
        }
        best
    };
    #[cfg(feature = "parallel")]
    let best = {
        use rayon::prelude::*;
        (0..resolution).into_par_iter().map(row).reduce(|| None, better)
    };
    #[cfg(not(feature = "parallel"))]
    let best = (0..resolution).map(row).fold(None, better);

    Ok(best.map(|(_, idx)| {
        let k = idx % resolution;
        let j = (idx / resolution) % resolution;
        let i = idx / (resolution * resolution);
        let split = PowerSplit {
            p1: c.p_max[0] * (i + 1) as f64 / res,
            p2: c.p_max[1] * (j + 1) as f64 / res,
            rho: k as f64 / res,
        };
        PsCandidate::new(0, split.p1, split.p2, split.rho, c)
    }))
}

/// Random but physically consistent coefficient set: a sampled channel, a
/// random relay design, random SINR targets and weights, and a relay budget
/// between 20% and 150% of what full source power would need.
pub fn sample_coefficients(params: &crate::model::SystemParams, seed: u64) -> Result<PsCoefficients> {
    use crate::model::{sample_channel, CMat};
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;
    use rand_distr::StandardNormal;

    let ch = sample_channel(params, seed)?;
    let n = ch.n();
    let mut rng = ChaCha20Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let normal = |rng: &mut ChaCha20Rng| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
    let w_scale = 10f64.powf(rng.random_range(-1.5..1.0));
    let w = CMat::from_fn(n, n, |_, _| normal(&mut rng)).scale(w_scale);
    let g = CMat::from_fn(n, n, |_, _| normal(&mut rng));
    let qx = (&g * g.adjoint()).scale(rng.random_range(0.0..0.5));
    let mut p = params.clone();
    p.tau = [rng.random_range(0.05..1.0), rng.random_range(0.05..1.0)];
    let alpha = rng.random_range(0.1..0.9);
    p.weights = [alpha, 1.0 - alpha];
    let mut c = super::compute_ps_coefficients(&ch, &w, &qx, &p)?;
    let full = c.j2 * c.p_max[0] + c.k2 * c.p_max[1];
    c.p_relay = c.l2 + full * rng.random_range(0.2..1.5);
    Ok(c)
}
