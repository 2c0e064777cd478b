use super::{PsCandidate, PsCoefficients, PsConstraint, RHO_MAX, RHO_MIN};

/// Source powers along a vertex family as affine functions of `u = 1/(1-rho)`:
/// `P_i(u) = p_i[0] + p_i[1] u`.
#[derive(Debug, Clone, Copy)]
struct Curve {
    p1: [f64; 2],
    p2: [f64; 2],
    active: [PsConstraint; 2],
}

fn active_pair(k: u8) -> Option<[PsConstraint; 2]> {
    use PsConstraint::*;
    Some(match k {
        1 => [Sinr1, Sinr2],
        2 => [Sinr1, RelayPower],
        3 => [Sinr1, Cap1],
        4 => [Sinr2, RelayPower],
        5 => [Sinr2, Cap2],
        6 => [RelayPower, Cap1],
        7 => [RelayPower, Cap2],
        8 => [Cap1, Cap2],
        _ => return None,
    })
}

fn curve(k: u8, c: &PsCoefficients) -> Option<Curve> {
    let active = active_pair(k)?;
    let r = c.budget();
    // P2 with sinr1 tight, P1 with sinr2 tight
    let from_sinr1 = || (c.e2 > 0.0).then(|| [c.d2 / c.e2, c.s(0) / c.e2]);
    let from_sinr2 = || (c.g2 > 0.0).then(|| [c.f2 / c.g2, c.s(1) / c.g2]);
    let p1_from_budget = |p2: [f64; 2]| (c.j2 > 0.0).then(|| [(r - c.k2 * p2[0]) / c.j2, -c.k2 * p2[1] / c.j2]);
    let p2_from_budget = |p1: [f64; 2]| (c.k2 > 0.0).then(|| [(r - c.j2 * p1[0]) / c.k2, -c.j2 * p1[1] / c.k2]);
    let cap1 = [c.p_max[0], 0.0];
    let cap2 = [c.p_max[1], 0.0];
    let (p1, p2) = match k {
        1 => (from_sinr2()?, from_sinr1()?),
        2 => {
            let p2 = from_sinr1()?;
            (p1_from_budget(p2)?, p2)
        }
        3 => (cap1, from_sinr1()?),
        4 => {
            let p1 = from_sinr2()?;
            (p1, p2_from_budget(p1)?)
        }
        5 => (from_sinr2()?, cap2),
        6 => (cap1, p2_from_budget(cap1)?),
        7 => (p1_from_budget(cap2)?, cap2),
        _ => (cap1, cap2),
    };
    Some(Curve { p1, p2, active })
}

fn in_split_range(rho: f64) -> bool {
    (RHO_MIN..=RHO_MAX).contains(&rho)
}

/// Closed-form stationary point of case `k` (1..=8), or `None` when the
/// case's validity condition fails or a denominator is not positive.
///
/// Cases 1 to 5 keep two constraints active along a curve in `rho` and take
/// its interior maximiser. Cases 6 to 8 fix both powers and push `rho` up to
/// the first SINR limit.
pub fn solve_ps_case(k: u8, c: &PsCoefficients) -> Option<PsCandidate> {
    let [alpha, beta] = c.weights;
    let [s1, s2] = [c.s(0), c.s(1)];
    let r = c.budget();
    let (a2, b2, c2, d2, e2, f2, g2, j2, k2) = (c.a2, c.b2, c.c2, c.d2, c.e2, c.f2, c.g2, c.j2, c.k2);
    let sinr1_p2 = |one_minus_rho: f64| (s1 / one_minus_rho + d2) / e2;
    let sinr2_p1 = |one_minus_rho: f64| (s2 / one_minus_rho + f2) / g2;

    let (p1, p2, rho) = match k {
        1 => {
            if e2 <= 0.0 || g2 <= 0.0 {
                return None;
            }
            let a1 = -(a2 * d2 * g2 + b2 * e2 * f2 + c2 * e2 * g2);
            let ca2 = a2 * g2 * s1 + b2 * e2 * s2 - a1;
            let ca3 = c.cost * (alpha * e2 * s2 + beta * g2 * s1);
            if !(0.0 < ca2 - ca3 && ca2 - ca3 < -a1) {
                return None;
            }
            let rho = 1.0 - ((a1 + ca2 - ca3) / a1).sqrt();
            (sinr2_p1(1.0 - rho), sinr1_p2(1.0 - rho), rho)
        }
        2 => {
            if e2 <= 0.0 || j2 <= 0.0 {
                return None;
            }
            let b1 = (a2 * j2 - b2 * k2) * s1;
            let cb2 = c.cost * (alpha * k2 - beta * j2) * s1;
            let b3 = ((r * e2 - d2 * k2) * b2 + (a2 * d2 + c2 * e2) * j2) / (j2 * e2);
            if !(b3 > 0.0 && b1 + cb2 < 0.0 && b1 + cb2 + j2 * e2 * b3 > 0.0) {
                return None;
            }
            let rho = 1.0 - (-(b1 + cb2) / (j2 * e2 * b3)).sqrt();
            let p2 = sinr1_p2(1.0 - rho);
            ((r - p2 * k2) / j2, p2, rho)
        }
        3 => {
            if e2 <= 0.0 {
                return None;
            }
            let c1 = a2 * s1;
            let cc2 = c.cost * beta * s1;
            let c3 = (a2 * d2 + b2 * e2 * c.p_max[0] + c2 * e2) / e2;
            if !(c1 < cc2 && cc2 < c1 + e2 * c3) {
                return None;
            }
            let rho = 1.0 - ((cc2 - c1) / (e2 * c3)).sqrt();
            (c.p_max[0], sinr1_p2(1.0 - rho), rho)
        }
        4 => {
            if g2 <= 0.0 || k2 <= 0.0 {
                return None;
            }
            let d1 = (b2 * k2 - a2 * j2) * s2;
            let cd2 = c.cost * (beta * j2 - alpha * k2) * s2;
            let d3 = ((r * g2 - f2 * j2) * a2 + (b2 * f2 + c2 * g2) * k2) / (g2 * k2);
            if !(d3 > 0.0 && d1 + cd2 < 0.0 && d1 + cd2 + k2 * g2 * d3 > 0.0) {
                return None;
            }
            let rho = 1.0 - (-(d1 + cd2) / (k2 * g2 * d3)).sqrt();
            let p1 = sinr2_p1(1.0 - rho);
            (p1, (r - p1 * j2) / k2, rho)
        }
        5 => {
            if g2 <= 0.0 {
                return None;
            }
            let e1 = b2 * s2;
            let ce2 = c.cost * alpha * s2;
            let e3 = (b2 * f2 + a2 * g2 * c.p_max[1] + c2 * g2) / g2;
            if !(e1 < ce2 && ce2 < e1 + g2 * e3) {
                return None;
            }
            let rho = 1.0 - ((ce2 - e1) / (g2 * e3)).sqrt();
            (sinr2_p1(1.0 - rho), c.p_max[1], rho)
        }
        6..=8 => {
            let cv = curve(k, c)?;
            let (p1, p2) = (cv.p1[0], cv.p2[0]);
            let limit = |margin: f64, s: f64| -> Option<f64> {
                if margin > 0.0 {
                    Some(1.0 - s / margin)
                } else if margin == 0.0 && s == 0.0 {
                    Some(1.0)
                } else {
                    None
                }
            };
            let rho = limit(e2 * p2 - d2, s1)?.min(limit(g2 * p1 - f2, s2)?).min(RHO_MAX);
            (p1, p2, rho)
        }
        _ => return None,
    };
    if !(rho.is_finite() && in_split_range(rho)) {
        return None;
    }
    Some(PsCandidate::new(k, p1, p2, rho, c))
}

/// Candidates at the two ends of case `k`'s feasible range of `rho` (cases
/// 1 to 5 only; in cases 6 to 8 the objective is increasing in `rho` and the
/// upper end is the closed-form point).
pub fn case_edge_candidates(k: u8, c: &PsCoefficients) -> Vec<PsCandidate> {
    if !(1..=5).contains(&k) {
        return Vec::new();
    }
    let Some(cv) = curve(k, c) else { return Vec::new() };
    let mut lo = 1.0 / (1.0 - RHO_MIN);
    let mut hi = 1.0 / (1.0 - RHO_MAX);
    // rows r0 + r1 u >= 0 (SINR rows multiplied through by u > 0)
    let mut rows: Vec<[f64; 2]> = Vec::new();
    for con in PsConstraint::ALL[..5].iter().copied().filter(|con| !cv.active.contains(con)) {
        rows.push(match con {
            PsConstraint::Sinr1 => [c.e2 * cv.p2[0] - c.d2, c.e2 * cv.p2[1] - c.s(0)],
            PsConstraint::Sinr2 => [c.g2 * cv.p1[0] - c.f2, c.g2 * cv.p1[1] - c.s(1)],
            PsConstraint::RelayPower => [
                c.budget() - c.j2 * cv.p1[0] - c.k2 * cv.p2[0],
                -c.j2 * cv.p1[1] - c.k2 * cv.p2[1],
            ],
            PsConstraint::Cap1 => [c.p_max[0] - cv.p1[0], -cv.p1[1]],
            _ => [c.p_max[1] - cv.p2[0], -cv.p2[1]],
        });
    }
    rows.push(cv.p1);
    rows.push(cv.p2);
    for [r0, r1] in rows {
        if r1 > 0.0 {
            lo = lo.max(-r0 / r1);
        } else if r1 < 0.0 {
            hi = hi.min(-r0 / r1);
        } else if r0 < 0.0 {
            return Vec::new();
        }
    }
    if !(lo <= hi) {
        return Vec::new();
    }
    let at = |u: f64| {
        let rho = 1.0 - 1.0 / u;
        PsCandidate::new(k, cv.p1[0] + cv.p1[1] * u, cv.p2[0] + cv.p2[1] * u, rho, c)
    };
    if lo == hi {
        vec![at(lo)]
    } else {
        vec![at(lo), at(hi)]
    }
}

#[cfg(test)]
pub(super) fn curve_powers(k: u8, c: &PsCoefficients, rho: f64) -> Option<(f64, f64)> {
    let cv = curve(k, c)?;
    let u = 1.0 / (1.0 - rho);
    Some((cv.p1[0] + cv.p1[1] * u, cv.p2[0] + cv.p2[1] * u))
}
