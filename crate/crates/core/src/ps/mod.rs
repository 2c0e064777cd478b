//! Source-power and splitting-ratio subproblems.
//!
//! For fixed AF relay matrices the problem in `(P1, P2, rho)` is
//!
//! ```text
//! max  A rho P2 + B rho P1 + C rho - cost (alpha P1 + beta P2)
//! s.t. (E P2 - D)(1 - rho) >= tau1 sc1          (sinr1)
//!      (G P1 - F)(1 - rho) >= tau2 sc2          (sinr2)
//!      J P1 + K P2 <= P_r - L                   (relay power)
//!      0 < P1 <= Pmax1,  0 < P2 <= Pmax2,  0 < rho < 1
//! ```
//!
//! with `cost = T/2`. Substituting `u = 1/(1 - rho)` makes every pair of
//! active constraints an affine curve `P(u)` along which the objective is
//! `a u + b/u + c`, so each of the eight vertex families has a closed-form
//! stationary point plus the ends of its feasible `u` interval.

mod cases;
mod df;
mod grid;

pub use cases::{case_edge_candidates, solve_ps_case};
pub use df::{df_sinr_margins, solve_rho_df};
pub use grid::{ps_grid_oracle, sample_coefficients};

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{bilinear, received_power, trace_re};
use crate::model::{CMat, ChannelRealization, SystemParams};
use crate::relay_eval::PowerSplit;

/// Smallest and largest admissible splitting ratio.
pub const RHO_MIN: f64 = 1e-9;
pub const RHO_MAX: f64 = 1.0 - 1e-9;
/// Smallest source power tried, as a fraction of the cap. Only reachable
/// when a node's SINR target is zero.
pub const POWER_FLOOR: f64 = 1e-9;
/// Absolute tolerance on constraint residuals.
pub const FEAS_TOL: f64 = 1e-9;
/// Relative tolerance for calling a constraint active.
pub const TIGHT_TOL: f64 = 1e-7;

/// Scalar coefficients of the AF power/splitting problem for fixed `W`, `Q_x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsCoefficients {
    pub a2: f64,
    pub b2: f64,
    pub c2: f64,
    pub d2: f64,
    pub e2: f64,
    pub f2: f64,
    pub g2: f64,
    pub j2: f64,
    pub k2: f64,
    pub l2: f64,
    pub tau: [f64; 2],
    pub sigma_c2: [f64; 2],
    pub weights: [f64; 2],
    pub p_relay: f64,
    pub p_max: [f64; 2],
    /// Weight of source transmit power in the objective, `T/2`.
    pub cost: f64,
}

impl PsCoefficients {
    /// `tau_i sigma_{i,c}^2`.
    pub fn s(&self, i: usize) -> f64 {
        self.tau[i] * self.sigma_c2[i]
    }

    /// Relay power left for the forwarded signal, `P_r - L`.
    pub fn budget(&self) -> f64 {
        self.p_relay - self.l2
    }
}

/// Computes the coefficients from the relay design. `G` pairs `g_2` with
/// `h_1` so that the second SINR row matches node 2's SINR.
pub fn compute_ps_coefficients(ch: &ChannelRealization, w: &CMat, qx: &CMat, params: &SystemParams) -> Result<PsCoefficients> {
    ch.validate()?;
    let n = ch.n();
    if w.shape() != (n, n) || qx.shape() != (n, n) {
        return Err(Error::Dimension(format!("relay matrices must be {n}x{n}")));
    }
    let k = params.harvest_factor();
    let [alpha, beta] = params.weights;
    let gwh = |i: usize, j: usize| bilinear(ch.g(i), w, ch.h(j)).norm_sqr();
    let gq = [received_power(&ch.g1, qx), received_power(&ch.g2, qx)];
    let gw = [(ch.g1.transpose() * w).norm_squared(), (ch.g2.transpose() * w).norm_squared()];
    Ok(PsCoefficients {
        a2: k * (alpha * gwh(0, 1) + beta * gwh(1, 1)),
        b2: k * (alpha * gwh(0, 0) + beta * gwh(1, 0)),
        c2: k * (alpha * gq[0] + beta * gq[1]),
        d2: (gq[0] + params.sigma_r2 * gw[0] + params.sigma_d2[0]) * params.tau[0],
        e2: gwh(0, 1),
        f2: (gq[1] + params.sigma_r2 * gw[1] + params.sigma_d2[1]) * params.tau[1],
        g2: gwh(1, 0),
        j2: (w * &ch.h1).norm_squared(),
        k2: (w * &ch.h2).norm_squared(),
        l2: trace_re(qx) + params.sigma_r2 * w.norm_squared(),
        tau: params.tau,
        sigma_c2: params.sigma_c2,
        weights: params.weights,
        p_relay: params.p_relay,
        p_max: params.p_max,
        cost: params.slot_length / 2.0,
    })
}

/// Weighted net harvested energy as a function of `(P1, P2, rho)`.
pub fn ps_objective(split: &PowerSplit, c: &PsCoefficients) -> f64 {
    let PowerSplit { p1, p2, rho } = *split;
    c.a2 * rho * p2 + c.b2 * rho * p1 + c.c2 * rho - c.cost * (c.weights[0] * p1 + c.weights[1] * p2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PsConstraint {
    Sinr1,
    Sinr2,
    RelayPower,
    Cap1,
    Cap2,
    SplitRange,
}

impl PsConstraint {
    pub const ALL: [PsConstraint; 6] = [
        PsConstraint::Sinr1,
        PsConstraint::Sinr2,
        PsConstraint::RelayPower,
        PsConstraint::Cap1,
        PsConstraint::Cap2,
        PsConstraint::SplitRange,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PsConstraint::Sinr1 => "sinr1",
            PsConstraint::Sinr2 => "sinr2",
            PsConstraint::RelayPower => "relay-power",
            PsConstraint::Cap1 => "cap1",
            PsConstraint::Cap2 => "cap2",
            PsConstraint::SplitRange => "split-range",
        }
    }
}

impl fmt::Display for PsConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Residual (`>= 0` when satisfied) and the magnitude used to judge tightness.
pub fn residual(con: PsConstraint, p1: f64, p2: f64, rho: f64, c: &PsCoefficients) -> (f64, f64) {
    match con {
        PsConstraint::Sinr1 => {
            let lhs = (c.e2 * p2 - c.d2) * (1.0 - rho);
            (lhs - c.s(0), lhs.abs().max(c.s(0)))
        }
        PsConstraint::Sinr2 => {
            let lhs = (c.g2 * p1 - c.f2) * (1.0 - rho);
            (lhs - c.s(1), lhs.abs().max(c.s(1)))
        }
        PsConstraint::RelayPower => {
            let lhs = p1 * c.j2 + p2 * c.k2;
            (c.budget() - lhs, lhs.abs().max(c.budget().abs()))
        }
        PsConstraint::Cap1 => (c.p_max[0] - p1, c.p_max[0]),
        PsConstraint::Cap2 => (c.p_max[1] - p2, c.p_max[1]),
        PsConstraint::SplitRange => ((rho - RHO_MIN).min(RHO_MAX - rho), 1.0),
    }
}

/// Constraints violated by more than [`FEAS_TOL`]; non-positive powers count
/// against their cap.
pub fn violations(p1: f64, p2: f64, rho: f64, c: &PsCoefficients) -> Vec<PsConstraint> {
    let mut out = Vec::new();
    if !(p1.is_finite() && p2.is_finite() && rho.is_finite()) {
        return PsConstraint::ALL.to_vec();
    }
    for con in PsConstraint::ALL {
        let (r, _) = residual(con, p1, p2, rho, c);
        let positive = match con {
            PsConstraint::Cap1 => p1 > 0.0,
            PsConstraint::Cap2 => p2 > 0.0,
            _ => true,
        };
        if r < -FEAS_TOL || !positive {
            out.push(con);
        }
    }
    out
}

/// Constraints among the two SINR rows, the relay budget and the caps that hold
/// with equality to [`TIGHT_TOL`] relative accuracy.
pub fn tight_constraints(split: &PowerSplit, c: &PsCoefficients) -> Vec<PsConstraint> {
    PsConstraint::ALL[..5]
        .iter()
        .copied()
        .filter(|&con| {
            let (r, scale) = residual(con, split.p1, split.p2, split.rho, c);
            r.abs() <= TIGHT_TOL * scale
        })
        .collect()
}

/// One candidate optimum from a vertex family.
#[derive(Debug, Clone, PartialEq)]
pub struct PsCandidate {
    pub case_id: u8,
    pub split: PowerSplit,
    pub objective: f64,
    pub feasible: bool,
    pub violated: Vec<PsConstraint>,
}

impl PsCandidate {
    pub(crate) fn new(case_id: u8, p1: f64, p2: f64, rho: f64, c: &PsCoefficients) -> Self {
        // rounding can leave a capped power a hair above its cap
        let snap = |p: f64, cap: f64| if p > cap && p <= cap + FEAS_TOL { cap } else { p };
        let (p1, p2) = (snap(p1, c.p_max[0]), snap(p2, c.p_max[1]));
        let violated = violations(p1, p2, rho, c);
        let split = PowerSplit { p1, p2, rho };
        Self { case_id, split, objective: ps_objective(&split, c), feasible: violated.is_empty(), violated }
    }
}

/// Every closed-form and boundary candidate of the eight cases, in case order,
/// followed by the same families with a power pinned at [`POWER_FLOOR`].
pub fn ps_candidates(c: &PsCoefficients) -> Vec<PsCandidate> {
    let mut out = Vec::new();
    for k in 1..=8u8 {
        if let Some(cand) = solve_ps_case(k, c) {
            out.push(cand);
        }
        out.extend(case_edge_candidates(k, c));
    }
    // a source with a zero target may prefer not to transmit at all
    for (floor, cases) in [([true, false], &[3u8, 6, 8][..]), ([false, true], &[5, 7, 8]), ([true, true], &[8])] {
        if (0..2).any(|i| floor[i] && c.s(1 - i) > 0.0) {
            continue;
        }
        let mut pinned = *c;
        for i in 0..2 {
            if floor[i] {
                pinned.p_max[i] = POWER_FLOOR * c.p_max[i];
            }
        }
        for &k in cases {
            let found = solve_ps_case(k, &pinned).into_iter().chain(case_edge_candidates(k, &pinned));
            out.extend(found.map(|f| PsCandidate::new(k, f.split.p1, f.split.p2, f.split.rho, c)));
        }
    }
    out
}

/// Best feasible candidate; the lowest case wins ties.
pub fn solve_ps_detailed(c: &PsCoefficients) -> Result<PsCandidate> {
    let mut best: Option<PsCandidate> = None;
    for cand in ps_candidates(c).into_iter().filter(|c| c.feasible) {
        if best.as_ref().is_none_or(|b| cand.objective > b.objective) {
            best = Some(cand);
        }
    }
    best.ok_or_else(|| Error::Infeasible("no power/splitting point satisfies the constraints".into()))
}

pub fn solve_ps(c: &PsCoefficients) -> Result<PowerSplit> {
    solve_ps_detailed(c).map(|cand| cand.split)
}

#[cfg(test)]
mod tests;
