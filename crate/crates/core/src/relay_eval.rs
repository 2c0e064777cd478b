//! SINR, harvested energy, relay power and weighted objective for the three
//! relaying strategies, plus the multiple-access power computation used by the
//! decode-and-forward strategies.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{bilinear, received_power, trace_re};
use crate::model::{CMat, ChannelRealization, SystemParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RelayStrategy {
    Af,
    DfXor,
    DfSup,
}

impl RelayStrategy {
    pub const ALL: [RelayStrategy; 3] = [RelayStrategy::Af, RelayStrategy::DfXor, RelayStrategy::DfSup];

    pub fn as_str(self) -> &'static str {
        match self {
            RelayStrategy::Af => "af",
            RelayStrategy::DfXor => "xor",
            RelayStrategy::DfSup => "sup",
        }
    }
}

impl fmt::Display for RelayStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RelayStrategy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "af" => Ok(RelayStrategy::Af),
            "xor" | "df-xor" | "df_xor" => Ok(RelayStrategy::DfXor),
            "sup" | "df-sup" | "df_sup" => Ok(RelayStrategy::DfSup),
            other => Err(format!("unknown strategy `{other}` (expected af, xor or sup)")),
        }
    }
}

/// Relay transmit design for one strategy.
#[derive(Debug, Clone, PartialEq)]
pub enum BeamformingSolution {
    /// Amplify-and-forward precoder `W` plus dedicated energy covariance `Q_x`.
    Af { w: CMat, qx: CMat },
    /// Network-coded stream covariance `Q_s` plus energy covariance.
    Xor { qs: CMat, qx: CMat },
    /// Per-source stream covariances plus energy covariance.
    Sup { qs1: CMat, qs2: CMat, qx: CMat },
}

impl BeamformingSolution {
    pub fn strategy(&self) -> RelayStrategy {
        match self {
            BeamformingSolution::Af { .. } => RelayStrategy::Af,
            BeamformingSolution::Xor { .. } => RelayStrategy::DfXor,
            BeamformingSolution::Sup { .. } => RelayStrategy::DfSup,
        }
    }

    pub fn zeros(strategy: RelayStrategy, n: usize) -> Self {
        let z = || CMat::zeros(n, n);
        match strategy {
            RelayStrategy::Af => BeamformingSolution::Af { w: z(), qx: z() },
            RelayStrategy::DfXor => BeamformingSolution::Xor { qs: z(), qx: z() },
            RelayStrategy::DfSup => BeamformingSolution::Sup { qs1: z(), qs2: z(), qx: z() },
        }
    }

    fn matrices(&self) -> Vec<&CMat> {
        match self {
            BeamformingSolution::Af { w, qx } => vec![w, qx],
            BeamformingSolution::Xor { qs, qx } => vec![qs, qx],
            BeamformingSolution::Sup { qs1, qs2, qx } => vec![qs1, qs2, qx],
        }
    }

    /// Checks every covariance block is Hermitian and PSD within tolerance.
    pub fn check_covariances(&self) -> Result<()> {
        let covs: Vec<&CMat> = match self {
            BeamformingSolution::Af { qx, .. } => vec![qx],
            _ => self.matrices(),
        };
        for q in covs {
            if crate::linalg::hermitian_defect(q) > 1e-10 * (1.0 + q.norm()) {
                return Err(Error::Domain("covariance is not Hermitian".into()));
            }
            let (vals, _) = crate::linalg::hermitian_eigen(q);
            let min = vals.last().copied().unwrap_or(0.0);
            if min < -1e-9 * trace_re(q).abs().max(1e-300) {
                return Err(Error::Domain(format!("covariance has eigenvalue {min:e}")));
            }
        }
        Ok(())
    }
}

/// Source powers and power-splitting ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerSplit {
    pub p1: f64,
    pub p2: f64,
    pub rho: f64,
}

impl PowerSplit {
    pub fn new(p1: f64, p2: f64, rho: f64) -> Result<Self> {
        let s = Self { p1, p2, rho };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return Err(Error::Domain(format!("splitting ratio {} outside (0, 1)", self.rho)));
        }
        if !(self.p1 > 0.0 && self.p2 > 0.0) || !self.p1.is_finite() || !self.p2.is_finite() {
            return Err(Error::Domain("source powers must be positive".into()));
        }
        Ok(())
    }

    pub fn power(&self, i: usize) -> f64 {
        if i == 0 {
            self.p1
        } else {
            self.p2
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    pub sinr: [f64; 2],
    pub energy: [f64; 2],
    pub relay_power: f64,
    /// Per-node harvested energy minus the node's own transmit energy.
    pub net: [f64; 2],
    /// `alpha * net[0] + beta * net[1]`.
    pub objective: f64,
}

impl Metrics {
    fn assemble(sinr: [f64; 2], energy: [f64; 2], relay_power: f64, split: &PowerSplit, params: &SystemParams) -> Self {
        let half_t = params.slot_length / 2.0;
        let net = [energy[0] - split.p1 * half_t, energy[1] - split.p2 * half_t];
        Metrics {
            sinr,
            energy,
            relay_power,
            net,
            objective: params.weights[0] * net[0] + params.weights[1] * net[1],
        }
    }
}

fn check_dims(ch: &ChannelRealization, mats: &[&CMat], w_square: bool) -> Result<()> {
    ch.validate()?;
    let n = ch.n();
    for m in mats {
        if m.nrows() != n || (w_square && m.ncols() != n) {
            return Err(Error::Dimension(format!(
                "expected {n}x{n} relay matrix, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
    }
    Ok(())
}

/// Denominator term shared by all strategies: `sigma_d^2 + sigma_c^2 / (1 - rho)`.
fn receiver_noise(params: &SystemParams, i: usize, rho: f64) -> f64 {
    params.sigma_d2[i] + params.sigma_c2[i] / (1.0 - rho)
}

fn ratio(num: f64, den: f64) -> f64 {
    if num == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Amplify-and-forward. Self-interference is cancelled before decoding but
/// still contributes to harvested energy.
pub fn evaluate_af(ch: &ChannelRealization, sol: &BeamformingSolution, split: &PowerSplit, params: &SystemParams) -> Result<Metrics> {
    let BeamformingSolution::Af { w, qx } = sol else {
        return Err(Error::Domain(format!("evaluate_af given a {} design", sol.strategy())));
    };
    check_dims(ch, &[w, qx], true)?;
    let k = params.harvest_factor();
    let mut sinr = [0.0; 2];
    let mut energy = [0.0; 2];
    for i in 0..2 {
        let other = 1 - i;
        let g = ch.g(i);
        let cross = bilinear(g, w, ch.h(other)).norm_sqr() * split.power(other);
        let own = bilinear(g, w, ch.h(i)).norm_sqr() * split.power(i);
        let energy_beam = received_power(g, qx);
        let forwarded_noise = params.sigma_r2 * (g.transpose() * w).norm_squared();
        let den = energy_beam + forwarded_noise + receiver_noise(params, i, split.rho);
        sinr[i] = ratio(cross, den);
        energy[i] = k * split.rho * (cross + own + energy_beam);
    }
    let relay_power = split.p1 * (w * &ch.h1).norm_squared()
        + split.p2 * (w * &ch.h2).norm_squared()
        + trace_re(qx)
        + params.sigma_r2 * w.norm_squared();
    Ok(Metrics::assemble(sinr, energy, relay_power, split, params))
}

/// DF with a single XOR network-coded stream useful to both receivers.
pub fn evaluate_xor(ch: &ChannelRealization, sol: &BeamformingSolution, split: &PowerSplit, params: &SystemParams) -> Result<Metrics> {
    let BeamformingSolution::Xor { qs, qx } = sol else {
        return Err(Error::Domain(format!("evaluate_xor given a {} design", sol.strategy())));
    };
    check_dims(ch, &[qs, qx], true)?;
    let k = params.harvest_factor();
    let mut sinr = [0.0; 2];
    let mut energy = [0.0; 2];
    for i in 0..2 {
        let g = ch.g(i);
        let info = received_power(g, qs);
        let interference = received_power(g, qx);
        sinr[i] = ratio(info, interference + receiver_noise(params, i, split.rho));
        energy[i] = k * split.rho * (info + interference);
    }
    let relay_power = trace_re(qs) + trace_re(qx);
    Ok(Metrics::assemble(sinr, energy, relay_power, split, params))
}

/// DF with superposition coding; node `i` decodes the stream of the other node.
pub fn evaluate_sup(ch: &ChannelRealization, sol: &BeamformingSolution, split: &PowerSplit, params: &SystemParams) -> Result<Metrics> {
    let BeamformingSolution::Sup { qs1, qs2, qx } = sol else {
        return Err(Error::Domain(format!("evaluate_sup given a {} design", sol.strategy())));
    };
    check_dims(ch, &[qs1, qs2, qx], true)?;
    let k = params.harvest_factor();
    let streams = [qs1, qs2];
    let mut sinr = [0.0; 2];
    let mut energy = [0.0; 2];
    for i in 0..2 {
        let g = ch.g(i);
        let wanted = received_power(g, streams[1 - i]);
        let own = received_power(g, streams[i]);
        let interference = received_power(g, qx);
        sinr[i] = ratio(wanted, interference + receiver_noise(params, i, split.rho));
        energy[i] = k * split.rho * (wanted + own + interference);
    }
    let relay_power = trace_re(qs1) + trace_re(qs2) + trace_re(qx);
    Ok(Metrics::assemble(sinr, energy, relay_power, split, params))
}

/// Dispatches on the design's strategy.
pub fn evaluate(ch: &ChannelRealization, sol: &BeamformingSolution, split: &PowerSplit, params: &SystemParams) -> Result<Metrics> {
    match sol.strategy() {
        RelayStrategy::Af => evaluate_af(ch, sol, split, params),
        RelayStrategy::DfXor => evaluate_xor(ch, sol, split, params),
        RelayStrategy::DfSup => evaluate_sup(ch, sol, split, params),
    }
}

/// `log2 det(I + (P1/s) h1 h1^H + (P2/s) h2 h2^H)` through the 2x2 Gram matrix.
pub fn mac_sum_capacity(ch: &ChannelRealization, p1: f64, p2: f64, sigma_r2: f64) -> f64 {
    let n1 = ch.h1.norm_squared();
    let n2 = ch.h2.norm_squared();
    let cross = ch.h1.dotc(&ch.h2).norm_sqr();
    let a1 = p1 / sigma_r2;
    let a2 = p2 / sigma_r2;
    // det(I_2 + D^(1/2) H^H H D^(1/2))
    let det = (1.0 + a1 * n1) * (1.0 + a2 * n2) - a1 * a2 * cross;
    det.log2()
}

const MAC_TOL: f64 = 1e-10;
const MAC_MAX_ITERS: usize = 200;

/// Smallest source powers supporting `rates` over the multiple-access phase.
///
/// Individual-rate constraints fix each power; if the sum-rate constraint is
/// then violated both powers are scaled by a common factor, found by
/// bisection, until it holds with equality.
pub fn mac_min_powers(ch: &ChannelRealization, rates: [f64; 2], params: &SystemParams) -> Result<(f64, f64)> {
    ch.validate()?;
    if rates.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
        return Err(Error::Domain(format!("rates must be non-negative, got {rates:?}")));
    }
    let s = params.sigma_r2;
    let base = [
        s * (rates[0].exp2() - 1.0) / ch.h1.norm_squared(),
        s * (rates[1].exp2() - 1.0) / ch.h2.norm_squared(),
    ];
    let target = rates[0] + rates[1];
    let holds = |c: f64| mac_sum_capacity(ch, c * base[0], c * base[1], s) >= target;

    let mut scale = 1.0;
    if !holds(1.0) {
        let (mut lo, mut hi) = (1.0, 2.0);
        let mut iters = 0;
        while !holds(hi) {
            lo = hi;
            hi *= 2.0;
            iters += 1;
            if iters > MAC_MAX_ITERS {
                return Err(Error::InfeasibleRate { r1: rates[0], r2: rates[1] });
            }
        }
        while hi - lo > MAC_TOL * hi && iters < MAC_MAX_ITERS {
            let mid = 0.5 * (lo + hi);
            if holds(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
            iters += 1;
        }
        scale = hi;
    }
    let (p1, p2) = (scale * base[0], scale * base[1]);
    if p1 > params.p_max[0] || p2 > params.p_max[1] {
        return Err(Error::InfeasibleRate { r1: rates[0], r2: rates[1] });
    }
    Ok((p1, p2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{sample_channel, CVec};
    use approx::assert_relative_eq;
    use num_complex::Complex64;

    fn ones(n: usize) -> CVec {
        CVec::from_element(n, Complex64::new(1.0, 0.0))
    }

    fn scalar_channel() -> ChannelRealization {
        ChannelRealization::new(ones(1), ones(1), ones(1), ones(1), 0).unwrap()
    }

    fn scalar(x: f64) -> CMat {
        CMat::from_element(1, 1, Complex64::new(x, 0.0))
    }

    fn params_n(n: usize) -> SystemParams {
        SystemParams { n_antennas: n, ..SystemParams::default() }
    }

    #[test]
    fn zero_design_gives_zero_metrics() {
        let p = params_n(3);
        let ch = sample_channel(&p, 9).unwrap();
        let split = PowerSplit::new(1.0, 2.0, 0.4).unwrap();
        for strategy in RelayStrategy::ALL {
            let m = evaluate(&ch, &BeamformingSolution::zeros(strategy, 3), &split, &p).unwrap();
            assert_eq!(m.sinr, [0.0, 0.0]);
            assert_eq!(m.energy, [0.0, 0.0]);
            assert_eq!(m.relay_power, 0.0);
            assert_relative_eq!(m.objective, -(0.5 * 0.5 + 0.5 * 1.0));
        }
    }

    #[test]
    fn af_scalar_hand_formula() {
        let mut p = params_n(1);
        p.sigma_r2 = 0.7;
        p.sigma_d2 = [0.3, 0.4];
        p.sigma_c2 = [0.5, 0.6];
        let (w, q) = (1.3, 0.8);
        let split = PowerSplit::new(1.5, 2.5, 0.35).unwrap();
        let sol = BeamformingSolution::Af { w: scalar(w), qx: scalar(q) };
        let m = evaluate_af(&scalar_channel(), &sol, &split, &p).unwrap();
        let sinr1 = split.p2 * w * w / (q + 0.7 * w * w + 0.3 + 0.5 / (1.0 - 0.35));
        let sinr2 = split.p1 * w * w / (q + 0.7 * w * w + 0.4 + 0.6 / (1.0 - 0.35));
        assert_relative_eq!(m.sinr[0], sinr1, max_relative = 1e-14);
        assert_relative_eq!(m.sinr[1], sinr2, max_relative = 1e-14);
        let e = 0.25 * 0.35 * (w * w * (split.p1 + split.p2) + q);
        assert_relative_eq!(m.energy[0], e, max_relative = 1e-14);
        let pr = (split.p1 + split.p2) * w * w + q + 0.7 * w * w;
        assert_relative_eq!(m.relay_power, pr, max_relative = 1e-14);
    }

    #[test]
    fn af_more_energy_beam_trades_sinr_for_energy() {
        let p = params_n(2);
        let ch = sample_channel(&p, 3).unwrap();
        let w = CMat::from_fn(2, 2, |i, j| Complex64::new(0.3 + i as f64, 0.2 * j as f64));
        let qx = &ch.g1.conjugate() * ch.g1.transpose() + CMat::identity(2, 2);
        let split = PowerSplit::new(1.0, 1.0, 0.5).unwrap();
        let a = evaluate_af(&ch, &BeamformingSolution::Af { w: w.clone(), qx: qx.clone() }, &split, &p).unwrap();
        let b = evaluate_af(&ch, &BeamformingSolution::Af { w, qx: qx.scale(2.0) }, &split, &p).unwrap();
        for i in 0..2 {
            assert!(b.energy[i] > a.energy[i]);
            assert!(b.sinr[i] < a.sinr[i]);
        }
    }

    #[test]
    fn xor_cases() {
        let p = params_n(3);
        let ch = sample_channel(&p, 5).unwrap();
        let split = PowerSplit::new(0.1, 0.1, 0.5).unwrap();
        let qx = CMat::identity(3, 3);
        let m = evaluate_xor(&ch, &BeamformingSolution::Xor { qs: CMat::zeros(3, 3), qx }, &split, &p).unwrap();
        assert_eq!(m.sinr, [0.0, 0.0]);

        let u = CVec::from_fn(3, |i, _| Complex64::new(1.0, i as f64)).normalize();
        let qs = (&u * u.adjoint()).scale(p.p_relay);
        let m = evaluate_xor(&ch, &BeamformingSolution::Xor { qs, qx: CMat::zeros(3, 3) }, &split, &p).unwrap();
        assert_relative_eq!(m.relay_power, p.p_relay, max_relative = 1e-14);
    }

    #[test]
    fn xor_scalar_hand_formula() {
        let p = params_n(1);
        let (qs, qx) = (3.0, 0.5);
        let split = PowerSplit::new(0.2, 0.3, 0.6).unwrap();
        let sol = BeamformingSolution::Xor { qs: scalar(qs), qx: scalar(qx) };
        let m = evaluate_xor(&scalar_channel(), &sol, &split, &p).unwrap();
        assert_relative_eq!(m.sinr[0], qs / (qx + 1.0 + 1.0 / 0.4), max_relative = 1e-14);
        assert_relative_eq!(m.energy[1], 0.25 * 0.6 * (qs + qx), max_relative = 1e-14);
        let obj = 0.5 * (0.25 * 0.6 * 3.5 - 0.1) + 0.5 * (0.25 * 0.6 * 3.5 - 0.15);
        assert_relative_eq!(m.objective, obj, max_relative = 1e-14);
    }

    #[test]
    fn sup_cases() {
        let p = params_n(1);
        let split = PowerSplit::new(0.2, 0.3, 0.6).unwrap();
        let sol = BeamformingSolution::Sup { qs1: scalar(2.0), qs2: scalar(5.0), qx: scalar(0.5) };
        let m = evaluate_sup(&scalar_channel(), &sol, &split, &p).unwrap();
        let den = 0.5 + 1.0 + 1.0 / 0.4;
        assert_relative_eq!(m.sinr[0], 5.0 / den, max_relative = 1e-14);
        assert_relative_eq!(m.sinr[1], 2.0 / den, max_relative = 1e-14);
        assert_relative_eq!(m.energy[0], 0.25 * 0.6 * 7.5, max_relative = 1e-14);
        assert_relative_eq!(m.relay_power, 7.5, max_relative = 1e-14);

        let zero = BeamformingSolution::zeros(RelayStrategy::DfSup, 1);
        let m = evaluate_sup(&scalar_channel(), &zero, &split, &p).unwrap();
        assert_eq!((m.sinr, m.energy, m.relay_power), ([0.0; 2], [0.0; 2], 0.0));
    }

    #[test]
    fn sup_swap_symmetry() {
        let p = params_n(2);
        let mut ch = sample_channel(&p, 11).unwrap();
        ch.g2 = ch.g1.clone();
        let a = CMat::from_fn(2, 2, |i, j| Complex64::new((i + j) as f64 + 1.0, 0.0));
        let b = CMat::identity(2, 2).scale(0.7);
        let split = PowerSplit::new(1.0, 1.0, 0.3).unwrap();
        let qx = CMat::identity(2, 2).scale(0.1);
        let m1 = evaluate_sup(&ch, &BeamformingSolution::Sup { qs1: a.clone(), qs2: b.clone(), qx: qx.clone() }, &split, &p).unwrap();
        let m2 = evaluate_sup(&ch, &BeamformingSolution::Sup { qs1: b, qs2: a, qx }, &split, &p).unwrap();
        assert_relative_eq!(m1.sinr[0], m2.sinr[1], max_relative = 1e-14);
        assert_relative_eq!(m1.sinr[1], m2.sinr[0], max_relative = 1e-14);
    }

    #[test]
    fn energy_linear_and_sinr_decreasing_in_rho() {
        let p = params_n(2);
        let ch = sample_channel(&p, 2).unwrap();
        let q = CMat::identity(2, 2);
        let designs = [
            BeamformingSolution::Af { w: q.clone(), qx: q.scale(0.5) },
            BeamformingSolution::Xor { qs: q.clone(), qx: q.scale(0.5) },
            BeamformingSolution::Sup { qs1: q.clone(), qs2: q.scale(2.0), qx: q.scale(0.5) },
        ];
        for sol in &designs {
            let at = |rho| evaluate(&ch, sol, &PowerSplit::new(1.0, 1.0, rho).unwrap(), &p).unwrap();
            let (a, b, c) = (at(0.2), at(0.4), at(0.6));
            for i in 0..2 {
                assert_relative_eq!(b.energy[i] - a.energy[i], c.energy[i] - b.energy[i], max_relative = 1e-12);
                assert!(a.sinr[i] > b.sinr[i] && b.sinr[i] > c.sinr[i]);
            }
        }
    }

    #[test]
    fn wrong_strategy_or_dims_is_rejected() {
        let p = params_n(2);
        let ch = sample_channel(&p, 2).unwrap();
        let split = PowerSplit::new(1.0, 1.0, 0.5).unwrap();
        let xor = BeamformingSolution::zeros(RelayStrategy::DfXor, 2);
        assert!(evaluate_af(&ch, &xor, &split, &p).is_err());
        let wrong = BeamformingSolution::zeros(RelayStrategy::Af, 3);
        assert!(matches!(evaluate_af(&ch, &wrong, &split, &p), Err(Error::Dimension(_))));
    }

    #[test]
    fn mac_zero_rates() {
        let p = params_n(2);
        let ch = sample_channel(&p, 1).unwrap();
        let (p1, p2) = mac_min_powers(&ch, [0.0, 0.0], &p).unwrap();
        assert!(p1 <= 1e-12 && p2 <= 1e-12);
    }

    #[test]
    fn mac_scalar_hand_value() {
        let p = params_n(1);
        let (p1, p2) = mac_min_powers(&scalar_channel(), [1.0, 0.0], &p).unwrap();
        // R1 <= log2(1 + P1) is tight; log2(1 + P1 + 0) = 1 >= 1 so no scaling.
        assert_relative_eq!(p1, 1.0, max_relative = 1e-14);
        assert_eq!(p2, 0.0);
    }

    #[test]
    fn mac_orthogonal_channels_need_no_scaling() {
        let p = params_n(2);
        let e = |k: usize| CVec::from_fn(2, |i, _| Complex64::new(if i == k { 1.5 } else { 0.0 }, 0.0));
        let ch = ChannelRealization::new(e(0), e(1), e(0), e(1), 0).unwrap();
        let rates = [0.8, 0.6];
        let (p1, p2) = mac_min_powers(&ch, rates, &p).unwrap();
        assert_relative_eq!(p1, (0.8f64.exp2() - 1.0) / 2.25, max_relative = 1e-14);
        assert_relative_eq!(p2, (0.6f64.exp2() - 1.0) / 2.25, max_relative = 1e-14);
        // det identity: with h1 ⟂ h2 the sum capacity equals the sum of the single-user ones
        let direct = {
            let mut m = CMat::identity(2, 2);
            m += (&ch.h1 * ch.h1.adjoint()).scale(p1) + (&ch.h2 * ch.h2.adjoint()).scale(p2);
            m.determinant().re.log2()
        };
        assert_relative_eq!(mac_sum_capacity(&ch, p1, p2, 1.0), direct, max_relative = 1e-12);
        assert_relative_eq!(direct, 1.4, max_relative = 1e-12);
    }

    #[test]
    fn mac_sum_constraint_scaling() {
        let p = params_n(2);
        // nearly parallel channels make the sum-rate constraint bind
        let h1 = CVec::from_vec(vec![Complex64::new(0.9, 0.0), Complex64::new(0.6, 0.0)]);
        let h2 = CVec::from_vec(vec![Complex64::new(0.93, 0.0), Complex64::new(0.57, 0.0)]);
        let ch = ChannelRealization::new(h1.clone(), h2.clone(), h1, h2, 0).unwrap();
        let rates = [0.5, 0.5];
        let (p1, p2) = mac_min_powers(&ch, rates, &p).unwrap();
        let r1 = (1.0 + p1 * ch.h1.norm_squared()).log2();
        let r2 = (1.0 + p2 * ch.h2.norm_squared()).log2();
        let sum = mac_sum_capacity(&ch, p1, p2, 1.0);
        assert!(r1 >= 0.5 - 1e-9 && r2 >= 0.5 - 1e-9 && sum >= 1.0 - 1e-9);
        assert!((sum - 1.0).abs() <= 1e-6, "sum-rate constraint should be tight: {sum}");
        assert!(r1 > 0.5 + 1e-6);
        let d = (ch.h1.clone() * ch.h1.adjoint()).scale(p1) + (ch.h2.clone() * ch.h2.adjoint()).scale(p2) + CMat::identity(2, 2);
        assert_relative_eq!(d.determinant().re.log2(), sum, max_relative = 1e-10);
    }

    #[test]
    fn mac_caps_trigger_infeasible_rate() {
        let p = params_n(1);
        assert!(matches!(
            mac_min_powers(&scalar_channel(), [5.0, 0.1], &p),
            Err(Error::InfeasibleRate { .. })
        ));
        assert!(mac_min_powers(&scalar_channel(), [-0.1, 0.1], &p).is_err());
    }
}
