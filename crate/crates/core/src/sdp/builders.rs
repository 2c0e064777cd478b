use super::{BlockSpec, Field, Sense, SdpProblem};
use crate::error::{Error, Result};
use crate::linalg::{conj_outer, hermitian_part, kron};
use crate::model::{CMat, ChannelRealization, SystemParams};
use crate::relay_eval::PowerSplit;

fn complex_block(name: &str, dim: usize) -> BlockSpec {
    BlockSpec { name: name.to_string(), dim, field: Field::Complex }
}

fn check_rho(rho: f64) -> Result<()> {
    if rho > 0.0 && rho < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("splitting ratio {rho} outside (0, 1)")))
    }
}

/// `tau_i (sigma_d^2 + sigma_c^2 / (1 - rho))`.
fn sinr_bound(params: &SystemParams, i: usize, rho: f64) -> f64 {
    params.tau[i] * (params.sigma_d2[i] + params.sigma_c2[i] / (1.0 - rho))
}

/// `alpha g1* g1^T + beta g2* g2^T`.
fn weighted_downlink(ch: &ChannelRealization, params: &SystemParams) -> CMat {
    conj_outer(&ch.g1).scale(params.weights[0]) + conj_outer(&ch.g2).scale(params.weights[1])
}

/// Lifted AF beamforming problem over `W~ = vec(W) vec(W)^H` (dimension
/// `N^2`) and `Q_x`, with the rank-one constraint dropped.
pub fn build_af_sdp(ch: &ChannelRealization, params: &SystemParams, split: &PowerSplit) -> Result<SdpProblem> {
    ch.validate()?;
    check_rho(split.rho)?;
    let n = ch.n();
    let eye = CMat::identity(n, n);
    let hh = [conj_outer(&ch.h1), conj_outer(&ch.h2)];
    let gg = [conj_outer(&ch.g1), conj_outer(&ch.g2)];
    let rho = split.rho;

    let mut p = SdpProblem::new(vec![complex_block("W", n * n), complex_block("Qx", n)]);
    let uplink = hh[0].scale(split.p1) + hh[1].scale(split.p2);
    let downlink = weighted_downlink(ch, params).scale(rho);
    p.objective[0] = Some(hermitian_part(&kron(&uplink, &downlink)));
    p.objective[1] = Some(downlink);

    for i in 0..2 {
        let other = 1 - i;
        let tau = params.tau[i];
        let useful = hh[other].scale(split.power(other)) - eye.scale(tau * params.sigma_r2);
        let c = hermitian_part(&kron(&useful, &gg[i]));
        p.add_constraint(
            &format!("sinr{}", i + 1),
            vec![(0, c), (1, gg[i].scale(-tau))],
            Sense::Ge,
            sinr_bound(params, i, rho),
        );
    }
    let load = uplink + eye.scale(params.sigma_r2);
    p.add_constraint("power", vec![(0, hermitian_part(&kron(&load, &eye))), (1, eye)], Sense::Le, params.p_relay);
    Ok(p)
}

/// DF-XOR problem over `Q_s` and `Q_x`.
pub fn build_xor_sdp(ch: &ChannelRealization, params: &SystemParams, rho: f64) -> Result<SdpProblem> {
    ch.validate()?;
    check_rho(rho)?;
    let n = ch.n();
    let eye = CMat::identity(n, n);
    let a = weighted_downlink(ch, params);
    let mut p = SdpProblem::new(vec![complex_block("Qs", n), complex_block("Qx", n)]);
    p.objective = vec![Some(a.clone()), Some(a)];
    for i in 0..2 {
        let gg = conj_outer(ch.g(i));
        let tau = params.tau[i];
        p.add_constraint(
            &format!("sinr{}", i + 1),
            vec![(0, gg.clone()), (1, gg.scale(-tau))],
            Sense::Ge,
            sinr_bound(params, i, rho),
        );
    }
    p.add_constraint("power", vec![(0, eye.clone()), (1, eye)], Sense::Le, params.p_relay);
    Ok(p)
}

/// DF-SUP problem over `Q_s1`, `Q_s2` and `Q_x`. Node `i` decodes the other
/// node's stream.
pub fn build_sup_sdp(ch: &ChannelRealization, params: &SystemParams, rho: f64) -> Result<SdpProblem> {
    ch.validate()?;
    check_rho(rho)?;
    let n = ch.n();
    let eye = CMat::identity(n, n);
    let a = weighted_downlink(ch, params);
    let mut p = SdpProblem::new(vec![complex_block("Qs1", n), complex_block("Qs2", n), complex_block("Qx", n)]);
    p.objective = vec![Some(a.clone()), Some(a.clone()), Some(a)];
    for i in 0..2 {
        let gg = conj_outer(ch.g(i));
        let tau = params.tau[i];
        p.add_constraint(
            &format!("sinr{}", i + 1),
            vec![(1 - i, gg.clone()), (2, gg.scale(-tau))],
            Sense::Ge,
            sinr_bound(params, i, rho),
        );
    }
    p.add_constraint("power", vec![(0, eye.clone()), (1, eye.clone()), (2, eye)], Sense::Le, params.p_relay);
    Ok(p)
}
