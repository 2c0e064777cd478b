use super::RHO_MAX;
use crate::error::{Error, Result};
use crate::linalg::received_power;
use crate::model::{ChannelRealization, SystemParams};
use crate::relay_eval::BeamformingSolution;

/// Information power left after the interference and antenna-noise share of
/// each SINR target: `g_i^T Q_info g_i* - tau_i (g_i^T Q_x g_i* + sigma_{i,d}^2)`.
pub fn df_sinr_margins(ch: &ChannelRealization, sol: &BeamformingSolution, params: &SystemParams) -> Result<(f64, f64)> {
    let (info, qx) = match sol {
        BeamformingSolution::Xor { qs, qx } => ([qs, qs], qx),
        BeamformingSolution::Sup { qs1, qs2, qx } => ([qs2, qs1], qx),
        BeamformingSolution::Af { .. } => {
            return Err(Error::Domain("splitting-ratio step applies to decode-and-forward designs".into()))
        }
    };
    let margin = |i: usize| {
        let g = ch.g(i);
        received_power(g, info[i]) - params.tau[i] * (received_power(g, qx) + params.sigma_d2[i])
    };
    Ok((margin(0), margin(1)))
}

/// Largest splitting ratio meeting both DF SINR targets,
/// `min(1 - tau_1 sigma_{1,c}^2 / c, 1 - tau_2 sigma_{2,c}^2 / d)`.
///
/// Zero targets leave the ratio unconstrained; it is then held just below one.
pub fn solve_rho_df(c: f64, d: f64, params: &SystemParams) -> Result<f64> {
    let s = [params.tau[0] * params.sigma_c2[0], params.tau[1] * params.sigma_c2[1]];
    let mut rho: f64 = RHO_MAX;
    for (i, margin) in [c, d].into_iter().enumerate() {
        if s[i] == 0.0 {
            continue;
        }
        if !(margin > s[i]) {
            return Err(Error::Infeasible(format!(
                "SINR target {} cannot be met for any splitting ratio (margin {margin:e})",
                i + 1
            )));
        }
        rho = rho.min(1.0 - s[i] / margin);
    }
    Ok(rho)
}
