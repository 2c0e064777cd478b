use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, trace_re, unvec};
use crate::model::{CMat, CVec};

/// Principal component of a lifted beamforming solution.
#[derive(Debug, Clone)]
pub struct RankOne {
    /// `sqrt(lambda_1) v_1`.
    pub w: CVec,
    /// `w` reshaped column-wise to `N x N`.
    pub matrix: CMat,
    /// `lambda_2 / lambda_1`; zero for an exactly rank-one input.
    pub rank_ratio: f64,
    /// Eigenvalues, descending.
    pub eigenvalues: Vec<f64>,
}

/// Recovers `W` from `W~ ≈ vec(W) vec(W)^H` through its principal eigenpair.
pub fn extract_rank_one(wtilde: &CMat) -> Result<RankOne> {
    let dim = wtilde.nrows();
    if dim == 0 || wtilde.ncols() != dim {
        return Err(Error::Dimension(format!("lifted matrix is {}x{}", wtilde.nrows(), wtilde.ncols())));
    }
    let n = (dim as f64).sqrt().round() as usize;
    if n * n != dim {
        return Err(Error::Dimension(format!("lifted dimension {dim} is not a perfect square")));
    }
    let (values, vectors) = hermitian_eigen(wtilde);
    let lead = values[0];
    if !(lead > 0.0) || wtilde.norm() == 0.0 {
        return Err(Error::Degenerate("lifted beamformer is zero".into()));
    }
    let min = values[dim - 1];
    if min < -1e-9 * trace_re(wtilde).abs().max(lead) {
        return Err(Error::Domain(format!("lifted matrix is not PSD (eigenvalue {min:e})")));
    }
    let mut v = vectors.column(0).into_owned();
    // fix the global phase so the largest entry is real and positive
    let (k, _) = v.iter().enumerate().fold((0, 0.0), |best, (i, z)| if z.norm() > best.1 { (i, z.norm()) } else { best });
    let phase = v[k].conj() / v[k].norm();
    v *= phase;
    let w = v.scale(lead.sqrt());
    let rank_ratio = if dim > 1 { values[1].max(0.0) / lead } else { 0.0 };
    let matrix = unvec(&w, n, n)?;
    Ok(RankOne { w, matrix, rank_ratio, eigenvalues: values })
}
