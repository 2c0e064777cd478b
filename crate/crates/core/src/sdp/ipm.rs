//! Infeasible-start primal-dual path-following method with the HKM search
//! direction and Mehrotra predictor-corrector steps, for dense real symmetric
//! block problems in the standard form
//!
//! ```text
//! minimise <C, X>  subject to  <A_i, X> = b_i,  X ⪰ 0
//! maximise b^T y   subject to  sum_i y_i A_i + Z = C,  Z ⪰ 0
//! ```

use nalgebra::{Cholesky, DMatrix, DVector};

use super::SdpTolerances;

type Mat = DMatrix<f64>;

pub(super) struct RealSdp {
    pub dims: Vec<usize>,
    pub c: Vec<Option<Mat>>,
    /// `a[i][j]` is the coefficient of constraint `i` on block `j`.
    pub a: Vec<Vec<Option<Mat>>>,
    pub b: DVector<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub(super) enum RealStatus {
    Optimal,
    PrimalInfeasible,
    DualInfeasible,
    Stalled(String),
}

pub(super) struct RealOutput {
    pub x: Vec<Mat>,
    pub z: Vec<Mat>,
    pub y: DVector<f64>,
    pub dobj: f64,
    pub status: RealStatus,
    pub iterations: usize,
}

struct Scaled {
    dims: Vec<usize>,
    c: Vec<Option<Mat>>,
    a: Vec<Vec<Option<Mat>>>,
    b: DVector<f64>,
    row_norms: Vec<f64>,
    b_scale: f64,
    c_scale: f64,
}

fn scale(p: &RealSdp) -> Scaled {
    let m = p.a.len();
    let mut a = p.a.clone();
    let mut b = p.b.clone();
    let mut row_norms = vec![1.0; m];
    for i in 0..m {
        let norm = a[i].iter().flatten().map(|m| m.norm_squared()).sum::<f64>().sqrt();
        row_norms[i] = norm;
        for blk in a[i].iter_mut().flatten() {
            *blk /= norm;
        }
        b[i] /= norm;
    }
    let b_scale = nonzero(b.amax());
    let c_norm = p.c.iter().flatten().map(|m| m.norm_squared()).sum::<f64>().sqrt();
    let c_scale = nonzero(c_norm);
    b /= b_scale;
    let c = p.c.iter().map(|m| m.as_ref().map(|m| m / c_scale)).collect();
    Scaled { dims: p.dims.clone(), c, a, b, row_norms, b_scale, c_scale }
}

fn nonzero(v: f64) -> f64 {
    if v > 0.0 && v.is_finite() {
        v
    } else {
        1.0
    }
}

fn inner(a: &Mat, b: &Mat) -> f64 {
    a.dot(b)
}

fn sym(m: &Mat) -> Mat {
    (m + m.transpose()) * 0.5
}

impl Scaled {
    fn m(&self) -> usize {
        self.a.len()
    }

    fn nb(&self) -> usize {
        self.dims.len()
    }

    fn apply(&self, x: &[Mat]) -> DVector<f64> {
        DVector::from_fn(self.m(), |i, _| {
            self.a[i].iter().zip(x).filter_map(|(a, x)| a.as_ref().map(|a| inner(a, x))).sum()
        })
    }

    fn adjoint(&self, y: &DVector<f64>, j: usize) -> Mat {
        let n = self.dims[j];
        let mut out = Mat::zeros(n, n);
        for i in 0..self.m() {
            if let Some(a) = &self.a[i][j] {
                out += a * y[i];
            }
        }
        out
    }

    fn c_block(&self, j: usize) -> Mat {
        self.c[j].clone().unwrap_or_else(|| Mat::zeros(self.dims[j], self.dims[j]))
    }

    fn primal_obj(&self, x: &[Mat]) -> f64 {
        self.c.iter().zip(x).filter_map(|(c, x)| c.as_ref().map(|c| inner(c, x))).sum()
    }

    fn starting_point(&self) -> (Vec<Mat>, Vec<Mat>) {
        let mut xs = Vec::with_capacity(self.nb());
        let mut zs = Vec::with_capacity(self.nb());
        for j in 0..self.nb() {
            let n = self.dims[j] as f64;
            let mut xi: f64 = 10f64.max(n.sqrt());
            let mut eta: f64 = 10f64.max(n.sqrt());
            for i in 0..self.m() {
                if let Some(a) = &self.a[i][j] {
                    let an = a.norm();
                    xi = xi.max(n * (1.0 + self.b[i].abs()) / (1.0 + an));
                    eta = eta.max(an);
                }
            }
            if let Some(c) = &self.c[j] {
                eta = eta.max(c.norm());
            }
            let dim = self.dims[j];
            xs.push(Mat::identity(dim, dim) * xi);
            zs.push(Mat::identity(dim, dim) * eta);
        }
        (xs, zs)
    }
}

/// Largest `t` with `X + t dX ⪰ 0`, given `L^-1` for `X = L L^T`.
fn max_step(linv: &Mat, dx: &Mat) -> f64 {
    let s = linv * dx * linv.transpose();
    let lmin = sym(&s).symmetric_eigenvalues().min();
    if lmin < 0.0 {
        -1.0 / lmin
    } else {
        f64::INFINITY
    }
}

fn lower_inverse(m: &Mat) -> Option<(Mat, Mat)> {
    let ch = Cholesky::new(m.clone())?;
    let n = m.nrows();
    let linv = ch.l().solve_lower_triangular(&Mat::identity(n, n))?;
    let inv = linv.transpose() * &linv;
    Some((linv, inv))
}

struct Workspace {
    /// `g[k][j] = X_j A_kj Z_j^-1`.
    g: Vec<Vec<Option<Mat>>>,
    zinv: Vec<Mat>,
    x_rd_zinv: Vec<Mat>,
    schur: Cholesky<f64, nalgebra::Dyn>,
}

struct Direction {
    dx: Vec<Mat>,
    dy: DVector<f64>,
    dz: Vec<Mat>,
}

fn direction(
    p: &Scaled,
    ws: &Workspace,
    x: &[Mat],
    rp: &DVector<f64>,
    rd: &[Mat],
    sigma_mu: f64,
    corr: Option<&Direction>,
) -> Direction {
    let nb = p.nb();
    let mut r: Vec<Mat> = Vec::with_capacity(nb);
    for j in 0..nb {
        let mut rj = &ws.zinv[j] * sigma_mu - &x[j] - &ws.x_rd_zinv[j];
        if let Some(c) = corr {
            rj -= &c.dx[j] * &c.dz[j] * &ws.zinv[j];
        }
        r.push(rj);
    }
    let rhs = DVector::from_fn(p.m(), |i, _| {
        rp[i] - p.a[i].iter().zip(&r).filter_map(|(a, r)| a.as_ref().map(|a| inner(a, r))).sum::<f64>()
    });
    let dy = ws.schur.solve(&rhs);
    let mut dx = Vec::with_capacity(nb);
    let mut dz = Vec::with_capacity(nb);
    for j in 0..nb {
        dz.push(&rd[j] - p.adjoint(&dy, j));
        let mut t = r[j].clone();
        for k in 0..p.m() {
            if let Some(g) = &ws.g[k][j] {
                t += g * dy[k];
            }
        }
        dx.push(sym(&t));
    }
    Direction { dx, dy, dz }
}

pub(super) fn solve(problem: &RealSdp, tol: &SdpTolerances) -> RealOutput {
    let p = scale(problem);
    let nb = p.nb();
    let m = p.m();
    let n_total: usize = p.dims.iter().sum();
    let (mut x, mut z) = p.starting_point();
    let mut y = DVector::zeros(m);
    let unit = p.c_scale * p.b_scale;
    let b_norm = p.b.norm();
    let c_norm = p.c.iter().flatten().map(|c| c.norm_squared()).sum::<f64>().sqrt();

    let mut status = RealStatus::Stalled("iteration limit reached".into());
    let mut iterations = 0;
    let mut stalls = 0;
    for iter in 0..=tol.max_iters {
        iterations = iter;
        let ax = p.apply(&x);
        let rp = &p.b - &ax;
        let rd: Vec<Mat> = (0..nb).map(|j| p.c_block(j) - &z[j] - p.adjoint(&y, j)).collect();
        let pobj = p.primal_obj(&x);
        let dobj = p.b.dot(&y);
        let mu = x.iter().zip(&z).map(|(x, z)| inner(x, z)).sum::<f64>() / n_total as f64;
        let pinf = rp.norm() / (1.0 + b_norm);
        let dinf = rd.iter().map(|r| r.norm_squared()).sum::<f64>().sqrt() / (1.0 + c_norm);
        let gap = unit * (pobj - dobj).abs() / (1.0 + unit * (pobj.abs() + dobj.abs()));
        if gap <= tol.gap_tol && pinf <= tol.feas_tol && dinf <= tol.feas_tol {
            status = RealStatus::Optimal;
            break;
        }
        if dobj > 0.0 {
            let ray = (0..nb).map(|j| (p.c_block(j) - &rd[j]).norm_squared()).sum::<f64>().sqrt();
            if dobj > 1.0 / tol.feas_tol || ray / dobj <= tol.feas_tol {
                status = RealStatus::PrimalInfeasible;
                break;
            }
        }
        if pobj < 0.0 {
            if -pobj > 1.0 / tol.feas_tol || ax.norm() / -pobj <= tol.feas_tol {
                status = RealStatus::DualInfeasible;
                break;
            }
        }
        if iter == tol.max_iters {
            break;
        }

        let mut zinv = Vec::with_capacity(nb);
        let mut lz = Vec::with_capacity(nb);
        let mut lx = Vec::with_capacity(nb);
        let mut failed = false;
        for j in 0..nb {
            match (lower_inverse(&z[j]), lower_inverse(&x[j])) {
                (Some((lzi, zi)), Some((lxi, _))) => {
                    zinv.push(zi);
                    lz.push(lzi);
                    lx.push(lxi);
                }
                _ => {
                    failed = true;
                    break;
                }
            }
        }
        if failed {
            status = RealStatus::Stalled("iterate lost positive definiteness".into());
            break;
        }
        let g: Vec<Vec<Option<Mat>>> = (0..m)
            .map(|k| (0..nb).map(|j| p.a[k][j].as_ref().map(|a| &x[j] * a * &zinv[j])).collect())
            .collect();
        let mut schur = DMatrix::from_fn(m, m, |i, k| {
            p.a[i].iter().zip(&g[k]).filter_map(|(a, g)| Some(inner(a.as_ref()?, g.as_ref()?))).sum()
        });
        schur = sym(&schur);
        let schur = match Cholesky::new(schur.clone()) {
            Some(ch) => ch,
            None => {
                let bump = 1e-14 * schur.diagonal().amax().max(1e-300);
                match Cholesky::new(schur + Mat::identity(m, m) * bump) {
                    Some(ch) => ch,
                    None => {
                        status = RealStatus::Stalled("Schur complement is singular".into());
                        break;
                    }
                }
            }
        };
        let x_rd_zinv = (0..nb).map(|j| &x[j] * &rd[j] * &zinv[j]).collect();
        let ws = Workspace { g, zinv, x_rd_zinv, schur };

        let step_lengths = |d: &Direction| -> (f64, f64) {
            let ap = (0..nb).map(|j| max_step(&lx[j], &d.dx[j])).fold(f64::INFINITY, f64::min);
            let ad = (0..nb).map(|j| max_step(&lz[j], &d.dz[j])).fold(f64::INFINITY, f64::min);
            (ap, ad)
        };

        let aff = direction(&p, &ws, &x, &rp, &rd, 0.0, None);
        let (ap, ad) = step_lengths(&aff);
        let (ap_a, ad_a) = (ap.min(1.0), ad.min(1.0));
        let mu_aff = (0..nb)
            .map(|j| inner(&(&x[j] + &aff.dx[j] * ap_a), &(&z[j] + &aff.dz[j] * ad_a)))
            .sum::<f64>()
            / n_total as f64;
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);
        let dir = direction(&p, &ws, &x, &rp, &rd, sigma * mu, Some(&aff));
        let (ap, ad) = step_lengths(&dir);
        let gamma = 0.9 + 0.09 * ap_a.min(ad_a);
        let ap = (gamma * ap).min(1.0);
        let ad = (gamma * ad).min(1.0);
        if ap < 1e-10 && ad < 1e-10 {
            stalls += 1;
            if stalls >= 3 {
                status = RealStatus::Stalled("step lengths collapsed".into());
                break;
            }
        } else {
            stalls = 0;
        }
        for j in 0..nb {
            x[j] = sym(&(&x[j] + &dir.dx[j] * ap));
            z[j] = sym(&(&z[j] + &dir.dz[j] * ad));
        }
        y += &dir.dy * ad;
    }

    let x_out: Vec<Mat> = x.iter().map(|m| m * p.b_scale).collect();
    let z_out: Vec<Mat> = z.iter().map(|m| m * p.c_scale).collect();
    let y_out = DVector::from_fn(m, |i, _| y[i] * p.c_scale / p.row_norms[i]);
    let dobj = unit * p.b.dot(&y);
    RealOutput { x: x_out, z: z_out, y: y_out, dobj, status, iterations }
}
