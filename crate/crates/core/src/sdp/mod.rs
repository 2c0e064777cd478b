//! Semidefinite programs over Hermitian PSD blocks: problem description, the
//! beamforming problem builders, a dense interior-point solver and rank-one
//! extraction.

mod builders;
mod ipm;
mod rank;

use std::fmt::Write as _;

pub use builders::{build_af_sdp, build_sup_sdp, build_xor_sdp};
pub use rank::{extract_rank_one, RankOne};

use crate::error::{Error, Result};
use crate::linalg::{complexify, hermitian_defect, realify, trace_product};
use crate::model::CMat;
use ipm::{RealSdp, RealStatus};
use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    /// Complex Hermitian block, solved through its real symmetric embedding.
    Complex,
    /// Real symmetric block; coefficients must be real.
    Real,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockSpec {
    pub name: String,
    pub dim: usize,
    pub field: Field,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl Sense {
    fn symbol(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        }
    }
}

/// `sum_b Tr(C_b X_b) (sense) bound`. Missing coefficients are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub name: String,
    pub coeffs: Vec<Option<CMat>>,
    pub sense: Sense,
    pub bound: f64,
}

/// Maximise `sum_b Tr(C_b X_b)` subject to trace-linear constraints, `X_b ⪰ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SdpProblem {
    pub blocks: Vec<BlockSpec>,
    pub objective: Vec<Option<CMat>>,
    pub constraints: Vec<Constraint>,
}

impl SdpProblem {
    pub fn new(blocks: Vec<BlockSpec>) -> Self {
        let objective = vec![None; blocks.len()];
        Self { blocks, objective, constraints: Vec::new() }
    }

    pub fn block_index(&self, name: &str) -> Option<usize> {
        self.blocks.iter().position(|b| b.name == name)
    }

    pub fn add_constraint(&mut self, name: &str, terms: Vec<(usize, CMat)>, sense: Sense, bound: f64) {
        let mut coeffs = vec![None; self.blocks.len()];
        for (b, m) in terms {
            coeffs[b] = Some(m);
        }
        self.constraints.push(Constraint { name: name.to_string(), coeffs, sense, bound });
    }

    /// Coefficients must be Hermitian (real for real blocks) and sized to their block.
    pub fn validate(&self) -> Result<()> {
        let nb = self.blocks.len();
        if nb == 0 {
            return Err(Error::Dimension("problem has no blocks".into()));
        }
        let check = |what: &str, coeffs: &[Option<CMat>]| -> Result<()> {
            if coeffs.len() != nb {
                return Err(Error::Dimension(format!("{what}: {} coefficient slots for {nb} blocks", coeffs.len())));
            }
            for (spec, c) in self.blocks.iter().zip(coeffs) {
                let Some(c) = c else { continue };
                if c.shape() != (spec.dim, spec.dim) {
                    return Err(Error::Dimension(format!(
                        "{what}: block `{}` is {}x{} but coefficient is {}x{}",
                        spec.name,
                        spec.dim,
                        spec.dim,
                        c.nrows(),
                        c.ncols()
                    )));
                }
                if c.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                    return Err(Error::Domain(format!("{what}: non-finite coefficient")));
                }
                if hermitian_defect(c) > 1e-12 * c.norm().max(1.0) {
                    return Err(Error::Domain(format!("{what}: coefficient for `{}` is not Hermitian", spec.name)));
                }
                if spec.field == Field::Real && c.iter().any(|z| z.im != 0.0) {
                    return Err(Error::Domain(format!("{what}: real block `{}` has complex coefficient", spec.name)));
                }
            }
            Ok(())
        };
        check("objective", &self.objective)?;
        for con in &self.constraints {
            check(&con.name, &con.coeffs)?;
            if !con.bound.is_finite() {
                return Err(Error::Domain(format!("{}: non-finite bound", con.name)));
            }
        }
        Ok(())
    }

    /// `sum_b Tr(C_b X_b)` for the objective.
    pub fn objective_at(&self, x: &[CMat]) -> f64 {
        linear_form(&self.objective, x)
    }

    /// Largest violation over all constraints, relative to `1 + |bound|`.
    pub fn max_violation(&self, x: &[CMat]) -> f64 {
        self.constraints
            .iter()
            .map(|con| {
                let lhs = linear_form(&con.coeffs, x);
                let excess = match con.sense {
                    Sense::Le => lhs - con.bound,
                    Sense::Ge => con.bound - lhs,
                    Sense::Eq => (lhs - con.bound).abs(),
                };
                excess.max(0.0) / (1.0 + con.bound.abs())
            })
            .fold(0.0, f64::max)
    }

    /// Plain-text dump in a matrix-market-like coordinate format.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "%%sdp-problem blocks={} constraints={}", self.blocks.len(), self.constraints.len());
        for spec in &self.blocks {
            let field = match spec.field {
                Field::Complex => "complex",
                Field::Real => "real",
            };
            let _ = writeln!(out, "block {} {} {}", spec.name, spec.dim, field);
        }
        let section = |out: &mut String, header: String, coeffs: &[Option<CMat>]| {
            let _ = writeln!(out, "{header}");
            for (b, c) in coeffs.iter().enumerate() {
                let Some(c) = c else { continue };
                for j in 0..c.ncols() {
                    for i in 0..=j.min(c.nrows() - 1) {
                        let z = c[(i, j)];
                        if z.re != 0.0 || z.im != 0.0 {
                            let _ = writeln!(out, "{b} {} {} {:.17e} {:.17e}", i + 1, j + 1, z.re, z.im);
                        }
                    }
                }
            }
        };
        section(&mut out, "objective max".to_string(), &self.objective);
        for con in &self.constraints {
            let header = format!("constraint {} {} {:.17e}", con.name, con.sense.symbol(), con.bound);
            section(&mut out, header, &con.coeffs);
        }
        out
    }

    pub fn write_dump(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.dump()).map_err(|source| Error::Io { path: path.to_path_buf(), source })
    }
}

fn linear_form(coeffs: &[Option<CMat>], x: &[CMat]) -> f64 {
    coeffs
        .iter()
        .zip(x)
        .filter_map(|(c, x)| c.as_ref().map(|c| trace_product(c, x)))
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SdpTolerances {
    /// Relative duality gap `|p - d| / (1 + |p| + |d|)`.
    pub gap_tol: f64,
    /// Relative primal and dual residuals.
    pub feas_tol: f64,
    pub max_iters: usize,
}

impl Default for SdpTolerances {
    fn default() -> Self {
        Self { gap_tol: 1e-7, feas_tol: 1e-7, max_iters: 200 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SdpStatus {
    Optimal,
    Infeasible,
    NumericalFailure,
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub status: SdpStatus,
    /// Primal blocks in problem order.
    pub blocks: Vec<CMat>,
    /// Dual slack blocks `Z_b`, same layout as `blocks`.
    pub duals: Vec<CMat>,
    /// Constraint multipliers in the maximisation sign convention.
    pub multipliers: Vec<f64>,
    pub objective_value: f64,
    pub dual_value: f64,
    pub duality_gap: f64,
    pub max_constraint_violation: f64,
    pub iterations: usize,
    pub message: String,
}

impl SdpSolution {
    /// `sum_b |Tr(Z_b X_b)|`.
    pub fn complementarity(&self) -> f64 {
        self.blocks.iter().zip(&self.duals).map(|(x, z)| trace_product(z, x).abs()).sum()
    }
}

pub fn relative_gap(p: f64, d: f64) -> f64 {
    (p - d).abs() / (1.0 + p.abs() + d.abs())
}

fn to_real(c: &CMat, field: Field) -> DMatrix<f64> {
    match field {
        Field::Complex => realify(c) * 0.5,
        Field::Real => c.map(|z| z.re),
    }
}

fn from_real(y: &DMatrix<f64>, field: Field) -> CMat {
    match field {
        Field::Complex => complexify(y),
        Field::Real => y.map(|v| v.into()),
    }
}

/// Solves the problem with a primal-dual interior-point method.
pub fn solve_sdp(problem: &SdpProblem, tol: &SdpTolerances) -> Result<SdpSolution> {
    problem.validate()?;
    let nb = problem.blocks.len();
    let zero_rows: Vec<bool> = problem
        .constraints
        .iter()
        .map(|con| con.coeffs.iter().all(|c| c.as_ref().is_none_or(|c| c.iter().all(|z| z.re == 0.0 && z.im == 0.0))))
        .collect();
    for (con, &zero) in problem.constraints.iter().zip(&zero_rows) {
        let ok = match con.sense {
            Sense::Le => 0.0 <= con.bound,
            Sense::Ge => 0.0 >= con.bound,
            Sense::Eq => con.bound == 0.0,
        };
        if zero && !ok {
            return Ok(trivially_infeasible(problem, &con.name));
        }
    }
    let active: Vec<usize> = (0..problem.constraints.len()).filter(|&i| !zero_rows[i]).collect();

    // Real standard form: minimise <-C, X> subject to A(X) = b, one 1x1 slack block per inequality.
    let mut dims: Vec<usize> = problem
        .blocks
        .iter()
        .map(|b| if b.field == Field::Complex { 2 * b.dim } else { b.dim })
        .collect();
    let mut c: Vec<Option<DMatrix<f64>>> = problem
        .objective
        .iter()
        .zip(&problem.blocks)
        .map(|(m, spec)| m.as_ref().map(|m| -to_real(m, spec.field)))
        .collect();
    let n_slack = active.iter().filter(|&&i| problem.constraints[i].sense != Sense::Eq).count();
    let total = dims.len() + n_slack;
    c.resize(total, None);
    let mut a: Vec<Vec<Option<DMatrix<f64>>>> = Vec::with_capacity(active.len());
    let mut b = DVector::zeros(active.len());
    let mut next_slack = dims.len();
    for (row, &i) in active.iter().enumerate() {
        let con = &problem.constraints[i];
        let mut coeffs: Vec<Option<DMatrix<f64>>> = con
            .coeffs
            .iter()
            .zip(&problem.blocks)
            .map(|(m, spec)| m.as_ref().map(|m| to_real(m, spec.field)))
            .collect();
        coeffs.resize(total, None);
        let sign = match con.sense {
            Sense::Le => 1.0,
            Sense::Ge => -1.0,
            Sense::Eq => 0.0,
        };
        if sign != 0.0 {
            coeffs[next_slack] = Some(DMatrix::from_element(1, 1, sign));
            next_slack += 1;
        }
        b[row] = con.bound;
        a.push(coeffs);
    }
    dims.resize(total, 1);

    let real = RealSdp { dims, c, a, b };
    let out = ipm::solve(&real, tol);

    let blocks: Vec<CMat> = (0..nb).map(|j| from_real(&out.x[j], problem.blocks[j].field)).collect();
    let duals: Vec<CMat> = (0..nb)
        .map(|j| {
            let z = from_real(&out.z[j], problem.blocks[j].field);
            if problem.blocks[j].field == Field::Complex {
                z.scale(2.0)
            } else {
                z
            }
        })
        .collect();
    let mut multipliers = vec![0.0; problem.constraints.len()];
    for (row, &i) in active.iter().enumerate() {
        multipliers[i] = -out.y[row];
    }
    let objective_value = problem.objective_at(&blocks);
    let dual_value = -out.dobj;
    let duality_gap = relative_gap(objective_value, dual_value);
    let max_constraint_violation = problem.max_violation(&blocks);
    let (status, message) = match out.status {
        RealStatus::Optimal => (SdpStatus::Optimal, String::from("optimal")),
        RealStatus::PrimalInfeasible => (SdpStatus::Infeasible, String::from("constraints cannot be satisfied")),
        RealStatus::DualInfeasible => (SdpStatus::NumericalFailure, String::from("objective appears unbounded")),
        RealStatus::Stalled(ref why) => (SdpStatus::NumericalFailure, why.clone()),
    };
    Ok(SdpSolution {
        status,
        blocks,
        duals,
        multipliers,
        objective_value,
        dual_value,
        duality_gap,
        max_constraint_violation,
        iterations: out.iterations,
        message,
    })
}

fn trivially_infeasible(problem: &SdpProblem, name: &str) -> SdpSolution {
    let zeros: Vec<CMat> = problem.blocks.iter().map(|b| CMat::zeros(b.dim, b.dim)).collect();
    SdpSolution {
        status: SdpStatus::Infeasible,
        duals: zeros.clone(),
        max_constraint_violation: problem.max_violation(&zeros),
        blocks: zeros,
        multipliers: vec![0.0; problem.constraints.len()],
        objective_value: f64::NAN,
        dual_value: f64::NAN,
        duality_gap: f64::NAN,
        iterations: 0,
        message: format!("constraint `{name}` has no coefficients and cannot hold"),
    }
}
