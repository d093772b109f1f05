//! Second-order cone programs: representation, an interior-point solver,
//! and an independent KKT checker.
//!
//! Dual convention: with multipliers `y` (equalities), `lambda >= 0`
//! (nonnegativity) and `z_i` in the cone for each `||u_i(x)|| <= s_i(x)`,
//! stationarity reads `c = A^T y + E lambda + sum F_i^T z_i` where `F_i` is
//! the linear part of the stacked map `(s_i, u_i)`.

mod cone;
mod ipm;
mod kkt;
mod presolve;
mod program;

use alloc::vec;
use alloc::vec::Vec;

pub use program::{ConicProgram, Equality, LinExpr, SocConstraint};

use crate::error::{invalid, mismatch, Result};
use crate::math::{norm2, norm_inf};
use cone::Cones;
use kkt::StdForm;
use presolve::{LinSource, Presolved};

/// Default stopping tolerance on normalized residuals.

pub const DEFAULT_TOL: f64 = 1e-7;
pub const DEFAULT_MAX_ITER: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Optimal,
    /// The method stalled; the best iterate meets `100 * tol` but not `tol`.
    Inaccurate,
    Infeasible,
    Unbounded,
    MaxIter,
}

impl Status {
    /// True for a usable primal-dual point.
    pub fn is_solved(self) -> bool {
        matches!(self, Status::Optimal | Status::Inaccurate)
    }
}

/// Loosening applied to `tol` when judging a stalled run.
pub const INACCURATE_FACTOR: f64 = 100.0;

/// Normalized optimality residuals.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct KktResiduals {
    pub primal: f64,
    pub dual: f64,
    pub gap: f64,
}

impl KktResiduals {
    pub fn max(&self) -> f64 {
        self.primal.max(self.dual).max(self.gap)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConicSolution {
    pub status: Status,
    pub x: Vec<f64>,
    /// Equality multipliers.
    pub y: Vec<f64>,
    /// Multipliers of the nonnegativity constraints, in `nonneg` order.
    pub lambda: Vec<f64>,
    /// Cone multipliers, scalar entry first.
    pub soc_duals: Vec<Vec<f64>>,
    pub objective: f64,
    pub residuals: KktResiduals,
    pub iterations: usize,
}

fn std_form(red: &presolve::Reduced) -> StdForm {
    let mut g = Vec::new();
    let mut h = Vec::new();
    let neg = |row: &presolve::Row| row.terms.iter().map(|&(j, a)| (j, -a)).collect::<Vec<_>>();
    for row in &red.lin_rows {
        g.push(neg(row));
        h.push(row.constant);
    }
    let mut dims = Vec::with_capacity(red.soc_blocks.len());
    for (_, rows) in &red.soc_blocks {
        dims.push(rows.len());
        for row in rows {
            g.push(neg(row));
            h.push(row.constant);
        }
    }
    StdForm {
        n: red.n,
        c: red.c.clone(),
        g,
        h,
        cones: Cones::new(red.lin_rows.len(), &dims),
    }
}

fn unpack(
    p: &ConicProgram,
    red: &presolve::Reduced,
    status: Status,
    xi: &[f64],
    z: &[f64],
    iterations: usize,
) -> ConicSolution {
    let x = red.expand(p.num_vars, xi);
    let mut lambda = vec![0.0; p.nonneg.len()];
    let mut soc_duals: Vec<Vec<f64>> = p.socs.iter().map(|s| vec![0.0; s.dim()]).collect();
    for (i, src) in red.lin_src.iter().enumerate() {
        match *src {
            LinSource::Nonneg(k) => lambda[k] = z[i],
            LinSource::Soc(k) => soc_duals[k][0] = z[i],
        }
    }
    let mut off = red.lin_rows.len();
    for (k, rows) in &red.soc_blocks {
        soc_duals[*k].copy_from_slice(&z[off..off + rows.len()]);
        off += rows.len();
    }
    let y = red.equality_duals(p, &lambda, &soc_duals);
    let mut sol = ConicSolution {
        status,
        objective: p.objective_value(&x),
        x,
        y,
        lambda,
        soc_duals,
        residuals: KktResiduals::default(),
        iterations,
    };
    if let Ok(r) = check_kkt(p, &sol) {
        sol.residuals = r;
    }
    sol
}

/// Solves `p` to tolerance `tol` with a primal-dual interior-point method.
///
/// An `Optimal` status is only reported after [`check_kkt`] confirms all
/// residuals are within `tol` on the original (unreduced) program.
pub fn solve(p: &ConicProgram, tol: f64, max_iter: usize) -> Result<ConicSolution> {
    p.validate()?;
    if !(tol > 0.0) {
        return Err(invalid("tolerance must be positive"));
    }
    let red = match presolve::presolve(p) {
        Presolved::Reduced(r) => r,
        Presolved::Infeasible => {
            return Ok(ConicSolution {
                status: Status::Infeasible,
                x: vec![0.0; p.num_vars],
                y: vec![0.0; p.equalities.len()],
                lambda: vec![0.0; p.nonneg.len()],
                soc_duals: p.socs.iter().map(|s| vec![0.0; s.dim()]).collect(),
                objective: f64::NAN,
                residuals: KktResiduals::default(),
                iterations: 0,
            })
        }
    };
    let mut sf = std_form(&red);
    // The interior-point iterates are scale dependent; solve with a unit
    // objective and scale the duals back.
    let cscale = norm_inf(&sf.c).max(1.0);
    sf.c.iter_mut().for_each(|v| *v /= cscale);
    if sf.cones.m == 0 {
        let status = if norm_inf(&sf.c) == 0.0 {
            Status::Optimal
        } else {
            Status::Unbounded
        };
        return Ok(unpack(p, &red, status, &vec![0.0; sf.n], &[], 0));
    }
    let scaled = |z: &[f64]| z.iter().map(|v| v * cscale).collect::<Vec<f64>>();
    let mut accept = |xi: &[f64], _s: &[f64], z: &[f64]| {
        let cand = unpack(p, &red, Status::Optimal, xi, &scaled(z), 0);
        cand.residuals.max() <= tol
    };
    let out = ipm::solve(&sf, tol, max_iter, &mut accept);
    let mut sol = unpack(p, &red, out.status, &out.x, &scaled(&out.z), out.iterations);
    if sol.status == Status::MaxIter && sol.residuals.max() <= INACCURATE_FACTOR * tol {
        sol.status = Status::Inaccurate;
    }
    Ok(sol)
}

/// Recomputes primal feasibility, dual feasibility/stationarity and the
/// duality gap of `s` for `p` from scratch.
pub fn check_kkt(p: &ConicProgram, s: &ConicSolution) -> Result<KktResiduals> {
    let n = p.num_vars;
    if s.x.len() != n {
        return Err(mismatch("primal vector length differs from the program"));
    }
    if s.y.len() != p.equalities.len() || s.lambda.len() != p.nonneg.len() {
        return Err(mismatch("multiplier count differs from the program"));
    }
    if s.soc_duals.len() != p.socs.len()
        || s.soc_duals
            .iter()
            .zip(&p.socs)
            .any(|(z, c)| z.len() != c.dim())
    {
        return Err(mismatch("cone multiplier shapes differ from the program"));
    }
    let x = &s.x;

    let mut pscale = 0.0f64;
    let mut pviol = 0.0f64;
    for e in &p.equalities {
        let lhs: f64 = e.terms.iter().map(|&(j, a)| a * x[j]).sum();
        pviol = pviol.max((lhs - e.rhs).abs());
        pscale = pscale.max(e.rhs.abs());
    }
    for &j in &p.nonneg {
        pviol = pviol.max(-x[j]);
    }
    for c in &p.socs {
        pviol = pviol.max(c.violation(x));
        for row in core::iter::once(&c.scalar).chain(&c.vector) {
            pscale = pscale.max(row.constant.abs());
        }
    }
    let primal = pviol.max(0.0) / (1.0 + pscale);

    let mut r = p.objective.clone();
    let mut dobj = p.objective_offset;
    let mut compl = 0.0;
    for (e, &y) in p.equalities.iter().zip(&s.y) {
        for &(j, a) in &e.terms {
            r[j] -= a * y;
        }
        dobj += e.rhs * y;
    }
    let mut dviol = 0.0f64;
    for (&j, &l) in p.nonneg.iter().zip(&s.lambda) {
        r[j] -= l;
        dviol = dviol.max(-l);
        compl += l * x[j];
    }
    for (c, z) in p.socs.iter().zip(&s.soc_duals) {
        for (row, &zr) in core::iter::once(&c.scalar).chain(&c.vector).zip(z) {
            for &(j, a) in &row.terms {
                r[j] -= a * zr;
            }
            dobj -= zr * row.constant;
            compl += zr * row.eval(x);
        }
        dviol = dviol.max(norm2(&z[1..]) - z[0]);
    }
    let cscale = 1.0 + norm_inf(&p.objective);
    let dual = norm_inf(&r).max(dviol.max(0.0)) / cscale;
    let pobj = p.objective_value(x);
    let gap = (pobj - dobj).abs().max(compl.abs()) / (1.0 + pobj.abs());
    Ok(KktResiduals { primal, dual, gap })
}
