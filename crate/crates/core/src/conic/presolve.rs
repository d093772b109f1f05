//! Removes affine equalities by substitution so the interior-point method
//! only sees cone constraints over free variables.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use super::program::{ConicProgram, LinExpr};

/// Affine row over the reduced variables.
#[derive(Debug, Clone, Default)]
pub(crate) struct Row {
    pub terms: Vec<(usize, f64)>,
    pub constant: f64,
}

impl Row {
    pub fn eval(&self, xi: &[f64]) -> f64 {
        self.constant + self.terms.iter().map(|&(j, a)| a * xi[j]).sum::<f64>()
    }
}

/// Where a linear cone row came from in the original program.
#[derive(Debug, Clone, Copy)]
pub(crate) enum LinSource {
    Nonneg(usize),
    Soc(usize),
}

pub(crate) struct Reduced {
    pub n: usize,
    pub kept: Vec<usize>,
    /// Eliminated original variable and its expression in reduced variables.
    pub elim: Vec<(usize, Row)>,
    pub c: Vec<f64>,
    pub lin_rows: Vec<Row>,
    pub lin_src: Vec<LinSource>,
    /// (index into `ConicProgram::socs`, rows with the scalar row first).
    pub soc_blocks: Vec<(usize, Vec<Row>)>,
    /// (equality index, pivot variable) pairs used for elimination.
    pub pivots: Vec<(usize, usize)>,
}

pub(crate) enum Presolved {
    Reduced(Reduced),
    Infeasible,
}

struct Dense {
    coef: Vec<f64>,
    constant: f64,
}

pub(crate) fn presolve(p: &ConicProgram) -> Presolved {
    let n = p.num_vars;
    let mut exprs: Vec<Option<Dense>> = (0..n).map(|_| None).collect();
    let mut elim_order: Vec<usize> = Vec::new();
    let mut pivots = Vec::new();

    let mut remaining = vec![0usize; n];
    for e in &p.equalities {
        for &(j, _) in &e.terms {
            remaining[j] += 1;
        }
    }

    for (ei, e) in p.equalities.iter().enumerate() {
        for &(j, _) in &e.terms {
            remaining[j] -= 1;
        }
        let mut d = vec![0.0; n];
        let mut rhs = e.rhs;
        let mut scale = e.rhs.abs();
        for &(j, a) in &e.terms {
            match &exprs[j] {
                Some(ex) => {
                    for (dk, &ck) in d.iter_mut().zip(&ex.coef) {
                        *dk += a * ck;
                    }
                    rhs -= a * ex.constant;
                    let m = ex
                        .coef
                        .iter()
                        .fold(ex.constant.abs(), |m, c| m.max(c.abs()));
                    scale = scale.max(a.abs() * m);
                }
                None => {
                    d[j] += a;
                    scale = scale.max(a.abs());
                }
            }
        }
        let rowmax = d.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if rowmax <= 1e-11 * (1.0 + scale) {
            if rhs.abs() <= 1e-9 * (1.0 + scale) {
                continue;
            }
            return Presolved::Infeasible;
        }
        let mut pivot = usize::MAX;
        for j in 0..n {
            if d[j].abs() < 1e-8 * rowmax {
                continue;
            }
            let better = pivot == usize::MAX
                || remaining[j] < remaining[pivot]
                || (remaining[j] == remaining[pivot] && d[j].abs() > d[pivot].abs());
            if better {
                pivot = j;
            }
        }
        let dp = d[pivot];
        let mut coef: Vec<f64> = d.iter().map(|&x| -x / dp).collect();
        coef[pivot] = 0.0;
        let ex = Dense {
            coef,
            constant: rhs / dp,
        };
        for &q in &elim_order {
            let eq = exprs[q].as_mut().unwrap();
            let f = eq.coef[pivot];
            if f != 0.0 {
                eq.coef[pivot] = 0.0;
                for (a, b) in eq.coef.iter_mut().zip(&ex.coef) {
                    *a += f * b;
                }
                eq.constant += f * ex.constant;
            }
        }
        exprs[pivot] = Some(ex);
        elim_order.push(pivot);
        pivots.push((ei, pivot));
    }

    let mut pos = vec![usize::MAX; n];
    let mut kept = Vec::new();
    for j in 0..n {
        if exprs[j].is_none() {
            pos[j] = kept.len();
            kept.push(j);
        }
    }
    let nr = kept.len();
    let elim: Vec<(usize, Row)> = elim_order
        .iter()
        .map(|&q| {
            let ex = exprs[q].as_ref().unwrap();
            let terms = ex
                .coef
                .iter()
                .enumerate()
                .filter(|(_, c)| **c != 0.0)
                .map(|(j, &c)| (pos[j], c))
                .collect();
            (
                q,
                Row {
                    terms,
                    constant: ex.constant,
                },
            )
        })
        .collect();
    let mut elim_of = vec![usize::MAX; n];
    for (i, (q, _)) in elim.iter().enumerate() {
        elim_of[*q] = i;
    }

    let mut sub = Substituter {
        pos: &pos,
        elim: &elim,
        elim_of: &elim_of,
        acc: vec![0.0; nr],
        mark: vec![false; nr],
        touched: Vec::new(),
    };

    let obj_terms: Vec<(usize, f64)> = p
        .objective
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != 0.0)
        .map(|(j, &c)| (j, c))
        .collect();
    let obj = sub.row(&obj_terms, p.objective_offset);
    let mut c = vec![0.0; nr];
    for &(k, v) in &obj.terms {
        c[k] = v;
    }

    let mut lin_rows = Vec::new();
    let mut lin_src = Vec::new();
    for (i, &j) in p.nonneg.iter().enumerate() {
        lin_rows.push(sub.row(&[(j, 1.0)], 0.0));
        lin_src.push(LinSource::Nonneg(i));
    }
    let mut soc_blocks = Vec::new();
    for (k, s) in p.socs.iter().enumerate() {
        if s.vector.is_empty() {
            lin_rows.push(sub.expr(&s.scalar));
            lin_src.push(LinSource::Soc(k));
        } else {
            let mut rows = Vec::with_capacity(s.dim());
            rows.push(sub.expr(&s.scalar));
            for v in &s.vector {
                rows.push(sub.expr(v));
            }
            soc_blocks.push((k, rows));
        }
    }

    Presolved::Reduced(Reduced {
        n: nr,
        kept,
        elim,
        c,
        lin_rows,
        lin_src,
        soc_blocks,
        pivots,
    })
}

struct Substituter<'a> {
    pos: &'a [usize],
    elim: &'a [(usize, Row)],
    elim_of: &'a [usize],
    acc: Vec<f64>,
    mark: Vec<bool>,
    touched: Vec<usize>,
}

impl Substituter<'_> {
    fn add(&mut self, k: usize, v: f64) {
        if !self.mark[k] {
            self.mark[k] = true;
            self.touched.push(k);
        }
        self.acc[k] += v;
    }

    fn row(&mut self, terms: &[(usize, f64)], constant: f64) -> Row {
        let mut c0 = constant;
        let (pos, elim, elim_of) = (self.pos, self.elim, self.elim_of);
        for &(j, a) in terms {
            if pos[j] != usize::MAX {
                self.add(pos[j], a);
            } else {
                let row = &elim[elim_of[j]].1;
                c0 += a * row.constant;
                for &(k, b) in &row.terms {
                    self.add(k, a * b);
                }
            }
        }
        self.touched.sort_unstable();
        let mut out = Vec::with_capacity(self.touched.len());
        for &k in &self.touched {
            if self.acc[k] != 0.0 {
                out.push((k, self.acc[k]));
            }
            self.acc[k] = 0.0;
            self.mark[k] = false;
        }
        self.touched.clear();
        Row {
            terms: out,
            constant: c0,
        }
    }

    fn expr(&mut self, e: &LinExpr) -> Row {
        self.row(&e.terms, e.constant)
    }
}

impl Reduced {
    pub fn expand(&self, n_orig: usize, xi: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; n_orig];
        for (i, &j) in self.kept.iter().enumerate() {
            x[j] = xi[i];
        }
        for (q, row) in &self.elim {
            x[*q] = row.eval(xi);
        }
        x
    }

    /// Equality multipliers that make stationarity hold given the cone
    /// multipliers; redundant equalities get zero.
    pub fn equality_duals(&self, p: &ConicProgram, lambda: &[f64], soc_z: &[Vec<f64>]) -> Vec<f64> {
        let mut r = p.objective.clone();
        for (&j, &l) in p.nonneg.iter().zip(lambda) {
            r[j] -= l;
        }
        for (s, z) in p.socs.iter().zip(soc_z) {
            for (row, &zr) in core::iter::once(&s.scalar).chain(&s.vector).zip(z) {
                for &(j, a) in &row.terms {
                    r[j] -= a * zr;
                }
            }
        }
        let mut y = vec![0.0; p.equalities.len()];
        let k = self.pivots.len();
        if k == 0 {
            return y;
        }
        let mut col_of = vec![usize::MAX; p.num_vars];
        for (c, &(_, v)) in self.pivots.iter().enumerate() {
            col_of[v] = c;
        }
        // Row c of the transposed system is pivot column c.
        let mut at = DMatrix::<f64>::zeros(k, k);
        for (i, &(e, _)) in self.pivots.iter().enumerate() {
            for &(j, a) in &p.equalities[e].terms {
                if col_of[j] != usize::MAX {
                    at[(col_of[j], i)] += a;
                }
            }
        }
        let rhs = DVector::from_iterator(k, self.pivots.iter().map(|&(_, v)| r[v]));
        if let Some(sol) = at.lu().solve(&rhs) {
            for (i, &(e, _)) in self.pivots.iter().enumerate() {
                y[e] = sol[i];
            }
        }
        y
    }
}
