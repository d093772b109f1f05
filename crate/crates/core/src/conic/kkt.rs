//! Newton systems of the interior-point method, reduced to the normal
//! matrix `H = G^T W^{-2} G`.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, LU};

use super::cone::{Cones, Scaling};
use crate::math::norm_inf;

/// `G x + s = h`, `s` in the cone, with `G` stored by rows.
pub(crate) struct StdForm {
    pub n: usize,
    pub c: Vec<f64>,
    pub g: Vec<Vec<(usize, f64)>>,
    pub h: Vec<f64>,
    pub cones: Cones,
}

impl StdForm {
    /// `out = G x`.
    pub fn g_mul(&self, x: &[f64], out: &mut [f64]) {
        for (o, row) in out.iter_mut().zip(&self.g) {
            *o = row.iter().map(|&(j, a)| a * x[j]).sum();
        }
    }

    /// `out = G^T y`.
    pub fn gt_mul(&self, y: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        for (row, &yi) in self.g.iter().zip(y) {
            if yi != 0.0 {
                for &(j, a) in row {
                    out[j] += a * yi;
                }
            }
        }
    }
}

enum Factor {
    Dense(Cholesky<f64, Dyn>),
    LowRank(LowRank),
    Empty,
}

/// Block-diagonal part plus signed rank-one corrections (Woodbury).
struct LowRank {
    blocks: Vec<(Vec<usize>, Cholesky<f64, Dyn>)>,
    /// `H0^{-1} U`, one column per correction.
    h0inv_u: Vec<Vec<f64>>,
    u: Vec<Vec<(usize, f64)>>,
    cap: LU<f64, Dyn, Dyn>,
}

pub(crate) struct Kkt {
    /// Connected variable blocks of `sum G_i^T G_i`; `None` selects the dense path.
    blocks: Option<Vec<Vec<usize>>>,
    factor: Factor,
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

impl Kkt {
    pub fn new(p: &StdForm) -> Self {
        Kkt {
            blocks: Self::plan(p),
            factor: Factor::Empty,
        }
    }

    fn plan(p: &StdForm) -> Option<Vec<Vec<usize>>> {
        let n = p.n;
        let r = p.cones.soc.len();
        if n < 300 || 2 * r > n / 2 {
            return None;
        }
        let mut parent: Vec<usize> = (0..n).collect();
        for row in &p.g {
            if let Some(&(first, _)) = row.first() {
                let a = find(&mut parent, first);
                for &(j, _) in &row[1..] {
                    let b = find(&mut parent, j);
                    if a != b {
                        parent[b] = a;
                    }
                }
            }
        }
        let mut id = vec![usize::MAX; n];
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for j in 0..n {
            let root = find(&mut parent, j);
            if id[root] == usize::MAX {
                id[root] = blocks.len();
                blocks.push(Vec::new());
            }
            blocks[id[root]].push(j);
        }
        let largest = blocks.iter().map(Vec::len).max().unwrap_or(0);
        if largest * 3 > n {
            return None;
        }
        Some(blocks)
    }

    /// Factors the normal matrix for scaling `w`; false if it is numerically singular.
    pub fn factor(&mut self, p: &StdForm, w: &Scaling) -> bool {
        if p.n == 0 {
            self.factor = Factor::Empty;
            return true;
        }
        if let Some(blocks) = &self.blocks {
            if let Some(lr) = low_rank(p, w, blocks) {
                self.factor = Factor::LowRank(lr);
                return true;
            }
        }
        match dense(p, w) {
            Some(ch) => {
                self.factor = Factor::Dense(ch);
                true
            }
            None => false,
        }
    }

    fn apply_hinv(&self, b: &[f64]) -> Vec<f64> {
        match &self.factor {
            Factor::Empty => Vec::new(),
            Factor::Dense(ch) => ch.solve(&DVector::from_column_slice(b)).as_slice().to_vec(),
            Factor::LowRank(lr) => lr.solve(b),
        }
    }

    /// Solves `G^T dz = r1`, `G dx - W^2 dz = r2` through the normal
    /// equations, refined against the full system.
    pub fn solve(&self, p: &StdForm, w: &Scaling, r1: &[f64], r2: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let (n, m) = (p.n, p.cones.m);
        let (mut dx, mut dz) = self.solve_normal(p, w, r1, r2);
        let scale = 1.0 + norm_inf(r1).max(norm_inf(r2));
        let mut e1 = vec![0.0; n];
        let mut e2 = vec![0.0; m];
        let mut t = vec![0.0; m];
        let mut last = f64::INFINITY;
        for _ in 0..6 {
            p.gt_mul(&dz, &mut e1);
            for (a, b) in e1.iter_mut().zip(r1) {
                *a = b - *a;
            }
            p.g_mul(&dx, &mut e2);
            w.apply(&p.cones, &dz, &mut t);
            let mut t2 = vec![0.0; m];
            w.apply(&p.cones, &t, &mut t2);
            for i in 0..m {
                e2[i] = r2[i] - (e2[i] - t2[i]);
            }
            let err = norm_inf(&e1).max(norm_inf(&e2));
            if err <= 1e-15 * scale || !(err < 0.5 * last) {
                break;
            }
            last = err;
            let (cx, cz) = self.solve_normal(p, w, &e1, &e2);
            for (a, b) in dx.iter_mut().zip(&cx) {
                *a += b;
            }
            for (a, b) in dz.iter_mut().zip(&cz) {
                *a += b;
            }
        }
        (dx, dz)
    }

    fn solve_normal(
        &self,
        p: &StdForm,
        w: &Scaling,
        r1: &[f64],
        r2: &[f64],
    ) -> (Vec<f64>, Vec<f64>) {
        let m = p.cones.m;
        let mut t = vec![0.0; m];
        w.apply_inv2(&p.cones, r2, &mut t);
        let mut rhs = vec![0.0; p.n];
        p.gt_mul(&t, &mut rhs);
        for (a, b) in rhs.iter_mut().zip(r1) {
            *a += b;
        }
        let mut dx = self.apply_hinv(&rhs);
        let scale = 1.0 + norm_inf(&rhs);
        let mut gx = vec![0.0; m];
        let mut hx = vec![0.0; p.n];
        let mut last = f64::INFINITY;
        for _ in 0..4 {
            p.g_mul(&dx, &mut gx);
            w.apply_inv2(&p.cones, &gx, &mut t);
            p.gt_mul(&t, &mut hx);
            let res: Vec<f64> = rhs.iter().zip(&hx).map(|(a, b)| a - b).collect();
            let e = norm_inf(&res);
            if e <= 1e-14 * scale || !(e < 0.5 * last) {
                break;
            }
            last = e;
            let corr = self.apply_hinv(&res);
            for (a, b) in dx.iter_mut().zip(&corr) {
                *a += b;
            }
        }
        p.g_mul(&dx, &mut gx);
        for (a, b) in gx.iter_mut().zip(r2) {
            *a -= b;
        }
        let mut dz = vec![0.0; m];
        w.apply_inv2(&p.cones, &gx, &mut dz);
        (dx, dz)
    }
}

/// Per-row weights of the normal matrix: linear rows get `1 / w_i^2`; cone
/// rows get `eta^{-2}` times a sign (`-1` on the scalar row) plus the
/// `2 eta^{-2} q q^T` term built from `a = J wbar`.
fn cone_terms(p: &StdForm, w: &Scaling, k: usize) -> (f64, Vec<f64>) {
    let (st, d) = p.cones.soc[k];
    let sc = &w.soc[k];
    let inv = 1.0 / (sc.eta * sc.eta);
    let mut q = vec![0.0; p.n];
    for i in 0..d {
        let a = if i == 0 { sc.wbar[0] } else { -sc.wbar[i] };
        if a != 0.0 {
            for &(j, g) in &p.g[st + i] {
                q[j] += a * g;
            }
        }
    }
    (inv, q)
}

fn regularized_cholesky(mut h: DMatrix<f64>) -> Option<Cholesky<f64, Dyn>> {
    let n = h.nrows();
    let maxdiag = (0..n).fold(0.0f64, |m, i| m.max(h[(i, i)].abs()));
    let mut delta = 1e-14 * (1.0 + maxdiag);
    for i in 0..n {
        h[(i, i)] += delta;
    }
    for _ in 0..6 {
        if let Some(ch) = Cholesky::new(h.clone()) {
            return Some(ch);
        }
        let bump = delta * 99.0;
        for i in 0..n {
            h[(i, i)] += bump;
        }
        delta *= 100.0;
    }
    None
}

/// Dense normal matrix `(W^{-1} G)^T (W^{-1} G)`, accumulated row by row of
/// `W^{-1} G` so that every contribution is a square.
fn dense(p: &StdForm, w: &Scaling) -> Option<Cholesky<f64, Dyn>> {
    let n = p.n;
    let mut h = DMatrix::<f64>::zeros(n, n);
    for i in 0..p.cones.l {
        let wi = 1.0 / w.lin[i];
        for &(a, x) in &p.g[i] {
            for &(b, y) in &p.g[i] {
                h[(a, b)] += wi * wi * x * y;
            }
        }
    }
    let mut pos = vec![usize::MAX; n];
    let mut sup: Vec<usize> = Vec::new();
    let mut c: Vec<f64> = Vec::new();
    let mut row: Vec<f64> = Vec::new();
    let mut acc: Vec<f64> = Vec::new();
    for k in 0..p.cones.soc.len() {
        let (st, d) = p.cones.soc[k];
        let sc = &w.soc[k];
        let wb = &sc.wbar;
        sup.clear();
        for i in 0..d {
            for &(j, _) in &p.g[st + i] {
                if pos[j] == usize::MAX {
                    pos[j] = 0;
                    sup.push(j);
                }
            }
        }
        sup.sort_unstable();
        for (l, &j) in sup.iter().enumerate() {
            pos[j] = l;
        }
        let s = sup.len();
        // Rows of the inverse boost applied to G: row 0 is w0 g0 - u and
        // row i is g_i + w_i c, with u = sum_{i>=1} w_i g_i and
        // c = u / (1 + w0) - g0.
        c.clear();
        c.resize(s, 0.0);
        for i in 0..d {
            let coef = if i == 0 { -1.0 } else { wb[i] / (1.0 + wb[0]) };
            if coef != 0.0 {
                for &(j, g) in &p.g[st + i] {
                    c[pos[j]] += coef * g;
                }
            }
        }
        acc.clear();
        acc.resize(s * s, 0.0);
        let inv = 1.0 / sc.eta;
        for i in 0..d {
            let (cc, gc) = if i == 0 {
                (-(1.0 + wb[0]), -1.0)
            } else {
                (wb[i], 1.0)
            };
            row.clear();
            row.extend(c.iter().map(|&x| cc * x));
            for &(j, g) in &p.g[st + i] {
                row[pos[j]] += gc * g;
            }
            row.iter_mut().for_each(|x| *x *= inv);
            // Lower triangle of the compact block, column-major.
            for b in 0..s {
                let yb = row[b];
                if yb != 0.0 {
                    for (x, &ra) in acc[b * s + b..(b + 1) * s].iter_mut().zip(&row[b..]) {
                        *x += yb * ra;
                    }
                }
            }
        }
        for b in 0..s {
            let jb = sup[b];
            for a in b..s {
                let v = acc[b * s + a];
                let ja = sup[a];
                h[(ja, jb)] += v;
                if a != b {
                    h[(jb, ja)] += v;
                }
            }
        }
        for &j in &sup {
            pos[j] = usize::MAX;
        }
    }
    regularized_cholesky(h)
}

fn low_rank(p: &StdForm, w: &Scaling, blocks: &[Vec<usize>]) -> Option<LowRank> {
    let n = p.n;
    let mut which = vec![(0usize, 0usize); n];
    let mut mats: Vec<DMatrix<f64>> = Vec::with_capacity(blocks.len());
    for (b, idx) in blocks.iter().enumerate() {
        for (l, &j) in idx.iter().enumerate() {
            which[j] = (b, l);
        }
        mats.push(DMatrix::zeros(idx.len(), idx.len()));
    }
    let mut add = |row: &[(usize, f64)], wgt: f64| {
        if let Some(&(first, _)) = row.first() {
            let m = &mut mats[which[first].0];
            for &(i, a) in row {
                let li = which[i].1;
                for &(j, b) in row {
                    m[(li, which[j].1)] += wgt * a * b;
                }
            }
        }
    };
    for i in 0..p.cones.l {
        let wi = w.lin[i];
        add(&p.g[i], 1.0 / (wi * wi));
    }
    let mut u: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut signs: Vec<f64> = Vec::new();
    for k in 0..p.cones.soc.len() {
        let (st, d) = p.cones.soc[k];
        let (inv, q) = cone_terms(p, w, k);
        for i in 0..d {
            add(&p.g[st + i], inv);
        }
        let f = crate::math::sqrt(2.0 * inv);
        if !p.g[st].is_empty() {
            u.push(p.g[st].iter().map(|&(j, a)| (j, f * a)).collect());
            signs.push(-1.0);
        }
        let qs: Vec<(usize, f64)> = q
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(j, &v)| (j, f * v))
            .collect();
        if !qs.is_empty() {
            u.push(qs);
            signs.push(1.0);
        }
    }
    let mut factored = Vec::with_capacity(blocks.len());
    for (idx, m) in blocks.iter().zip(mats) {
        factored.push((idx.clone(), regularized_cholesky(m)?));
    }
    let mut lr = LowRank {
        blocks: factored,
        h0inv_u: Vec::new(),
        u,
        cap: DMatrix::<f64>::zeros(0, 0).lu(),
    };
    let r = lr.u.len();
    let mut h0inv_u = Vec::with_capacity(r);
    for col in &lr.u {
        let mut dense = vec![0.0; n];
        for &(j, v) in col {
            dense[j] = v;
        }
        h0inv_u.push(lr.h0_solve(&dense));
    }
    let mut cap = DMatrix::<f64>::zeros(r, r);
    for a in 0..r {
        cap[(a, a)] = signs[a];
        for b in 0..r {
            cap[(a, b)] += lr.u[a].iter().map(|&(j, v)| v * h0inv_u[b][j]).sum::<f64>();
        }
    }
    lr.h0inv_u = h0inv_u;
    lr.cap = cap.lu();
    if r > 0 && lr.cap.determinant() == 0.0 {
        return None;
    }
    Some(lr)
}

impl LowRank {
    fn h0_solve(&self, b: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; b.len()];
        for (idx, ch) in &self.blocks {
            let rhs = DVector::from_iterator(idx.len(), idx.iter().map(|&j| b[j]));
            let sol = ch.solve(&rhs);
            for (l, &j) in idx.iter().enumerate() {
                out[j] = sol[l];
            }
        }
        out
    }

    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = self.h0_solve(b);
        let r = self.u.len();
        if r == 0 {
            return x;
        }
        let ut = DVector::from_iterator(
            r,
            self.u
                .iter()
                .map(|col| col.iter().map(|&(j, v)| v * x[j]).sum::<f64>()),
        );
        let y = match self.cap.solve(&ut) {
            Some(y) => y,
            None => return x,
        };
        for (a, col) in self.h0inv_u.iter().enumerate() {
            let ya = y[a];
            for (xi, ci) in x.iter_mut().zip(col) {
                *xi -= ya * ci;
            }
        }
        x
    }
}
