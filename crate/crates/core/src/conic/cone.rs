//! Jordan-algebra operations on products of nonnegative orthants and
//! second-order cones, and Nesterov-Todd scaling.

use alloc::vec;
use alloc::vec::Vec;

use crate::math::{self, norm2};

/// `l` linear rows followed by second-order cones given as (start, dim).
#[derive(Debug, Clone)]
pub(crate) struct Cones {
    pub l: usize,
    pub soc: Vec<(usize, usize)>,
    pub m: usize,
}

impl Cones {
    pub fn new(l: usize, dims: &[usize]) -> Self {
        let mut soc = Vec::with_capacity(dims.len());
        let mut start = l;
        for &d in dims {
            soc.push((start, d));
            start += d;
        }
        Cones { l, soc, m: start }
    }

    pub fn degree(&self) -> usize {
        self.l + self.soc.len()
    }

    pub fn identity(&self) -> Vec<f64> {
        let mut e = vec![0.0; self.m];
        e[..self.l].iter_mut().for_each(|v| *v = 1.0);
        for &(st, _) in &self.soc {
            e[st] = 1.0;
        }
        e
    }

    /// Smallest "eigenvalue" over all blocks; positive iff `v` is interior.
    pub fn min_eig(&self, v: &[f64]) -> f64 {
        let mut m = f64::INFINITY;
        for &x in &v[..self.l] {
            m = m.min(x);
        }
        for &(st, d) in &self.soc {
            m = m.min(v[st] - norm2(&v[st + 1..st + d]));
        }
        m
    }

    /// Pushes `v` strictly inside the cone by adding a multiple of the identity.
    pub fn shift_inside(&self, v: &mut [f64]) {
        let alpha = -self.min_eig(v);
        if alpha >= 0.0 || !alpha.is_finite() {
            let a = if alpha.is_finite() { 1.0 + alpha } else { 1.0 };
            v[..self.l].iter_mut().for_each(|x| *x += a);
            for &(st, _) in &self.soc {
                v[st] += a;
            }
        }
    }

    /// Largest `a >= 0` keeping `x + a d` in the cone (`x` interior).
    pub fn max_step(&self, x: &[f64], d: &[f64]) -> f64 {
        let mut a = f64::INFINITY;
        for i in 0..self.l {
            if d[i] < 0.0 {
                a = a.min(-x[i] / d[i]);
            }
        }
        for &(st, dim) in &self.soc {
            a = a.min(soc_max_step(&x[st..st + dim], &d[st..st + dim]));
        }
        a
    }

    /// `u o v`.
    pub fn jordan_prod(&self, u: &[f64], v: &[f64], out: &mut [f64]) {
        for i in 0..self.l {
            out[i] = u[i] * v[i];
        }
        for &(st, d) in &self.soc {
            let (u, v) = (&u[st..st + d], &v[st..st + d]);
            out[st] = math::dot(u, v);
            for i in 1..d {
                out[st + i] = u[0] * v[i] + v[0] * u[i];
            }
        }
    }

    /// Solves `lam o out = d` for `out`.
    pub fn jordan_div(&self, lam: &[f64], d: &[f64], out: &mut [f64]) {
        for i in 0..self.l {
            out[i] = d[i] / lam[i];
        }
        for &(st, dim) in &self.soc {
            let (l, dd) = (&lam[st..st + dim], &d[st..st + dim]);
            let det = soc_det(l);
            let u0 = (l[0] * dd[0] - math::dot(&l[1..], &dd[1..])) / det;
            out[st] = u0;
            for i in 1..dim {
                out[st + i] = (dd[i] - u0 * l[i]) / l[0];
            }
        }
    }
}

/// `x0^2 - ||x1||^2`, factored to limit cancellation.
pub(crate) fn soc_det(x: &[f64]) -> f64 {
    let r = norm2(&x[1..]);
    (x[0] - r) * (x[0] + r)
}

fn soc_max_step(x: &[f64], d: &[f64]) -> f64 {
    let det = soc_det(x);
    if !(det > 0.0) || x[0] <= 0.0 {
        return 0.0;
    }
    let nu = math::sqrt(det);
    let xb: Vec<f64> = x.iter().map(|v| v / nu).collect();
    let db: Vec<f64> = d.iter().map(|v| v / nu).collect();
    let rho0 = xb[0] * db[0] - math::dot(&xb[1..], &db[1..]);
    let f = (rho0 + db[0]) / (xb[0] + 1.0);
    let rho1: Vec<f64> = (1..x.len()).map(|i| db[i] - f * xb[i]).collect();
    let t = norm2(&rho1) - rho0;
    if t > 0.0 {
        1.0 / t
    } else {
        f64::INFINITY
    }
}

#[derive(Debug, Clone)]
pub(crate) struct SocScale {
    pub eta: f64,
    /// Unit-determinant scaling point.
    pub wbar: Vec<f64>,
}

/// Nesterov-Todd scaling `W` with `W z = W^{-1} s = lambda`.
#[derive(Debug, Clone)]
pub(crate) struct Scaling {
    pub lin: Vec<f64>,
    pub soc: Vec<SocScale>,
    pub lambda: Vec<f64>,
}

/// Applies the hyperbolic rotation with unit-determinant point `w`
/// (`L(w) e = w`), or its inverse when `inverse` is set.
fn boost(w: &[f64], x: &[f64], out: &mut [f64], inverse: bool) {
    let sgn = if inverse { -1.0 } else { 1.0 };
    let w1x1 = sgn * math::dot(&w[1..], &x[1..]);
    out[0] = w[0] * x[0] + w1x1;
    let f = x[0] + w1x1 / (1.0 + w[0]);
    for i in 1..w.len() {
        out[i] = x[i] + sgn * f * w[i];
    }
}

impl Scaling {
    pub fn identity(c: &Cones, z: &[f64]) -> Self {
        Scaling {
            lin: vec![1.0; c.l],
            soc: c
                .soc
                .iter()
                .map(|&(_, d)| {
                    let mut wbar = vec![0.0; d];
                    wbar[0] = 1.0;
                    SocScale { eta: 1.0, wbar }
                })
                .collect(),
            lambda: z.to_vec(),
        }
    }

    /// `None` when either point has left the cone interior.
    pub fn nesterov_todd(c: &Cones, s: &[f64], z: &[f64]) -> Option<Self> {
        let mut lin = Vec::with_capacity(c.l);
        let mut lambda = vec![0.0; c.m];
        for i in 0..c.l {
            if !(s[i] > 0.0 && z[i] > 0.0) {
                return None;
            }
            lin.push(math::sqrt(s[i] / z[i]));
            lambda[i] = math::sqrt(s[i] * z[i]);
        }
        let mut soc = Vec::with_capacity(c.soc.len());
        for &(st, d) in &c.soc {
            let (sv, zv) = (&s[st..st + d], &z[st..st + d]);
            let (sd, zd) = (soc_det(sv), soc_det(zv));
            if !(sd > 0.0 && zd > 0.0 && sv[0] > 0.0 && zv[0] > 0.0) {
                return None;
            }
            let (sn, zn) = (math::sqrt(sd), math::sqrt(zd));
            let sb: Vec<f64> = sv.iter().map(|v| v / sn).collect();
            let zb: Vec<f64> = zv.iter().map(|v| v / zn).collect();
            let gamma = math::sqrt((1.0 + math::dot(&sb, &zb)) / 2.0);
            let mut wbar: Vec<f64> = (0..d)
                .map(|i| {
                    let jz = if i == 0 { zb[0] } else { -zb[i] };
                    (sb[i] + jz) / (2.0 * gamma)
                })
                .collect();
            // Re-normalize so rounding does not drift the determinant from one.
            let wd = soc_det(&wbar);
            if wd > 0.0 {
                let r = math::sqrt(wd);
                wbar.iter_mut().for_each(|v| *v /= r);
            }
            let eta = math::sqrt(sn / zn);
            boost(&wbar, zv, &mut lambda[st..st + d], false);
            lambda[st..st + d].iter_mut().for_each(|v| *v *= eta);
            soc.push(SocScale { eta, wbar });
        }
        Some(Scaling { lin, soc, lambda })
    }

    /// `out = W x`.
    pub fn apply(&self, c: &Cones, x: &[f64], out: &mut [f64]) {
        for i in 0..c.l {
            out[i] = self.lin[i] * x[i];
        }
        for (sc, &(st, d)) in self.soc.iter().zip(&c.soc) {
            boost(&sc.wbar, &x[st..st + d], &mut out[st..st + d], false);
            out[st..st + d].iter_mut().for_each(|v| *v *= sc.eta);
        }
    }

    /// `out = W^{-1} x`.
    pub fn apply_inv(&self, c: &Cones, x: &[f64], out: &mut [f64]) {
        for i in 0..c.l {
            out[i] = x[i] / self.lin[i];
        }
        for (sc, &(st, d)) in self.soc.iter().zip(&c.soc) {
            boost(&sc.wbar, &x[st..st + d], &mut out[st..st + d], true);
            out[st..st + d].iter_mut().for_each(|v| *v /= sc.eta);
        }
    }

    /// `out = W^{-2} x`.
    pub fn apply_inv2(&self, c: &Cones, x: &[f64], out: &mut [f64]) {
        let mut tmp = vec![0.0; c.m];
        self.apply_inv(c, x, &mut tmp);
        self.apply_inv(c, &tmp, out);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nt_scaling_maps_z_and_s_to_same_point() {
        let c = Cones::new(1, &[3, 4]);
        let s = [2.0, 3.0, 1.0, -0.5, 5.0, 1.0, 2.0, -3.0];
        let z = [0.5, 1.0, 0.2, 0.3, 2.0, -1.0, 0.5, 0.7];
        let w = Scaling::nesterov_todd(&c, &s, &z).unwrap();
        let mut wz = vec![0.0; 8];
        let mut wis = vec![0.0; 8];
        w.apply(&c, &z, &mut wz);
        w.apply_inv(&c, &s, &mut wis);
        for i in 0..8 {
            assert!((wz[i] - wis[i]).abs() < 1e-12, "{wz:?} vs {wis:?}");
            assert!((wz[i] - w.lambda[i]).abs() < 1e-12);
        }
        let mut back = vec![0.0; 8];
        w.apply(&c, &wis, &mut back);
        for i in 0..8 {
            assert!((back[i] - s[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn step_to_boundary() {
        let c = Cones::new(1, &[3]);
        let x = [1.0, 1.0, 0.0, 0.0];
        let d = [-1.0, 0.0, 1.0, 0.0];
        let a = c.max_step(&x, &d);
        // Linear row hits zero at a = 1; cone needs 1 >= |a| so also 1.
        assert!((a - 1.0).abs() < 1e-12);
        let d = [0.0, -1.0, 0.0, 2.0];
        let a = c.max_step(&x, &d);
        // 1 - a = 2a -> a = 1/3
        assert!((a - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn jordan_division_inverts_product() {
        let c = Cones::new(2, &[3]);
        let lam = [1.5, 0.3, 2.0, 0.5, -0.7];
        let u = [0.2, -1.0, 0.3, 1.1, 0.4];
        let mut p = vec![0.0; 5];
        let mut back = vec![0.0; 5];
        c.jordan_prod(&lam, &u, &mut p);
        c.jordan_div(&lam, &p, &mut back);
        for i in 0..5 {
            assert!((back[i] - u[i]).abs() < 1e-12);
        }
    }
}
