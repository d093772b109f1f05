//! Homogeneous self-dual embedding with Mehrotra predictor-corrector steps
//! and Nesterov-Todd scaling.

use alloc::vec;
use alloc::vec::Vec;

use super::cone::Scaling;
use super::kkt::{Kkt, StdForm};
use super::Status;
use crate::math::{dot, norm_inf};

const STEP_FRACTION: f64 = 0.99;

pub(crate) struct IpmOutput {
    pub status: Status,
    pub x: Vec<f64>,
    pub z: Vec<f64>,
    pub iterations: usize,
}

struct Iterate {
    x: Vec<f64>,
    s: Vec<f64>,
    z: Vec<f64>,
    tau: f64,
    kappa: f64,
}

impl Iterate {
    fn normalized(&self) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let t = self.tau;
        (
            self.x.iter().map(|v| v / t).collect(),
            self.s.iter().map(|v| v / t).collect(),
            self.z.iter().map(|v| v / t).collect(),
        )
    }
}

fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

/// Solves the standard-form program. `accept` gets the de-homogenized
/// `(x, s, z)` whenever the internal stopping test passes and may veto it.
pub(crate) fn solve(
    p: &StdForm,
    tol: f64,
    max_iter: usize,
    accept: &mut dyn FnMut(&[f64], &[f64], &[f64]) -> bool,
) -> IpmOutput {
    let (n, m) = (p.n, p.cones.m);
    let cones = &p.cones;
    let mut kkt = Kkt::new(p);
    let hnorm = norm_inf(&p.h);
    let cnorm = norm_inf(&p.c);

    // Starting point from two least-squares problems with W = I.
    let ident = Scaling::identity(cones, &vec![1.0; m]);
    if !kkt.factor(p, &ident) {
        return IpmOutput {
            status: Status::MaxIter,
            x: vec![0.0; n],
            z: cones.identity(),
            iterations: 0,
        };
    }
    let (x0, zp) = kkt.solve(p, &ident, &vec![0.0; n], &p.h);
    let mut s0: Vec<f64> = zp.iter().map(|v| -v).collect();
    cones.shift_inside(&mut s0);
    let mc: Vec<f64> = p.c.iter().map(|v| -v).collect();
    let (_, mut z0) = kkt.solve(p, &ident, &mc, &vec![0.0; m]);
    cones.shift_inside(&mut z0);
    let mut it = Iterate {
        x: x0,
        s: s0,
        z: z0,
        tau: 1.0,
        kappa: 1.0,
    };

    let deg = cones.degree() as f64;
    let mut best: Option<(f64, Iterate)> = None;
    let mut rx = vec![0.0; n];
    let mut rz = vec![0.0; m];
    let mut tmp_m = vec![0.0; m];
    let mut tmp_m2 = vec![0.0; m];

    let mut done = 0;
    for iter in 0..max_iter {
        done = iter + 1;
        // Residuals of the embedding.
        p.gt_mul(&it.z, &mut rx);
        let gtz_norm = norm_inf(&rx);
        axpy(it.tau, &p.c, &mut rx);
        p.g_mul(&it.x, &mut rz);
        for i in 0..m {
            rz[i] += it.s[i];
        }
        let gxs_norm = norm_inf(&rz);
        axpy(-it.tau, &p.h, &mut rz);
        let cx = dot(&p.c, &it.x);
        let hz = dot(&p.h, &it.z);
        let rt = it.kappa + cx + hz;

        let pres = norm_inf(&rz) / it.tau / (1.0 + hnorm);
        let dres = norm_inf(&rx) / it.tau / (1.0 + cnorm);
        let pcost = cx / it.tau;
        let dcost = -hz / it.tau;
        let sz = dot(&it.s, &it.z);
        let gap = (sz / (it.tau * it.tau)).abs().max((pcost - dcost).abs()) / (1.0 + pcost.abs());
        let merit = pres.max(dres).max(gap);
        if !merit.is_finite() {
            break;
        }

        if pres <= tol && dres <= tol && gap <= tol {
            let (x, s, z) = it.normalized();
            if accept(&x, &s, &z) {
                return IpmOutput {
                    status: Status::Optimal,
                    x,
                    z,
                    iterations: iter,
                };
            }
        }
        if it.tau < it.kappa {
            // Certificates are judged on the direction itself, so they do
            // not depend on how large the iterate has grown.
            let zn = norm_inf(&it.z);
            if hz < 0.0 && gtz_norm <= tol * -hz && gtz_norm <= tol * zn {
                let scale = -1.0 / hz;
                return IpmOutput {
                    status: Status::Infeasible,
                    x: vec![0.0; n],
                    z: it.z.iter().map(|v| v * scale).collect(),
                    iterations: iter,
                };
            }
            let xn = norm_inf(&it.x).max(norm_inf(&it.s));
            if cx < 0.0 && gxs_norm <= tol * -cx && gxs_norm <= tol * xn {
                let scale = -1.0 / cx;
                return IpmOutput {
                    status: Status::Unbounded,
                    x: it.x.iter().map(|v| v * scale).collect(),
                    z: vec![0.0; m],
                    iterations: iter,
                };
            }
        }
        if best.as_ref().map_or(true, |(b, _)| merit < *b) {
            best = Some((
                merit,
                Iterate {
                    x: it.x.clone(),
                    s: it.s.clone(),
                    z: it.z.clone(),
                    tau: it.tau,
                    kappa: it.kappa,
                },
            ));
        }

        let w = match Scaling::nesterov_todd(cones, &it.s, &it.z) {
            Some(w) => w,
            None => break,
        };
        if !kkt.factor(p, &w) {
            break;
        }
        let lam = &w.lambda;
        let (x1, z1) = kkt.solve(p, &w, &mc, &p.h);
        let denom = dot(&p.c, &x1) + dot(&p.h, &z1) - it.kappa / it.tau;

        // Solves one Newton system given `ds_over_lam = lambda \ d_s`.
        let direction = |eta: f64, ds_over_lam: &[f64], dtau_rhs: f64, tmp: &mut Vec<f64>| {
            let r1: Vec<f64> = rx.iter().map(|v| -eta * v).collect();
            w.apply(cones, ds_over_lam, tmp);
            let r2: Vec<f64> = rz
                .iter()
                .zip(tmp.iter())
                .map(|(r, t)| -eta * r + t)
                .collect();
            let (x2, z2) = kkt.solve(p, &w, &r1, &r2);
            let dtau = (-eta * rt + dtau_rhs / it.tau - dot(&p.c, &x2) - dot(&p.h, &z2)) / denom;
            let mut dx = x2;
            axpy(dtau, &x1, &mut dx);
            let mut dz = z2;
            axpy(dtau, &z1, &mut dz);
            // W^{-1} ds = -(lambda \ d_s) - W dz
            let mut wdz = vec![0.0; m];
            w.apply(cones, &dz, &mut wdz);
            let ds_scaled: Vec<f64> = ds_over_lam.iter().zip(&wdz).map(|(a, b)| -a - b).collect();
            let mut ds = vec![0.0; m];
            w.apply(cones, &ds_scaled, &mut ds);
            let dkappa = (-dtau_rhs - it.kappa * dtau) / it.tau;
            (dx, dz, ds, dtau, dkappa, ds_scaled, wdz)
        };
        let max_step = |dz: &[f64], ds: &[f64], dtau: f64, dkappa: f64| {
            let mut a = cones.max_step(&it.s, ds).min(cones.max_step(&it.z, dz));
            if dtau < 0.0 {
                a = a.min(-it.tau / dtau);
            }
            if dkappa < 0.0 {
                a = a.min(-it.kappa / dkappa);
            }
            a
        };

        // Predictor.
        let mu = (dot(&it.s, &it.z) + it.tau * it.kappa) / (deg + 1.0);
        let (_, dz_a, ds_a, dtau_a, dkappa_a, ds_sc_a, wdz_a) =
            direction(1.0, lam, it.tau * it.kappa, &mut tmp_m);
        let alpha_aff = max_step(&dz_a, &ds_a, dtau_a, dkappa_a).min(1.0);
        let sigma = (1.0 - alpha_aff) * (1.0 - alpha_aff) * (1.0 - alpha_aff);

        // Corrector.
        let mut ds_comb = vec![0.0; m];
        cones.jordan_prod(lam, lam, &mut ds_comb);
        cones.jordan_prod(&ds_sc_a, &wdz_a, &mut tmp_m2);
        let e = cones.identity();
        for i in 0..m {
            ds_comb[i] += tmp_m2[i] - sigma * mu * e[i];
        }
        let mut ds_over_lam = vec![0.0; m];
        cones.jordan_div(lam, &ds_comb, &mut ds_over_lam);
        let dtau_rhs = it.tau * it.kappa + dtau_a * dkappa_a - sigma * mu;
        let (dx, dz, ds, dtau, dkappa, _, _) =
            direction(1.0 - sigma, &ds_over_lam, dtau_rhs, &mut tmp_m);
        let alpha = (STEP_FRACTION * max_step(&dz, &ds, dtau, dkappa)).min(1.0);
        if !(alpha > 1e-12) {
            break;
        }
        axpy(alpha, &dx, &mut it.x);
        axpy(alpha, &ds, &mut it.s);
        axpy(alpha, &dz, &mut it.z);
        it.tau += alpha * dtau;
        it.kappa += alpha * dkappa;
    }

    let fallback = best.map(|(_, b)| b).unwrap_or(it);
    let (x, _, z) = fallback.normalized();
    IpmOutput {
        status: Status::MaxIter,
        x,
        z,
        iterations: done,
    }
}
