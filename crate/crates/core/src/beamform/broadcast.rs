//! Per-user broadcast beamforming: one beam per user, all beams sent at
//! once. With each own-channel gain rotated to be real and nonnegative the
//! SINR constraint becomes a second-order cone, so one conic solve suffices.

use alloc::vec::Vec;

use num_complex::Complex64;

use super::{inner, BeamVariant, BeamformerSet};
use crate::config::SystemConfig;
use crate::conic::{self, ConicProgram, ConicSolution, KktResiduals, LinExpr, Status};
use crate::error::{mismatch, Result};
use crate::math;
use crate::radio::ChannelSet;
use crate::units::SinrTarget;

use super::sca::DESIGN_MARGIN;

#[derive(Debug, Clone, PartialEq)]
pub struct BroadcastOutcome {
    pub beams: BeamformerSet,
    /// Amplitude slack per user: how far `sqrt(SINR / target)` falls short,
    /// in units of the normalized interference-plus-noise amplitude.
    pub t: Vec<f64>,
    pub status: Status,
    pub residuals: Option<KktResiduals>,
    /// False when the solver did not return an optimal point; the beams are
    /// then all zero.
    pub solved: bool,
}

fn re_im(h: &[Complex64], m: usize, k: usize, imag: bool) -> LinExpr {
    let base = 2 * m * k;
    let mut e = LinExpr::zero();
    for (i, z) in h.iter().enumerate() {
        if imag {
            e.terms.push((base + i, z.im));
            e.terms.push((base + m + i, z.re));
        } else {
            e.terms.push((base + i, z.re));
            e.terms.push((base + m + i, -z.im));
        }
    }
    e
}

/// Normalized per-user beams minimizing the sum of amplitude slacks for
/// unicast to every row of `hbar` (`hbar_k = h_k sqrt(P_BS / I_k)`), under
/// `||v|| <= 1`. `None` when the solver does not reach optimality.
pub(crate) fn min_slack_unicast(
    hbar: &[Vec<Complex64>],
    targets: &[f64],
    m: usize,
    tol: f64,
    max_iter: usize,
) -> Result<(Option<Vec<Vec<Complex64>>>, ConicSolution)> {
    let k = hbar.len();
    let t0 = 2 * m * k;
    let mut p = ConicProgram::new(t0 + k);
    for u in 0..k {
        p.objective[t0 + u] = 1.0;
        p.add_nonneg(t0 + u);
    }
    let power = (0..2 * m * k).map(LinExpr::var).collect();
    p.add_soc(LinExpr::constant(1.0), power, "power");
    for u in 0..k {
        let g = targets[u];
        if g == 0.0 {
            continue;
        }
        p.add_equality(re_im(&hbar[u], m, u, true).terms, 0.0, "own gain is real");
        let scale = 1.0 / math::sqrt(g * (1.0 + DESIGN_MARGIN));
        let scalar = re_im(&hbar[u], m, u, false).scaled(scale).add(t0 + u, 1.0);
        let mut vector = Vec::with_capacity(2 * k - 1);
        for j in 0..k {
            if j != u {
                vector.push(re_im(&hbar[u], m, j, false));
                vector.push(re_im(&hbar[u], m, j, true));
            }
        }
        vector.push(LinExpr::constant(1.0));
        p.add_soc(scalar, vector, "sinr");
    }
    let sol = conic::solve(&p, tol, max_iter)?;
    if !sol.status.is_solved() {
        return Ok((None, sol));
    }
    let mut v: Vec<Vec<Complex64>> = (0..k)
        .map(|u| {
            (0..m)
                .map(|i| Complex64::new(sol.x[2 * m * u + i], sol.x[2 * m * u + m + i]))
                .collect()
        })
        .collect();
    let norm = math::sqrt(v.iter().flatten().map(|z| z.norm_sqr()).sum());
    if norm > 1.0 {
        v.iter_mut().flatten().for_each(|z| *z /= norm);
    }
    Ok((Some(v), sol))
}

/// Minimizes the sum of amplitude slacks subject to the per-user broadcast
/// SINR cones and the BS power budget.
pub fn solve_broadcast(
    ch: &ChannelSet,
    targets: &[SinrTarget],
    cfg: &SystemConfig,
) -> Result<BroadcastOutcome> {
    let k = ch.num_users();
    if targets.len() != k {
        return Err(mismatch("one broadcast target per user expected"));
    }
    let m = cfg.num_antennas;
    let p_bs = cfg.bs_power_w();
    let hbar: Vec<Vec<Complex64>> = ch
        .downlink
        .iter()
        .zip(&ch.interference_phase1)
        .map(|(h, &i)| {
            let s = math::sqrt(p_bs / i);
            h.iter().map(|z| z * s).collect()
        })
        .collect();
    let gammas: Vec<f64> = targets.iter().map(|t| t.linear()).collect();
    let (v, sol) = min_slack_unicast(
        &hbar,
        &gammas,
        m,
        cfg.sca.solver_tol,
        cfg.sca.solver_max_iter,
    )?;
    let Some(v) = v else {
        return Ok(BroadcastOutcome {
            beams: BeamformerSet::zeros(BeamVariant::PerUser, k, m),
            t: alloc::vec![0.0; k],
            status: sol.status,
            residuals: None,
            solved: false,
        });
    };
    let t = (0..k)
        .map(|u| {
            let g = gammas[u];
            if g == 0.0 {
                return 0.0;
            }
            let intf: f64 = (0..k)
                .filter(|&j| j != u)
                .map(|j| inner(&hbar[u], &v[j]).norm_sqr())
                .sum();
            let own = inner(&hbar[u], &v[u]).norm() / math::sqrt(g * (1.0 + DESIGN_MARGIN));
            let gap = math::sqrt(1.0 + intf) - own;
            if gap <= 1e-7 * math::sqrt(1.0 + intf) {
                0.0
            } else {
                gap
            }
        })
        .collect();
    let s = math::sqrt(p_bs);
    Ok(BroadcastOutcome {
        beams: BeamformerSet::new(
            BeamVariant::PerUser,
            v.iter()
                .map(|b| b.iter().map(|z| z * s).collect())
                .collect(),
        ),
        t,
        status: sol.status,
        residuals: Some(sol.residuals),
        solved: true,
    })
}
