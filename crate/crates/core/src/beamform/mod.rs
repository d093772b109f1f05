//! Beamformer design: the leader-selection successive convex approximation
//! (multi-group and single-beam) and the broadcast benchmark.

mod broadcast;
mod sca;

use alloc::vec::Vec;
use core::ops::Range;

use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::math;

pub use broadcast::{solve_broadcast, BroadcastOutcome};
pub use sca::{
    build_subproblem, run_sca, run_sca_single_beam, ObjectiveMode, ScaOutcome, ScaProblem,
    ScaState, ScaTrace, SubproblemLayout, DESIGN_MARGIN,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BeamVariant {
    /// One beam per multicast group.
    PerGroup,
    /// One beam for the whole cell.
    Single,
    /// One beam per user.
    PerUser,
}

/// Transmit beams in linear amplitude units (sqrt(W)).
#[derive(Debug, Clone, PartialEq)]
pub struct BeamformerSet {
    pub variant: BeamVariant,
    pub beams: Vec<Vec<Complex64>>,
    pub total_power: f64,
}

impl BeamformerSet {
    pub fn new(variant: BeamVariant, beams: Vec<Vec<Complex64>>) -> Self {
        let total_power = beams.iter().flatten().map(|z| z.norm_sqr()).sum();
        BeamformerSet {
            variant,
            beams,
            total_power,
        }
    }

    /// All-zero beams of the given shape.
    pub fn zeros(variant: BeamVariant, count: usize, antennas: usize) -> Self {
        BeamformerSet::new(
            variant,
            (0..count)
                .map(|_| alloc::vec![Complex64::new(0.0, 0.0); antennas])
                .collect(),
        )
    }
}

/// `h^T w` without conjugation.
pub fn inner(h: &[Complex64], w: &[Complex64]) -> Complex64 {
    h.iter().zip(w).map(|(a, b)| a * b).sum()
}

fn geometric_mean(t: &[f64]) -> f64 {
    if t.iter().any(|&x| x == 0.0) {
        return 0.0;
    }
    let mean_log = t.iter().map(|&x| math::ln(x)).sum::<f64>() / t.len() as f64;
    math::exp(mean_log)
}

/// `sum_n beta_n * (prod_k t_{k,n})^{1/K_n}`.
pub fn penalty(t: &[f64], groups: &[Range<usize>], beta: &[f64]) -> Result<f64> {
    if t.iter().any(|&x| !(x >= 0.0)) {
        return Err(invalid("slacks must be nonnegative"));
    }
    if groups.len() != beta.len() {
        return Err(crate::error::mismatch(
            "one penalty weight per group expected",
        ));
    }
    Ok(groups
        .iter()
        .zip(beta)
        .map(|(g, &b)| b * geometric_mean(&t[g.clone()]))
        .sum())
}

/// First-order expansion of [`penalty`] at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct PenaltyLinearization {
    pub t_hat: Vec<f64>,
    /// Penalty value at the (clamped) expansion point.
    pub value: f64,
    pub gradient: Vec<f64>,
    /// Entries that were raised to the slack floor.
    pub clamped: usize,
}

impl PenaltyLinearization {
    pub fn eval(&self, t: &[f64]) -> f64 {
        self.value
            + self
                .gradient
                .iter()
                .zip(t.iter().zip(&self.t_hat))
                .map(|(g, (x, x0))| g * (x - x0))
                .sum::<f64>()
    }
}

/// Expands the penalty at `t_hat`, clamping entries below `floor` to `floor`.
pub fn linearize_penalty(
    t_hat: &[f64],
    groups: &[Range<usize>],
    beta: &[f64],
    floor: f64,
) -> Result<PenaltyLinearization> {
    if groups.len() != beta.len() {
        return Err(crate::error::mismatch(
            "one penalty weight per group expected",
        ));
    }
    let mut clamped = 0;
    let t: Vec<f64> = t_hat
        .iter()
        .map(|&x| {
            if x < floor {
                clamped += 1;
                floor
            } else {
                x
            }
        })
        .collect();
    let mut gradient = alloc::vec![0.0; t.len()];
    let mut value = 0.0;
    for (g, &b) in groups.iter().zip(beta) {
        let gm = geometric_mean(&t[g.clone()]);
        value += b * gm;
        let k = g.len() as f64;
        for i in g.clone() {
            gradient[i] = b / k * gm / t[i];
        }
    }
    Ok(PenaltyLinearization {
        t_hat: t,
        value,
        gradient,
        clamped,
    })
}

/// Tangent of `|h^T w|^2 = a^2 + b^2` at `w_hat`, as a function of
/// `(a, b) = (Re, Im)(h^T w)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadLinearization {
    pub a_hat: f64,
    pub b_hat: f64,
}

impl QuadLinearization {
    pub fn eval(&self, a: f64, b: f64) -> f64 {
        let (a0, b0) = (self.a_hat, self.b_hat);
        a0 * a0 + b0 * b0 + 2.0 * (a0 * (a - a0) + b0 * (b - b0))
    }
}

pub fn linearize_quadratic(h: &[Complex64], w_hat: &[Complex64]) -> QuadLinearization {
    let y = inner(h, w_hat);
    QuadLinearization {
        a_hat: y.re,
        b_hat: y.im,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn penalty_examples() {
        let g = [0..8];
        assert_eq!(penalty(&[1.0; 8], &g, &[256.0]).unwrap(), 256.0);
        let g2 = [0..2];
        assert!((penalty(&[1.0, 4.0], &g2, &[4.0]).unwrap() - 8.0).abs() < 1e-12);
        let mut t = vec![2.0; 8];
        t[3] = 0.0;
        assert_eq!(penalty(&t, &g, &[256.0]).unwrap(), 0.0);
        assert!(penalty(&[-1.0, 1.0], &g2, &[1.0]).is_err());
    }

    #[test]
    fn penalty_tangent_at_ones() {
        let lin = linearize_penalty(&[1.0, 1.0], &[0..2], &[1.0], 1e-8).unwrap();
        assert_eq!(lin.gradient, vec![0.5, 0.5]);
        assert!((lin.eval(&[3.0, 2.0]) - (1.0 + 0.5 * 2.0 + 0.5 * 1.0)).abs() < 1e-15);
        let lin = linearize_penalty(&[0.0, 1.0], &[0..2], &[1.0], 1e-8).unwrap();
        assert_eq!(lin.clamped, 1);
    }

    #[test]
    fn quadratic_tangent() {
        let h = [Complex64::new(1.0, 0.0)];
        let w = [Complex64::new(1.0, 0.0)];
        let g = linearize_quadratic(&h, &w);
        assert_eq!(g.eval(1.0, 0.0), 1.0);
        assert_eq!(g.eval(2.0, 0.0), 3.0);
        let g0 = linearize_quadratic(&h, &[Complex64::new(0.0, 0.0)]);
        assert_eq!(g0.eval(5.0, -2.0), 0.0);
    }
}
