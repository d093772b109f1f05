//! Successive convex approximation for SINR-slack minimization with an
//! optional per-group leader penalty.
//!
//! Everything runs in normalized units: beams `v = w / sqrt(P_BS)` so the
//! power constraint is `||v|| <= 1`, and channels `hbar_k = h_k *
//! sqrt(P_BS / I_k)` so user `k`'s SINR constraint reads
//! `|hbar_k^T v_own|^2 / target + t_k >= 1 + sum_other |hbar_k^T v_j|^2`.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use num_complex::Complex64;

use super::{geometric_mean, inner, BeamVariant, BeamformerSet};
use crate::config::{ScaOptions, SystemConfig};
use crate::conic::{self, ConicProgram, KktResiduals, LinExpr, Status};
use crate::error::{mismatch, Result};
use crate::math;
use crate::radio::ChannelSet;
use crate::units::SinrTarget;

/// Relative SINR margin used inside the optimization so that zero-slack
/// users still meet the exact target after solver round-off.
pub const DESIGN_MARGIN: f64 = 1e-5;

/// Polished slacks at or below this (relative to `1 + interference`) are
/// treated as exactly zero.
const SNAP: f64 = 1e-7;

/// Starting points, tried in order when the first subproblem fails.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Init {
    Candidates,
    MrtMedian,
    MrtStrongest,
    MrtWeakest,
}

const INITS: [Init; 4] = [
    Init::Candidates,
    Init::MrtMedian,
    Init::MrtStrongest,
    Init::MrtWeakest,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObjectiveMode {
    /// Sum of slacks only.
    L1,
    /// Sum of slacks plus the weighted geometric-mean penalty per group.
    L1WithPenalty,
}

/// A normalized SCA instance.
#[derive(Debug, Clone)]
pub struct ScaProblem {
    pub num_antennas: usize,
    pub num_beams: usize,
    pub beam_of_user: Vec<usize>,
    pub groups: Vec<Range<usize>>,
    /// Linear SINR target of every user.
    pub targets: Vec<f64>,
    pub hbar: Vec<Vec<Complex64>>,
    pub beta: Vec<f64>,
    pub mode: ObjectiveMode,
    pub bs_power: f64,
}

fn normalized_channels(ch: &ChannelSet, bs_power: f64) -> Vec<Vec<Complex64>> {
    ch.downlink
        .iter()
        .zip(&ch.interference_phase1)
        .map(|(h, &i)| {
            let s = math::sqrt(bs_power / i);
            h.iter().map(|z| z * s).collect()
        })
        .collect()
}

impl ScaProblem {
    /// One beam per group; `targets` holds one target per group.
    pub fn multigroup(
        ch: &ChannelSet,
        cfg: &SystemConfig,
        targets: &[SinrTarget],
        mode: ObjectiveMode,
    ) -> Result<Self> {
        if targets.len() != cfg.num_groups || ch.num_users() != cfg.num_users() {
            return Err(mismatch(
                "targets or channels do not match the group layout",
            ));
        }
        let group_of = cfg.group_of_users();
        Ok(ScaProblem {
            num_antennas: cfg.num_antennas,
            num_beams: cfg.num_groups,
            targets: group_of.iter().map(|&n| targets[n].linear()).collect(),
            beam_of_user: group_of,
            groups: (0..cfg.num_groups).map(|n| cfg.group_range(n)).collect(),
            hbar: normalized_channels(ch, cfg.bs_power_w()),
            beta: (0..cfg.num_groups).map(|n| cfg.penalty_weight(n)).collect(),
            mode,
            bs_power: cfg.bs_power_w(),
        })
    }

    /// One beam for every user with a common target.
    pub fn single_beam(
        ch: &ChannelSet,
        cfg: &SystemConfig,
        target: SinrTarget,
        with_leader_penalty: bool,
    ) -> Result<Self> {
        if ch.num_users() != cfg.num_users() {
            return Err(mismatch("channels do not match the group layout"));
        }
        let k = cfg.num_users();
        Ok(ScaProblem {
            num_antennas: cfg.num_antennas,
            num_beams: 1,
            beam_of_user: vec![0; k],
            groups: (0..cfg.num_groups).map(|n| cfg.group_range(n)).collect(),
            targets: vec![target.linear(); k],
            hbar: normalized_channels(ch, cfg.bs_power_w()),
            beta: (0..cfg.num_groups).map(|n| cfg.penalty_weight(n)).collect(),
            mode: if with_leader_penalty {
                ObjectiveMode::L1WithPenalty
            } else {
                ObjectiveMode::L1
            },
            bs_power: cfg.bs_power_w(),
        })
    }

    pub fn num_users(&self) -> usize {
        self.hbar.len()
    }

    /// (own-beam power, other-beam power) per user, normalized.
    pub fn signal_interference(&self, v: &[Vec<Complex64>]) -> (Vec<f64>, Vec<f64>) {
        let mut sig = Vec::with_capacity(self.num_users());
        let mut intf = Vec::with_capacity(self.num_users());
        for (k, h) in self.hbar.iter().enumerate() {
            let own = self.beam_of_user[k];
            let mut i = 0.0;
            for (b, vb) in v.iter().enumerate() {
                let p = inner(h, vb).norm_sqr();
                if b == own {
                    sig.push(p);
                } else {
                    i += p;
                }
            }
            intf.push(i);
        }
        (sig, intf)
    }

    /// Smallest slacks feasible for the margin-tightened SINR constraints.
    pub fn polish(&self, v: &[Vec<Complex64>]) -> Vec<f64> {
        let (sig, intf) = self.signal_interference(v);
        (0..self.num_users())
            .map(|k| {
                let g = self.targets[k];
                if g == 0.0 {
                    return 0.0;
                }
                let t = 1.0 + intf[k] - sig[k] / (g * (1.0 + DESIGN_MARGIN));
                if t <= SNAP * (1.0 + intf[k]) {
                    0.0
                } else {
                    t
                }
            })
            .collect()
    }

    /// True objective: sum of slacks plus the penalty when enabled.
    pub fn objective(&self, t: &[f64]) -> f64 {
        let l1: f64 = t.iter().sum();
        match self.mode {
            ObjectiveMode::L1 => l1,
            ObjectiveMode::L1WithPenalty => {
                l1 + self
                    .groups
                    .iter()
                    .zip(&self.beta)
                    .map(|(g, b)| b * geometric_mean(&t[g.clone()]))
                    .sum::<f64>()
            }
        }
    }

    /// Largest relative violation of the exact (unmargined) SINR and power
    /// constraints at `(v, t)`.
    pub fn exact_violation(&self, v: &[Vec<Complex64>], t: &[f64]) -> f64 {
        let (sig, intf) = self.signal_interference(v);
        let mut worst = 0.0f64;
        for k in 0..self.num_users() {
            if self.targets[k] == 0.0 {
                continue;
            }
            let lhs = sig[k] / self.targets[k] + t[k];
            worst = worst.max((1.0 + intf[k] - lhs) / (1.0 + intf[k]));
        }
        let p: f64 = v.iter().flatten().map(|z| z.norm_sqr()).sum();
        worst
            .max(p - 1.0)
            .max(t.iter().fold(0.0f64, |m, &x| m.max(-x)))
    }

    fn initial_state(&self, init: Init, opts: &ScaOptions) -> ScaState {
        let m = self.num_antennas;
        let members: Vec<Vec<(f64, usize)>> = (0..self.num_beams)
            .map(|b| {
                let mut mem: Vec<(f64, usize)> = (0..self.num_users())
                    .filter(|&k| self.beam_of_user[k] == b)
                    .map(|k| (self.hbar[k].iter().map(|z| z.norm_sqr()).sum::<f64>(), k))
                    .collect();
                mem.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                mem
            })
            .collect();
        if init == Init::Candidates {
            // Unicast to the strongest member of every beam.
            let picks: Vec<Option<usize>> =
                members.iter().map(|mem| mem.last().map(|p| p.1)).collect();
            let chosen: Vec<usize> = picks.iter().flatten().copied().collect();
            let h: Vec<Vec<Complex64>> = chosen.iter().map(|&k| self.hbar[k].clone()).collect();
            let g: Vec<f64> = chosen.iter().map(|&k| self.targets[k]).collect();
            if let Ok((Some(vs), _)) = super::broadcast::min_slack_unicast(
                &h,
                &g,
                m,
                opts.solver_tol,
                opts.solver_max_iter,
            ) {
                let mut it = vs.into_iter();
                let v: Vec<Vec<Complex64>> = picks
                    .iter()
                    .map(|p| match p {
                        Some(_) => it
                            .next()
                            .unwrap_or_else(|| vec![Complex64::new(0.0, 0.0); m]),
                        None => vec![Complex64::new(0.0, 0.0); m],
                    })
                    .collect();
                let t = self.polish(&v);
                return ScaState { v, t };
            }
        }
        let amp = math::sqrt(1.0 / self.num_beams as f64);
        let mut v = Vec::with_capacity(self.num_beams);
        for mem in &members {
            let pick = match (mem.len(), init) {
                (0, _) => None,
                (len, Init::MrtStrongest) => Some(mem[len - 1]),
                (_, Init::MrtWeakest) => Some(mem[0]),
                (len, _) => Some(mem[len / 2]),
            };
            let beam = match pick {
                Some((norm2, k)) if norm2 > 0.0 => {
                    let s = amp / math::sqrt(norm2);
                    self.hbar[k].iter().map(|z| z.conj() * s).collect()
                }
                _ => {
                    let mut e = vec![Complex64::new(0.0, 0.0); m];
                    e[0] = Complex64::new(amp, 0.0);
                    e
                }
            };
            v.push(beam);
        }
        let t = self.polish(&v);
        ScaState { v, t }
    }

    fn beams(&self, v: &[Vec<Complex64>]) -> BeamformerSet {
        let s = math::sqrt(self.bs_power);
        let variant = if self.num_beams == 1 {
            BeamVariant::Single
        } else {
            BeamVariant::PerGroup
        };
        BeamformerSet::new(
            variant,
            v.iter()
                .map(|b| b.iter().map(|z| z * s).collect())
                .collect(),
        )
    }
}

/// Expansion point of one SCA step: normalized beams and slacks.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaState {
    pub v: Vec<Vec<Complex64>>,
    pub t: Vec<f64>,
}

/// Variable layout of a subproblem: beams (real parts then imaginary parts
/// per beam), then slacks `t`, then `a`, `b` (real/imaginary own-beam gains).
#[derive(Debug, Clone, PartialEq)]
pub struct SubproblemLayout {
    pub num_beams: usize,
    pub num_antennas: usize,
    pub num_users: usize,
    /// Per group: the user whose slack is pinned to zero, if any.
    pub pinned: Vec<Option<usize>>,
    /// Per group: geometric mean at the expansion point and gradient scale,
    /// `None` for pinned groups or when the penalty is off.
    pub penalty_terms: Vec<Option<(f64, f64)>>,
    /// Objective coefficient of every slack and the constant term.
    pub slack_cost: Vec<f64>,
    pub objective_offset: f64,
    pub clamped: usize,
}

impl SubproblemLayout {
    pub fn num_vars(&self) -> usize {
        2 * self.num_antennas * self.num_beams + 3 * self.num_users
    }

    pub fn v_re(&self, b: usize, m: usize) -> usize {
        2 * self.num_antennas * b + m
    }

    pub fn v_im(&self, b: usize, m: usize) -> usize {
        2 * self.num_antennas * b + self.num_antennas + m
    }

    pub fn t(&self, k: usize) -> usize {
        2 * self.num_antennas * self.num_beams + k
    }

    pub fn a(&self, k: usize) -> usize {
        self.t(k) + self.num_users
    }

    pub fn b(&self, k: usize) -> usize {
        self.a(k) + self.num_users
    }

    pub fn beams(&self, x: &[f64]) -> Vec<Vec<Complex64>> {
        (0..self.num_beams)
            .map(|b| {
                (0..self.num_antennas)
                    .map(|m| Complex64::new(x[self.v_re(b, m)], x[self.v_im(b, m)]))
                    .collect()
            })
            .collect()
    }

    /// Stacks a state into a decision vector.
    pub fn pack(&self, prob: &ScaProblem, s: &ScaState) -> Vec<f64> {
        let mut x = vec![0.0; self.num_vars()];
        for (b, vb) in s.v.iter().enumerate() {
            for (m, z) in vb.iter().enumerate() {
                x[self.v_re(b, m)] = z.re;
                x[self.v_im(b, m)] = z.im;
            }
        }
        for k in 0..self.num_users {
            x[self.t(k)] = s.t[k];
            let y = inner(&prob.hbar[k], &s.v[prob.beam_of_user[k]]);
            x[self.a(k)] = y.re;
            x[self.b(k)] = y.im;
        }
        x
    }

    /// Value of the subproblem's surrogate objective at slacks `t`.
    pub fn surrogate(&self, t: &[f64]) -> f64 {
        self.objective_offset
            + self
                .slack_cost
                .iter()
                .zip(t)
                .map(|(c, x)| c * x)
                .sum::<f64>()
    }
}

fn real_inner(h: &[Complex64], l: &SubproblemLayout, b: usize, imag: bool, scale: f64) -> LinExpr {
    let mut e = LinExpr::zero();
    for (m, z) in h.iter().enumerate() {
        // (hr + i hi)(vr + i vi) = (hr vr - hi vi) + i (hr vi + hi vr)
        if imag {
            e.terms.push((l.v_re(b, m), scale * z.im));
            e.terms.push((l.v_im(b, m), scale * z.re));
        } else {
            e.terms.push((l.v_re(b, m), scale * z.re));
            e.terms.push((l.v_im(b, m), -scale * z.im));
        }
    }
    e
}

/// Assembles the convex subproblem at expansion point `s`.
///
/// For each group that already has a zero slack in `s`, the user with the
/// largest SINR margin among those is pinned to zero slack and the group's
/// penalty term is dropped (it is identically zero on that face). Other
/// groups use the tangent of the penalty at `s.t`.
pub fn build_subproblem(
    prob: &ScaProblem,
    s: &ScaState,
    opts: &ScaOptions,
) -> (ConicProgram, SubproblemLayout) {
    let (m, kn, nb) = (prob.num_antennas, prob.num_users(), prob.num_beams);
    let mut layout = SubproblemLayout {
        num_beams: nb,
        num_antennas: m,
        num_users: kn,
        pinned: vec![None; prob.groups.len()],
        penalty_terms: vec![None; prob.groups.len()],
        slack_cost: Vec::new(),
        objective_offset: 0.0,
        clamped: 0,
    };
    let (sig, intf) = prob.signal_interference(&s.v);
    if prob.mode == ObjectiveMode::L1WithPenalty {
        for (n, g) in prob.groups.iter().enumerate() {
            let zero = g
                .clone()
                .filter(|&k| s.t[k] == 0.0 && prob.targets[k] > 0.0)
                .max_by(|&a, &b| {
                    let ma = sig[a] / prob.targets[a] - 1.0 - intf[a];
                    let mb = sig[b] / prob.targets[b] - 1.0 - intf[b];
                    (ma / (1.0 + intf[a])).total_cmp(&(mb / (1.0 + intf[b])))
                });
            let has_zero_target = g.clone().any(|k| prob.targets[k] == 0.0);
            if let Some(k) = zero {
                layout.pinned[n] = Some(k);
            } else if !has_zero_target {
                let th: Vec<f64> = g.clone().map(|k| s.t[k].max(opts.slack_floor)).collect();
                layout.clamped += g.clone().filter(|&k| s.t[k] < opts.slack_floor).count();
                let gm = prob.beta[n] * geometric_mean(&th);
                layout.penalty_terms[n] = Some((gm, gm / g.len() as f64));
            }
        }
    }

    let mut p = ConicProgram::new(layout.num_vars());
    for k in 0..kn {
        p.objective[layout.t(k)] = 1.0;
    }
    for (n, g) in prob.groups.iter().enumerate() {
        if let Some((gm, scale)) = layout.penalty_terms[n] {
            let mut lin = gm;
            for k in g.clone() {
                let th = s.t[k].max(opts.slack_floor);
                p.objective[layout.t(k)] += scale / th;
                lin -= scale;
            }
            p.objective_offset += lin;
        }
        if let Some(k) = layout.pinned[n] {
            p.add_equality(vec![(layout.t(k), 1.0)], 0.0, "pinned slack");
        }
    }
    layout.slack_cost = (0..kn).map(|k| p.objective[layout.t(k)]).collect();
    layout.objective_offset = p.objective_offset;
    for k in 0..kn {
        p.add_nonneg(layout.t(k));
        let own = prob.beam_of_user[k];
        let mut re = real_inner(&prob.hbar[k], &layout, own, false, -1.0);
        re.terms.push((layout.a(k), 1.0));
        p.add_equality(re.terms, 0.0, "gain real part");
        let mut im = real_inner(&prob.hbar[k], &layout, own, true, -1.0);
        im.terms.push((layout.b(k), 1.0));
        p.add_equality(im.terms, 0.0, "gain imaginary part");
    }
    let power: Vec<LinExpr> = (0..nb)
        .flat_map(|b| (0..m).flat_map(move |i| [(b, i, false), (b, i, true)]))
        .map(|(b, i, imag)| {
            LinExpr::var(if imag {
                layout.v_im(b, i)
            } else {
                layout.v_re(b, i)
            })
        })
        .collect();
    p.add_soc(LinExpr::constant(1.0), power, "power");

    for k in 0..kn {
        let g = prob.targets[k];
        if g == 0.0 {
            continue;
        }
        let y = inner(&prob.hbar[k], &s.v[prob.beam_of_user[k]]);
        let gm = g * (1.0 + DESIGN_MARGIN);
        // y = (2 a_hat a + 2 b_hat b - a_hat^2 - b_hat^2) / target + t - 1
        let yexpr = LinExpr::var(layout.t(k))
            .add(layout.a(k), 2.0 * y.re / gm)
            .add(layout.b(k), 2.0 * y.im / gm)
            .plus(-y.norm_sqr() / gm - 1.0);
        if nb == 1 {
            p.add_linear_ge(yexpr, "sinr");
            continue;
        }
        let mut vec_rows = Vec::with_capacity(2 * nb - 1);
        for b in 0..nb {
            if b == prob.beam_of_user[k] {
                continue;
            }
            vec_rows.push(real_inner(&prob.hbar[k], &layout, b, false, 2.0));
            vec_rows.push(real_inner(&prob.hbar[k], &layout, b, true, 2.0));
        }
        vec_rows.push(yexpr.clone().plus(-1.0));
        p.add_soc(yexpr.plus(1.0), vec_rows, "sinr");
    }
    (p, layout)
}

/// Iteration history of one SCA run.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScaTrace {
    /// True objective at the starting point and after every accepted step.
    pub objectives: Vec<f64>,
    /// Surrogate objective at every accepted step (one shorter than `objectives`).
    pub surrogates: Vec<f64>,
    /// Status of every subproblem solve, including rejected or failed ones.
    pub statuses: Vec<Status>,
    /// Smallest slack per group at every entry of `objectives`.
    pub min_group_slack: Vec<Vec<f64>>,
    /// KKT residuals of the last successfully solved subproblem.
    pub last_residuals: Option<KktResiduals>,
    pub iterations: usize,
    pub converged: bool,
    /// Fresh initializations used after a failed first subproblem.
    pub restarts: usize,
    /// No subproblem could be solved from any initialization.
    pub failed: bool,
    /// Steps discarded because the true objective went up.
    pub rejected_steps: usize,
    /// Largest raw objective increase seen (before rejection).
    pub max_increase: f64,
    /// Largest violation of the incumbent in the subproblem it seeded.
    pub max_incumbent_violation: f64,
    /// Largest exact-constraint violation over accepted iterates.
    pub max_iterate_violation: f64,
    pub clamped: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScaOutcome {
    pub beams: BeamformerSet,
    /// Slacks in normalized SINR-constraint units.
    pub t: Vec<f64>,
    pub trace: ScaTrace,
}

fn group_min(prob: &ScaProblem, t: &[f64]) -> Vec<f64> {
    prob.groups
        .iter()
        .map(|g| t[g.clone()].iter().cloned().fold(f64::INFINITY, f64::min))
        .collect()
}

fn incumbent_violation(p: &ConicProgram, x: &[f64]) -> f64 {
    let mut worst = 0.0f64;
    for c in &p.socs {
        let scale = 1.0 + c.scalar.eval(x).abs();
        worst = worst.max(c.violation(x) / scale);
    }
    for e in &p.equalities {
        let lhs: f64 = e.terms.iter().map(|&(j, a)| a * x[j]).sum();
        worst = worst.max((lhs - e.rhs).abs() / (1.0 + e.rhs.abs()));
    }
    worst
}

enum Run {
    Done(ScaState),
    FirstSolveFailed,
}

fn iterate(prob: &ScaProblem, init: ScaState, opts: &ScaOptions, trace: &mut ScaTrace) -> Run {
    let mut state = init;
    let mut f = prob.objective(&state.t);
    trace.objectives.push(f);
    trace.min_group_slack.push(group_min(prob, &state.t));
    trace.max_iterate_violation = trace
        .max_iterate_violation
        .max(prob.exact_violation(&state.v, &state.t));
    for l in 0..opts.max_iters {
        let (p, layout) = build_subproblem(prob, &state, opts);
        trace.clamped += layout.clamped;
        let x0 = layout.pack(prob, &state);
        trace.max_incumbent_violation = trace
            .max_incumbent_violation
            .max(incumbent_violation(&p, &x0));
        let sol = match conic::solve(&p, opts.solver_tol, opts.solver_max_iter) {
            Ok(s) => s,
            Err(_) => {
                trace.statuses.push(Status::MaxIter);
                return if l == 0 {
                    Run::FirstSolveFailed
                } else {
                    Run::Done(state)
                };
            }
        };
        trace.statuses.push(sol.status);
        trace.iterations = l + 1;
        if !sol.status.is_solved() {
            return if l == 0 {
                Run::FirstSolveFailed
            } else {
                Run::Done(state)
            };
        }
        trace.last_residuals = Some(sol.residuals);
        let mut v = layout.beams(&sol.x);
        let norm = math::sqrt(v.iter().flatten().map(|z| z.norm_sqr()).sum());
        if norm > 1.0 {
            v.iter_mut().flatten().for_each(|z| *z /= norm);
        }
        let t = prob.polish(&v);
        let f_new = prob.objective(&t);
        if f_new > f {
            trace.max_increase = trace.max_increase.max(f_new - f);
            if f_new > f + 1e-9 * (1.0 + f.abs()) {
                trace.rejected_steps += 1;
                return Run::Done(state);
            }
        }
        trace.surrogates.push(layout.surrogate(&t));
        trace.objectives.push(f_new);
        trace.min_group_slack.push(group_min(prob, &t));
        trace.max_iterate_violation = trace
            .max_iterate_violation
            .max(prob.exact_violation(&v, &t));
        state = ScaState { v, t };
        let done = f_new == 0.0 || (f - f_new).abs() <= opts.rel_tol * f.abs();
        f = f_new;
        if done {
            trace.converged = true;
            break;
        }
    }
    Run::Done(state)
}

impl ScaProblem {
    /// Runs the SCA from the strongest-member unicast start, falling back to
    /// MRT starts (median, strongest, weakest member) while the first
    /// subproblem fails.
    pub fn solve(&self, opts: &ScaOptions) -> ScaOutcome {
        let mut trace = ScaTrace::default();
        let mut last = None;
        for attempt in 0..=opts.max_restarts {
            let init = self.initial_state(INITS[attempt % INITS.len()], opts);
            let mut tr = ScaTrace {
                restarts: attempt,
                ..ScaTrace::default()
            };
            match iterate(self, init.clone(), opts, &mut tr) {
                Run::Done(state) => {
                    return ScaOutcome {
                        beams: self.beams(&state.v),
                        t: state.t,
                        trace: tr,
                    };
                }
                Run::FirstSolveFailed => {
                    trace = tr;
                    last = Some(init);
                }
            }
        }
        let state = last.unwrap_or_else(|| self.initial_state(Init::MrtMedian, opts));
        trace.failed = true;
        trace.restarts = opts.max_restarts;
        ScaOutcome {
            beams: self.beams(&state.v),
            t: state.t,
            trace,
        }
    }
}

/// Multi-group multicast design: one beam per group, per-group targets.
pub fn run_sca(
    ch: &ChannelSet,
    targets: &[SinrTarget],
    cfg: &SystemConfig,
    mode: ObjectiveMode,
) -> Result<ScaOutcome> {
    Ok(ScaProblem::multigroup(ch, cfg, targets, mode)?.solve(&cfg.sca))
}

/// Single-beam design with a common target for every user.
pub fn run_sca_single_beam(
    ch: &ChannelSet,
    target: SinrTarget,
    cfg: &SystemConfig,
    with_leader_penalty: bool,
) -> Result<ScaOutcome> {
    Ok(ScaProblem::single_beam(ch, cfg, target, with_leader_penalty)?.solve(&cfg.sca))
}
