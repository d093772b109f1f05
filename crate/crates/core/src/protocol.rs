//! Evaluation of a realization under fixed beams: Phase-I SINRs and leader
//! sets, Phase-II D2D relaying, and the one-phase benchmarks.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::beamform::{inner, BeamVariant, BeamformerSet};
use crate::config::{Phase2Strategy, SystemConfig};
use crate::error::{mismatch, Result};
use crate::radio::ChannelSet;
use crate::units::{min_sinr_target, SinrTarget};

/// Who decoded in which phase.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseOutcome {
    /// Phase-I leaders per group (global user indices).
    pub leader_sets: Vec<Vec<usize>>,
    /// Phase-I failures that decoded in Phase II, per group.
    pub phase2_sets: Vec<Vec<usize>>,
    pub phase1_sinr: Vec<f64>,
    /// `None` for Phase-I leaders and one-phase schemes.
    pub phase2_sinr: Vec<Option<f64>>,
    pub success_count: usize,
    pub urllc: bool,
}

impl PhaseOutcome {
    fn build(
        cfg: &SystemConfig,
        phase1_ok: &[bool],
        phase2_ok: &[bool],
        phase1_sinr: Vec<f64>,
        phase2_sinr: Vec<Option<f64>>,
    ) -> Self {
        let mut leader_sets = vec![Vec::new(); cfg.num_groups];
        let mut phase2_sets = vec![Vec::new(); cfg.num_groups];
        for (k, &n) in cfg.group_of_users().iter().enumerate() {
            if phase1_ok[k] {
                leader_sets[n].push(k);
            } else if phase2_ok[k] {
                phase2_sets[n].push(k);
            }
        }
        let success_count = leader_sets.iter().chain(&phase2_sets).map(Vec::len).sum();
        PhaseOutcome {
            leader_sets,
            phase2_sets,
            phase1_sinr,
            phase2_sinr,
            success_count,
            urllc: success_count == cfg.num_users(),
        }
    }

    /// Number of Phase-I leaders per group.
    pub fn leader_counts(&self) -> Vec<usize> {
        self.leader_sets.iter().map(Vec::len).collect()
    }

    pub fn groups_with_leader(&self) -> usize {
        self.leader_sets.iter().filter(|s| !s.is_empty()).count()
    }

    /// Phase-I leader flag per user.
    pub fn leader_flags(&self, num_users: usize) -> Vec<bool> {
        let mut f = vec![false; num_users];
        self.leader_sets.iter().flatten().for_each(|&k| f[k] = true);
        f
    }
}

/// Exact Phase-I SINR per user. Per-group beams see the other groups' beams
/// as interference, a single beam sees none, and per-user beams see every
/// other user's beam.
pub fn phase1_sinr(ch: &ChannelSet, beams: &BeamformerSet, cfg: &SystemConfig) -> Result<Vec<f64>> {
    let k = ch.num_users();
    let expected = match beams.variant {
        BeamVariant::PerGroup => cfg.num_groups,
        BeamVariant::Single => 1,
        BeamVariant::PerUser => k,
    };
    if beams.beams.len() != expected || k != cfg.num_users() {
        return Err(mismatch("beam count does not match the beam variant"));
    }
    let group_of = cfg.group_of_users();
    Ok((0..k)
        .map(|u| {
            let own = match beams.variant {
                BeamVariant::PerGroup => group_of[u],
                BeamVariant::Single => 0,
                BeamVariant::PerUser => u,
            };
            let h = &ch.downlink[u];
            let mut sig = 0.0;
            let mut intf = 0.0;
            for (j, w) in beams.beams.iter().enumerate() {
                let p = inner(h, w).norm_sqr();
                if j == own {
                    sig = p;
                } else {
                    intf += p;
                }
            }
            sig / (intf + ch.interference_phase1[u])
        })
        .collect())
}

/// Decoding flag per user: SINR at or above the user's target.
pub fn phase1_indicators(sinr: &[f64], targets: &[SinrTarget]) -> Vec<bool> {
    sinr.iter()
        .zip(targets)
        .map(|(&s, t)| s >= t.linear())
        .collect()
}

/// Phase-I multicast target of every group: the group's combined message
/// over the Phase-I symbols.
pub fn phase1_targets(cfg: &SystemConfig) -> Result<Vec<SinrTarget>> {
    (0..cfg.num_groups)
        .map(|n| min_sinr_target(cfg.group_bits(n), cfg.phase1_symbols()))
        .collect()
}

/// Common Phase-I target when the whole cell's message is one multicast.
pub fn single_beam_target(cfg: &SystemConfig) -> Result<SinrTarget> {
    min_sinr_target(cfg.total_bits(), cfg.phase1_symbols())
}

/// Coherent Phase-II SINR for every Phase-I failure: same-group leaders
/// add as phasors, other groups' leaders interfere.
pub fn phase2_sinr_coherent(
    ch: &ChannelSet,
    leaders: &[bool],
    cfg: &SystemConfig,
) -> Vec<Option<f64>> {
    let k = ch.num_users();
    let amp = crate::math::sqrt(cfg.user_power_w());
    let group_of = cfg.group_of_users();
    (0..k)
        .map(|u| {
            if leaders[u] {
                return None;
            }
            let mut sums = vec![Complex64::new(0.0, 0.0); cfg.num_groups];
            for i in (0..k).filter(|&i| i != u && leaders[i]) {
                sums[group_of[i]] += ch.d2d(i, u) * amp;
            }
            let own = group_of[u];
            let sig = sums[own].norm_sqr();
            let intf: f64 = sums
                .iter()
                .enumerate()
                .filter(|&(n, _)| n != own)
                .map(|(_, z)| z.norm_sqr())
                .sum();
            Some(sig / (intf + ch.interference_phase2[u]))
        })
        .collect()
}

/// Selection-diversity Phase-II SINR: the best single link from any leader
/// in the cell.
pub fn phase2_sinr_selection(
    ch: &ChannelSet,
    leaders: &[bool],
    cfg: &SystemConfig,
) -> Vec<Option<f64>> {
    let k = ch.num_users();
    let p = cfg.user_power_w();
    (0..k)
        .map(|u| {
            if leaders[u] {
                return None;
            }
            let best = (0..k)
                .filter(|&i| i != u && leaders[i])
                .map(|i| ch.d2d(i, u).norm_sqr())
                .fold(0.0f64, f64::max);
            Some(p * best / ch.interference_phase2[u])
        })
        .collect()
}

/// Phase-II relay target per group. `Full` relays the group's whole
/// message; `Residual` only the bits of the group's Phase-I failures.
pub fn phase2_targets(
    cfg: &SystemConfig,
    leaders: &[bool],
    strategy: Phase2Strategy,
) -> Result<Vec<SinrTarget>> {
    (0..cfg.num_groups)
        .map(|n| {
            let bits: f64 = cfg
                .group_range(n)
                .filter(|&k| strategy == Phase2Strategy::Full || !leaders[k])
                .map(|k| cfg.bits_per_user[k])
                .sum();
            min_sinr_target(bits, cfg.phase2_symbols())
        })
        .collect()
}

/// Phase-II target when every leader relays all bits the cell's Phase-I
/// failures are missing.
pub fn cell_residual_target(cfg: &SystemConfig, leaders: &[bool]) -> Result<SinrTarget> {
    let bits: f64 = (0..cfg.num_users())
        .filter(|&k| !leaders[k])
        .map(|k| cfg.bits_per_user[k])
        .sum();
    min_sinr_target(bits, cfg.phase2_symbols())
}

/// How Phase-II signals from several leaders combine.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelayMode {
    /// Per-group multicast relaying with phasor combining.
    Coherent,
    /// Cell-wide relaying with ideal selection diversity.
    Selection,
}

/// Runs both phases. Per-group beams pair with coherent relaying and the
/// group targets; a single beam pairs with selection relaying and the
/// cell-wide targets.
pub fn evaluate_two_phase(
    ch: &ChannelSet,
    beams: &BeamformerSet,
    cfg: &SystemConfig,
    relay: RelayMode,
    strategy: Phase2Strategy,
) -> Result<PhaseOutcome> {
    let sinr1 = phase1_sinr(ch, beams, cfg)?;
    let group_of = cfg.group_of_users();
    let targets1: Vec<SinrTarget> = match beams.variant {
        BeamVariant::Single => vec![single_beam_target(cfg)?; cfg.num_users()],
        _ => {
            let g = phase1_targets(cfg)?;
            group_of.iter().map(|&n| g[n]).collect()
        }
    };
    let leaders = phase1_indicators(&sinr1, &targets1);
    let (sinr2, targets2): (Vec<Option<f64>>, Vec<SinrTarget>) = match relay {
        RelayMode::Coherent => {
            let g = phase2_targets(cfg, &leaders, strategy)?;
            (
                phase2_sinr_coherent(ch, &leaders, cfg),
                group_of.iter().map(|&n| g[n]).collect(),
            )
        }
        RelayMode::Selection => (
            phase2_sinr_selection(ch, &leaders, cfg),
            vec![cell_residual_target(cfg, &leaders)?; cfg.num_users()],
        ),
    };
    let ok2: Vec<bool> = sinr2
        .iter()
        .zip(&targets2)
        .map(|(s, t)| s.is_some_and(|v| v >= t.linear()))
        .collect();
    Ok(PhaseOutcome::build(cfg, &leaders, &ok2, sinr1, sinr2))
}

/// One-phase evaluation: a user succeeds iff its SINR meets its target.
pub fn evaluate_one_phase(
    ch: &ChannelSet,
    beams: &BeamformerSet,
    cfg: &SystemConfig,
    targets: &[SinrTarget],
) -> Result<PhaseOutcome> {
    if targets.len() != cfg.num_users() {
        return Err(mismatch("one target per user expected"));
    }
    let sinr = phase1_sinr(ch, beams, cfg)?;
    let ok = phase1_indicators(&sinr, targets);
    let k = cfg.num_users();
    Ok(PhaseOutcome::build(
        cfg,
        &ok,
        &vec![false; k],
        sinr,
        vec![None; k],
    ))
}

/// Per-user target for delivering the user's own bits over the whole
/// latency budget.
pub fn per_user_targets(cfg: &SystemConfig) -> Result<Vec<SinrTarget>> {
    cfg.bits_per_user
        .iter()
        .map(|&d| min_sinr_target(d, cfg.total_symbols()))
        .collect()
}

/// Group multicast target over the whole latency budget.
pub fn one_phase_multicast_targets(cfg: &SystemConfig) -> Result<Vec<SinrTarget>> {
    (0..cfg.num_groups)
        .map(|n| min_sinr_target(cfg.group_bits(n), cfg.total_symbols()))
        .collect()
}

/// Result of the time-division benchmark.
#[derive(Debug, Clone, PartialEq)]
pub struct TdmaOutcome {
    pub target: SinrTarget,
    /// Minimum MRT power per user.
    pub required_power: Vec<f64>,
    pub total_power: f64,
    /// Users served by greedy admission in increasing power order.
    pub admitted: Vec<bool>,
    pub phase: PhaseOutcome,
}

/// Each user gets `1/K` of the latency budget and an MRT beam with just
/// enough power for the whole cell's rate; URLLC iff the powers fit the BS
/// budget. When they do not, users are admitted cheapest first until the
/// budget binds, and those count as successes.
pub fn evaluate_tdma(ch: &ChannelSet, cfg: &SystemConfig) -> Result<TdmaOutcome> {
    let k = ch.num_users();
    let target = min_sinr_target(cfg.total_bits(), cfg.total_symbols())?;
    let required_power: Vec<f64> = (0..k)
        .map(|u| {
            let g: f64 = ch.downlink[u].iter().map(|z| z.norm_sqr()).sum();
            target.linear() * ch.interference_phase1[u] / g
        })
        .collect();
    let total_power: f64 = required_power.iter().sum();
    let budget = cfg.bs_power_w();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| {
        required_power[a]
            .total_cmp(&required_power[b])
            .then(a.cmp(&b))
    });
    let mut admitted = vec![false; k];
    let mut used = 0.0;
    for u in order {
        if used + required_power[u] > budget {
            break;
        }
        used += required_power[u];
        admitted[u] = true;
    }
    let sinr: Vec<f64> = (0..k)
        .map(|u| {
            if admitted[u] {
                let g: f64 = ch.downlink[u].iter().map(|z| z.norm_sqr()).sum();
                required_power[u] * g / ch.interference_phase1[u]
            } else {
                0.0
            }
        })
        .collect();
    let mut phase = PhaseOutcome::build(cfg, &admitted, &vec![false; k], sinr, vec![None; k]);
    phase.urllc = total_power <= budget;
    Ok(TdmaOutcome {
        target,
        required_power,
        total_power,
        admitted,
        phase,
    })
}
