//! Per-realization wiring of every scheme: which beams, which targets and
//! which evaluation.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::beamform::{
    run_sca, run_sca_single_beam, solve_broadcast, BeamVariant, BeamformerSet, ObjectiveMode,
    ScaTrace,
};
use crate::config::SystemConfig;
use crate::error::{invalid, Result};
use crate::protocol::{
    evaluate_one_phase, evaluate_tdma, evaluate_two_phase, one_phase_multicast_targets,
    per_user_targets, phase1_targets, single_beam_target, PhaseOutcome, RelayMode,
};
use crate::radio::{sample_realization, ChannelSet, Topology};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SchemeId {
    /// Per-group beams with leader selection, coherent D2D relaying.
    Proposed,
    /// As `Proposed` without the leader-selection penalty.
    NoLeaderSelection,
    /// One cell-wide multicast beam, selection-diversity relaying.
    OccupyCow,
    /// `OccupyCow` with the leader-selection penalty.
    OccupyCowLeaders,
    /// One beam per user, single phase.
    Broadcast,
    /// Time division with MRT, single phase.
    Tdma,
    /// Per-group beams over the whole latency budget, no relaying.
    OnePhaseMulticast,
}

impl SchemeId {
    pub const ALL: [SchemeId; 7] = [
        SchemeId::Proposed,
        SchemeId::NoLeaderSelection,
        SchemeId::OccupyCow,
        SchemeId::OccupyCowLeaders,
        SchemeId::Broadcast,
        SchemeId::Tdma,
        SchemeId::OnePhaseMulticast,
    ];

    /// Short name used in files and on the command line.
    pub fn name(self) -> &'static str {
        match self {
            SchemeId::Proposed => "proposed",
            SchemeId::NoLeaderSelection => "b1",
            SchemeId::OccupyCow => "b2",
            SchemeId::OccupyCowLeaders => "b3",
            SchemeId::Broadcast => "b4",
            SchemeId::Tdma => "b5",
            SchemeId::OnePhaseMulticast => "b6",
        }
    }

    pub fn uses_sca(self) -> bool {
        matches!(
            self,
            SchemeId::Proposed
                | SchemeId::NoLeaderSelection
                | SchemeId::OccupyCow
                | SchemeId::OccupyCowLeaders
                | SchemeId::OnePhaseMulticast
        )
    }
}

impl fmt::Display for SchemeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemeId {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        SchemeId::ALL
            .into_iter()
            .find(|id| id.name() == lower)
            .or(match lower.as_str() {
                "no-leader-selection" => Some(SchemeId::NoLeaderSelection),
                "occupy-cow" => Some(SchemeId::OccupyCow),
                "occupy-cow-leaders" => Some(SchemeId::OccupyCowLeaders),
                "broadcast" => Some(SchemeId::Broadcast),
                "tdma" => Some(SchemeId::Tdma),
                "one-phase-multicast" => Some(SchemeId::OnePhaseMulticast),
                _ => None,
            })
            .ok_or_else(|| invalid(alloc::format!("unknown scheme '{s}'")))
    }
}

/// Random stream of trial `index`: ChaCha8 keyed by the config seed, one
/// stream per trial, so any trial can be regenerated on its own.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Topology, channels and interference of trial `index`, shared by every
/// scheme and every message size.
pub fn realization(cfg: &SystemConfig, index: u64) -> Result<(Topology, ChannelSet)> {
    sample_realization(cfg, &mut trial_rng(cfg.seed, index))
}

/// 64-bit FNV-1a over the bit patterns of every channel quantity.
pub fn channel_digest(ch: &ChannelSet) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut eat = |x: f64| {
        for b in x.to_bits().to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    };
    for z in ch.downlink.iter().flatten().chain(&ch.d2d) {
        eat(z.re);
        eat(z.im);
    }
    ch.interference_phase1
        .iter()
        .chain(&ch.interference_phase2)
        .for_each(|&x| eat(x));
    eat(ch.noise_power);
    h
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub scheme: SchemeId,
    pub phase: PhaseOutcome,
    pub urllc: bool,
    pub success_count: usize,
    /// Present for schemes that ran the convex approximation.
    pub sca: Option<ScaTrace>,
    /// The optimizer failed from every start; the trial counts as an outage.
    pub solver_failed: bool,
}

impl TrialOutcome {
    fn new(
        scheme: SchemeId,
        phase: PhaseOutcome,
        sca: Option<ScaTrace>,
        solver_failed: bool,
    ) -> Self {
        TrialOutcome {
            scheme,
            urllc: phase.urllc && !solver_failed,
            success_count: phase.success_count,
            phase,
            sca,
            solver_failed,
        }
    }
}

/// Runs one scheme on one realization.
pub fn run_scheme(cfg: &SystemConfig, scheme: SchemeId, ch: &ChannelSet) -> Result<TrialOutcome> {
    let strategy = cfg.phase2_strategy;
    match scheme {
        SchemeId::Proposed | SchemeId::NoLeaderSelection => {
            let mode = if scheme == SchemeId::Proposed {
                ObjectiveMode::L1WithPenalty
            } else {
                ObjectiveMode::L1
            };
            let out = run_sca(ch, &phase1_targets(cfg)?, cfg, mode)?;
            let phase = evaluate_two_phase(ch, &out.beams, cfg, RelayMode::Coherent, strategy)?;
            let failed = out.trace.failed;
            Ok(TrialOutcome::new(scheme, phase, Some(out.trace), failed))
        }
        SchemeId::OccupyCow | SchemeId::OccupyCowLeaders => {
            let target = single_beam_target(cfg)?;
            let p = cfg.bs_power_w();
            // With all power on one user's MRT direction nobody reaches the
            // common target: no beam can create a leader.
            let reachable = ch
                .downlink
                .iter()
                .zip(&ch.interference_phase1)
                .any(|(h, &i)| {
                    p * h.iter().map(|z| z.norm_sqr()).sum::<f64>() / i >= target.linear()
                });
            if !reachable {
                let beams = BeamformerSet::zeros(BeamVariant::Single, 1, cfg.num_antennas);
                let phase = evaluate_two_phase(ch, &beams, cfg, RelayMode::Selection, strategy)?;
                return Ok(TrialOutcome::new(scheme, phase, None, false));
            }
            let out = run_sca_single_beam(ch, target, cfg, scheme == SchemeId::OccupyCowLeaders)?;
            let phase = evaluate_two_phase(ch, &out.beams, cfg, RelayMode::Selection, strategy)?;
            let failed = out.trace.failed;
            Ok(TrialOutcome::new(scheme, phase, Some(out.trace), failed))
        }
        SchemeId::Broadcast => {
            let targets = per_user_targets(cfg)?;
            let out = solve_broadcast(ch, &targets, cfg)?;
            let phase = evaluate_one_phase(ch, &out.beams, cfg, &targets)?;
            Ok(TrialOutcome::new(scheme, phase, None, !out.solved))
        }
        SchemeId::Tdma => {
            let out = evaluate_tdma(ch, cfg)?;
            Ok(TrialOutcome::new(scheme, out.phase, None, false))
        }
        SchemeId::OnePhaseMulticast => {
            let group_targets = one_phase_multicast_targets(cfg)?;
            let out = run_sca(ch, &group_targets, cfg, ObjectiveMode::L1)?;
            let targets: Vec<_> = cfg
                .group_of_users()
                .iter()
                .map(|&n| group_targets[n])
                .collect();
            let phase = evaluate_one_phase(ch, &out.beams, cfg, &targets)?;
            let failed = out.trace.failed;
            Ok(TrialOutcome::new(scheme, phase, Some(out.trace), failed))
        }
    }
}

/// Generates trial `index` and runs `scheme` on it.
pub fn run_trial(cfg: &SystemConfig, scheme: SchemeId, index: u64) -> Result<TrialOutcome> {
    let (_, ch) = realization(cfg, index)?;
    run_scheme(cfg, scheme, &ch)
}

/// Runs several schemes on the same realization.
pub fn run_schemes(
    cfg: &SystemConfig,
    schemes: &[SchemeId],
    index: u64,
) -> Result<Vec<TrialOutcome>> {
    let (_, ch) = realization(cfg, index)?;
    let mut out = Vec::with_capacity(schemes.len());
    for &s in schemes {
        out.push(run_scheme(cfg, s, &ch)?);
    }
    Ok(out)
}
