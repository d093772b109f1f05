//! Monte Carlo campaigns over matched realizations.

use std::collections::BTreeMap;

use anyhow::{bail, Result};
use rayon::prelude::*;
use serde::Serialize;
use urllc_core::beamform::ScaTrace;
use urllc_core::radio::ChannelSet;
use urllc_core::trial::{channel_digest, realization, run_scheme, SchemeId, TrialOutcome};
use urllc_core::SystemConfig;

use crate::stats::wilson;

/// One scheme on one realization, reduced to what the outputs need.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub trial: u64,
    pub scheme: SchemeId,
    pub success_count: usize,
    pub urllc: bool,
    pub solver_failed: bool,
    pub leaders_per_group: Vec<usize>,
    pub sca_restarts: usize,
    pub digest: u64,
    pub trace: Option<ScaTrace>,
}

impl TrialRecord {
    pub fn from_outcome(trial: u64, digest: u64, out: TrialOutcome) -> Self {
        TrialRecord {
            trial,
            scheme: out.scheme,
            success_count: out.success_count,
            urllc: out.urllc,
            solver_failed: out.solver_failed,
            leaders_per_group: out.phase.leader_sets.iter().map(Vec::len).collect(),
            sca_restarts: out.sca.as_ref().map_or(0, |t| t.restarts),
            digest,
            trace: out.sca,
        }
    }

    pub fn groups_with_leader(&self) -> usize {
        self.leaders_per_group.iter().filter(|&&n| n > 0).count()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchemeSummary {
    pub trials: usize,
    pub successes: usize,
    pub outages: usize,
    /// Trials where the optimizer failed from every start (counted apart
    /// from ordinary outages).
    pub failures: usize,
    pub probability: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub mean_success: f64,
    pub mean_groups_with_leader: f64,
    /// Trials where every group had a Phase-I leader.
    pub all_groups_led: usize,
    pub sca_restarts: usize,
}

/// Per-scheme statistics of one campaign, keyed by scheme name.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReliabilityReport {
    pub d_bits: Option<f64>,
    pub seed: u64,
    pub schemes: BTreeMap<String, SchemeSummary>,
}

impl ReliabilityReport {
    pub fn get(&self, s: SchemeId) -> Option<&SchemeSummary> {
        self.schemes.get(s.name())
    }
}

/// Records in (trial, scheme) order.
#[derive(Debug, Clone)]
pub struct Campaign {
    pub records: Vec<TrialRecord>,
    pub report: ReliabilityReport,
}

pub fn summarize(records: &[TrialRecord], scheme: SchemeId, num_groups: usize) -> SchemeSummary {
    let mine: Vec<&TrialRecord> = records.iter().filter(|r| r.scheme == scheme).collect();
    let trials = mine.len();
    let successes = mine.iter().filter(|r| r.urllc).count();
    let failures = mine.iter().filter(|r| r.solver_failed).count();
    let (ci_low, ci_high) = wilson(successes, trials);
    let n = trials.max(1) as f64;
    SchemeSummary {
        trials,
        successes,
        outages: trials - successes - failures,
        failures,
        probability: successes as f64 / n,
        ci_low,
        ci_high,
        mean_success: mine.iter().map(|r| r.success_count as f64).sum::<f64>() / n,
        mean_groups_with_leader: mine
            .iter()
            .map(|r| r.groups_with_leader() as f64)
            .sum::<f64>()
            / n,
        all_groups_led: mine
            .iter()
            .filter(|r| r.groups_with_leader() == num_groups)
            .count(),
        sca_restarts: mine.iter().map(|r| r.sca_restarts).sum(),
    }
}

pub fn report(
    cfg: &SystemConfig,
    schemes: &[SchemeId],
    records: &[TrialRecord],
    d_bits: Option<f64>,
) -> ReliabilityReport {
    ReliabilityReport {
        d_bits,
        seed: cfg.seed,
        schemes: schemes
            .iter()
            .map(|&s| (s.name().to_string(), summarize(records, s, cfg.num_groups)))
            .collect(),
    }
}

/// The message size if every user carries the same one.
pub fn uniform_bits(cfg: &SystemConfig) -> Option<f64> {
    let first = *cfg.bits_per_user.first()?;
    cfg.bits_per_user
        .iter()
        .all(|&b| b == first)
        .then_some(first)
}

fn run_all(
    cfg: &SystemConfig,
    schemes: &[SchemeId],
    trial: u64,
    ch: &ChannelSet,
) -> Result<Vec<TrialRecord>> {
    let digest = channel_digest(ch);
    schemes
        .iter()
        .map(|&s| {
            Ok(TrialRecord::from_outcome(
                trial,
                digest,
                run_scheme(cfg, s, ch)?,
            ))
        })
        .collect()
}

/// Runs `f` on `workers` threads (0 = all cores). Results come back in
/// trial order whatever the schedule.
fn parallel<T: Send>(
    workers: usize,
    n_trials: u64,
    f: impl Fn(u64) -> Result<T> + Sync + Send,
) -> Result<Vec<T>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()?;
    pool.install(|| (0..n_trials).into_par_iter().map(f).collect())
}

fn check_args(schemes: &[SchemeId], n_trials: u64) -> Result<()> {
    if n_trials == 0 {
        bail!("--trials must be at least 1");
    }
    if schemes.is_empty() {
        bail!("no scheme selected");
    }
    Ok(())
}

pub fn run_campaign(
    cfg: &SystemConfig,
    schemes: &[SchemeId],
    n_trials: u64,
    workers: usize,
) -> Result<Campaign> {
    check_args(schemes, n_trials)?;
    let per_trial = parallel(workers, n_trials, |i| {
        let (_, ch) = realization(cfg, i)?;
        run_all(cfg, schemes, i, &ch)
    })?;
    let records: Vec<TrialRecord> = per_trial.into_iter().flatten().collect();
    let report = report(cfg, schemes, &records, uniform_bits(cfg));
    Ok(Campaign { records, report })
}

/// One campaign per message size. Each trial's realization is drawn once
/// and reused for every size.
pub fn sweep_message_size(
    cfg: &SystemConfig,
    schemes: &[SchemeId],
    d_values: &[f64],
    n_trials: u64,
    workers: usize,
) -> Result<Vec<Campaign>> {
    check_args(schemes, n_trials)?;
    if d_values.is_empty() {
        bail!("--d-bits needs at least one value");
    }
    let configs: Vec<SystemConfig> = d_values
        .iter()
        .map(|&d| {
            let mut c = cfg.clone();
            c.set_uniform_bits(d);
            crate::config::check(&c)?;
            Ok(c)
        })
        .collect::<Result<_>>()?;
    let per_trial = parallel(workers, n_trials, |i| {
        let (_, ch) = realization(cfg, i)?;
        configs
            .iter()
            .map(|c| run_all(c, schemes, i, &ch))
            .collect::<Result<Vec<_>>>()
    })?;
    let mut by_d: Vec<Vec<TrialRecord>> = vec![Vec::new(); d_values.len()];
    for trial in per_trial {
        for (slot, recs) in by_d.iter_mut().zip(trial) {
            slot.extend(recs);
        }
    }
    Ok(by_d
        .into_iter()
        .zip(configs.iter().zip(d_values))
        .map(|(records, (c, &d))| Campaign {
            report: report(c, schemes, &records, Some(d)),
            records,
        })
        .collect())
}
