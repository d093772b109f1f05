//! Result files: per-trial CSV, summary JSON, plot data, SCA traces and
//! realization dumps.

use std::io::Write;

use anyhow::Result;
use serde::Serialize;
use serde_json::{json, Value};
use urllc_core::radio::{ChannelSet, Point, Topology};

use crate::harness::{Campaign, ReliabilityReport, TrialRecord};

/// Bumped whenever a field of the summary JSON changes meaning or name.
pub const SUMMARY_SCHEMA_VERSION: u32 = 1;

pub fn write_trials_csv<W: Write>(
    out: W,
    records: &[TrialRecord],
    num_groups: usize,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = [
        "trial",
        "scheme",
        "success_count",
        "urllc",
        "solver_failed",
        "digest",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    header.extend((0..num_groups).map(|n| format!("leaders_g{n}")));
    w.write_record(&header)?;
    for r in records {
        let mut row = vec![
            r.trial.to_string(),
            r.scheme.name().to_string(),
            r.success_count.to_string(),
            (r.urllc as u8).to_string(),
            (r.solver_failed as u8).to_string(),
            format!("{:016x}", r.digest),
        ];
        row.extend(r.leaders_per_group.iter().map(|n| n.to_string()));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct SummaryFile<'a> {
    schema_version: u32,
    #[serde(flatten)]
    report: &'a ReliabilityReport,
}

pub fn summary_json(report: &ReliabilityReport) -> Result<String> {
    let mut s = serde_json::to_string_pretty(&SummaryFile {
        schema_version: SUMMARY_SCHEMA_VERSION,
        report,
    })?;
    s.push('\n');
    Ok(s)
}

/// Columns `D, scheme, probability, ci_low, ci_high`, one row per
/// (campaign, scheme).
pub fn write_plot_csv<W: Write>(out: W, campaigns: &[Campaign]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["D", "scheme", "probability", "ci_low", "ci_high"])?;
    for c in campaigns {
        let d = c.report.d_bits.map_or(String::new(), |d| d.to_string());
        for (name, s) in &c.report.schemes {
            w.write_record([
                d.clone(),
                name.clone(),
                s.probability.to_string(),
                s.ci_low.to_string(),
                s.ci_high.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// One row per SCA iterate: objective and the smallest slack of each group.
pub fn write_trace_csv<W: Write>(out: W, records: &[TrialRecord], num_groups: usize) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = ["trial", "scheme", "restart", "iteration", "objective"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    header.extend((0..num_groups).map(|n| format!("min_slack_g{n}")));
    w.write_record(&header)?;
    for r in records {
        let Some(tr) = &r.trace else { continue };
        for (l, (f, slacks)) in tr.objectives.iter().zip(&tr.min_group_slack).enumerate() {
            let mut row = vec![
                r.trial.to_string(),
                r.scheme.name().to_string(),
                tr.restarts.to_string(),
                l.to_string(),
                f.to_string(),
            ];
            row.extend(slacks.iter().map(|s| s.to_string()));
            // Single-beam designs report one value; pad to the header width.
            row.resize(5 + num_groups.max(slacks.len()), String::new());
            w.write_record(&row)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn print_table(report: &ReliabilityReport) {
    if let Some(d) = report.d_bits {
        println!("D = {d} bits, seed {}", report.seed);
    }
    println!(
        "{:<10} {:>7} {:>10} {:>17} {:>13} {:>11} {:>9}",
        "scheme", "trials", "P(URLLC)", "95% CI", "mean success", "groups led", "failures"
    );
    for (name, s) in &report.schemes {
        println!(
            "{:<10} {:>7} {:>9.2}% {:>17} {:>13.3} {:>11.3} {:>9}",
            name,
            s.trials,
            100.0 * s.probability,
            format!("{:.2}-{:.2}%", 100.0 * s.ci_low, 100.0 * s.ci_high),
            s.mean_success,
            s.mean_groups_with_leader,
            s.failures
        );
    }
}

fn point(p: &Point) -> Value {
    json!([p.x, p.y])
}

pub fn realization_json(trial: u64, digest: u64, topo: &Topology, ch: &ChannelSet) -> Value {
    let cplx =
        |v: &[num_complex::Complex64]| -> Value { v.iter().map(|z| json!([z.re, z.im])).collect() };
    json!({
        "trial": trial,
        "digest": format!("{digest:016x}"),
        "bs_positions_m": topo.bs_positions.iter().map(point).collect::<Vec<_>>(),
        "group_centers_m": topo.group_centers.iter().map(|c| c.iter().map(point).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "user_positions_m": topo.user_positions.iter().map(|c| c.iter().map(point).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "num_antennas": ch.num_antennas,
        "downlink": ch.downlink.iter().map(|h| cplx(h)).collect::<Vec<_>>(),
        "d2d": cplx(&ch.d2d),
        "interference_phase1_w": ch.interference_phase1,
        "interference_phase2_w": ch.interference_phase2,
        "noise_power_w": ch.noise_power,
    })
}
