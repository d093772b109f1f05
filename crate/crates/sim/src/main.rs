use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use urllc_core::trial::{channel_digest, realization, SchemeId};
use urllc_core::SystemConfig;
use urllc_sim::config::{check, load_config, parse_strategy};
use urllc_sim::harness::{run_campaign, sweep_message_size, Campaign};
use urllc_sim::output;
use urllc_sim::validate;

#[derive(Parser)]
#[command(name = "urllc-sim", about = "Two-phase D2D relaying URLLC simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo campaign at one message size.
    Run(RunArgs),
    /// One campaign per message size on matched realizations.
    Sweep(RunArgs),
    /// Solver and optimizer self-tests.
    Validate {
        /// Conic solver stopping tolerance.
        #[arg(long, default_value_t = urllc_core::conic::DEFAULT_TOL)]
        tol: f64,
    },
    /// Write one realization (topology, channels, interference) as JSON.
    DumpRealization {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0)]
        trial: u64,
    },
}

#[derive(Args)]
struct Common {
    /// Flat TOML configuration; built-in defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: Common,
    /// proposed, b1 .. b6; repeatable. All schemes when omitted.
    #[arg(long = "scheme")]
    schemes: Vec<String>,
    #[arg(long, default_value_t = 300)]
    trials: u64,
    /// Message size per user in bits; a comma list for sweeps.
    #[arg(long, value_delimiter = ',')]
    d_bits: Vec<f64>,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Phase-II payload: full or residual.
    #[arg(long)]
    phase2_strategy: Option<String>,
    /// Also write the SCA traces.
    #[arg(long)]
    traces: bool,
}

fn base_config(c: &Common) -> Result<SystemConfig> {
    let mut cfg = match &c.config {
        Some(p) => load_config(p)?,
        None => SystemConfig::default(),
    };
    if let Some(s) = c.seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn schemes(names: &[String]) -> Result<Vec<SchemeId>> {
    if names.is_empty() {
        return Ok(SchemeId::ALL.to_vec());
    }
    let mut out = Vec::new();
    for n in names {
        let s: SchemeId = n.parse().map_err(|e| anyhow::anyhow!("--scheme: {e}"))?;
        if !out.contains(&s) {
            out.push(s);
        }
    }
    Ok(out)
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    let path = dir.join(name);
    Ok(BufWriter::new(
        File::create(&path).with_context(|| format!("creating {}", path.display()))?,
    ))
}

fn write_campaign(
    dir: &Path,
    suffix: &str,
    c: &Campaign,
    cfg: &SystemConfig,
    traces: bool,
) -> Result<()> {
    output::write_trials_csv(
        create(dir, &format!("trials{suffix}.csv"))?,
        &c.records,
        cfg.num_groups,
    )?;
    fs::write(
        dir.join(format!("summary{suffix}.json")),
        output::summary_json(&c.report)?,
    )?;
    if traces {
        output::write_trace_csv(
            create(dir, &format!("traces{suffix}.csv"))?,
            &c.records,
            cfg.num_groups,
        )?;
    }
    Ok(())
}

fn prepare(args: &RunArgs) -> Result<(SystemConfig, Vec<SchemeId>)> {
    let mut cfg = base_config(&args.common)?;
    if let Some(s) = &args.phase2_strategy {
        cfg.phase2_strategy = parse_strategy(s)?;
    }
    if args.trials == 0 {
        bail!("--trials must be at least 1");
    }
    fs::create_dir_all(&args.common.out_dir)
        .with_context(|| format!("creating {}", args.common.out_dir.display()))?;
    Ok((cfg, schemes(&args.schemes)?))
}

fn run(args: RunArgs) -> Result<()> {
    let (mut cfg, schemes) = prepare(&args)?;
    match args.d_bits.as_slice() {
        [] => {}
        [d] => cfg.set_uniform_bits(*d),
        _ => bail!("run takes a single --d-bits value; use sweep for several"),
    }
    check(&cfg)?;
    let c = run_campaign(&cfg, &schemes, args.trials, args.workers)?;
    write_campaign(&args.common.out_dir, "", &c, &cfg, args.traces)?;
    output::print_table(&c.report);
    Ok(())
}

fn sweep(args: RunArgs) -> Result<()> {
    let (cfg, schemes) = prepare(&args)?;
    if args.d_bits.is_empty() {
        bail!("--d-bits needs at least one value for a sweep");
    }
    let campaigns = sweep_message_size(&cfg, &schemes, &args.d_bits, args.trials, args.workers)?;
    for (c, d) in campaigns.iter().zip(&args.d_bits) {
        let mut at = cfg.clone();
        at.set_uniform_bits(*d);
        write_campaign(&args.common.out_dir, &format!("_d{d}"), c, &at, args.traces)?;
        output::print_table(&c.report);
        println!();
    }
    output::write_plot_csv(create(&args.common.out_dir, "plot.csv")?, &campaigns)?;
    Ok(())
}

fn run_validate(tol: f64) -> Result<bool> {
    let mut ok = true;
    for c in validate::run_all(tol) {
        println!(
            "{} {}: {}",
            if c.passed { "ok  " } else { "FAIL" },
            c.name,
            c.detail
        );
        ok &= c.passed;
    }
    Ok(ok)
}

fn dump(common: Common, trial: u64) -> Result<()> {
    let cfg = base_config(&common)?;
    fs::create_dir_all(&common.out_dir)?;
    let (topo, ch) = realization(&cfg, trial)?;
    let json = output::realization_json(trial, channel_digest(&ch), &topo, &ch);
    let path = common.out_dir.join(format!("realization_{trial}.json"));
    fs::write(&path, serde_json::to_string_pretty(&json)? + "\n")?;
    println!("{}", path.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => run(a).map(|_| true),
        Command::Sweep(a) => sweep(a).map(|_| true),
        Command::Validate { tol } => run_validate(tol),
        Command::DumpRealization { common, trial } => dump(common, trial).map(|_| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
