//! Self-tests behind the `validate` subcommand.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use urllc_core::beamform::{
    inner, linearize_penalty, linearize_quadratic, penalty, run_sca, solve_broadcast,
    ObjectiveMode, ScaTrace, DESIGN_MARGIN,
};
use urllc_core::conic::{self, ConicProgram, LinExpr};
use urllc_core::protocol::phase1_targets;
use urllc_core::radio::ChannelSet;
use urllc_core::trial::realization;
use urllc_core::units::min_sinr_target;
use urllc_core::{SinrTarget, SystemConfig};

use crate::oracle::OracleInstance;

#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &'static str, failures: &[String], summary: String) -> Self {
        Check {
            name,
            passed: failures.is_empty(),
            detail: match failures.first() {
                None => summary,
                Some(f) => format!("{summary}; {} failing, first: {f}", failures.len()),
            },
        }
    }
}

/// Random conic programs against the grid-zoom optimum.
pub fn conic_oracle(count: usize, tol: f64, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    let mut worst = 0.0f64;
    for i in 0..count {
        let inst = OracleInstance::random(&mut rng);
        let Some(brute) = inst.brute_force() else {
            failures.push(format!("instance {i}: no feasible grid point"));
            continue;
        };
        match conic::solve(&inst.program, tol, conic::DEFAULT_MAX_ITER) {
            Ok(sol) if sol.status == conic::Status::Optimal => {
                let gap = (sol.objective - brute).abs();
                worst = worst.max(gap);
                if gap > 1e-3 {
                    failures.push(format!(
                        "instance {i}: solver {} vs grid {brute}",
                        sol.objective
                    ));
                }
            }
            Ok(sol) => failures.push(format!(
                "instance {i}: status {:?}, residuals primal {:.2e} dual {:.2e} gap {:.2e}",
                sol.status, sol.residuals.primal, sol.residuals.dual, sol.residuals.gap
            )),
            Err(e) => failures.push(format!("instance {i}: {e}")),
        }
    }
    Check::new(
        "conic programs match brute force",
        &failures,
        format!("{count} programs, largest objective gap {worst:.2e}"),
    )
}

fn single_user(h: Vec<Complex64>, interference: f64) -> (SystemConfig, ChannelSet) {
    let mut cfg = SystemConfig::default();
    cfg.num_antennas = h.len();
    cfg.set_groups(vec![1]);
    let ch = ChannelSet {
        num_antennas: h.len(),
        downlink: vec![h],
        d2d: vec![Complex64::new(0.0, 0.0)],
        interference_phase1: vec![interference],
        interference_phase2: vec![interference],
        noise_power: interference,
    };
    (cfg, ch)
}

/// `min ||w|| s.t. a.w >= 1` and single-user broadcast, both in closed form.
pub fn min_norm_cases(tol: f64, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    let mut worst = 0.0f64;
    for i in 0..20 {
        let m = rng.random_range(1..=8usize);
        let a: Vec<f64> = (0..m).map(|_| rng.random_range(-2.0..2.0)).collect();
        let na2: f64 = a.iter().map(|v| v * v).sum();
        let mut p = ConicProgram::new(m + 1);
        p.objective[m] = 1.0;
        p.add_soc(LinExpr::var(m), (0..m).map(LinExpr::var).collect(), "norm");
        let mut e = LinExpr::constant(-1.0);
        for (j, &aj) in a.iter().enumerate() {
            e = e.add(j, aj);
        }
        p.add_linear_ge(e, "gain");
        match conic::solve(&p, tol, conic::DEFAULT_MAX_ITER) {
            Ok(s) if s.status == conic::Status::Optimal => {
                let mut err = (s.objective - 1.0 / na2.sqrt()).abs();
                for j in 0..m {
                    err = err.max((s.x[j] - a[j] / na2).abs());
                }
                worst = worst.max(err);
                if err > 1e-6 {
                    failures.push(format!("real case {i}: error {err:.2e}"));
                }
            }
            Ok(s) => failures.push(format!(
                "real case {i}: status {:?}, residuals primal {:.2e} dual {:.2e} gap {:.2e}",
                s.status, s.residuals.primal, s.residuals.dual, s.residuals.gap
            )),
            Err(e) => failures.push(format!("real case {i}: {e}")),
        }
    }
    // One user, per-user beam: out of reach, full-power MRT is optimal.
    for i in 0..10 {
        let m = rng.random_range(1..=8usize);
        let h: Vec<Complex64> = (0..m)
            .map(|_| {
                Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * 1e-6
            })
            .collect();
        let (mut cfg, ch) = single_user(h.clone(), 1e-12);
        cfg.sca.solver_tol = tol;
        let norm2: f64 = h.iter().map(|z| z.norm_sqr()).sum();
        let reach = cfg.bs_power_w() * norm2 / 1e-12;
        let below = SinrTarget::from_linear(0.9 * reach).unwrap();
        let above = 3.0 * reach;
        match solve_broadcast(&ch, &[below], &cfg) {
            Ok(o) if o.solved && o.t[0] == 0.0 => {}
            Ok(o) => failures.push(format!(
                "broadcast case {i}: reachable target left slack {:?}",
                o.t
            )),
            Err(e) => failures.push(format!("broadcast case {i}: {e}")),
        }
        match solve_broadcast(&ch, &[SinrTarget::from_linear(above).unwrap()], &cfg) {
            Ok(o) if o.solved => {
                let w = &o.beams.beams[0];
                let y = inner(&h, w);
                let phase = y / y.norm();
                let scale = cfg.bs_power_w().sqrt() / norm2.sqrt();
                let mut err = 0.0f64;
                for (z, hz) in w.iter().zip(&h) {
                    err = err.max((z - hz.conj() * scale * phase).norm() / cfg.bs_power_w().sqrt());
                }
                let t = 1.0 - (reach / (above * (1.0 + DESIGN_MARGIN))).sqrt();
                err = err.max((o.t[0] - t).abs());
                worst = worst.max(err);
                if err > 1e-6 {
                    failures.push(format!("broadcast case {i}: error {err:.2e}"));
                }
            }
            Ok(o) => failures.push(format!("broadcast case {i}: status {:?}", o.status)),
            Err(e) => failures.push(format!("broadcast case {i}: {e}")),
        }
    }
    Check::new(
        "minimum-norm beams match closed form",
        &failures,
        format!("30 cases, largest error {worst:.2e}"),
    )
}

/// Zero iff every group has a zero slack, on an exhaustive grid.
pub fn penalty_zero_set() -> Check {
    const GRID: [f64; 4] = [0.0, 1e-3, 0.5, 2.0];
    let groups = [0..2, 2..5];
    let beta = [4.0, 8.0];
    let mut failures = Vec::new();
    let total = GRID.len().pow(5);
    for code in 0..total {
        let mut c = code;
        let t: Vec<f64> = (0..5)
            .map(|_| {
                let v = GRID[c % GRID.len()];
                c /= GRID.len();
                v
            })
            .collect();
        let p = penalty(&t, &groups, &beta).unwrap();
        let led = groups.iter().all(|g| t[g.clone()].contains(&0.0));
        if (p == 0.0) != led {
            failures.push(format!("{t:?} gives {p}"));
        }
    }
    Check::new(
        "penalty vanishes exactly when every group leads",
        &failures,
        format!("{total} grid points"),
    )
}

fn random_slack<R: Rng>(rng: &mut R) -> f64 {
    match rng.random_range(0..3) {
        0 => 0.0,
        1 => rng.random_range(1e-6..1e-3),
        _ => rng.random_range(1e-3..10.0),
    }
}

/// The penalty tangent lies above the penalty.
pub fn penalty_majorizer(draws: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    let mut worst_tight = 0.0f64;
    for i in 0..draws {
        let sizes: Vec<usize> = (0..rng.random_range(1..=4))
            .map(|_| rng.random_range(1..=8))
            .collect();
        let mut start = 0;
        let groups: Vec<_> = sizes
            .iter()
            .map(|&s| {
                start += s;
                start - s..start
            })
            .collect();
        let beta: Vec<f64> = sizes.iter().map(|&s| (1u64 << s) as f64).collect();
        let t: Vec<f64> = (0..start).map(|_| random_slack(&mut rng)).collect();
        let t_hat: Vec<f64> = (0..start).map(|_| random_slack(&mut rng)).collect();
        let lin = linearize_penalty(&t_hat, &groups, &beta, 1e-8).unwrap();
        let p = penalty(&t, &groups, &beta).unwrap();
        let f = lin.eval(&t);
        if f < p - 1e-12 * (1.0 + p) {
            failures.push(format!("draw {i}: surrogate {f} below penalty {p}"));
        }
        let at = penalty(&lin.t_hat, &groups, &beta).unwrap();
        let tight = (lin.eval(&lin.t_hat) - at).abs();
        worst_tight = worst_tight.max(tight);
        if tight > 1e-12 * (1.0 + at) {
            failures.push(format!("draw {i}: gap {tight:e} at the expansion point"));
        }
    }
    Check::new(
        "penalty tangent majorizes the penalty",
        &failures,
        format!("{draws} draws, largest gap at expansion point {worst_tight:.1e}"),
    )
}

/// The tangent of `a^2 + b^2` lies below it.
pub fn quadratic_minorizer(draws: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    let mut worst_tight = 0.0f64;
    for i in 0..draws {
        let m = rng.random_range(1..=8usize);
        let mut c = || Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let h: Vec<Complex64> = (0..m).map(|_| c()).collect();
        let w: Vec<Complex64> = (0..m).map(|_| c()).collect();
        let (a, b) = (rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
        let lin = linearize_quadratic(&h, &w);
        if lin.eval(a, b) > a * a + b * b + 1e-12 {
            failures.push(format!(
                "draw {i}: tangent above the quadratic at ({a}, {b})"
            ));
        }
        let y = inner(&h, &w);
        let tight = (lin.eval(y.re, y.im) - y.norm_sqr()).abs();
        worst_tight = worst_tight.max(tight);
        if tight > 1e-12 * (1.0 + y.norm_sqr()) {
            failures.push(format!("draw {i}: gap {tight:e} at the expansion point"));
        }
    }
    Check::new(
        "quadratic tangent minorizes |h^T w|^2",
        &failures,
        format!("{draws} draws, largest gap at expansion point {worst_tight:.1e}"),
    )
}

/// Problems with one SCA trace, if any.
pub fn trace_problems(tr: &ScaTrace, kkt_tol: f64) -> Option<String> {
    if tr.failed {
        return Some("no subproblem solved".into());
    }
    if let Some(w) = tr.objectives.windows(2).find(|w| w[1] > w[0] + 1e-6) {
        return Some(format!("objective rose from {} to {}", w[0], w[1]));
    }
    for (f, s) in tr.objectives[1..].iter().zip(&tr.surrogates) {
        if *f > s + 1e-6 * (1.0 + s.abs()) {
            return Some(format!("objective {f} above its surrogate {s}"));
        }
    }
    // Slacks snapped to zero may leave 1e-7 in the margined constraints;
    // the margin keeps the unmargined ones satisfied.
    if tr.max_incumbent_violation > 2e-7 {
        return Some(format!(
            "incumbent violates its subproblem by {:e}",
            tr.max_incumbent_violation
        ));
    }
    if tr.max_iterate_violation > 1e-9 {
        return Some(format!(
            "iterate violates the constraints by {:e}",
            tr.max_iterate_violation
        ));
    }
    match tr.last_residuals {
        Some(r) if r.max() <= kkt_tol => None,
        Some(r) => Some(format!(
            "last subproblem residuals primal {:.2e} dual {:.2e} gap {:.2e}",
            r.primal, r.dual, r.gap
        )),
        // Only when the start was already optimal (all targets zero).
        None if tr.objectives.last() == Some(&0.0) => None,
        None => Some("no residuals recorded".into()),
    }
}

/// SCA on small synthetic cells.
pub fn sca_invariants(count: u64, tol: f64) -> Check {
    let mut cfg = SystemConfig::default();
    cfg.num_antennas = 4;
    cfg.set_groups(vec![3, 3, 2]);
    cfg.set_uniform_bits(16.0);
    cfg.seed = 7;
    cfg.sca.solver_tol = tol;
    let mut failures = Vec::new();
    let targets = phase1_targets(&cfg).unwrap();
    for i in 0..count {
        let ch = match realization(&cfg, i) {
            Ok((_, ch)) => ch,
            Err(e) => {
                failures.push(format!("realization {i}: {e}"));
                continue;
            }
        };
        for mode in [ObjectiveMode::L1WithPenalty, ObjectiveMode::L1] {
            match run_sca(&ch, &targets, &cfg, mode) {
                Ok(out) => {
                    if let Some(p) = trace_problems(&out.trace, 1e-6) {
                        failures.push(format!("realization {i} {mode:?}: {p}"));
                    }
                    if out.beams.total_power > cfg.bs_power_w() * (1.0 + 1e-9) {
                        failures.push(format!(
                            "realization {i} {mode:?}: power {}",
                            out.beams.total_power
                        ));
                    }
                }
                Err(e) => failures.push(format!("realization {i} {mode:?}: {e}")),
            }
        }
    }
    Check::new(
        "SCA traces descend and stay feasible",
        &failures,
        format!("{} runs", 2 * count),
    )
}

/// Minimum-SINR targets for the two headline message sizes.
pub fn target_cross_checks() -> Check {
    let multicast = min_sinr_target(576.0, 75.0).unwrap().db();
    let cell_wide = min_sinr_target(1056.0, 75.0).unwrap().db();
    let mut failures = Vec::new();
    if (multicast - 23.10).abs() > 0.01 {
        failures.push(format!(
            "576 bits in 75 symbols: {multicast:.4} dB, expected 23.10"
        ));
    }
    if !(42.0..=42.8).contains(&cell_wide) {
        failures.push(format!(
            "1056 bits in 75 symbols: {cell_wide:.4} dB, expected about 42.4"
        ));
    }
    Check::new(
        "minimum SINR targets",
        &failures,
        format!("576 bits -> {multicast:.2} dB, 1056 bits -> {cell_wide:.2} dB"),
    )
}

pub fn run_all(tol: f64) -> Vec<Check> {
    vec![
        target_cross_checks(),
        conic_oracle(100, tol, 1),
        min_norm_cases(tol, 2),
        penalty_zero_set(),
        penalty_majorizer(10_000, 3),
        quadratic_minorizer(10_000, 4),
        sca_invariants(10, tol),
    ]
}
