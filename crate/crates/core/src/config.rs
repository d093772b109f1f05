//! System configuration and its validation rules.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::math;
use crate::units;

/// How much payload the Phase-II leaders forward.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Phase2Strategy {
    /// Leaders relay the whole group packet.
    #[default]
    Full,
    /// Leaders relay only the messages of the users that failed Phase I.
    Residual,
}

/// Iteration controls for the successive convex approximation.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaOptions {
    pub max_iters: usize,
    /// Stop once the relative objective change drops below this.
    pub rel_tol: f64,
    /// Floor applied to slacks before they enter a gradient denominator.
    pub slack_floor: f64,
    /// Fresh initializations tried after a failed first subproblem.
    pub max_restarts: usize,
    pub solver_tol: f64,
    pub solver_max_iter: usize,
}

impl Default for ScaOptions {
    fn default() -> Self {
        ScaOptions {
            max_iters: 30,
            rel_tol: 1e-4,
            slack_floor: 1e-8,
            max_restarts: 2,
            solver_tol: 1e-7,
            solver_max_iter: 100,
        }
    }
}

/// Physical and protocol constants for one simulation setup.
///
/// Users are indexed group by group: the `k`th user of group `n` sits at
/// flat index `sum(group_sizes[..n]) + k`.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    pub num_antennas: usize,
    pub num_groups: usize,
    pub group_sizes: Vec<usize>,
    pub bandwidth_hz: f64,
    pub latency_s: f64,
    pub phase1_s: f64,
    pub phase2_s: f64,
    pub bs_power_dbm: f64,
    pub user_power_dbm: f64,
    pub noise_psd_dbm_hz: f64,
    /// Message size of every user in bits, flat user order.
    pub bits_per_user: Vec<f64>,
    pub cell_radius_m: f64,
    pub group_radius_m: f64,
    pub donut_inner_m: f64,
    pub donut_outer_m: f64,
    /// Rician K-factor of the intra-group D2D links; `f64::INFINITY` is pure LOS.
    pub rician_factor: f64,
    /// Per-group penalty weights; `None` means `2^{K_n}`.
    pub penalty_weights: Option<Vec<f64>>,
    pub sca: ScaOptions,
    pub phase2_strategy: Phase2Strategy,
    /// Number of interfering neighbor cells (0..=6).
    pub num_neighbor_cells: usize,
    /// Multiplier applied to every neighbor transmit power.
    pub neighbor_power_scale: f64,
    pub seed: u64,
}

impl Default for SystemConfig {
    fn default() -> Self {
        let group_sizes = vec![8; 6];
        SystemConfig {
            num_antennas: 8,
            num_groups: 6,
            bits_per_user: vec![22.0; 48],
            group_sizes,
            bandwidth_hz: 1e5,
            latency_s: 1e-3,
            phase1_s: 7.5e-4,
            phase2_s: 2.5e-4,
            bs_power_dbm: 43.0,
            user_power_dbm: 23.0,
            noise_psd_dbm_hz: -169.0,
            cell_radius_m: 500.0,
            group_radius_m: 20.0,
            donut_inner_m: 250.0,
            donut_outer_m: 350.0,
            rician_factor: 4.0,
            penalty_weights: None,
            sca: ScaOptions::default(),
            phase2_strategy: Phase2Strategy::Full,
            num_neighbor_cells: 6,
            neighbor_power_scale: 1.0,
            seed: 0,
        }
    }
}

impl SystemConfig {
    /// Total number of users in the reference cell.
    pub fn num_users(&self) -> usize {
        self.group_sizes.iter().sum()
    }

    /// Sets every user's message size to `bits`.
    pub fn set_uniform_bits(&mut self, bits: f64) {
        self.bits_per_user = vec![bits; self.num_users()];
    }

    /// Replaces the group structure, resizing per-user message sizes with a
    /// uniform value taken from the first user (or zero).
    pub fn set_groups(&mut self, group_sizes: Vec<usize>) {
        let bits = self.bits_per_user.first().copied().unwrap_or(0.0);
        self.num_groups = group_sizes.len();
        self.group_sizes = group_sizes;
        self.set_uniform_bits(bits);
    }

    /// Group index of every user in flat order.
    pub fn group_of_users(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.num_users());
        for (n, &k) in self.group_sizes.iter().enumerate() {
            out.extend(core::iter::repeat(n).take(k));
        }
        out
    }

    /// Flat index range of group `n`.
    pub fn group_range(&self, n: usize) -> core::ops::Range<usize> {
        let start: usize = self.group_sizes[..n].iter().sum();
        start..start + self.group_sizes[n]
    }

    pub fn group_bits(&self, n: usize) -> f64 {
        self.bits_per_user[self.group_range(n)].iter().sum()
    }

    pub fn total_bits(&self) -> f64 {
        self.bits_per_user.iter().sum()
    }

    pub fn penalty_weight(&self, n: usize) -> f64 {
        match &self.penalty_weights {
            Some(w) => w[n],
            None => math::powf(2.0, self.group_sizes[n] as f64),
        }
    }

    pub fn bs_power_w(&self) -> f64 {
        units::dbm_to_watts(self.bs_power_dbm)
    }

    pub fn user_power_w(&self) -> f64 {
        units::dbm_to_watts(self.user_power_dbm)
    }

    pub fn noise_power_w(&self) -> f64 {
        units::noise_power_watts(self.noise_psd_dbm_hz, self.bandwidth_hz)
    }

    pub fn phase1_symbols(&self) -> f64 {
        self.phase1_s * self.bandwidth_hz
    }

    pub fn phase2_symbols(&self) -> f64 {
        self.phase2_s * self.bandwidth_hz
    }

    pub fn total_symbols(&self) -> f64 {
        self.latency_s * self.bandwidth_hz
    }
}

/// One failed configuration rule.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub field: &'static str,
    pub message: String,
}

impl core::fmt::Display for Violation {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

fn positive(x: f64) -> bool {
    x > 0.0 && x.is_finite()
}

/// Checks every configuration rule; the list is empty iff the config is usable.
pub fn validate_config(cfg: &SystemConfig) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut bad = |field: &'static str, message: String| out.push(Violation { field, message });

    if cfg.num_antennas == 0 {
        bad("num_antennas", "at least one antenna is required".into());
    }
    if cfg.num_groups == 0 {
        bad("num_groups", "at least one group is required".into());
    }
    if cfg.group_sizes.len() != cfg.num_groups {
        bad(
            "group_sizes",
            format!(
                "{} sizes given for {} groups",
                cfg.group_sizes.len(),
                cfg.num_groups
            ),
        );
    }
    if cfg.group_sizes.iter().any(|&k| k == 0) {
        bad("group_sizes", "every group needs at least one user".into());
    }
    if !positive(cfg.bandwidth_hz) {
        bad("bandwidth_hz", "must be positive".into());
    }
    if !positive(cfg.latency_s) {
        bad("latency_s", "must be positive".into());
    }
    if !positive(cfg.phase1_s) {
        bad("phase1_s", "must be positive".into());
    }
    if !positive(cfg.phase2_s) {
        bad(
            "phase2_s",
            "must be positive (phase 1 cannot use the whole budget)".into(),
        );
    }
    if positive(cfg.latency_s)
        && (cfg.phase1_s + cfg.phase2_s - cfg.latency_s).abs() > 1e-12 * cfg.latency_s
    {
        bad(
            "phase2_s",
            format!(
                "phase split {} + {} does not add up to latency {}",
                cfg.phase1_s, cfg.phase2_s, cfg.latency_s
            ),
        );
    }
    for (field, dbm) in [
        ("bs_power_dbm", cfg.bs_power_dbm),
        ("user_power_dbm", cfg.user_power_dbm),
        ("noise_psd_dbm_hz", cfg.noise_psd_dbm_hz),
    ] {
        if !positive(units::dbm_to_watts(dbm)) {
            bad(field, "must convert to a positive finite power".into());
        }
    }
    let k: usize = cfg.group_sizes.iter().sum();
    if cfg.bits_per_user.len() != k {
        bad(
            "bits_per_user",
            format!(
                "{} message sizes given for {} users",
                cfg.bits_per_user.len(),
                k
            ),
        );
    }
    if cfg
        .bits_per_user
        .iter()
        .any(|&b| !(b >= 0.0 && b.is_finite()))
    {
        bad(
            "bits_per_user",
            "message sizes must be finite and nonnegative".into(),
        );
    }
    if !positive(cfg.cell_radius_m) {
        bad("cell_radius_m", "must be positive".into());
    }
    if !(cfg.group_radius_m >= 0.0 && cfg.group_radius_m.is_finite()) {
        bad("group_radius_m", "must be finite and nonnegative".into());
    }
    if !(cfg.donut_inner_m >= 0.0) {
        bad("donut_inner_m", "must be nonnegative".into());
    }
    if !(cfg.donut_inner_m < cfg.donut_outer_m) {
        bad(
            "donut_outer_m",
            "outer radius must exceed inner radius".into(),
        );
    }
    if !(cfg.donut_outer_m <= cfg.cell_radius_m) {
        bad("donut_outer_m", "annulus must fit inside the cell".into());
    }
    if !(cfg.rician_factor >= 0.0) {
        bad("rician_factor", "must be nonnegative".into());
    }
    if let Some(w) = &cfg.penalty_weights {
        if w.len() != cfg.num_groups {
            bad(
                "penalty_weights",
                format!("{} weights given for {} groups", w.len(), cfg.num_groups),
            );
        }
        if w.iter().any(|&b| !positive(b)) {
            bad(
                "penalty_weights",
                "every weight must be strictly positive".into(),
            );
        }
    }
    if cfg.sca.max_iters == 0 {
        bad("sca.max_iters", "at least one iteration is required".into());
    }
    if !positive(cfg.sca.rel_tol) {
        bad("sca.rel_tol", "must be positive".into());
    }
    if !positive(cfg.sca.slack_floor) {
        bad("sca.slack_floor", "must be positive".into());
    }
    if !positive(cfg.sca.solver_tol) {
        bad("sca.solver_tol", "must be positive".into());
    }
    if cfg.sca.solver_max_iter == 0 {
        bad(
            "sca.solver_max_iter",
            "at least one iteration is required".into(),
        );
    }
    if cfg.num_neighbor_cells > 6 {
        bad(
            "num_neighbor_cells",
            "the wrap-around ring has six neighbors".into(),
        );
    }
    if !(cfg.neighbor_power_scale >= 0.0 && cfg.neighbor_power_scale.is_finite()) {
        bad(
            "neighbor_power_scale",
            "must be finite and nonnegative".into(),
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fields(cfg: &SystemConfig) -> Vec<&'static str> {
        validate_config(cfg).into_iter().map(|v| v.field).collect()
    }

    #[test]
    fn default_is_valid() {
        let cfg = SystemConfig::default();
        assert!(validate_config(&cfg).is_empty());
        assert_eq!(cfg.num_users(), 48);
        assert_eq!(cfg.penalty_weight(0), 256.0);
        assert!((cfg.phase1_symbols() - 75.0).abs() < 1e-9);
        assert!((cfg.phase2_symbols() - 25.0).abs() < 1e-9);
    }

    #[test]
    fn whole_budget_in_phase_one() {
        let mut cfg = SystemConfig::default();
        cfg.phase1_s = cfg.latency_s;
        cfg.phase2_s = 0.0;
        assert!(fields(&cfg).contains(&"phase2_s"));
        let mut cfg = SystemConfig::default();
        cfg.phase1_s = cfg.latency_s;
        assert!(fields(&cfg).contains(&"phase2_s"));
    }

    #[test]
    fn zero_penalty_weight() {
        let mut cfg = SystemConfig::default();
        cfg.penalty_weights = Some(vec![256.0, 256.0, 0.0, 256.0, 256.0, 256.0]);
        assert_eq!(fields(&cfg), vec!["penalty_weights"]);
    }

    #[test]
    fn group_bookkeeping() {
        let mut cfg = SystemConfig::default();
        cfg.set_groups(vec![2, 3]);
        assert_eq!(cfg.group_range(1), 2..5);
        assert_eq!(cfg.group_of_users(), vec![0, 0, 1, 1, 1]);
        assert_eq!(cfg.group_bits(1), 66.0);
        assert!(validate_config(&cfg).is_empty());
        cfg.group_sizes[0] = 0;
        assert!(fields(&cfg).contains(&"group_sizes"));
    }
}
