//! Flat TOML configuration files.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Deserialize;
use urllc_core::config::{validate_config, Phase2Strategy};
use urllc_core::SystemConfig;

/// Every key is optional; missing keys keep the built-in default.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub num_antennas: Option<usize>,
    pub group_sizes: Option<Vec<usize>>,
    /// Same message size for every user.
    pub d_bits: Option<f64>,
    /// Per-user message sizes, flat user order. Excludes `d_bits`.
    pub bits_per_user: Option<Vec<f64>>,
    pub bandwidth_hz: Option<f64>,
    pub latency_s: Option<f64>,
    pub phase1_s: Option<f64>,
    pub phase2_s: Option<f64>,
    pub bs_power_dbm: Option<f64>,
    pub user_power_dbm: Option<f64>,
    pub noise_psd_dbm_hz: Option<f64>,
    pub cell_radius_m: Option<f64>,
    pub group_radius_m: Option<f64>,
    pub donut_inner_m: Option<f64>,
    pub donut_outer_m: Option<f64>,
    pub rician_factor: Option<f64>,
    pub penalty_weights: Option<Vec<f64>>,
    pub phase2_strategy: Option<String>,
    pub num_neighbor_cells: Option<usize>,
    pub neighbor_power_scale: Option<f64>,
    pub seed: Option<u64>,
    pub sca_max_iters: Option<usize>,
    pub sca_rel_tol: Option<f64>,
    pub sca_slack_floor: Option<f64>,
    pub sca_max_restarts: Option<usize>,
    pub solver_tol: Option<f64>,
    pub solver_max_iter: Option<usize>,
}

pub fn parse_strategy(s: &str) -> Result<Phase2Strategy> {
    match s.to_ascii_lowercase().as_str() {
        "full" => Ok(Phase2Strategy::Full),
        "residual" => Ok(Phase2Strategy::Residual),
        _ => bail!("unknown phase-2 strategy '{s}' (expected full or residual)"),
    }
}

impl FileConfig {
    pub fn apply(self, cfg: &mut SystemConfig) -> Result<()> {
        macro_rules! set {
            ($($field:ident),*) => { $(if let Some(v) = self.$field { cfg.$field = v; })* };
        }
        set!(
            num_antennas,
            bandwidth_hz,
            latency_s,
            phase1_s,
            phase2_s,
            bs_power_dbm,
            user_power_dbm,
            noise_psd_dbm_hz,
            cell_radius_m,
            group_radius_m,
            donut_inner_m,
            donut_outer_m,
            rician_factor,
            num_neighbor_cells,
            neighbor_power_scale,
            seed
        );
        if let Some(w) = self.penalty_weights {
            cfg.penalty_weights = Some(w);
        }
        if let Some(sizes) = self.group_sizes {
            let bits = cfg.bits_per_user.first().copied().unwrap_or(0.0);
            cfg.set_groups(sizes);
            cfg.set_uniform_bits(bits);
        }
        match (self.d_bits, self.bits_per_user) {
            (Some(_), Some(_)) => bail!("set either d_bits or bits_per_user, not both"),
            (Some(d), None) => cfg.set_uniform_bits(d),
            (None, Some(b)) => cfg.bits_per_user = b,
            (None, None) => {}
        }
        if let Some(s) = self.phase2_strategy {
            cfg.phase2_strategy = parse_strategy(&s)?;
        }
        let sca = &mut cfg.sca;
        if let Some(v) = self.sca_max_iters {
            sca.max_iters = v;
        }
        if let Some(v) = self.sca_rel_tol {
            sca.rel_tol = v;
        }
        if let Some(v) = self.sca_slack_floor {
            sca.slack_floor = v;
        }
        if let Some(v) = self.sca_max_restarts {
            sca.max_restarts = v;
        }
        if let Some(v) = self.solver_tol {
            sca.solver_tol = v;
        }
        if let Some(v) = self.solver_max_iter {
            sca.solver_max_iter = v;
        }
        Ok(())
    }
}

/// Fails with every rule the configuration breaks.
pub fn check(cfg: &SystemConfig) -> Result<()> {
    let v = validate_config(cfg);
    if v.is_empty() {
        return Ok(());
    }
    let list: Vec<String> = v.iter().map(|x| format!("  {x}")).collect();
    bail!("invalid configuration:\n{}", list.join("\n"))
}

pub fn parse_config(text: &str) -> Result<SystemConfig> {
    let file: FileConfig = toml::from_str(text)?;
    let mut cfg = SystemConfig::default();
    file.apply(&mut cfg)?;
    check(&cfg)?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<SystemConfig> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_config(&text).with_context(|| format!("in {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_the_default() {
        assert_eq!(parse_config("").unwrap(), SystemConfig::default());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(parse_config("antennas = 4").is_err());
    }

    #[test]
    fn groups_keep_the_message_size() {
        let cfg = parse_config("group_sizes = [2, 3]\nd_bits = 16").unwrap();
        assert_eq!(cfg.num_groups, 2);
        assert_eq!(cfg.bits_per_user, vec![16.0; 5]);
        let cfg = parse_config("group_sizes = [2, 3]").unwrap();
        assert_eq!(cfg.bits_per_user, vec![22.0; 5]);
    }

    #[test]
    fn violations_are_listed() {
        let err = parse_config("num_antennas = 0\nlatency_s = -1").unwrap_err();
        let msg = format!("{err:#}");
        assert!(msg.contains("num_antennas"), "{msg}");
    }
}
