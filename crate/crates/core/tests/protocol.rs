use num_complex::Complex64;
use proptest::prelude::*;
use urllc_core::beamform::{BeamVariant, BeamformerSet};
use urllc_core::config::Phase2Strategy;
use urllc_core::protocol::*;
use urllc_core::radio::ChannelSet;
use urllc_core::units::min_sinr_target;
use urllc_core::{SinrTarget, SystemConfig};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn config(groups: Vec<usize>, antennas: usize) -> SystemConfig {
    let mut cfg = SystemConfig::default();
    cfg.num_antennas = antennas;
    cfg.set_groups(groups);
    cfg
}

/// Channels with every D2D link zero and the given interference.
fn channels(downlink: Vec<Vec<Complex64>>, i1: f64, i2: f64) -> ChannelSet {
    let k = downlink.len();
    ChannelSet {
        num_antennas: downlink[0].len(),
        downlink,
        d2d: vec![c(0.0, 0.0); k * k],
        interference_phase1: vec![i1; k],
        interference_phase2: vec![i2; k],
        noise_power: i1.min(i2),
    }
}

fn set_link(ch: &mut ChannelSet, tx: usize, rx: usize, h: Complex64) {
    let k = ch.num_users();
    ch.d2d[tx * k + rx] = h;
}

#[test]
fn scalar_two_group_sinr() {
    let cfg = config(vec![1, 1], 1);
    let ch = channels(vec![vec![c(1.0, 0.0)], vec![c(1.0, 0.0)]], 1.0, 1.0);
    let beams = BeamformerSet::new(
        BeamVariant::PerGroup,
        vec![vec![c(1.0, 0.0)], vec![c(1.0, 0.0)]],
    );
    let s = phase1_sinr(&ch, &beams, &cfg).unwrap();
    assert_eq!(s, vec![0.5, 0.5]);
}

#[test]
fn orthogonal_groups_see_no_interference() {
    let cfg = config(vec![1, 1], 2);
    let ch = channels(
        vec![
            vec![c(2.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 3.0)],
        ],
        0.5,
        0.5,
    );
    let beams = BeamformerSet::new(
        BeamVariant::PerGroup,
        vec![
            vec![c(1.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(1.0, 0.0)],
        ],
    );
    let s = phase1_sinr(&ch, &beams, &cfg).unwrap();
    assert_eq!(s, vec![4.0 / 0.5, 9.0 / 0.5]);
}

#[test]
fn zero_beams_give_zero_sinr() {
    let cfg = config(vec![2, 1], 2);
    let ch = channels(vec![vec![c(1.0, 1.0); 2]; 3], 1e-9, 1e-9);
    let beams = BeamformerSet::zeros(BeamVariant::PerGroup, 2, 2);
    assert!(phase1_sinr(&ch, &beams, &cfg)
        .unwrap()
        .iter()
        .all(|&s| s == 0.0));
    let wrong = BeamformerSet::zeros(BeamVariant::PerGroup, 3, 2);
    assert!(phase1_sinr(&ch, &wrong, &cfg).is_err());
}

#[test]
fn indicator_boundary_is_closed() {
    let t = SinrTarget::from_linear(2.0).unwrap();
    assert_eq!(
        phase1_indicators(&[2.0, 1.999, 3.0], &[t; 3]),
        vec![true, false, true]
    );
    assert_eq!(
        phase1_indicators(&[0.0, 0.0], &[SinrTarget::ZERO; 2]),
        vec![true, true]
    );
}

#[test]
fn coherent_single_leader_value() {
    let mut cfg = config(vec![2], 1);
    cfg.user_power_dbm = 30.0;
    let mut ch = channels(vec![vec![c(1.0, 0.0)]; 2], 1e-6, 1e-6);
    set_link(&mut ch, 0, 1, c(0.01, 0.0));
    let s = phase2_sinr_coherent(&ch, &[true, false], &cfg);
    assert_eq!(s[0], None);
    assert!((s[1].unwrap() - 100.0).abs() < 1e-9);
    let none = phase2_sinr_coherent(&ch, &[false, false], &cfg);
    assert_eq!(none, vec![Some(0.0), Some(0.0)]);
}

#[test]
fn coherent_combining_can_cancel() {
    let mut cfg = config(vec![3], 1);
    cfg.user_power_dbm = 30.0;
    let mut ch = channels(vec![vec![c(1.0, 0.0)]; 3], 1e-6, 1e-6);
    set_link(&mut ch, 0, 2, c(0.01, 0.0));
    set_link(&mut ch, 1, 2, c(-0.01, 0.0));
    let one = phase2_sinr_coherent(&ch, &[true, false, false], &cfg)[2].unwrap();
    let two = phase2_sinr_coherent(&ch, &[true, true, false], &cfg)[2].unwrap();
    assert!(one > 99.0);
    // A second leader makes the relayed signal vanish.
    assert!(two.abs() < 1e-12, "{two}");
    let sel = phase2_sinr_selection(&ch, &[true, true, false], &cfg)[2].unwrap();
    assert!((sel - one).abs() < 1e-9 * one);
}

#[test]
fn selection_takes_the_best_link() {
    let mut cfg = config(vec![3], 1);
    cfg.user_power_dbm = 30.0;
    let mut ch = channels(vec![vec![c(1.0, 0.0)]; 3], 1.0, 1.0);
    set_link(&mut ch, 0, 2, c(3f64.sqrt(), 0.0));
    set_link(&mut ch, 1, 2, c(0.0, 5f64.sqrt()));
    let s = phase2_sinr_selection(&ch, &[true, true, false], &cfg);
    assert!((s[2].unwrap() - 5.0).abs() < 1e-12);
    assert_eq!(phase2_sinr_selection(&ch, &[false; 3], &cfg)[2], Some(0.0));
}

#[test]
fn phase2_target_strategies() {
    let cfg = SystemConfig::default();
    let full = phase2_targets(&cfg, &[false; 48], Phase2Strategy::Full).unwrap();
    assert!((full[0].linear() - 130.59856981197652).abs() < 1e-9);
    assert!((full[0].db() - 21.16).abs() < 0.01);
    let residual_none = phase2_targets(&cfg, &[false; 48], Phase2Strategy::Residual).unwrap();
    assert_eq!(full, residual_none);
    let residual_all = phase2_targets(&cfg, &[true; 48], Phase2Strategy::Residual).unwrap();
    assert!(residual_all.iter().all(|t| t.linear() == 0.0));
    let mut leaders = [false; 48];
    leaders[0] = true;
    let r = phase2_targets(&cfg, &leaders, Phase2Strategy::Residual).unwrap();
    assert_eq!(r[0], min_sinr_target(154.0, 25.0).unwrap());
    assert_eq!(r[1], full[1]);
}

#[test]
fn one_phase_targets() {
    let cfg = SystemConfig::default();
    let t = one_phase_multicast_targets(&cfg).unwrap();
    assert!((t[0].linear() - 2.3869812494501086).abs() < 1e-12);
    let u = per_user_targets(&cfg).unwrap();
    assert!((u[0].linear() - (2f64.powf(0.22) - 1.0)).abs() < 1e-14);
    let mut zero = cfg.clone();
    zero.set_uniform_bits(0.0);
    assert!(one_phase_multicast_targets(&zero)
        .unwrap()
        .iter()
        .all(|t| t.linear() == 0.0));
}

#[test]
fn two_group_instance_reaches_urllc() {
    // Users 0,1 in group 0 and 2,3 in group 1; beams reach users 0 and 2.
    let mut cfg = config(vec![2, 2], 2);
    cfg.user_power_dbm = 0.0;
    let ch0 = channels(
        vec![
            vec![c(1.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0)],
        ],
        1e-6,
        1e-9,
    );
    let beams = BeamformerSet::new(
        BeamVariant::PerGroup,
        vec![
            vec![c(1.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(1.0, 0.0)],
        ],
    );
    let mut ch = ch0.clone();
    // Intra-group links well above the target, cross links far below it.
    set_link(&mut ch, 0, 1, c(1e-2, 0.0));
    set_link(&mut ch, 2, 3, c(0.0, 1e-2));
    set_link(&mut ch, 0, 3, c(1e-5, 0.0));
    set_link(&mut ch, 2, 1, c(1e-5, 0.0));
    let out =
        evaluate_two_phase(&ch, &beams, &cfg, RelayMode::Coherent, Phase2Strategy::Full).unwrap();
    assert_eq!(out.leader_sets, vec![vec![0], vec![2]]);
    assert_eq!(out.phase2_sets, vec![vec![1], vec![3]]);
    assert!(out.urllc);
    assert_eq!(out.success_count, 4);

    // Without D2D links the followers cannot be reached.
    let out = evaluate_two_phase(
        &ch0,
        &beams,
        &cfg,
        RelayMode::Coherent,
        Phase2Strategy::Full,
    )
    .unwrap();
    assert!(!out.urllc);
    assert_eq!(out.success_count, 2);
    assert_eq!(out.groups_with_leader(), 2);
}

#[test]
fn everyone_decodes_in_phase_one() {
    let cfg = config(vec![1, 1], 2);
    let ch = channels(
        vec![
            vec![c(1.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(1.0, 0.0)],
        ],
        1e-9,
        1e-9,
    );
    let beams = BeamformerSet::new(
        BeamVariant::PerGroup,
        vec![
            vec![c(1.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(1.0, 0.0)],
        ],
    );
    let out =
        evaluate_two_phase(&ch, &beams, &cfg, RelayMode::Coherent, Phase2Strategy::Full).unwrap();
    assert!(out.urllc);
    assert!(out.phase2_sets.iter().all(Vec::is_empty));
    assert_eq!(out.leader_counts(), vec![1, 1]);
}

#[test]
fn tdma_power_formula() {
    let cfg = config(vec![1], 1);
    let mut ch = channels(vec![vec![c(1.0, 0.0)]], 1.0, 1.0);
    let out = evaluate_tdma(&ch, &cfg).unwrap();
    let gamma = out.target.linear();
    assert!((out.required_power[0] - gamma).abs() < 1e-12 * gamma);
    assert!(out.phase.urllc);
    let achieved = out.phase.phase1_sinr[0];
    assert!((achieved - gamma).abs() <= 1e-12 * gamma);

    // A weak enough channel pushes the required power past the budget.
    ch.downlink[0][0] = c(0.01, 0.0);
    let out = evaluate_tdma(&ch, &cfg).unwrap();
    assert!(out.required_power[0] > cfg.bs_power_w());
    assert!(!out.phase.urllc);
    assert_eq!(out.phase.success_count, 0);
}

#[test]
fn tdma_per_user_target() {
    let cfg = SystemConfig::default();
    let t = min_sinr_target(cfg.total_bits(), cfg.total_symbols()).unwrap();
    assert!((t.db() - 31.8).abs() < 0.05);
}

#[test]
fn tdma_greedy_admission() {
    let mut cfg = config(vec![3], 1);
    cfg.bits_per_user = vec![25.0; 3];
    let target = min_sinr_target(75.0, 100.0).unwrap().linear();
    let budget = cfg.bs_power_w();
    // Required powers: 0.3, 0.5 and 0.4 of the budget.
    let gains = [0.3, 0.5, 0.4].map(|f: f64| (target / (f * budget)).sqrt());
    let ch = channels(gains.iter().map(|&g| vec![c(g, 0.0)]).collect(), 1.0, 1.0);
    let out = evaluate_tdma(&ch, &cfg).unwrap();
    assert!(!out.phase.urllc);
    assert_eq!(out.admitted, vec![true, false, true]);
    assert_eq!(out.phase.success_count, 2);
    for u in [0, 2] {
        let sinr = out.phase.phase1_sinr[u];
        assert!((sinr - target).abs() <= 1e-12 * target);
    }
}

#[test]
fn interference_scale_halves_phase2_sinr() {
    let mut cfg = config(vec![3, 1], 1);
    cfg.user_power_dbm = 20.0;
    let mut ch = channels(vec![vec![c(1.0, 0.0)]; 4], 1e-9, 3e-9);
    set_link(&mut ch, 0, 1, c(1e-3, 2e-4));
    set_link(&mut ch, 0, 2, c(-5e-4, 1e-3));
    let leaders = [true, false, false, false];
    let before_c = phase2_sinr_coherent(&ch, &leaders, &cfg);
    let before_s = phase2_sinr_selection(&ch, &leaders, &cfg);
    ch.interference_phase2.iter_mut().for_each(|x| *x *= 2.0);
    let after_c = phase2_sinr_coherent(&ch, &leaders, &cfg);
    let after_s = phase2_sinr_selection(&ch, &leaders, &cfg);
    for (b, a) in before_c
        .iter()
        .chain(&before_s)
        .zip(after_c.iter().chain(&after_s))
    {
        match (b, a) {
            (Some(b), Some(a)) => assert!((a * 2.0 - b).abs() <= 1e-14 * b.abs().max(1e-300)),
            (None, None) => {}
            _ => panic!("leader pattern changed"),
        }
    }
}

fn arb_instance() -> impl Strategy<Value = (Vec<f64>, Vec<f64>, Vec<f64>, Vec<bool>)> {
    (
        prop::collection::vec(-1.0f64..1.0, 2 * 2 * 6),
        prop::collection::vec(-1.0f64..1.0, 2 * 2 * 2),
        prop::collection::vec(-1e-3f64..1e-3, 2 * 36),
        prop::collection::vec(any::<bool>(), 6),
    )
}

fn build(h: &[f64], w: &[f64], d: &[f64]) -> (SystemConfig, ChannelSet, BeamformerSet) {
    let cfg = config(vec![3, 3], 2);
    let downlink: Vec<Vec<Complex64>> = (0..6)
        .map(|u| {
            (0..2)
                .map(|m| c(h[4 * u + 2 * m], h[4 * u + 2 * m + 1]))
                .collect()
        })
        .collect();
    let mut ch = channels(downlink, 0.05, 1e-6);
    for tx in 0..6 {
        for rx in 0..6 {
            if tx != rx {
                set_link(
                    &mut ch,
                    tx,
                    rx,
                    c(d[2 * (tx * 6 + rx)], d[2 * (tx * 6 + rx) + 1]),
                );
            }
        }
    }
    let beams = BeamformerSet::new(
        BeamVariant::PerGroup,
        (0..2)
            .map(|b| {
                (0..2)
                    .map(|m| c(w[4 * b + 2 * m], w[4 * b + 2 * m + 1]))
                    .collect()
            })
            .collect(),
    );
    (cfg, ch, beams)
}

proptest! {
    #[test]
    fn outcome_counting_invariants((h, w, d, _) in arb_instance(), residual in any::<bool>()) {
        let (cfg, ch, beams) = build(&h, &w, &d);
        let strategy = if residual { Phase2Strategy::Residual } else { Phase2Strategy::Full };
        let out = evaluate_two_phase(&ch, &beams, &cfg, RelayMode::Coherent, strategy).unwrap();
        for (a, b) in out.leader_sets.iter().zip(&out.phase2_sets) {
            prop_assert!(a.iter().all(|k| !b.contains(k)));
        }
        let total: usize = out.leader_sets.iter().chain(&out.phase2_sets).map(Vec::len).sum();
        prop_assert_eq!(total, out.success_count);
        prop_assert!(out.success_count <= 6);
        prop_assert_eq!(out.urllc, out.success_count == 6);
        for k in out.leader_sets.iter().flatten() {
            prop_assert!(out.phase2_sinr[*k].is_none());
        }
    }

    #[test]
    fn selection_never_drops_with_more_leaders((h, w, d, leaders) in arb_instance(), extra in 0usize..6) {
        let (cfg, ch, _) = build(&h, &w, &d);
        let mut more = leaders.clone();
        more[extra] = true;
        let a = phase2_sinr_selection(&ch, &leaders, &cfg);
        let b = phase2_sinr_selection(&ch, &more, &cfg);
        for k in 0..6 {
            if let (Some(x), Some(y)) = (a[k], b[k]) {
                prop_assert!(y >= x);
            }
        }
    }
}
