//! Seven-cell wrap-around geometry, channel sampling and inter-cell
//! interference synthesis.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::config::SystemConfig;
use crate::error::{invalid, Result};
use crate::math;

/// Number of cells in the wrap-around layout: the reference cell plus a ring of six.
pub const NUM_CELLS: usize = 7;

/// Distances below this are clamped before entering a path-loss law.
pub const MIN_DISTANCE_M: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dist(self, other: Point) -> f64 {
        math::hypot(self.x - other.x, self.y - other.y)
    }
}

/// Base stations, group centers and users of every cell. Cell 0 is the
/// reference cell; users are stored in flat group-major order per cell.
#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    pub bs_positions: Vec<Point>,
    pub group_centers: Vec<Vec<Point>>,
    pub user_positions: Vec<Vec<Point>>,
}

impl Topology {
    pub fn reference_users(&self) -> &[Point] {
        &self.user_positions[0]
    }
}

/// Circumradius of the ring of neighbor base stations.
pub fn neighbor_ring_radius(cell_radius_m: f64) -> f64 {
    2.0 * cell_radius_m * math::sin_cos(PI / 6.0).1
}

/// Positions of the reference base station (origin) and its six neighbors.
pub fn base_stations(cell_radius_m: f64) -> Vec<Point> {
    let r = neighbor_ring_radius(cell_radius_m);
    let mut out = Vec::with_capacity(NUM_CELLS);
    out.push(Point::default());
    for i in 0..6 {
        let (s, c) = math::sin_cos(PI / 6.0 + i as f64 * PI / 3.0);
        out.push(Point::new(r * c, r * s));
    }
    out
}

fn uniform_in_annulus<R: Rng + ?Sized>(rng: &mut R, center: Point, r_in: f64, r_out: f64) -> Point {
    let u: f64 = rng.random();
    let radius = math::sqrt(r_in * r_in + u * (r_out * r_out - r_in * r_in));
    let theta = 2.0 * PI * rng.random::<f64>();
    let (s, c) = math::sin_cos(theta);
    Point::new(center.x + radius * c, center.y + radius * s)
}

/// Drops group centers uniformly (by area) in the annulus around each base
/// station and users uniformly in a disc around their group center.
pub fn generate_topology<R: Rng + ?Sized>(cfg: &SystemConfig, rng: &mut R) -> Result<Topology> {
    if !(cfg.donut_inner_m < cfg.donut_outer_m) || cfg.donut_inner_m < 0.0 {
        return Err(invalid(
            "annulus inner radius must be below the outer radius",
        ));
    }
    let bs_positions = base_stations(cfg.cell_radius_m);
    let mut group_centers = Vec::with_capacity(NUM_CELLS);
    let mut user_positions = Vec::with_capacity(NUM_CELLS);
    for &bs in &bs_positions {
        let mut centers = Vec::with_capacity(cfg.num_groups);
        let mut users = Vec::with_capacity(cfg.num_users());
        for &k in &cfg.group_sizes {
            let center = uniform_in_annulus(rng, bs, cfg.donut_inner_m, cfg.donut_outer_m);
            centers.push(center);
            for _ in 0..k {
                users.push(uniform_in_annulus(rng, center, 0.0, cfg.group_radius_m));
            }
        }
        group_centers.push(centers);
        user_positions.push(users);
    }
    Ok(Topology {
        bs_positions,
        group_centers,
        user_positions,
    })
}

/// Base-station-to-user and inter-group path gain in dB, distance in km.
pub fn macro_path_gain_db(d_km: f64) -> Result<f64> {
    if !(d_km > 0.0) {
        return Err(invalid("distance must be positive"));
    }
    Ok(-128.1 - 36.7 * math::log10(d_km))
}

/// Intra-group (indoor) D2D path gain in dB, distance in km.
pub fn d2d_path_gain_db(d_km: f64) -> Result<f64> {
    if !(d_km > 0.0) {
        return Err(invalid("distance must be positive"));
    }
    Ok(-76.8 - 18.7 * math::log10(d_km))
}

/// Amplitude gain from a gain in dB.
pub fn amplitude(gain_db: f64) -> f64 {
    math::powf(10.0, gain_db / 20.0)
}

fn clamp_km(d_m: f64) -> f64 {
    d_m.max(MIN_DISTANCE_M) / 1000.0
}

fn macro_amplitude(d_m: f64) -> f64 {
    amplitude(-128.1 - 36.7 * math::log10(clamp_km(d_m)))
}

fn d2d_amplitude(d_m: f64) -> f64 {
    amplitude(-76.8 - 18.7 * math::log10(clamp_km(d_m)))
}

/// One draw from the standard circularly-symmetric complex Gaussian.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * FRAC_1_SQRT_2, im * FRAC_1_SQRT_2)
}

/// Channel coefficients and interference powers of one realization, for the
/// users of the reference cell in flat order.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    pub num_antennas: usize,
    /// `downlink[k]` is the M-vector from the base station to user `k`.
    pub downlink: Vec<Vec<Complex64>>,
    /// Row-major `K x K`; entry `(i, k)` is the link from transmitter `i` to
    /// receiver `k`. The diagonal is zero.
    pub d2d: Vec<Complex64>,
    pub interference_phase1: Vec<f64>,
    pub interference_phase2: Vec<f64>,
    pub noise_power: f64,
}

impl ChannelSet {
    pub fn num_users(&self) -> usize {
        self.downlink.len()
    }

    pub fn d2d(&self, tx: usize, rx: usize) -> Complex64 {
        self.d2d[tx * self.num_users() + rx]
    }

    /// Replaces both interference vectors, checking their lengths.
    pub fn with_interference(mut self, phase1: Vec<f64>, phase2: Vec<f64>) -> Result<Self> {
        let k = self.num_users();
        if phase1.len() != k || phase2.len() != k {
            return Err(crate::error::mismatch(
                "one interference power per user expected",
            ));
        }
        self.interference_phase1 = phase1;
        self.interference_phase2 = phase2;
        Ok(self)
    }
}

/// Samples downlink Rayleigh vectors, Rician intra-group D2D links and
/// Rayleigh inter-group D2D links. Interference is set to the noise floor;
/// see [`sample_interference`].
pub fn sample_channels<R: Rng + ?Sized>(
    topo: &Topology,
    cfg: &SystemConfig,
    rng: &mut R,
) -> ChannelSet {
    let users = topo.reference_users();
    let k = users.len();
    let m = cfg.num_antennas;
    let bs = topo.bs_positions[0];
    let downlink = users
        .iter()
        .map(|&u| {
            let eta = macro_amplitude(u.dist(bs));
            (0..m).map(|_| complex_gaussian(rng) * eta).collect()
        })
        .collect();

    let group = cfg.group_of_users();
    let delta = cfg.rician_factor;
    let (los, nlos) = if delta.is_infinite() {
        (1.0, 0.0)
    } else {
        (
            math::sqrt(delta / (delta + 1.0)),
            math::sqrt(1.0 / (delta + 1.0)),
        )
    };
    let mut d2d = alloc::vec![Complex64::new(0.0, 0.0); k * k];
    for tx in 0..k {
        for rx in 0..k {
            if tx == rx {
                continue;
            }
            let d = users[tx].dist(users[rx]);
            let g = complex_gaussian(rng);
            d2d[tx * k + rx] = if group[tx] == group[rx] {
                (Complex64::new(los, 0.0) + g * nlos) * d2d_amplitude(d)
            } else {
                g * macro_amplitude(d)
            };
        }
    }
    let noise = cfg.noise_power_w();
    ChannelSet {
        num_antennas: m,
        downlink,
        d2d,
        interference_phase1: alloc::vec![noise; k],
        interference_phase2: alloc::vec![noise; k],
        noise_power: noise,
    }
}

/// Interference-plus-noise powers `(phase1, phase2)` for every reference user.
///
/// Phase I: each active neighbor base station sends `N` isotropic unit
/// beams, each at `P_BS / N`. Phase II: each neighbor cell has exactly one
/// uniformly chosen leader per group transmitting at `P`. All neighbor links
/// follow the macro path-loss law with Rayleigh fading.
pub fn sample_interference<R: Rng + ?Sized>(
    topo: &Topology,
    cfg: &SystemConfig,
    rng: &mut R,
) -> (Vec<f64>, Vec<f64>) {
    let users = topo.reference_users();
    let m = cfg.num_antennas;
    let noise = cfg.noise_power_w();
    let mut p1 = alloc::vec![noise; users.len()];
    let mut p2 = alloc::vec![noise; users.len()];
    let beam_power = cfg.bs_power_w() / cfg.num_groups as f64 * cfg.neighbor_power_scale;
    let leader_power = cfg.user_power_w() * cfg.neighbor_power_scale;
    let cells = cfg.num_neighbor_cells.min(NUM_CELLS - 1);

    for c in 1..=cells {
        let beams: Vec<Vec<Complex64>> = (0..cfg.num_groups)
            .map(|_| {
                let v: Vec<Complex64> = (0..m).map(|_| complex_gaussian(rng)).collect();
                let norm = math::sqrt(v.iter().map(|z| z.norm_sqr()).sum());
                v.into_iter().map(|z| z / norm).collect()
            })
            .collect();
        let bs = topo.bs_positions[c];
        for (u, acc) in users.iter().zip(p1.iter_mut()) {
            let eta = macro_amplitude(u.dist(bs));
            let h: Vec<Complex64> = (0..m).map(|_| complex_gaussian(rng) * eta).collect();
            for w in &beams {
                let y: Complex64 = h.iter().zip(w).map(|(a, b)| a * b).sum();
                *acc += beam_power * y.norm_sqr();
            }
        }
    }
    for c in 1..=cells {
        let leaders: Vec<Point> = (0..cfg.num_groups)
            .map(|n| {
                let range = cfg.group_range(n);
                let pick = rng.random_range(range);
                topo.user_positions[c][pick]
            })
            .collect();
        for (u, acc) in users.iter().zip(p2.iter_mut()) {
            for &l in &leaders {
                let g = complex_gaussian(rng) * macro_amplitude(u.dist(l));
                *acc += leader_power * g.norm_sqr();
            }
        }
    }
    (p1, p2)
}

/// Topology, channels and interference of one realization, drawn in that
/// order from a single stream.
pub fn sample_realization<R: Rng + ?Sized>(
    cfg: &SystemConfig,
    rng: &mut R,
) -> Result<(Topology, ChannelSet)> {
    let topo = generate_topology(cfg, rng)?;
    let ch = sample_channels(&topo, cfg, rng);
    let (p1, p2) = sample_interference(&topo, cfg, rng);
    let ch = ch.with_interference(p1, p2)?;
    Ok((topo, ch))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn path_gain_examples() {
        assert!((macro_path_gain_db(1.0).unwrap() + 128.1).abs() < 1e-12);
        assert!((macro_path_gain_db(0.5).unwrap() + 117.0521991591319).abs() < 1e-10);
        assert!((macro_path_gain_db(0.1).unwrap() + 91.4).abs() < 1e-10);
        assert!((d2d_path_gain_db(1.0).unwrap() + 76.8).abs() < 1e-12);
        assert!((d2d_path_gain_db(0.02).unwrap() + 45.02926091891645).abs() < 1e-10);
        assert!((d2d_path_gain_db(0.04).unwrap() + 50.65852183783289).abs() < 1e-10);
        assert!(macro_path_gain_db(0.0).is_err());
        assert!(d2d_path_gain_db(-1.0).is_err());
    }

    #[test]
    fn ring_geometry() {
        let bs = base_stations(500.0);
        assert_eq!(bs.len(), 7);
        for p in &bs[1..] {
            assert!((p.dist(bs[0]) - 866.0254037844386).abs() < 1e-9);
        }
        // Adjacent neighbors are one inter-site distance apart.
        assert!((bs[1].dist(bs[2]) - 866.0254037844386).abs() < 1e-9);
    }

    #[test]
    fn degenerate_annulus() {
        let mut cfg = SystemConfig::default();
        cfg.donut_inner_m = 300.0 - 1e-6;
        cfg.donut_outer_m = 300.0;
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let topo = generate_topology(&cfg, &mut rng).unwrap();
        for c in &topo.group_centers[0] {
            assert!((c.dist(Point::default()) - 300.0).abs() < 1e-5);
        }
        cfg.donut_inner_m = 300.0;
        assert!(generate_topology(&cfg, &mut rng).is_err());
    }

    #[test]
    fn pure_los_links() {
        let mut cfg = SystemConfig::default();
        cfg.rician_factor = f64::INFINITY;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let topo = generate_topology(&cfg, &mut rng).unwrap();
        let ch = sample_channels(&topo, &cfg, &mut rng);
        let users = topo.reference_users();
        let eta = d2d_amplitude(users[0].dist(users[1]));
        assert!((ch.d2d(0, 1).norm() - eta).abs() <= 1e-12 * eta);
    }

    #[test]
    fn no_neighbors_means_noise_only() {
        let mut cfg = SystemConfig::default();
        cfg.num_neighbor_cells = 0;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (_, ch) = sample_realization(&cfg, &mut rng).unwrap();
        let noise = cfg.noise_power_w();
        assert!(ch.interference_phase1.iter().all(|&p| p == noise));
        assert!(ch.interference_phase2.iter().all(|&p| p == noise));
    }
}
