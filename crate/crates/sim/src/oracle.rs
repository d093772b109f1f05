//! Random small conic programs with a brute-force reference optimum.
//!
//! Up to three free coordinates `x` live in a ball; the remaining
//! coordinates `y = E x + f` are tied to them by equalities, so a grid over
//! `x` covers the whole feasible set.

use rand::Rng;
use urllc_core::conic::{ConicProgram, LinExpr};

pub struct OracleInstance {
    pub program: ConicProgram,
    pub num_free: usize,
    dep: Vec<Vec<f64>>,
    offset: Vec<f64>,
    center: Vec<f64>,
    radius: f64,
}

fn uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..hi)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn expr(coef: &[f64], constant: f64) -> LinExpr {
    let mut e = LinExpr::constant(constant);
    for (j, &a) in coef.iter().enumerate() {
        if a != 0.0 {
            e = e.add(j, a);
        }
    }
    e
}

impl OracleInstance {
    pub fn random<R: Rng>(rng: &mut R) -> Self {
        let nf = rng.random_range(1..=3usize);
        let nd = rng.random_range(0..=10 - nf);
        let n = nf + nd;
        let center: Vec<f64> = (0..nf).map(|_| uniform(rng, -1.0, 1.0)).collect();
        let radius = uniform(rng, 0.5, 1.5);
        let dep: Vec<Vec<f64>> = (0..nd)
            .map(|_| (0..nf).map(|_| uniform(rng, -1.0, 1.0)).collect())
            .collect();

        // A strictly feasible anchor point.
        let x0: Vec<f64> = center
            .iter()
            .map(|c| c + uniform(rng, -0.3, 0.3) * radius)
            .collect();
        let offset: Vec<f64> = dep
            .iter()
            .map(|row| -dot(row, &x0) + uniform(rng, 0.2, 2.0))
            .collect();
        let mut z0 = x0.clone();
        z0.extend(dep.iter().zip(&offset).map(|(row, f)| dot(row, &x0) + f));

        let mut p = ConicProgram::new(n);
        p.objective = (0..n).map(|_| uniform(rng, -1.0, 1.0)).collect();
        for (i, (row, &f)) in dep.iter().zip(&offset).enumerate() {
            let mut terms = vec![(nf + i, 1.0)];
            terms.extend(row.iter().enumerate().map(|(j, &a)| (j, -a)));
            p.add_equality(terms, f, format!("dep{i}"));
            if rng.random_bool(0.5) {
                p.add_nonneg(nf + i);
            }
        }
        p.add_soc(
            LinExpr::constant(radius),
            (0..nf).map(|j| LinExpr::var(j).plus(-center[j])).collect(),
            "ball",
        );
        for i in 0..rng.random_range(0..=3usize) {
            let a: Vec<f64> = (0..n).map(|_| uniform(rng, -1.0, 1.0)).collect();
            let b = dot(&a, &z0) - uniform(rng, 0.05, 1.0);
            p.add_linear_ge(expr(&a, -b), format!("lin{i}"));
        }
        for i in 0..rng.random_range(0..=3usize) {
            let rows = rng.random_range(1..=3usize);
            let mut vector = Vec::new();
            let mut norm2 = 0.0;
            for _ in 0..rows {
                let a: Vec<f64> = (0..n).map(|_| uniform(rng, -1.0, 1.0)).collect();
                let b = uniform(rng, -0.5, 0.5);
                norm2 += (dot(&a, &z0) + b).powi(2);
                vector.push(expr(&a, b));
            }
            let c: Vec<f64> = (0..n).map(|_| uniform(rng, -0.5, 0.5)).collect();
            let d = norm2.sqrt() - dot(&c, &z0) + uniform(rng, 0.05, 1.0);
            p.add_soc(expr(&c, d), vector, format!("soc{i}"));
        }
        OracleInstance {
            program: p,
            num_free: nf,
            dep,
            offset,
            center,
            radius,
        }
    }

    pub fn lift(&self, x: &[f64]) -> Vec<f64> {
        let mut z = x.to_vec();
        z.extend(
            self.dep
                .iter()
                .zip(&self.offset)
                .map(|(row, f)| dot(row, x) + f),
        );
        z
    }

    /// Exact feasible interval of coordinate `j` with the other free
    /// coordinates of `x` held fixed.
    fn line_interval(&self, x: &[f64], j: usize) -> Option<(f64, f64)> {
        let mut base = x.to_vec();
        base[j] = 0.0;
        let z0 = self.lift(&base);
        base[j] = 1.0;
        let dz: Vec<f64> = self
            .lift(&base)
            .iter()
            .zip(&z0)
            .map(|(a, b)| a - b)
            .collect();
        let mut iv = (f64::NEG_INFINITY, f64::INFINITY);
        let halfline = |a: f64, b: f64, iv: &mut (f64, f64)| -> bool {
            // a + b t >= 0
            if b > 0.0 {
                iv.0 = iv.0.max(-a / b);
            } else if b < 0.0 {
                iv.1 = iv.1.min(-a / b);
            } else if a < 0.0 {
                return false;
            }
            true
        };
        for &k in &self.program.nonneg {
            if !halfline(z0[k], dz[k], &mut iv) {
                return None;
            }
        }
        for c in &self.program.socs {
            let lin = |e: &LinExpr| (e.eval(&z0), e.eval(&dz) - e.constant);
            let (s0, s1) = lin(&c.scalar);
            if !halfline(s0, s1, &mut iv) {
                return None;
            }
            // |u0 + t u1|^2 - (s0 + t s1)^2 <= 0
            let (mut qa, mut qb, mut qc) = (-s1 * s1, -2.0 * s0 * s1, -s0 * s0);
            for e in &c.vector {
                let (u0, u1) = lin(e);
                qa += u1 * u1;
                qb += 2.0 * u0 * u1;
                qc += u0 * u0;
            }
            let scale = qa.abs().max(qb.abs()).max(qc.abs());
            if scale == 0.0 {
                continue;
            }
            if qa.abs() <= 1e-14 * scale {
                if !halfline(-qc, -qb, &mut iv) {
                    return None;
                }
                continue;
            }
            let disc = qb * qb - 4.0 * qa * qc;
            if qa > 0.0 {
                if disc < 0.0 {
                    return None;
                }
                let r = disc.sqrt();
                let q = -0.5 * (qb + qb.signum() * r);
                let (r1, r2) = if q == 0.0 {
                    (0.0, 0.0)
                } else {
                    (q / qa, qc / q)
                };
                iv.0 = iv.0.max(r1.min(r2));
                iv.1 = iv.1.min(r1.max(r2));
            } else if disc > 0.0 {
                // Two rays; the one where s >= 0 is the cone's side.
                let r = disc.sqrt();
                let q = -0.5 * (qb + qb.signum() * r);
                let (r1, r2) = if q == 0.0 {
                    (0.0, 0.0)
                } else {
                    (q / qa, qc / q)
                };
                let (lo, hi) = (r1.min(r2), r1.max(r2));
                if s1 > 0.0 {
                    iv.0 = iv.0.max(hi);
                } else {
                    iv.1 = iv.1.min(lo);
                }
            }
            if iv.0 > iv.1 {
                return None;
            }
        }
        (iv.0 <= iv.1).then_some(iv)
    }

    /// Minimum over free coordinates `j..` with `x[..j]` fixed.
    fn partial_min(&self, x: &mut [f64], j: usize) -> f64 {
        let nf = self.num_free;
        if j + 1 == nf {
            let Some((lo, hi)) = self.line_interval(x, j) else {
                return f64::INFINITY;
            };
            let mut best = f64::INFINITY;
            for t in [lo, hi] {
                if t.is_finite() {
                    x[j] = t;
                    best = best.min(self.program.objective_value(&self.lift(x)));
                }
            }
            return best;
        }
        // The partial minimum is convex in x[j]: the best grid point
        // brackets the minimizer between its neighbors.
        let mut a = self.center[j] - self.radius;
        let mut step = 2.0 * self.radius / 200.0;
        let mut points = 201;
        let mut best = f64::INFINITY;
        let mut arg = f64::NAN;
        for _ in 0..40 {
            for i in 0..points {
                x[j] = a + i as f64 * step;
                let v = self.partial_min(x, j + 1);
                if v < best {
                    best = v;
                    arg = x[j];
                }
            }
            if best.is_infinite() || step < 1e-12 {
                break;
            }
            a = arg - step;
            step /= 4.0;
            points = 9;
        }
        x[j] = arg;
        best
    }

    /// Gradient with respect to the free coordinates of a function whose
    /// gradient in the lifted coordinates is `gz`.
    fn pull_back(&self, gz: &[f64]) -> Vec<f64> {
        let nf = self.num_free;
        let mut g = gz[..nf].to_vec();
        for (row, &gy) in self.dep.iter().zip(&gz[nf..]) {
            for (gj, &e) in g.iter_mut().zip(row) {
                *gj += gy * e;
            }
        }
        g
    }

    /// Subgradient of the most violated constraint, or `None` if feasible.
    fn cut(&self, x: &[f64]) -> Option<Vec<f64>> {
        let z = self.lift(x);
        let n = z.len();
        let p = &self.program;
        let mut worst = 0.0;
        let mut grad = None;
        for &k in &p.nonneg {
            if -z[k] > worst {
                worst = -z[k];
                let mut gz = vec![0.0; n];
                gz[k] = -1.0;
                grad = Some(gz);
            }
        }
        for c in &p.socs {
            let v = c.violation(&z);
            if v > worst {
                worst = v;
                let u: Vec<f64> = c.vector.iter().map(|e| e.eval(&z)).collect();
                let norm = u.iter().map(|a| a * a).sum::<f64>().sqrt();
                let mut gz = vec![0.0; n];
                for (e, &ui) in c.vector.iter().zip(&u) {
                    for &(j, a) in &e.terms {
                        gz[j] += a * ui / norm;
                    }
                }
                for &(j, a) in &c.scalar.terms {
                    gz[j] -= a;
                }
                grad = Some(gz);
            }
        }
        grad.map(|g| self.pull_back(&g))
    }

    /// Central-cut ellipsoid method from the enclosing ball, keeping the
    /// best feasible center.
    fn ellipsoid(&self) -> Option<f64> {
        let n = self.num_free;
        let nf = n as f64;
        let mut x = self.center.clone();
        let mut p = vec![vec![0.0; n]; n];
        for (i, row) in p.iter_mut().enumerate() {
            row[i] = self.radius * self.radius;
        }
        let objective = self.pull_back(&self.program.objective);
        let mut best: Option<f64> = None;
        for _ in 0..20_000 {
            let g = match self.cut(&x) {
                Some(g) => g,
                None => {
                    let v = self.program.objective_value(&self.lift(&x));
                    best = Some(best.map_or(v, |b: f64| b.min(v)));
                    objective.clone()
                }
            };
            let pg: Vec<f64> = p
                .iter()
                .map(|row| row.iter().zip(&g).map(|(a, b)| a * b).sum())
                .collect();
            let gpg: f64 = g.iter().zip(&pg).map(|(a, b)| a * b).sum();
            if !(gpg > 1e-26) {
                break;
            }
            let s = gpg.sqrt();
            if n == 1 {
                // The interval halves.
                x[0] -= 0.5 * pg[0] / s;
                p[0][0] *= 0.25;
                continue;
            }
            for (xi, pgi) in x.iter_mut().zip(&pg) {
                *xi -= pgi / ((nf + 1.0) * s);
            }
            let shrink = nf * nf / (nf * nf - 1.0);
            let w = 2.0 / ((nf + 1.0) * gpg);
            for i in 0..n {
                for j in 0..n {
                    p[i][j] = shrink * (p[i][j] - w * pg[i] * pg[j]);
                }
            }
        }
        best
    }

    /// Reference optimum: the better of two exhaustive searches, nested
    /// one-dimensional grids (innermost coordinate solved exactly on its
    /// line) and an ellipsoid method. Both only ever report feasible points.
    pub fn brute_force(&self) -> Option<f64> {
        let mut x = self.center.clone();
        let grid = self.partial_min(&mut x, 0);
        let grid = grid.is_finite().then_some(grid);
        match (grid, self.ellipsoid()) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }

    pub fn grid_search(&self) -> Option<f64> {
        let mut x = self.center.clone();
        let v = self.partial_min(&mut x, 0);
        v.is_finite().then_some(v)
    }

    pub fn ellipsoid_search(&self) -> Option<f64> {
        self.ellipsoid()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn anchors_are_feasible_and_sizes_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let inst = OracleInstance::random(&mut rng);
            assert!(inst.program.num_vars <= 10);
            assert!(inst.program.validate().is_ok());
            assert!(inst.brute_force().is_some());
        }
    }

    #[test]
    fn brute_force_finds_a_ball_minimum() {
        let mut p = ConicProgram::new(2);
        p.objective = vec![1.0, 0.0];
        p.add_soc(
            LinExpr::constant(1.0),
            vec![LinExpr::var(0), LinExpr::var(1)],
            "ball",
        );
        let inst = OracleInstance {
            program: p,
            num_free: 2,
            dep: vec![],
            offset: vec![],
            center: vec![0.0, 0.0],
            radius: 1.0,
        };
        let v = inst.brute_force().unwrap();
        assert!((v + 1.0).abs() < 1e-6, "{v}");
    }
}
