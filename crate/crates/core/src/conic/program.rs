use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::error::{invalid, Result};

/// Sparse affine expression `constant + sum(coef * x[j])`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LinExpr {
    pub terms: Vec<(usize, f64)>,
    pub constant: f64,
}

impl LinExpr {
    pub fn zero() -> Self {
        LinExpr::default()
    }

    pub fn constant(c: f64) -> Self {
        LinExpr {
            terms: Vec::new(),
            constant: c,
        }
    }

    pub fn var(j: usize) -> Self {
        LinExpr::term(j, 1.0)
    }

    pub fn term(j: usize, coef: f64) -> Self {
        LinExpr {
            terms: alloc::vec![(j, coef)],
            constant: 0.0,
        }
    }

    pub fn add(mut self, j: usize, coef: f64) -> Self {
        self.terms.push((j, coef));
        self
    }

    pub fn plus(mut self, c: f64) -> Self {
        self.constant += c;
        self
    }

    pub fn scaled(mut self, a: f64) -> Self {
        for t in &mut self.terms {
            t.1 *= a;
        }
        self.constant *= a;
        self
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.constant + self.terms.iter().map(|&(j, a)| a * x[j]).sum::<f64>()
    }

    /// Sorts terms by index and merges duplicates.
    pub fn canonical(&self) -> LinExpr {
        let mut terms = self.terms.clone();
        terms.sort_by_key(|t| t.0);
        let mut out: Vec<(usize, f64)> = Vec::with_capacity(terms.len());
        for (j, a) in terms {
            match out.last_mut() {
                Some(last) if last.0 == j => last.1 += a,
                _ => out.push((j, a)),
            }
        }
        out.retain(|t| t.1 != 0.0);
        LinExpr {
            terms: out,
            constant: self.constant,
        }
    }
}

/// `sum(coef * x[j]) == rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Equality {
    pub terms: Vec<(usize, f64)>,
    pub rhs: f64,
    pub label: String,
}

/// `||vector|| <= scalar`. An empty vector makes this the linear
/// inequality `scalar >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SocConstraint {
    pub scalar: LinExpr,
    pub vector: Vec<LinExpr>,
    pub label: String,
}

impl SocConstraint {
    pub fn dim(&self) -> usize {
        1 + self.vector.len()
    }

    /// How far the point lies outside the cone (zero when inside).
    pub fn violation(&self, x: &[f64]) -> f64 {
        let s = self.scalar.eval(x);
        let u: Vec<f64> = self.vector.iter().map(|e| e.eval(x)).collect();
        (crate::math::norm2(&u) - s).max(0.0)
    }
}

/// Minimize `objective . x + objective_offset` over affine equalities,
/// nonnegativity of selected coordinates, and second-order cones.
#[derive(Debug, Clone, PartialEq)]
pub struct ConicProgram {
    pub num_vars: usize,
    pub objective: Vec<f64>,
    pub objective_offset: f64,
    pub equalities: Vec<Equality>,
    pub nonneg: Vec<usize>,
    pub socs: Vec<SocConstraint>,
}

impl ConicProgram {
    pub fn new(num_vars: usize) -> Self {
        ConicProgram {
            num_vars,
            objective: alloc::vec![0.0; num_vars],
            objective_offset: 0.0,
            equalities: Vec::new(),
            nonneg: Vec::new(),
            socs: Vec::new(),
        }
    }

    pub fn add_equality(&mut self, terms: Vec<(usize, f64)>, rhs: f64, label: impl Into<String>) {
        self.equalities.push(Equality {
            terms,
            rhs,
            label: label.into(),
        });
    }

    pub fn add_nonneg(&mut self, j: usize) {
        self.nonneg.push(j);
    }

    pub fn add_soc(&mut self, scalar: LinExpr, vector: Vec<LinExpr>, label: impl Into<String>) {
        self.socs.push(SocConstraint {
            scalar,
            vector,
            label: label.into(),
        });
    }

    /// `expr >= 0`.
    pub fn add_linear_ge(&mut self, expr: LinExpr, label: impl Into<String>) {
        self.add_soc(expr, Vec::new(), label);
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective_offset + crate::math::dot(&self.objective, x)
    }

    /// Structural checks: dimensions, indices in range, finite data, and no
    /// cone whose scalar part repeats one of its vector rows.
    pub fn validate(&self) -> Result<()> {
        let n = self.num_vars;
        if self.objective.len() != n {
            return Err(invalid(format!(
                "objective has {} coefficients for {} variables",
                self.objective.len(),
                n
            )));
        }
        if !self.objective.iter().all(|c| c.is_finite()) || !self.objective_offset.is_finite() {
            return Err(invalid("objective coefficients must be finite"));
        }
        let check_terms = |terms: &[(usize, f64)], what: &str| -> Result<()> {
            for &(j, a) in terms {
                if j >= n {
                    return Err(invalid(format!("{what}: variable {j} out of range")));
                }
                if !a.is_finite() {
                    return Err(invalid(format!("{what}: non-finite coefficient")));
                }
            }
            Ok(())
        };
        for e in &self.equalities {
            check_terms(&e.terms, &e.label)?;
            if !e.rhs.is_finite() {
                return Err(invalid(format!("{}: non-finite right-hand side", e.label)));
            }
        }
        if let Some(&j) = self.nonneg.iter().find(|&&j| j >= n) {
            return Err(invalid(format!(
                "nonnegativity on variable {j} out of range"
            )));
        }
        for c in &self.socs {
            let scalar = c.scalar.canonical();
            for row in core::iter::once(&c.scalar).chain(&c.vector) {
                check_terms(&row.terms, &c.label)?;
                if !row.constant.is_finite() {
                    return Err(invalid(format!("{}: non-finite constant", c.label)));
                }
            }
            if c.vector.iter().any(|v| {
                let v = v.canonical();
                !v.terms.is_empty() && v == scalar
            }) {
                return Err(invalid(format!(
                    "{}: scalar row repeats a vector row",
                    c.label
                )));
            }
        }
        Ok(())
    }

    /// Sparse triplet text dump.
    ///
    /// ```text
    /// conic-program 1
    /// vars <n>
    /// offset <c0>
    /// c <j> <value>                 nonzero objective coefficients
    /// eq <row> <j> <value>          equality coefficients
    /// eqrhs <row> <value>
    /// nonneg <j>
    /// soc <cone> <dim> <label>
    /// socrow <cone> <r> <j> <value> row 0 is the scalar part
    /// socconst <cone> <r> <value>
    /// ```
    pub fn to_triplets(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "conic-program 1");
        let _ = writeln!(out, "vars {}", self.num_vars);
        let _ = writeln!(out, "offset {:e}", self.objective_offset);
        for (j, &c) in self.objective.iter().enumerate() {
            if c != 0.0 {
                let _ = writeln!(out, "c {j} {c:e}");
            }
        }
        for (r, e) in self.equalities.iter().enumerate() {
            for &(j, a) in &e.terms {
                let _ = writeln!(out, "eq {r} {j} {a:e}");
            }
            let _ = writeln!(out, "eqrhs {r} {:e}", e.rhs);
        }
        for &j in &self.nonneg {
            let _ = writeln!(out, "nonneg {j}");
        }
        for (k, c) in self.socs.iter().enumerate() {
            let label = if c.label.is_empty() {
                "-"
            } else {
                c.label.as_str()
            };
            let _ = writeln!(out, "soc {k} {} {}", c.dim(), label.replace(' ', "_"));
            for (r, row) in core::iter::once(&c.scalar).chain(&c.vector).enumerate() {
                for &(j, a) in &row.terms {
                    let _ = writeln!(out, "socrow {k} {r} {j} {a:e}");
                }
                if row.constant != 0.0 {
                    let _ = writeln!(out, "socconst {k} {r} {:e}", row.constant);
                }
            }
        }
        out
    }
}
