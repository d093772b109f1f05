use urllc_core::conic::{
    check_kkt, solve, ConicProgram, LinExpr, Status, DEFAULT_MAX_ITER, DEFAULT_TOL,
};

fn solve_default(p: &ConicProgram) -> urllc_core::conic::ConicSolution {
    solve(p, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap()
}

#[test]
fn tight_linear_bound() {
    let mut p = ConicProgram::new(1);
    p.objective[0] = 1.0;
    p.add_linear_ge(LinExpr::var(0).plus(-1.0), "t >= 1");
    p.add_nonneg(0);
    let s = solve_default(&p);
    assert_eq!(s.status, Status::Optimal);
    assert!((s.x[0] - 1.0).abs() < 1e-6, "{:?}", s.x);
    assert!(s.residuals.max() <= DEFAULT_TOL);
}

#[test]
fn empty_feasible_set() {
    let mut p = ConicProgram::new(1);
    p.objective[0] = 1.0;
    p.add_linear_ge(LinExpr::var(0).plus(-1.0), "t >= 1");
    p.add_linear_ge(LinExpr::term(0, -1.0), "t <= 0");
    assert_eq!(solve_default(&p).status, Status::Infeasible);
}

#[test]
fn unbounded_below() {
    let mut p = ConicProgram::new(2);
    p.objective[0] = -1.0;
    p.add_linear_ge(LinExpr::var(0).add(1, -1.0), "x0 >= x1");
    assert_eq!(solve_default(&p).status, Status::Unbounded);
}

/// minimize s s.t. ||w|| <= s, a.w >= 1
fn min_norm(a: &[f64]) -> ConicProgram {
    let m = a.len();
    let mut p = ConicProgram::new(m + 1);
    p.objective[m] = 1.0;
    p.add_soc(LinExpr::var(m), (0..m).map(LinExpr::var).collect(), "norm");
    let mut e = LinExpr::constant(-1.0);
    for (j, &aj) in a.iter().enumerate() {
        e = e.add(j, aj);
    }
    p.add_linear_ge(e, "gain");
    p
}

#[test]
fn minimum_norm_beam() {
    let a = [0.3, -1.2, 2.0, 0.5];
    let na2: f64 = a.iter().map(|v| v * v).sum();
    let s = solve_default(&min_norm(&a));
    assert_eq!(s.status, Status::Optimal);
    assert!((s.objective - 1.0 / na2.sqrt()).abs() < 1e-6);
    for j in 0..4 {
        assert!((s.x[j] - a[j] / na2).abs() < 1e-6);
    }
}

#[test]
fn equality_elimination_and_duals() {
    // minimize x0 + 2 x1 s.t. x0 + x1 = 3, x0 - x2 = 0, x >= 0, ||(x1)|| <= 2
    let mut p = ConicProgram::new(3);
    p.objective = vec![1.0, 2.0, 0.0];
    p.add_equality(vec![(0, 1.0), (1, 1.0)], 3.0, "sum");
    p.add_equality(vec![(0, 1.0), (2, -1.0)], 0.0, "copy");
    for j in 0..3 {
        p.add_nonneg(j);
    }
    p.add_soc(LinExpr::constant(2.0), vec![LinExpr::var(1)], "box");
    let s = solve_default(&p);
    assert_eq!(s.status, Status::Optimal);
    assert!((s.objective - 3.0).abs() < 1e-6, "{:?}", s);
    let r = check_kkt(&p, &s).unwrap();
    assert!(r.max() <= DEFAULT_TOL);
}
