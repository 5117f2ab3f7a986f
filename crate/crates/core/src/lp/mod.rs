//! Dense linear programs: problem representation, a simplex solver and the
//! builders for every relaxation the algorithms solve.

mod builders;
mod simplex;

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::{self, Write};

use crate::error::{Error, Result};

pub use builders::{
    build_customized_lp, build_high_weight_lp, build_low_weight_lp, build_mnl_assortment_lp,
    extract_matrix, HIGH_WEIGHT_CAP,
};
pub use simplex::DenseSimplex;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

/// What an LP column stands for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarLabel {
    /// Choice probability of edge `(customer, supplier)`.
    X(usize, usize),
    /// Supplier-side probability of edge `(customer, supplier)`.
    Y(usize, usize),
}

impl fmt::Display for VarLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VarLabel::X(i, j) => write!(f, "x_{i}_{j}"),
            VarLabel::Y(i, j) => write!(f, "y_{i}_{j}"),
        }
    }
}

/// `maximize objective . x` subject to the constraints and per-variable bounds.
#[derive(Clone, Debug, PartialEq)]
pub struct LpProblem {
    pub n_vars: usize,
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
    pub bounds: Vec<(f64, f64)>,
    pub var_names: Vec<VarLabel>,
}

impl LpProblem {
    /// Problem over `labels` with all variables in `[0, 1]` and no rows.
    pub fn new(var_names: Vec<VarLabel>, objective: Vec<f64>) -> Self {
        let n_vars = var_names.len();
        LpProblem {
            n_vars,
            objective,
            constraints: Vec::new(),
            bounds: vec![(0.0, 1.0); n_vars],
            var_names,
        }
    }

    pub fn add_le(&mut self, coeffs: Vec<f64>, rhs: f64) {
        self.constraints.push(Constraint {
            coeffs,
            relation: Relation::Le,
            rhs,
        });
    }

    pub fn add_eq(&mut self, coeffs: Vec<f64>, rhs: f64) {
        self.constraints.push(Constraint {
            coeffs,
            relation: Relation::Eq,
            rhs,
        });
    }

    pub fn var_index(&self, label: VarLabel) -> Option<usize> {
        self.var_names.iter().position(|&l| l == label)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidLp(msg));
        if self.objective.len() != self.n_vars {
            return bad(format!(
                "objective has {} entries for {} variables",
                self.objective.len(),
                self.n_vars
            ));
        }
        if self.bounds.len() != self.n_vars || self.var_names.len() != self.n_vars {
            return bad(format!("bounds/names must have {} entries", self.n_vars));
        }
        if self.objective.iter().any(|c| !c.is_finite()) {
            return bad("non-finite objective coefficient".into());
        }
        for (k, &(lo, hi)) in self.bounds.iter().enumerate() {
            if !lo.is_finite() || hi.is_nan() || lo > hi {
                return bad(format!("variable {k} has invalid bounds [{lo}, {hi}]"));
            }
        }
        for (k, c) in self.constraints.iter().enumerate() {
            if c.coeffs.len() != self.n_vars {
                return bad(format!(
                    "row {k} has {} coefficients for {} variables",
                    c.coeffs.len(),
                    self.n_vars
                ));
            }
            if !c.rhs.is_finite() || c.coeffs.iter().any(|a| !a.is_finite()) {
                return bad(format!("row {k} has a non-finite entry"));
            }
        }
        Ok(())
    }

    /// Largest violation of any row or bound at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for c in &self.constraints {
            let lhs: f64 = c.coeffs.iter().zip(x).map(|(a, v)| a * v).sum();
            let v = match c.relation {
                Relation::Le => lhs - c.rhs,
                Relation::Eq => (lhs - c.rhs).abs(),
            };
            worst = worst.max(v);
        }
        for (&v, &(lo, hi)) in x.iter().zip(&self.bounds) {
            worst = worst.max(lo - v).max(v - hi);
        }
        worst
    }

    /// CPLEX LP text, for cross-checking against external solvers.
    pub fn to_lp_text(&self) -> String {
        let mut out = String::new();
        let term = |out: &mut String, first: &mut bool, a: f64, name: &VarLabel| {
            if a == 0.0 {
                return;
            }
            let sign = if a < 0.0 {
                " -"
            } else if *first {
                ""
            } else {
                " +"
            };
            let _ = write!(out, "{sign} {} {name}", a.abs());
            *first = false;
        };
        out.push_str("Maximize\n obj:");
        let mut first = true;
        for (a, name) in self.objective.iter().zip(&self.var_names) {
            term(&mut out, &mut first, *a, name);
        }
        if first {
            out.push_str(" 0");
        }
        out.push_str("\nSubject To\n");
        for (k, c) in self.constraints.iter().enumerate() {
            let _ = write!(out, " c{k}:");
            let mut first = true;
            for (a, name) in c.coeffs.iter().zip(&self.var_names) {
                term(&mut out, &mut first, *a, name);
            }
            if first {
                out.push_str(" 0 x_dummy");
            }
            let rel = match c.relation {
                Relation::Le => "<=",
                Relation::Eq => "=",
            };
            let _ = writeln!(out, " {rel} {}", c.rhs);
        }
        out.push_str("Bounds\n");
        for (name, (lo, hi)) in self.var_names.iter().zip(&self.bounds) {
            if hi.is_finite() {
                let _ = writeln!(out, " {lo} <= {name} <= {hi}");
            } else {
                let _ = writeln!(out, " {name} >= {lo}");
            }
        }
        out.push_str("End\n");
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<f64>,
    pub objective_value: f64,
}

impl LpSolution {
    /// Returns the solution when optimal, an error otherwise.
    pub fn into_optimal(self) -> Result<LpSolution> {
        match self.status {
            LpStatus::Optimal => Ok(self),
            status => Err(Error::LpNotOptimal(status)),
        }
    }
}

/// Backend able to solve an [`LpProblem`].
pub trait LpSolver {
    fn solve(&self, problem: &LpProblem) -> Result<LpSolution>;
}

/// Solves `problem` with the default [`DenseSimplex`].
pub fn solve_lp(problem: &LpProblem) -> Result<LpSolution> {
    DenseSimplex::default().solve(problem)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_var(objective: f64) -> LpProblem {
        LpProblem::new(vec![VarLabel::X(0, 0)], vec![objective])
    }

    #[test]
    fn single_constraint() {
        let mut p = one_var(1.0);
        p.add_le(vec![1.0], 0.5);
        let s = solve_lp(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.x[0] - 0.5).abs() < 1e-12);
        assert!((s.objective_value - 0.5).abs() < 1e-12);
    }

    #[test]
    fn infeasible_system() {
        let mut p = one_var(1.0);
        p.add_le(vec![1.0], -1.0);
        assert_eq!(solve_lp(&p).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn unbounded_system() {
        let mut p = one_var(1.0);
        p.bounds[0] = (0.0, f64::INFINITY);
        assert_eq!(solve_lp(&p).unwrap().status, LpStatus::Unbounded);
        assert!(matches!(
            solve_lp(&p).unwrap().into_optimal(),
            Err(Error::LpNotOptimal(LpStatus::Unbounded))
        ));
    }

    #[test]
    fn equality_and_lower_bounds() {
        // max x + y, x + y = 1.5, x in [0.25, 1], y in [0, 0.5]
        let mut p = LpProblem::new(vec![VarLabel::X(0, 0), VarLabel::Y(0, 0)], vec![1.0, 2.0]);
        p.bounds = vec![(0.25, 1.0), (0.0, 0.5)];
        p.add_eq(vec![1.0, 1.0], 1.5);
        let s = solve_lp(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.x[0] - 1.0).abs() < 1e-12 && (s.x[1] - 0.5).abs() < 1e-12);
        assert!((s.objective_value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn classic_two_variable_lp() {
        // max 3a + 5b s.t. a <= 4, 2b <= 12, 3a + 2b <= 18 -> (2, 6), 36
        let mut p = LpProblem::new(vec![VarLabel::X(0, 0), VarLabel::X(0, 1)], vec![3.0, 5.0]);
        p.bounds = vec![(0.0, f64::INFINITY); 2];
        p.add_le(vec![1.0, 0.0], 4.0);
        p.add_le(vec![0.0, 2.0], 12.0);
        p.add_le(vec![3.0, 2.0], 18.0);
        let s = solve_lp(&p).unwrap();
        assert!((s.objective_value - 36.0).abs() < 1e-9);
        assert!((s.x[0] - 2.0).abs() < 1e-9 && (s.x[1] - 6.0).abs() < 1e-9);
    }

    #[test]
    fn ge_rows_need_phase_one() {
        // min a + b (max -a - b) s.t. a + 2b >= 2, 3a + b >= 3 -> a = 0.8, b = 0.6
        let mut p = LpProblem::new(vec![VarLabel::X(0, 0), VarLabel::X(0, 1)], vec![-1.0, -1.0]);
        p.bounds = vec![(0.0, 10.0); 2];
        p.add_le(vec![-1.0, -2.0], -2.0);
        p.add_le(vec![-3.0, -1.0], -3.0);
        let s = solve_lp(&p).unwrap();
        assert!((s.objective_value + 1.4).abs() < 1e-9, "{s:?}");
    }

    #[test]
    fn invalid_problems_rejected() {
        let mut p = one_var(1.0);
        p.add_le(vec![1.0, 2.0], 1.0);
        assert!(matches!(solve_lp(&p), Err(Error::InvalidLp(_))));
        let mut p = one_var(f64::NAN);
        p.add_le(vec![1.0], 1.0);
        assert!(matches!(solve_lp(&p), Err(Error::InvalidLp(_))));
    }

    #[test]
    fn iteration_limit_is_an_error() {
        let mut p = LpProblem::new(vec![VarLabel::X(0, 0), VarLabel::X(0, 1)], vec![1.0, 1.0]);
        p.add_le(vec![1.0, 1.0], 1.5);
        let solver = DenseSimplex {
            max_iterations: Some(0),
            ..DenseSimplex::default()
        };
        assert_eq!(solver.solve(&p), Err(Error::IterationLimit(0)));
    }

    #[test]
    fn lp_text_lists_rows_and_bounds() {
        let mut p = LpProblem::new(vec![VarLabel::X(0, 1), VarLabel::Y(2, 3)], vec![1.0, -2.0]);
        p.add_le(vec![1.0, 1.0], 1.0);
        p.add_eq(vec![1.0, -0.5], 0.0);
        let text = p.to_lp_text();
        assert!(text.contains("obj: 1 x_0_1 - 2 y_2_3"));
        assert!(text.contains("c0: 1 x_0_1 + 1 y_2_3 <= 1"));
        assert!(text.contains("c1: 1 x_0_1 - 0.5 y_2_3 = 0"));
        assert!(text.contains("0 <= y_2_3 <= 1"));
    }
}
