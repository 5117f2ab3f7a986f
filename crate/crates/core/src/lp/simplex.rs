use alloc::vec;
use alloc::vec::Vec;

use super::{LpProblem, LpSolution, LpSolver, LpStatus, Relation};
use crate::error::{Error, Result};

/// Two-phase primal simplex on a dense tableau with Bland's rule.
///
/// Variables are shifted to their lower bounds; finite upper bounds and
/// equalities become `<=` rows (an equality is a pair of opposite rows).
#[derive(Clone, Debug)]
pub struct DenseSimplex {
    /// Additive tolerance on phase-one infeasibility.
    pub feas_tol: f64,
    /// Smallest pivot element accepted in a ratio test.
    pub pivot_tol: f64,
    /// Reduced costs above this are treated as improving.
    pub cost_tol: f64,
    /// Pivot budget; `None` picks one from the problem size.
    pub max_iterations: Option<usize>,
}

impl Default for DenseSimplex {
    fn default() -> Self {
        DenseSimplex {
            feas_tol: 1e-9,
            pivot_tol: 1e-10,
            cost_tol: 1e-10,
            max_iterations: None,
        }
    }
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    /// Reduced-cost row; the last entry holds `-objective`.
    cost: Vec<f64>,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn rhs(&self, r: usize) -> f64 {
        self.rows[r][self.width]
    }

    fn pivot(&mut self, r: usize, col: usize) {
        let p = self.rows[r][col];
        for v in self.rows[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = core::mem::take(&mut self.rows[r]);
        for (k, row) in self.rows.iter_mut().enumerate() {
            if k == r {
                continue;
            }
            let f = row[col];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                row[col] = 0.0;
            }
        }
        let f = self.cost[col];
        if f != 0.0 {
            for (v, pv) in self.cost.iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
            self.cost[col] = 0.0;
        }
        self.rows[r] = pivot_row;
        self.basis[r] = col;
    }

    fn set_costs(&mut self, costs: &[f64]) {
        let mut z = costs.to_vec();
        z.push(0.0);
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            let cb = costs[b];
            if cb != 0.0 {
                for (v, a) in z.iter_mut().zip(row) {
                    *v -= cb * a;
                }
            }
        }
        self.cost = z;
    }
}

enum Outcome {
    Optimal,
    Unbounded,
}

impl DenseSimplex {
    fn iterate(
        &self,
        t: &mut Tableau,
        allowed: &dyn Fn(usize) -> bool,
        budget: &mut usize,
        limit: usize,
    ) -> Result<Outcome> {
        loop {
            // Bland: lowest-index improving column.
            let Some(col) = (0..t.width).find(|&c| allowed(c) && t.cost[c] > self.cost_tol) else {
                return Ok(Outcome::Optimal);
            };
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..t.rows.len() {
                let a = t.rows[r][col];
                if a <= self.pivot_tol {
                    continue;
                }
                let ratio = t.rhs(r).max(0.0) / a;
                leave = match leave {
                    None => Some((r, ratio)),
                    Some((br, best)) => {
                        if ratio < best || (ratio == best && t.basis[r] < t.basis[br]) {
                            Some((r, ratio))
                        } else {
                            Some((br, best))
                        }
                    }
                };
            }
            let Some((r, _)) = leave else {
                return Ok(Outcome::Unbounded);
            };
            if *budget == 0 {
                return Err(Error::IterationLimit(limit));
            }
            *budget -= 1;
            t.pivot(r, col);
        }
    }
}

impl LpSolver for DenseSimplex {
    fn solve(&self, p: &LpProblem) -> Result<LpSolution> {
        p.validate()?;
        let n = p.n_vars;
        let lo: Vec<f64> = p.bounds.iter().map(|b| b.0).collect();

        // Canonical rows a.x' <= b over shifted variables x' = x - lo.
        let mut canon: Vec<(Vec<f64>, f64)> = Vec::new();
        for c in &p.constraints {
            let shift: f64 = c.coeffs.iter().zip(&lo).map(|(a, l)| a * l).sum();
            let b = c.rhs - shift;
            canon.push((c.coeffs.clone(), b));
            if c.relation == Relation::Eq {
                canon.push((c.coeffs.iter().map(|a| -a).collect(), -b));
            }
        }
        for (k, &(l, h)) in p.bounds.iter().enumerate() {
            if h.is_finite() {
                let mut a = vec![0.0; n];
                a[k] = 1.0;
                canon.push((a, h - l));
            }
        }

        let m = canon.len();
        let n_art = canon.iter().filter(|(_, b)| *b < 0.0).count();
        let width = n + m + n_art;
        let mut rows = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let mut art = n + m;
        for (r, (a, b)) in canon.into_iter().enumerate() {
            let mut row = vec![0.0; width + 1];
            if b < 0.0 {
                for (v, x) in row.iter_mut().zip(&a) {
                    *v = -x;
                }
                row[n + r] = -1.0;
                row[art] = 1.0;
                row[width] = -b;
                basis.push(art);
                art += 1;
            } else {
                row[..n].copy_from_slice(&a);
                row[n + r] = 1.0;
                row[width] = b;
                basis.push(n + r);
            }
            rows.push(row);
        }
        let mut t = Tableau {
            rows,
            cost: vec![0.0; width + 1],
            basis,
            width,
        };

        let limit = self.max_iterations.unwrap_or(10_000 + 50 * (m + width));
        let mut budget = limit;
        let is_art = |c: usize| c >= n + m;

        if n_art > 0 {
            let mut phase1 = vec![0.0; width];
            for c in phase1.iter_mut().skip(n + m) {
                *c = -1.0;
            }
            t.set_costs(&phase1);
            self.iterate(&mut t, &|_| true, &mut budget, limit)?;
            let infeasibility = t.cost[width];
            if infeasibility > self.feas_tol {
                return Ok(LpSolution {
                    status: LpStatus::Infeasible,
                    x: lo,
                    objective_value: f64::NAN,
                });
            }
            // Drive artificials out of the basis; rows where that fails are redundant.
            for r in 0..m {
                if is_art(t.basis[r]) {
                    if let Some(c) = (0..n + m).find(|&c| t.rows[r][c].abs() > self.pivot_tol) {
                        t.pivot(r, c);
                    }
                }
            }
        }

        let mut costs = vec![0.0; width];
        costs[..n].copy_from_slice(&p.objective);
        t.set_costs(&costs);
        let outcome = self.iterate(&mut t, &|c| !is_art(c), &mut budget, limit)?;
        if let Outcome::Unbounded = outcome {
            return Ok(LpSolution {
                status: LpStatus::Unbounded,
                x: lo,
                objective_value: f64::INFINITY,
            });
        }

        let mut x = lo;
        for (r, &b) in t.basis.iter().enumerate() {
            if b < n {
                x[b] += t.rhs(r).max(0.0);
            }
        }
        for (v, &(l, h)) in x.iter_mut().zip(&p.bounds) {
            *v = v.clamp(l, h);
        }
        let objective_value = p.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
        Ok(LpSolution {
            status: LpStatus::Optimal,
            x,
            objective_value,
        })
    }
}
