use alloc::vec;
use alloc::vec::Vec;

use super::{check_choice_matrix, in_scope, EstimateReport, Method};
use crate::error::{Error, Result};
use crate::instance::{Instance, Regime};
use crate::mnl::{ChoiceMatrix, Model};

/// Geometric grid `{1, q, q^2, ..., q^L}` with `q = 1 + epsilon / n`.
#[derive(Clone, Debug, PartialEq)]
pub struct DpGrid {
    pub epsilon: f64,
    pub n: usize,
    pub points: Vec<f64>,
    /// Largest exponent; `points.len() == l + 1`.
    pub l: usize,
}

impl DpGrid {
    pub fn ratio(&self) -> f64 {
        1.0 + self.epsilon / self.n as f64
    }

    /// Index of the smallest grid point `>= v`. Values above the grid map to
    /// the last point; callers size the grid so this never happens.
    pub fn round_up_index(&self, v: f64) -> usize {
        self.points.partition_point(|&p| p < v).min(self.l)
    }

    /// Smallest grid point `>= v`.
    pub fn round_up(&self, v: f64) -> f64 {
        self.points[self.round_up_index(v)]
    }
}

/// Grid for `n` random summands: `L` is the smallest exponent with
/// `q^L >= 1 + n * w_max`.
pub fn build_grid(n: usize, epsilon: f64, w_max: f64) -> DpGrid {
    let n = n.max(1);
    let q = 1.0 + epsilon / n as f64;
    let top = 1.0 + n as f64 * w_max;
    let mut points = vec![1.0];
    while *points.last().unwrap() < top {
        let next = points.last().unwrap() * q;
        points.push(next);
    }
    let l = points.len() - 1;
    DpGrid {
        epsilon,
        n,
        points,
        l,
    }
}

/// `F~(1, ceil(alpha0))`: expected `1 / alpha` after adding `w_l` with
/// probability `p_l` for every `(p_l, w_l)` in `others`, rounding up to the
/// grid after each step.
fn rounded_inverse_moment(grid: &DpGrid, alpha0: f64, others: &[(f64, f64)]) -> f64 {
    let mut mass = vec![0.0; grid.points.len()];
    let start = grid.round_up_index(alpha0);
    mass[start] = 1.0;
    let (mut lo, mut hi) = (start, start);
    for &(p, w) in others {
        let mut next = vec![0.0; mass.len()];
        let mut new_hi = hi;
        for k in lo..=hi {
            let m = mass[k];
            if m == 0.0 {
                continue;
            }
            next[k] += m * (1.0 - p);
            let up = grid.round_up_index(grid.points[k] + w);
            next[up] += m * p;
            new_hi = new_hi.max(up);
        }
        mass = next;
        hi = new_hi;
        lo = (lo..=hi).find(|&k| mass[k] != 0.0).unwrap_or(lo);
    }
    (lo..=hi).map(|k| mass[k] / grid.points[k]).sum()
}

/// Grid-based estimate of the inclusive `R^P(x)` (restricted to one regime
/// when `restrict` is set).
///
/// Runs internally at `epsilon / 2`; the result `R~` satisfies
/// `(1 - epsilon) R <= R~ <= R`, so the report is `[R~, R~ / (1 - epsilon)]`.
pub fn dp_estimate_inclusive(
    inst: &Instance,
    x: &ChoiceMatrix,
    epsilon: f64,
    restrict: Option<Regime>,
) -> Result<EstimateReport> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidEpsilon(epsilon));
    }
    check_choice_matrix(inst, x)?;
    let eps = epsilon / 2.0;
    let w_max = inst.max_supp_weight();
    let mut total = 0.0;
    for j in 0..inst.n_suppliers {
        let support: Vec<usize> = (0..inst.n_customers)
            .filter(|&i| x[(i, j)] > 0.0 && inst.w(i, j) > 0.0 && in_scope(inst, restrict, i, j))
            .collect();
        for &i in &support {
            let others: Vec<(f64, f64)> = support
                .iter()
                .filter(|&&l| l != i)
                .map(|&l| (x[(l, j)].min(1.0), inst.w(l, j)))
                .collect();
            let n = others.len().max(1);
            // Every reachable state, after one rounding per step, stays below
            // `reach`; widen the grid when `1 + n w_max` falls short of it.
            let sum_w: f64 = inst.w(i, j) + others.iter().map(|o| o.1).sum::<f64>();
            let q = 1.0 + eps / n as f64;
            let reach = (1.0 + sum_w) * libm::pow(q, (n + 2) as f64);
            let grid = build_grid(n, eps, w_max.max((reach - 1.0) / n as f64));
            let f = rounded_inverse_moment(&grid, 1.0 + inst.w(i, j), &others);
            total += inst.r(i, j) * inst.w(i, j) * x[(i, j)] * f;
        }
    }
    Ok(EstimateReport {
        value: total,
        method: Method::Dp,
        lower: total,
        upper: total / (1.0 - 2.0 * eps),
        samples: None,
        epsilon: Some(epsilon),
    })
}

/// Model-dispatching front end of [`dp_estimate_inclusive`]; the customized
/// model has no grid estimator.
pub fn dp_estimate(
    inst: &Instance,
    x: &ChoiceMatrix,
    model: Model,
    epsilon: f64,
    restrict: Option<Regime>,
) -> Result<EstimateReport> {
    match model {
        Model::Inclusive => dp_estimate_inclusive(inst, x, epsilon, restrict),
        Model::Customized => Err(Error::UnsupportedModel),
    }
}
