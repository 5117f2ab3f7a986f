//! LP-based algorithm for the inclusive model.
//!
//! Edges are split by supplier weight: the low-weight (`w <= 1`) and
//! high-weight (`w > 1`) relaxations are solved separately, both candidates
//! are scored with the grid estimator, and the better one is returned.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::instance::{split_edges, EdgeSplit, Instance, Regime};
use crate::lp::{
    build_high_weight_lp, build_low_weight_lp, extract_matrix, solve_lp, LpProblem, HIGH_WEIGHT_CAP,
};
use crate::mnl::{decompose_matrix, sort_by_reward_desc, ChoiceMatrix, MenuDistribution};
use crate::reward::{dp_estimate_inclusive, EstimateReport};
use crate::FEAS_TOL;

/// Approximation factor guaranteed before the estimator's `2 epsilon` loss.
pub const INCLUSIVE_RATIO: f64 = 10.0 / 539.0;

#[derive(Clone, Debug, PartialEq)]
pub struct InclusiveSolution {
    pub x: ChoiceMatrix,
    pub chosen_regime: Regime,
    pub x_low: ChoiceMatrix,
    pub x_high: ChoiceMatrix,
    pub lp_low_value: f64,
    pub lp_high_value: f64,
    pub est_low: EstimateReport,
    pub est_high: EstimateReport,
    pub epsilon: f64,
    pub menu_dists: MenuDistribution,
}

fn solve_regime(inst: &Instance, problem: LpProblem) -> Result<(ChoiceMatrix, f64)> {
    let sol = solve_lp(&problem)?.into_optimal()?;
    let x = extract_matrix(&problem, &sol, (inst.n_customers, inst.n_suppliers), false);
    Ok((
        ChoiceMatrix(x.map(|_, _, v| v.max(0.0))),
        sol.objective_value,
    ))
}

/// Optimal point of the low-weight relaxation and its LP value.
pub fn solve_low_weight(inst: &Instance, split: &EdgeSplit) -> Result<(ChoiceMatrix, f64)> {
    solve_regime(inst, build_low_weight_lp(inst, split))
}

/// Optimal point of the high-weight relaxation and its LP value.
pub fn solve_high_weight(inst: &Instance, split: &EdgeSplit) -> Result<(ChoiceMatrix, f64)> {
    solve_regime(inst, build_high_weight_lp(inst, split))
}

/// Runs both regimes and keeps the candidate with the larger estimate
/// (ties go to the low-weight one). The expected reward of the result is at
/// least `(10/539 - 2 epsilon)` times the optimum.
pub fn solve_inclusive(inst: &Instance, epsilon: f64) -> Result<InclusiveSolution> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidEpsilon(epsilon));
    }
    let split = split_edges(inst);
    let (x_low, lp_low_value) = solve_low_weight(inst, &split)?;
    let (x_high, lp_high_value) = solve_high_weight(inst, &split)?;
    let est_low = dp_estimate_inclusive(inst, &x_low, epsilon, Some(Regime::Low))?;
    let est_high = dp_estimate_inclusive(inst, &x_high, epsilon, Some(Regime::High))?;
    let chosen_regime = if est_low.value >= est_high.value {
        Regime::Low
    } else {
        Regime::High
    };
    let x = match chosen_regime {
        Regime::Low => x_low.clone(),
        Regime::High => x_high.clone(),
    };
    let menu_dists = decompose_matrix(inst, &x, FEAS_TOL)?;
    Ok(InclusiveSolution {
        x,
        chosen_regime,
        x_low,
        x_high,
        lp_low_value,
        lp_high_value,
        est_low,
        est_high,
        epsilon,
        menu_dists,
    })
}

/// `sum_{l != i} w_lj x_lj` over low-weight edges of supplier `j`.
fn leave_one_out(inst: &Instance, split: &EdgeSplit, x: &ChoiceMatrix, i: usize, j: usize) -> f64 {
    (0..inst.n_customers)
        .filter(|&l| l != i && split.contains(Regime::Low, l, j))
        .map(|l| inst.w(l, j) * x[(l, j)])
        .sum()
}

/// Objective of the deterministic low-weight program at `x`:
/// `sum_{E_-} r w x / (1 + sum_{l != i} w_lj x_lj)`.
pub fn deterministic_low_objective(inst: &Instance, split: &EdgeSplit, x: &ChoiceMatrix) -> f64 {
    split
        .edges(Regime::Low)
        .iter()
        .map(|&(i, j)| {
            inst.r(i, j) * inst.w(i, j) * x[(i, j)] / (1.0 + leave_one_out(inst, split, x, i, j))
        })
        .sum()
}

/// Scales each supplier's low-weight column so that every leave-one-out sum
/// is at most 1, without losing deterministic low-weight objective.
///
/// Column `j` is divided by `max(1, max_i sum_{l != i} w_lj x_lj)`. Entries
/// outside `E_-` are zeroed first.
pub fn scale_low_transform(inst: &Instance, split: &EdgeSplit, x: &ChoiceMatrix) -> ChoiceMatrix {
    let mut out = ChoiceMatrix(x.map(|i, j, v| {
        if split.contains(Regime::Low, i, j) {
            v
        } else {
            0.0
        }
    }));
    for j in 0..inst.n_suppliers {
        // Every customer counts: one whose own edge is high-weight sees the
        // whole low-weight column.
        let alpha = (0..inst.n_customers)
            .map(|i| leave_one_out(inst, split, &out, i, j))
            .fold(1.0, f64::max);
        for i in 0..inst.n_customers {
            out[(i, j)] /= alpha;
        }
    }
    out
}

/// Caps each supplier's expected high-weight selections at 3/5.
///
/// A supplier is heavy when its high-weight column sums above 3/5. Its
/// customers are ordered by decreasing reward (ties by index); the shortest
/// prefix whose mass exceeds 3/5 is kept and scaled by 3/8, the rest is
/// zeroed. Entries outside `E_+` are zeroed first.
pub fn truncate_high_transform(
    inst: &Instance,
    split: &EdgeSplit,
    x: &ChoiceMatrix,
) -> ChoiceMatrix {
    let mut out = ChoiceMatrix(x.map(|i, j, v| {
        if split.contains(Regime::High, i, j) {
            v
        } else {
            0.0
        }
    }));
    for j in 0..inst.n_suppliers {
        let total: f64 = out.column(j).sum();
        if total <= HIGH_WEIGHT_CAP {
            continue;
        }
        let mut order: Vec<usize> = (0..inst.n_customers).collect();
        sort_by_reward_desc(&mut order, |i| inst.r(i, j));
        let mut prefix = 0.0;
        let mut heavy_prefix = true;
        for &i in &order {
            if heavy_prefix {
                prefix += out[(i, j)];
                out[(i, j)] *= 3.0 / 8.0;
                heavy_prefix = prefix <= HIGH_WEIGHT_CAP;
            } else {
                out[(i, j)] = 0.0;
            }
        }
    }
    out
}
