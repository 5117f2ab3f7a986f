use alloc::vec;
use alloc::vec::Vec;

use super::{LpProblem, LpSolution, VarLabel};
use crate::instance::{EdgeSplit, Instance, Regime};
use crate::matrix::Matrix;

/// Per-supplier cap on expected high-weight selections.
pub const HIGH_WEIGHT_CAP: f64 = 3.0 / 5.0;

/// Adds `x_j / weight_j + sum_k x_k <= 1` for every `(var, weight)` in `group`.
fn add_polyhedron_rows(p: &mut LpProblem, group: &[(usize, f64)]) {
    for &(var, weight) in group {
        let mut coeffs = vec![0.0; p.n_vars];
        for &(other, _) in group {
            coeffs[other] = 1.0;
        }
        coeffs[var] += 1.0 / weight;
        p.add_le(coeffs, 1.0);
    }
}

/// `x`-variables for selectable edges (`u > 0`) accepted by `keep`, with
/// the customer polyhedron rows already added.
fn choice_lp(
    inst: &Instance,
    keep: impl Fn(usize, usize) -> bool,
    objective: impl Fn(usize, usize) -> f64,
) -> (LpProblem, Vec<(usize, usize)>) {
    let edges: Vec<(usize, usize)> = (0..inst.n_customers)
        .flat_map(|i| (0..inst.n_suppliers).map(move |j| (i, j)))
        .filter(|&(i, j)| inst.u(i, j) > 0.0 && keep(i, j))
        .collect();
    let labels = edges.iter().map(|&(i, j)| VarLabel::X(i, j)).collect();
    let obj = edges.iter().map(|&(i, j)| objective(i, j)).collect();
    let mut p = LpProblem::new(labels, obj);
    for i in 0..inst.n_customers {
        let group: Vec<(usize, f64)> = edges
            .iter()
            .enumerate()
            .filter(|(_, e)| e.0 == i)
            .map(|(v, &(_, j))| (v, inst.u(i, j)))
            .collect();
        add_polyhedron_rows(&mut p, &group);
    }
    (p, edges)
}

/// Customized-model relaxation: maximize `sum r y` subject to
/// `y = min(w, 1) x`, `y` in the supplier polyhedra and `x` in the customer
/// polyhedra. Variables `0..|E|` are `x`, `|E|..2|E|` are `y`.
pub fn build_customized_lp(inst: &Instance) -> LpProblem {
    let (xp, edges) = choice_lp(inst, |_, _| true, |_, _| 0.0);
    let ne = edges.len();
    let mut labels = xp.var_names.clone();
    labels.extend(edges.iter().map(|&(i, j)| VarLabel::Y(i, j)));
    let mut objective = vec![0.0; ne];
    objective.extend(edges.iter().map(|&(i, j)| inst.r(i, j)));
    let mut p = LpProblem::new(labels, objective);
    for c in xp.constraints {
        let mut coeffs = c.coeffs;
        coeffs.resize(2 * ne, 0.0);
        p.add_le(coeffs, c.rhs);
    }
    for (e, &(i, j)) in edges.iter().enumerate() {
        let mut coeffs = vec![0.0; 2 * ne];
        coeffs[ne + e] = 1.0;
        coeffs[e] = -inst.w(i, j).min(1.0);
        p.add_eq(coeffs, 0.0);
    }
    for j in 0..inst.n_suppliers {
        let group: Vec<(usize, f64)> = edges
            .iter()
            .enumerate()
            .filter(|(_, e)| e.1 == j && inst.w(e.0, j) > 0.0)
            .map(|(e, &(i, _))| (ne + e, inst.w(i, j)))
            .collect();
        add_polyhedron_rows(&mut p, &group);
    }
    p
}

/// Low-weight relaxation: maximize `sum r w x` over low-weight edges with a
/// leave-one-out cap `sum_{l != i} w_lj x_lj <= 1` for each such edge.
pub fn build_low_weight_lp(inst: &Instance, split: &EdgeSplit) -> LpProblem {
    let (mut p, edges) = choice_lp(
        inst,
        |i, j| split.contains(Regime::Low, i, j),
        |i, j| inst.r(i, j) * inst.w(i, j),
    );
    for &(i, j) in &edges {
        let coeffs = edges
            .iter()
            .map(|&(l, k)| if k == j && l != i { inst.w(l, j) } else { 0.0 })
            .collect();
        p.add_le(coeffs, 1.0);
    }
    p
}

/// High-weight relaxation: maximize `sum r x` over high-weight edges with at
/// most 3/5 expected high-weight selections per supplier.
pub fn build_high_weight_lp(inst: &Instance, split: &EdgeSplit) -> LpProblem {
    let (mut p, edges) = choice_lp(
        inst,
        |i, j| split.contains(Regime::High, i, j),
        |i, j| inst.r(i, j),
    );
    for j in 0..inst.n_suppliers {
        if !edges.iter().any(|e| e.1 == j) {
            continue;
        }
        let coeffs = edges
            .iter()
            .map(|e| if e.1 == j { 1.0 } else { 0.0 })
            .collect();
        p.add_le(coeffs, HIGH_WEIGHT_CAP);
    }
    p
}

/// Single-supplier MNL assortment LP over customers `c_j`: maximize
/// `sum r y` with `y` in supplier `j`'s polyhedron restricted to `c_j`.
/// Customers with zero weight can never be chosen and get no variable.
pub fn build_mnl_assortment_lp(inst: &Instance, j: usize, c_j: &[usize]) -> LpProblem {
    let members: Vec<usize> = c_j
        .iter()
        .copied()
        .filter(|&i| inst.w(i, j) > 0.0)
        .collect();
    let labels = members.iter().map(|&i| VarLabel::Y(i, j)).collect();
    let objective = members.iter().map(|&i| inst.r(i, j)).collect();
    let mut p = LpProblem::new(labels, objective);
    let group: Vec<(usize, f64)> = members
        .iter()
        .enumerate()
        .map(|(v, &i)| (v, inst.w(i, j)))
        .collect();
    add_polyhedron_rows(&mut p, &group);
    p
}

/// Scatters the variables labelled `X` (or `Y` when `y` is set) into a
/// `n_customers x n_suppliers` matrix; unlabelled entries are zero.
pub fn extract_matrix(
    problem: &LpProblem,
    solution: &LpSolution,
    shape: (usize, usize),
    y: bool,
) -> Matrix {
    let mut m = Matrix::zeros(shape.0, shape.1);
    for (label, &v) in problem.var_names.iter().zip(&solution.x) {
        match (label, y) {
            (VarLabel::X(i, j), false) | (VarLabel::Y(i, j), true) => m[(*i, *j)] = v,
            _ => {}
        }
    }
    m
}
