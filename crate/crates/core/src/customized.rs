//! LP-based algorithm for the customized model.

use crate::error::Result;
use crate::instance::Instance;
use crate::lp::{build_customized_lp, extract_matrix, solve_lp};
use crate::matrix::Matrix;
use crate::mnl::{decompose_matrix, ChoiceMatrix, MenuDistribution, Model};
use crate::reward::{exact_reward, mc_reward, supplier_support, EstimateReport, DEFAULT_CUTOFF};
use crate::FEAS_TOL;

/// Monte Carlo sample count used when exact evaluation is out of reach.
pub const DEFAULT_MC_SAMPLES: u64 = 100_000;

#[derive(Clone, Debug, PartialEq)]
pub struct CustomizedSolution {
    pub x: ChoiceMatrix,
    /// Supplier-side part of the LP optimum, kept for auditing.
    pub y: Matrix,
    pub lp_value: f64,
    pub menu_dists: MenuDistribution,
    pub reward_estimate: EstimateReport,
}

/// Solves the customized LP and returns its `x`-part with the menu
/// distributions realizing it. The expected reward is at least a third of the
/// LP value, which itself bounds the optimum from above.
pub fn solve_customized(inst: &Instance) -> Result<CustomizedSolution> {
    let problem = build_customized_lp(inst);
    let sol = solve_lp(&problem)?.into_optimal()?;
    let shape = (inst.n_customers, inst.n_suppliers);
    let x = ChoiceMatrix(extract_matrix(&problem, &sol, shape, false).map(|_, _, v| v.max(0.0)));
    let y = extract_matrix(&problem, &sol, shape, true);
    let menu_dists = decompose_matrix(inst, &x, FEAS_TOL)?;
    let within_cutoff =
        (0..inst.n_suppliers).all(|j| supplier_support(inst, &x, j, None).len() <= DEFAULT_CUTOFF);
    let reward_estimate = if within_cutoff {
        EstimateReport::exact(exact_reward(
            inst,
            &x,
            Model::Customized,
            None,
            DEFAULT_CUTOFF,
        )?)
    } else {
        mc_reward(inst, &x, Model::Customized, DEFAULT_MC_SAMPLES, 0)?
    };
    Ok(CustomizedSolution {
        x,
        y,
        lp_value: sol.objective_value,
        menu_dists,
        reward_estimate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mnl::polyhedron_row_feasible;
    use crate::reward::Method;

    #[test]
    fn unit_instance() {
        let s = solve_customized(&Instance::unit()).unwrap();
        assert!((s.lp_value - 0.5).abs() < 1e-12);
        assert!((s.x[(0, 0)] - 0.5).abs() < 1e-12);
        assert_eq!(s.reward_estimate.method, Method::Exact);
        assert!((s.reward_estimate.value - 0.25).abs() < 1e-12);
    }

    #[test]
    fn zero_rewards() {
        let inst = Instance::from_rows(
            &[[0.0, 0.0], [0.0, 0.0]],
            &[[1.0, 2.0], [3.0, 1.0]],
            &[[1.0, 5.0], [0.2, 1.0]],
        )
        .unwrap();
        let s = solve_customized(&inst).unwrap();
        assert_eq!(s.lp_value, 0.0);
        assert_eq!(s.reward_estimate.value, 0.0);
    }

    #[test]
    fn solution_is_feasible_on_both_sides() {
        for seed in 0..20 {
            let inst = crate::instance::generate_random(
                3,
                3,
                &crate::GenParams::default().with_seed(seed),
            )
            .unwrap();
            let s = solve_customized(&inst).unwrap();
            assert!(s.x.is_feasible(&inst, FEAS_TOL));
            for j in 0..3 {
                let col: alloc::vec::Vec<f64> = s.y.column(j).collect();
                assert!(polyhedron_row_feasible(
                    &inst.supplier_weights(j),
                    &col,
                    FEAS_TOL
                ));
                for i in 0..3 {
                    assert!((s.y[(i, j)] - inst.w(i, j).min(1.0) * s.x[(i, j)]).abs() < 1e-9);
                }
            }
            assert!(s.reward_estimate.value >= s.lp_value / 3.0 - 1e-9);
            assert!(s.reward_estimate.value <= s.lp_value + 1e-9);
        }
    }
}
