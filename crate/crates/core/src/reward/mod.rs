//! Expected-reward evaluation of a choice matrix `x`: exact enumeration,
//! Monte Carlo simulation of the two-step matching, and a grid-based dynamic
//! program for the inclusive model.

mod dp;

use alloc::vec::Vec;

use rand_core::RngCore;

use crate::error::{Error, Result};
use crate::instance::{Instance, Regime};
use crate::mnl::{
    best_prefix, decompose_matrix, f_customized, inclusive_value, sample_index, sample_menu,
    sort_by_reward_desc, ChoiceMatrix, Menu, MenuDistribution, Model,
};
use crate::rng::stream_rng;
use crate::FEAS_TOL;

pub use dp::{build_grid, dp_estimate, dp_estimate_inclusive, DpGrid};

/// Default per-supplier support size up to which [`exact_reward`] enumerates.
pub const DEFAULT_CUTOFF: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Exact,
    MonteCarlo,
    Dp,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::MonteCarlo => "monte_carlo",
            Method::Dp => "dp",
        }
    }
}

/// A reward estimate with a bracket `lower <= value <= upper`.
#[derive(Clone, Debug, PartialEq)]
pub struct EstimateReport {
    pub value: f64,
    pub method: Method,
    pub lower: f64,
    pub upper: f64,
    /// Number of Monte Carlo samples.
    pub samples: Option<u64>,
    /// Requested accuracy of the DP estimator.
    pub epsilon: Option<f64>,
}

impl EstimateReport {
    pub fn exact(value: f64) -> Self {
        EstimateReport {
            value,
            method: Method::Exact,
            lower: value,
            upper: value,
            samples: None,
            epsilon: None,
        }
    }

    pub fn contains(&self, v: f64, tol: f64) -> bool {
        self.lower - tol <= v && v <= self.upper + tol
    }
}

fn in_scope(inst: &Instance, restrict: Option<Regime>, i: usize, j: usize) -> bool {
    restrict.is_none_or(|r| Regime::of_weight(inst.w(i, j)) == r)
}

/// Copy of `x` with every entry outside `regime` set to zero.
pub fn restrict_matrix(inst: &Instance, x: &ChoiceMatrix, regime: Regime) -> ChoiceMatrix {
    ChoiceMatrix(x.map(|i, j, v| {
        if in_scope(inst, Some(regime), i, j) {
            v
        } else {
            0.0
        }
    }))
}

/// Shape and `P^C` membership check shared by the evaluators.
pub fn check_choice_matrix(inst: &Instance, x: &ChoiceMatrix) -> Result<()> {
    if x.shape() != (inst.n_customers, inst.n_suppliers) {
        return Err(Error::Dimension(alloc::format!(
            "choice matrix is {}x{}, instance is {}x{}",
            x.rows(),
            x.cols(),
            inst.n_customers,
            inst.n_suppliers
        )));
    }
    for i in 0..inst.n_customers {
        if !crate::mnl::polyhedron_row_feasible(inst.cust_weights.row(i), x.row(i), FEAS_TOL) {
            return Err(Error::InfeasibleRow { row: i });
        }
    }
    Ok(())
}

/// Customers that can reach supplier `j` and count toward its reward.
pub(crate) fn supplier_support(
    inst: &Instance,
    x: &ChoiceMatrix,
    j: usize,
    restrict: Option<Regime>,
) -> Vec<usize> {
    (0..inst.n_customers)
        .filter(|&i| x[(i, j)] > 0.0 && inst.w(i, j) > 0.0 && in_scope(inst, restrict, i, j))
        .collect()
}

/// Exact `R^P(x) = sum_j E[f_j(C_j)]`, where customer `i` independently lands
/// in `C_j` with probability `x[i][j]`.
///
/// With `restrict` set, only edges of that regime are counted, both as
/// rewards and in the suppliers' denominators. Suppliers whose support exceeds
/// `cutoff` are refused.
pub fn exact_reward(
    inst: &Instance,
    x: &ChoiceMatrix,
    model: Model,
    restrict: Option<Regime>,
    cutoff: usize,
) -> Result<f64> {
    check_choice_matrix(inst, x)?;
    let mut total = 0.0;
    for j in 0..inst.n_suppliers {
        let mut support = supplier_support(inst, x, j, restrict);
        if support.len() > cutoff {
            return Err(Error::SupportExceedsCutoff {
                supplier: j,
                support: support.len(),
                cutoff,
            });
        }
        // Revenue order lets the customized value be a prefix scan of each subset.
        sort_by_reward_desc(&mut support, |i| inst.r(i, j));
        let p: Vec<f64> = support.iter().map(|&i| x[(i, j)].min(1.0)).collect();
        let rw: Vec<(f64, f64)> = support
            .iter()
            .map(|&i| (inst.r(i, j), inst.w(i, j)))
            .collect();
        let k = support.len();
        for mask in 0u64..(1u64 << k) {
            let mut prob = 1.0;
            for (b, &pb) in p.iter().enumerate() {
                prob *= if mask >> b & 1 == 1 { pb } else { 1.0 - pb };
            }
            if prob == 0.0 {
                continue;
            }
            let members = (0..k).filter(|b| mask >> b & 1 == 1).map(|b| rw[b]);
            let f = match model {
                Model::Inclusive => inclusive_value(members),
                Model::Customized => best_prefix(members).0,
            };
            total += prob * f;
        }
    }
    Ok(total)
}

/// One run of the two-step matching under a fixed menu. Customers choose in
/// index order, then suppliers in index order; returns the matched edges and
/// their total reward.
pub fn simulate_once<R: RngCore + ?Sized>(
    inst: &Instance,
    menu: &Menu,
    model: Model,
    rng: &mut R,
) -> (Vec<(usize, usize)>, f64) {
    let mut selectors: Vec<Vec<usize>> = alloc::vec![Vec::new(); inst.n_suppliers];
    for (i, offers) in menu.0.iter().enumerate() {
        let u = inst.cust_weights.row(i);
        let denom = 1.0 + offers.iter().map(|&j| u[j]).sum::<f64>();
        let probs = offers.iter().map(|&j| u[j] / denom);
        let k = sample_index(probs.clone().chain(core::iter::once(1.0 / denom)), rng);
        if k < offers.len() {
            selectors[offers[k]].push(i);
        }
    }
    let mut matching = Vec::new();
    let mut reward = 0.0;
    for (j, c_j) in selectors.iter().enumerate() {
        if c_j.is_empty() {
            continue;
        }
        let shown = match model {
            Model::Inclusive => c_j.clone(),
            Model::Customized => f_customized(inst, j, c_j).1,
        };
        let denom = 1.0 + shown.iter().map(|&i| inst.w(i, j)).sum::<f64>();
        let probs = shown.iter().map(|&i| inst.w(i, j) / denom);
        let k = sample_index(probs.clone().chain(core::iter::once(1.0 / denom)), rng);
        if k < shown.len() {
            matching.push((shown[k], j));
            reward += inst.r(shown[k], j);
        }
    }
    (matching, reward)
}

/// Reward of Monte Carlo sample `s`: draws a menu from `dist` and simulates
/// it, all from stream `s` under `seed`.
pub fn mc_sample(inst: &Instance, dist: &MenuDistribution, model: Model, seed: u64, s: u64) -> f64 {
    let mut rng = stream_rng(seed, s);
    let menu = sample_menu(dist, &mut rng);
    simulate_once(inst, &menu, model, &mut rng).1
}

/// Mean of per-sample rewards with a `3 sigma / sqrt(n)` bracket. With fewer
/// than two samples the bracket is the trivial `[0, sum_j max_i r_ij]`.
pub fn summarize(inst: &Instance, samples: &[f64]) -> Result<EstimateReport> {
    let n = samples.len();
    if n == 0 {
        return Err(Error::NoSamples);
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    let (lower, upper) = if n < 2 {
        let cap = (0..inst.n_suppliers)
            .map(|j| inst.rewards.column(j).fold(0.0, f64::max))
            .sum::<f64>();
        (0.0, cap.max(mean))
    } else {
        let var = samples.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
        let half = 3.0 * libm::sqrt(var / n as f64);
        ((mean - half).max(0.0).min(mean), mean + half)
    };
    Ok(EstimateReport {
        value: mean,
        method: Method::MonteCarlo,
        lower,
        upper,
        samples: Some(n as u64),
        epsilon: None,
    })
}

/// Monte Carlo estimate of `R^P(x)` from `n_samples` menus drawn from the
/// decomposition of `x`. Sample `s` uses its own stream, so the result
/// depends only on `seed` and `n_samples`.
pub fn mc_reward(
    inst: &Instance,
    x: &ChoiceMatrix,
    model: Model,
    n_samples: u64,
    seed: u64,
) -> Result<EstimateReport> {
    if n_samples == 0 {
        return Err(Error::NoSamples);
    }
    check_choice_matrix(inst, x)?;
    let dist = decompose_matrix(inst, x, FEAS_TOL)?;
    let samples: Vec<f64> = (0..n_samples)
        .map(|s| mc_sample(inst, &dist, model, seed, s))
        .collect();
    summarize(inst, &samples)
}

/// `E[1/(1+Y)]` for `Y ~ Poisson(lambda)`, i.e. `(1 - e^-lambda) / lambda`.
pub fn poisson_inverse_moment(lambda: f64) -> Result<f64> {
    if lambda.is_nan() || lambda < 0.0 {
        return Err(Error::NegativeRate(lambda));
    }
    if lambda == 0.0 {
        return Ok(1.0);
    }
    Ok(-libm::expm1(-lambda) / lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mnl::menu_to_choice_matrix;
    use alloc::vec;

    fn gap_menu() -> Menu {
        Menu(vec![vec![0], vec![0, 1]])
    }

    #[test]
    fn exact_reward_menu_gap() {
        let inst = Instance::menu_gap();
        let x = menu_to_choice_matrix(&inst, &gap_menu()).unwrap();
        let v = exact_reward(&inst, &x, Model::Inclusive, None, DEFAULT_CUTOFF).unwrap();
        assert!((v - 2.0 / 9.0).abs() < 1e-12, "{v}");

        let m1 = menu_to_choice_matrix(&inst, &Menu(vec![vec![0], vec![0]])).unwrap();
        let m2 = menu_to_choice_matrix(&inst, &Menu(vec![vec![], vec![1]])).unwrap();
        let split = exact_reward(&inst, &m1, Model::Inclusive, None, DEFAULT_CUTOFF).unwrap()
            + exact_reward(&inst, &m2, Model::Inclusive, None, DEFAULT_CUTOFF).unwrap();
        assert!((split - 5.0 / 24.0).abs() < 1e-12, "{split}");
    }

    #[test]
    fn exact_reward_zero_matrix() {
        let inst = Instance::menu_gap();
        let x = ChoiceMatrix::zeros(2, 2);
        for model in [Model::Inclusive, Model::Customized] {
            assert_eq!(
                exact_reward(&inst, &x, model, None, DEFAULT_CUTOFF).unwrap(),
                0.0
            );
        }
    }

    #[test]
    fn exact_reward_unit_instance() {
        let inst = Instance::unit();
        let mut x = ChoiceMatrix::zeros(1, 1);
        x[(0, 0)] = 0.5;
        let v = exact_reward(&inst, &x, Model::Inclusive, None, DEFAULT_CUTOFF).unwrap();
        assert!((v - 0.25).abs() < 1e-15);
    }

    #[test]
    fn exact_reward_respects_restriction() {
        let inst = Instance::from_rows(&[[1.0], [1.0]], &[[1.0], [1.0]], &[[2.0], [0.5]]).unwrap();
        let mut x = ChoiceMatrix::zeros(2, 1);
        x[(0, 0)] = 0.5;
        x[(1, 0)] = 0.5;
        let high = exact_reward(
            &inst,
            &x,
            Model::Inclusive,
            Some(Regime::High),
            DEFAULT_CUTOFF,
        )
        .unwrap();
        assert!((high - 0.5 * 2.0 / 3.0).abs() < 1e-15);
        let low = exact_reward(
            &inst,
            &x,
            Model::Inclusive,
            Some(Regime::Low),
            DEFAULT_CUTOFF,
        )
        .unwrap();
        assert!((low - 0.5 * 0.5 / 1.5).abs() < 1e-15);
    }

    #[test]
    fn exact_reward_refuses_large_support() {
        let inst = Instance::from_rows(
            &[[1.0], [1.0], [1.0]],
            &[[1.0], [1.0], [1.0]],
            &[[1.0], [1.0], [1.0]],
        )
        .unwrap();
        let x = ChoiceMatrix(crate::Matrix::filled(3, 1, 0.2));
        assert_eq!(
            exact_reward(&inst, &x, Model::Inclusive, None, 2),
            Err(Error::SupportExceedsCutoff {
                supplier: 0,
                support: 3,
                cutoff: 2
            })
        );
    }

    #[test]
    fn exact_reward_rejects_infeasible_x() {
        let inst = Instance::unit();
        let x = ChoiceMatrix(crate::Matrix::filled(1, 1, 0.9));
        assert_eq!(
            exact_reward(&inst, &x, Model::Inclusive, None, DEFAULT_CUTOFF),
            Err(Error::InfeasibleRow { row: 0 })
        );
    }

    #[test]
    fn simulate_empty_menu() {
        let inst = Instance::menu_gap();
        let mut rng = stream_rng(1, 0);
        let (m, r) = simulate_once(&inst, &Menu::empty(2), Model::Inclusive, &mut rng);
        assert!(m.is_empty());
        assert_eq!(r, 0.0);
    }

    fn three_sigma_check(samples: &[f64], target: f64) {
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let var = samples.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
        assert!(
            (mean - target).abs() <= 3.0 * libm::sqrt(var / n),
            "{mean} vs {target}"
        );
    }

    #[test]
    fn simulate_matches_exact_values() {
        let inst = Instance::menu_gap();
        let mut rng = stream_rng(11, 0);
        let mut samples = Vec::new();
        for _ in 0..1_000_000 {
            let (m, r) = simulate_once(&inst, &gap_menu(), Model::Inclusive, &mut rng);
            assert!(m.len() <= 2);
            samples.push(r);
        }
        three_sigma_check(&samples, 2.0 / 9.0);

        let unit = Instance::unit();
        let mut rng = stream_rng(12, 0);
        let samples: Vec<f64> = (0..1_000_000)
            .map(|_| simulate_once(&unit, &Menu(vec![vec![0]]), Model::Inclusive, &mut rng).1)
            .collect();
        three_sigma_check(&samples, 0.25);
    }

    #[test]
    fn simulate_produces_partial_matchings() {
        let inst =
            crate::instance::generate_random(4, 3, &crate::GenParams::default().with_seed(5))
                .unwrap();
        let menu = Menu(vec![vec![0, 1, 2]; 4]);
        let mut rng = stream_rng(3, 0);
        for _ in 0..1000 {
            for model in [Model::Inclusive, Model::Customized] {
                let (m, r) = simulate_once(&inst, &menu, model, &mut rng);
                let mut cs: Vec<usize> = m.iter().map(|e| e.0).collect();
                let mut ss: Vec<usize> = m.iter().map(|e| e.1).collect();
                cs.sort_unstable();
                cs.dedup();
                ss.sort_unstable();
                ss.dedup();
                assert_eq!(cs.len(), m.len());
                assert_eq!(ss.len(), m.len());
                let total: f64 = m.iter().map(|&(i, j)| inst.r(i, j)).sum();
                assert!((total - r).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn mc_reward_examples() {
        let inst = Instance::menu_gap();
        let zero = mc_reward(&inst, &ChoiceMatrix::zeros(2, 2), Model::Inclusive, 1000, 1).unwrap();
        assert_eq!((zero.value, zero.lower, zero.upper), (0.0, 0.0, 0.0));

        let x = menu_to_choice_matrix(&inst, &gap_menu()).unwrap();
        let rep = mc_reward(&inst, &x, Model::Inclusive, 1_000_000, 9).unwrap();
        assert!(rep.contains(2.0 / 9.0, 0.0), "{rep:?}");
        assert_eq!(rep.samples, Some(1_000_000));

        let unit = Instance::unit();
        let half = ChoiceMatrix(crate::Matrix::filled(1, 1, 0.5));
        let rep = mc_reward(&unit, &half, Model::Inclusive, 100_000, 2).unwrap();
        assert!(rep.contains(0.25, 0.0), "{rep:?}");
    }

    #[test]
    fn mc_reward_is_deterministic_and_validates() {
        let inst = Instance::menu_gap();
        let x = menu_to_choice_matrix(&inst, &gap_menu()).unwrap();
        let a = mc_reward(&inst, &x, Model::Customized, 5000, 4).unwrap();
        let b = mc_reward(&inst, &x, Model::Customized, 5000, 4).unwrap();
        assert_eq!(a, b);
        assert_eq!(
            mc_reward(&inst, &x, Model::Inclusive, 0, 4),
            Err(Error::NoSamples)
        );

        let one = mc_reward(&inst, &x, Model::Inclusive, 1, 4).unwrap();
        assert_eq!(one.samples, Some(1));
        assert_eq!(one.lower, 0.0);
        assert!(one.upper >= 1.0);
    }

    #[test]
    fn poisson_inverse_moment_values() {
        assert_eq!(poisson_inverse_moment(0.0).unwrap(), 1.0);
        let v = poisson_inverse_moment(1.0).unwrap();
        assert!((v - (1.0 - libm::exp(-1.0))).abs() < 1e-15);
        assert!(v <= 0.65);
        assert!((poisson_inverse_moment(1e-12).unwrap() - 1.0).abs() < 1e-12);
        assert!(matches!(
            poisson_inverse_moment(-1.0),
            Err(Error::NegativeRate(_))
        ));
    }
}
