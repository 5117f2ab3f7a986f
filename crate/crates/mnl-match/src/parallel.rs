//! Multi-threaded Monte Carlo and oracle search. Results match the
//! single-threaded versions exactly, whatever the worker count.

use mnl_match_core::mnl::decompose_matrix;
use mnl_match_core::oracle::{
    check_budget, menu_from_index, merge_best, search_range, OracleLimits, OracleResult,
};
use mnl_match_core::reward::{check_choice_matrix, mc_sample, summarize};
use mnl_match_core::{ChoiceMatrix, EstimateReport, Instance, Model, FEAS_TOL};
use rayon::prelude::*;
use rayon::{ThreadPool, ThreadPoolBuilder};

use crate::Error;

/// Pool with `workers` threads; 0 lets rayon pick.
pub fn pool(workers: usize) -> Result<ThreadPool, Error> {
    Ok(ThreadPoolBuilder::new().num_threads(workers).build()?)
}

/// Same estimate as [`mnl_match_core::reward::mc_reward`], with samples spread
/// over `workers` threads.
pub fn mc_reward_parallel(
    inst: &Instance,
    x: &ChoiceMatrix,
    model: Model,
    n_samples: u64,
    seed: u64,
    workers: usize,
) -> Result<EstimateReport, Error> {
    if n_samples == 0 {
        return Err(mnl_match_core::Error::NoSamples.into());
    }
    check_choice_matrix(inst, x)?;
    let dist = decompose_matrix(inst, x, FEAS_TOL)?;
    let samples: Vec<f64> = pool(workers)?.install(|| {
        (0..n_samples)
            .into_par_iter()
            .map(|s| mc_sample(inst, &dist, model, seed, s))
            .collect()
    });
    Ok(summarize(inst, &samples)?)
}

/// [`mnl_match_core::oracle::brute_force_opt`] with the menu range split
/// across `workers` threads.
pub fn brute_force_parallel(
    inst: &Instance,
    model: Model,
    limits: &OracleLimits,
    workers: usize,
) -> Result<OracleResult, Error> {
    let total = check_budget(inst, limits)?;
    let chunk = 256u128;
    let chunks: Vec<(u128, u128)> = (0..total.div_ceil(chunk))
        .map(|c| (c * chunk, ((c + 1) * chunk).min(total)))
        .collect();
    let parts = pool(workers)?.install(|| {
        chunks
            .par_iter()
            .map(|&(a, b)| search_range(inst, model, a..b, limits.cutoff))
            .collect::<Result<Vec<_>, _>>()
    })?;
    let (index, opt_value) = merge_best(parts).expect("the empty menu is always evaluated");
    Ok(OracleResult {
        best_menu: menu_from_index(index, inst.n_customers, inst.n_suppliers),
        opt_value,
        menus_evaluated: total,
    })
}
