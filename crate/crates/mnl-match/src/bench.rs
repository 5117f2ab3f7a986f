//! Approximation-ratio benchmark: algorithm versus brute-force optimum on
//! random instances.

use std::io::Write;
use std::time::Instant;

use mnl_match_core::customized::solve_customized;
use mnl_match_core::inclusive::{solve_inclusive, INCLUSIVE_RATIO};
use mnl_match_core::instance::generate_random;
use mnl_match_core::oracle::{brute_force_opt, check_budget, OracleLimits};
use mnl_match_core::reward::exact_reward;
use mnl_match_core::rng::derive_seed;
use mnl_match_core::{GenParams, Instance, Model};
use rayon::prelude::*;
use serde::Serialize;

use crate::parallel::pool;
use crate::Error;

pub const CSV_HEADER: &str =
    "instance_id,model,algorithm_value,oracle_value,ratio,lp_value,regime,wall_time_ms";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchmarkRow {
    pub instance_id: u64,
    pub model: String,
    pub algorithm_value: f64,
    pub oracle_value: f64,
    pub ratio: f64,
    pub lp_value: f64,
    pub regime: String,
    pub wall_time_ms: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchConfig {
    pub models: Vec<Model>,
    pub count: u64,
    pub customers: usize,
    pub suppliers: usize,
    pub seed: u64,
    pub epsilon: f64,
    pub limits: OracleLimits,
    pub workers: usize,
    /// Record `wall_time_ms` as 0 so reruns are byte-identical.
    pub timing: bool,
}

/// Smallest ratio the guarantee allows for `model`.
pub fn ratio_floor(model: Model, epsilon: f64) -> f64 {
    match model {
        Model::Customized => 1.0 / 3.0,
        Model::Inclusive => INCLUSIVE_RATIO - 2.0 * epsilon,
    }
}

/// Whether `row` honors the approximation guarantee (with float slack).
pub fn meets_floor(row: &BenchmarkRow, model: Model, epsilon: f64) -> bool {
    row.algorithm_value >= ratio_floor(model, epsilon) * row.oracle_value - 1e-9
}

pub fn bench_instance(cfg: &BenchConfig, id: u64) -> Result<Instance, Error> {
    let params = GenParams::default().with_seed(derive_seed(cfg.seed, id));
    Ok(generate_random(cfg.customers, cfg.suppliers, &params)?)
}

fn run_one(cfg: &BenchConfig, model: Model, id: u64) -> Result<BenchmarkRow, Error> {
    let inst = bench_instance(cfg, id)?;
    let start = Instant::now();
    let (x, lp_value, regime) = match model {
        Model::Customized => {
            let s = solve_customized(&inst)?;
            (s.x, s.lp_value, String::new())
        }
        Model::Inclusive => {
            let s = solve_inclusive(&inst, cfg.epsilon)?;
            let lp = match s.chosen_regime {
                mnl_match_core::Regime::Low => s.lp_low_value,
                mnl_match_core::Regime::High => s.lp_high_value,
            };
            (s.x, lp, s.chosen_regime.as_str().to_owned())
        }
    };
    let elapsed = start.elapsed().as_secs_f64() * 1e3;
    let algorithm_value = exact_reward(&inst, &x, model, None, cfg.limits.cutoff)?;
    let oracle_value = brute_force_opt(&inst, model, &cfg.limits)?.opt_value;
    let ratio = if oracle_value > 0.0 {
        algorithm_value / oracle_value
    } else {
        1.0
    };
    Ok(BenchmarkRow {
        instance_id: id,
        model: model.as_str().to_owned(),
        algorithm_value,
        oracle_value,
        ratio,
        lp_value,
        regime,
        wall_time_ms: if cfg.timing { elapsed } else { 0.0 },
    })
}

/// Runs every model on every instance; rows are ordered by model, then id.
/// Fails before any work when the oracle budget is exceeded.
pub fn run_bench(cfg: &BenchConfig) -> Result<Vec<BenchmarkRow>, Error> {
    if cfg.count > 0 {
        check_budget(&bench_instance(cfg, 0)?, &cfg.limits)?;
    }
    let jobs: Vec<(Model, u64)> = cfg
        .models
        .iter()
        .flat_map(|&m| (0..cfg.count).map(move |id| (m, id)))
        .collect();
    pool(cfg.workers)?.install(|| {
        jobs.par_iter()
            .map(|&(m, id)| run_one(cfg, m, id))
            .collect::<Result<Vec<_>, _>>()
    })
}

pub fn write_csv<W: Write>(out: W, rows: &[BenchmarkRow]) -> Result<(), Error> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    w.write_record(CSV_HEADER.split(','))?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Per-model summary lines: instance count, minimum ratio and floor.
pub fn summary(rows: &[BenchmarkRow], models: &[Model], epsilon: f64) -> Vec<String> {
    models
        .iter()
        .map(|&m| {
            let mine: Vec<&BenchmarkRow> = rows.iter().filter(|r| r.model == m.as_str()).collect();
            let min = mine.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
            let floor = ratio_floor(m, epsilon);
            if mine.is_empty() {
                format!("{}: no instances (floor {floor:.6})", m.as_str())
            } else {
                format!(
                    "{}: min ratio {min:.6} over {} instances (floor {floor:.6})",
                    m.as_str(),
                    mine.len()
                )
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(count: u64) -> BenchConfig {
        BenchConfig {
            models: vec![Model::Customized, Model::Inclusive],
            count,
            customers: 2,
            suppliers: 2,
            seed: 1,
            epsilon: 0.05,
            limits: OracleLimits::default(),
            workers: 2,
            timing: false,
        }
    }

    #[test]
    fn rows_are_ordered_and_within_floor() {
        let rows = run_bench(&cfg(10)).unwrap();
        assert_eq!(rows.len(), 20);
        for (k, row) in rows.iter().enumerate() {
            assert_eq!(row.instance_id, k as u64 % 10);
            let model = if k < 10 {
                Model::Customized
            } else {
                Model::Inclusive
            };
            assert!(meets_floor(row, model, 0.05));
            assert!(row.ratio <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn empty_bench_writes_header_only() {
        let mut buf = Vec::new();
        write_csv(&mut buf, &run_bench(&cfg(0)).unwrap()).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn budget_is_checked_first() {
        let mut c = cfg(5);
        c.customers = 5;
        c.suppliers = 5;
        assert!(matches!(
            run_bench(&c),
            Err(Error::Core(mnl_match_core::Error::OracleBudget { .. }))
        ));
    }
}
