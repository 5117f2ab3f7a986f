use alloc::string::String;
use alloc::vec::Vec;

use crate::instance::Violation;
use crate::lp::LpStatus;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid instance: {}", join_violations(.0))]
    InvalidInstance(Vec<Violation>),
    #[error("invalid generator parameters: {0}")]
    InvalidParams(String),
    #[error("ragged matrix: row {row} has {found} entries, expected {expected}")]
    RaggedMatrix {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("row {row} is not in the MNL choice polyhedron")]
    InfeasibleRow { row: usize },
    #[error("menu offers supplier {supplier} to customer {customer}, but there are only {n_suppliers} suppliers")]
    InvalidMenu {
        customer: usize,
        supplier: usize,
        n_suppliers: usize,
    },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid linear program: {0}")]
    InvalidLp(String),
    #[error("simplex iteration limit ({0}) exceeded")]
    IterationLimit(usize),
    #[error("linear program ended with status {0:?}")]
    LpNotOptimal(LpStatus),
    #[error(
        "supplier {supplier} has {support} selecting customers, above the enumeration cutoff of {cutoff}; use the Monte Carlo or DP estimator"
    )]
    SupportExceedsCutoff {
        supplier: usize,
        support: usize,
        cutoff: usize,
    },
    #[error("menu search needs {required} evaluations, above the budget of {limit}")]
    OracleBudget { required: u128, limit: u128 },
    #[error("the DP estimator only supports the inclusive model")]
    UnsupportedModel,
    #[error("epsilon must lie in (0, 1), got {0}")]
    InvalidEpsilon(f64),
    #[error("Poisson rate must be non-negative, got {0}")]
    NegativeRate(f64),
    #[error("sample count must be at least 1")]
    NoSamples,
}

fn join_violations(v: &[Violation]) -> String {
    use core::fmt::Write;
    let mut out = String::new();
    for (k, violation) in v.iter().enumerate() {
        if k > 0 {
            out.push_str("; ");
        }
        let _ = write!(out, "{violation}");
    }
    out
}
