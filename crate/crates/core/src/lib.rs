//! Revenue maximization in two-sided matching markets where both customers and
//! suppliers choose according to multinomial logit (MNL) models.
//!
//! A platform offers each customer a menu of suppliers. Customers pick at most
//! one supplier from their menu; each supplier then picks at most one of the
//! customers who selected it, either among all of them (the *inclusive* model)
//! or among a platform-filtered subset (the *customized* model). The crate
//! provides:
//!
//! * the market model and MNL primitives ([`instance`], [`mnl`]),
//! * a dense simplex solver with builders for the relaxations ([`lp`]),
//! * exact, Monte Carlo and dynamic-programming reward evaluators ([`reward`]),
//! * the LP-based approximation algorithms ([`customized`], [`inclusive`]),
//! * a brute-force menu oracle for small instances ([`oracle`]).
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;

pub mod customized;
pub mod error;
pub mod inclusive;
pub mod instance;
pub mod lp;
pub mod matrix;
pub mod mnl;
pub mod oracle;
pub mod reward;
pub mod rng;

pub use error::{Error, Result};
pub use instance::{EdgeSplit, GenParams, Instance, Regime, WeightScale};
pub use matrix::Matrix;
pub use mnl::{Assortment, ChoiceMatrix, Menu, MenuDistribution, Model};
pub use reward::{EstimateReport, Method};

/// Default additive tolerance for polyhedron membership checks.
pub const FEAS_TOL: f64 = 1e-9;
