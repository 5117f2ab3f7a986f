//! Market instances: rewards and the preference weights of both sides.

use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rng::{stream_rng, unit_f64};

/// A two-sided market with `n_customers` customers and `n_suppliers` suppliers.
///
/// All three matrices are `n_customers x n_suppliers`, customers as rows. The
/// outside option has weight 1 on both sides and is not stored.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub n_customers: usize,
    pub n_suppliers: usize,
    /// `r[i][j]`: reward collected when customer `i` and supplier `j` match.
    pub rewards: Matrix,
    /// `u[i][j]`: weight customer `i` puts on supplier `j`.
    pub cust_weights: Matrix,
    /// `w[i][j]`: weight supplier `j` puts on customer `i`.
    pub supp_weights: Matrix,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatrixKind {
    Rewards,
    CustomerWeights,
    SupplierWeights,
}

impl MatrixKind {
    pub fn name(self) -> &'static str {
        match self {
            MatrixKind::Rewards => "rewards",
            MatrixKind::CustomerWeights => "customer_weights",
            MatrixKind::SupplierWeights => "supplier_weights",
        }
    }

    fn entry_name(self) -> &'static str {
        match self {
            MatrixKind::Rewards => "reward",
            MatrixKind::CustomerWeights => "customer weight",
            MatrixKind::SupplierWeights => "supplier weight",
        }
    }
}

/// One broken instance invariant.
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    EmptySide {
        customers: usize,
        suppliers: usize,
    },
    ShapeMismatch {
        matrix: MatrixKind,
        expected: (usize, usize),
        found: (usize, usize),
    },
    NonFinite {
        matrix: MatrixKind,
        at: (usize, usize),
    },
    Negative {
        matrix: MatrixKind,
        at: (usize, usize),
        value: f64,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptySide {
                customers,
                suppliers,
            } => write!(
                f,
                "customers and suppliers must be >= 1 (got {customers} x {suppliers})"
            ),
            Violation::ShapeMismatch {
                matrix,
                expected,
                found,
            } => write!(
                f,
                "shape mismatch: {} is {}x{}, expected {}x{}",
                matrix.name(),
                found.0,
                found.1,
                expected.0,
                expected.1
            ),
            Violation::NonFinite { matrix, at } => write!(
                f,
                "non-finite {} at ({},{})",
                matrix.entry_name(),
                at.0,
                at.1
            ),
            Violation::Negative { matrix, at, value } => write!(
                f,
                "negative {} at ({},{}): {value}",
                matrix.entry_name(),
                at.0,
                at.1
            ),
        }
    }
}

impl Instance {
    /// Builds and validates an instance from its three matrices.
    pub fn new(rewards: Matrix, cust_weights: Matrix, supp_weights: Matrix) -> Result<Self> {
        let inst = Instance {
            n_customers: rewards.rows(),
            n_suppliers: rewards.cols(),
            rewards,
            cust_weights,
            supp_weights,
        };
        validate_instance(&inst).map_err(Error::InvalidInstance)?;
        Ok(inst)
    }

    pub fn from_rows<R: AsRef<[f64]>>(rewards: &[R], cust: &[R], supp: &[R]) -> Result<Self> {
        Instance::new(
            Matrix::from_rows(rewards)?,
            Matrix::from_rows(cust)?,
            Matrix::from_rows(supp)?,
        )
    }

    /// Two customers, two suppliers, all weights 1, only pair (0,0) rewarded.
    /// Splitting a menu across two menus can lose reward on this market.
    pub fn menu_gap() -> Self {
        Instance::from_rows(
            &[[1.0, 0.0], [0.0, 0.0]],
            &[[1.0, 1.0], [1.0, 1.0]],
            &[[1.0, 1.0], [1.0, 1.0]],
        )
        .expect("preset is valid")
    }

    /// One customer and one supplier with unit reward and weights.
    pub fn unit() -> Self {
        Instance::from_rows(&[[1.0]], &[[1.0]], &[[1.0]]).expect("preset is valid")
    }

    pub fn r(&self, i: usize, j: usize) -> f64 {
        self.rewards[(i, j)]
    }

    pub fn u(&self, i: usize, j: usize) -> f64 {
        self.cust_weights[(i, j)]
    }

    pub fn w(&self, i: usize, j: usize) -> f64 {
        self.supp_weights[(i, j)]
    }

    /// Weights supplier `j` puts on every customer.
    pub fn supplier_weights(&self, j: usize) -> Vec<f64> {
        self.supp_weights.column(j).collect()
    }

    /// Largest supplier-side weight in the market.
    pub fn max_supp_weight(&self) -> f64 {
        self.supp_weights
            .as_slice()
            .iter()
            .copied()
            .fold(0.0, f64::max)
    }
}

/// Checks every instance invariant. Returns all violations found.
pub fn validate_instance(inst: &Instance) -> core::result::Result<(), Vec<Violation>> {
    let mut violations = Vec::new();
    let expected = (inst.n_customers, inst.n_suppliers);
    if inst.n_customers == 0 || inst.n_suppliers == 0 {
        violations.push(Violation::EmptySide {
            customers: inst.n_customers,
            suppliers: inst.n_suppliers,
        });
    }
    let matrices = [
        (MatrixKind::Rewards, &inst.rewards),
        (MatrixKind::CustomerWeights, &inst.cust_weights),
        (MatrixKind::SupplierWeights, &inst.supp_weights),
    ];
    for (kind, m) in matrices {
        if m.shape() != expected {
            violations.push(Violation::ShapeMismatch {
                matrix: kind,
                expected,
                found: m.shape(),
            });
            continue;
        }
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                let v = m[(i, j)];
                if !v.is_finite() {
                    violations.push(Violation::NonFinite {
                        matrix: kind,
                        at: (i, j),
                    });
                } else if v < 0.0 {
                    violations.push(Violation::Negative {
                        matrix: kind,
                        at: (i, j),
                        value: v,
                    });
                }
            }
        }
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}

/// Weight regime of a customer-supplier pair, decided by the supplier's weight.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Regime {
    /// `w <= 1`
    Low,
    /// `w > 1`
    High,
}

impl Regime {
    pub fn of_weight(w: f64) -> Regime {
        if w <= 1.0 {
            Regime::Low
        } else {
            Regime::High
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Low => "low",
            Regime::High => "high",
        }
    }
}

/// Partition of all customer-supplier pairs into low- and high-weight edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeSplit {
    pub e_minus: Vec<(usize, usize)>,
    pub e_plus: Vec<(usize, usize)>,
    n_suppliers: usize,
    regimes: Vec<Regime>,
}

impl EdgeSplit {
    pub fn regime(&self, i: usize, j: usize) -> Regime {
        self.regimes[i * self.n_suppliers + j]
    }

    pub fn contains(&self, regime: Regime, i: usize, j: usize) -> bool {
        self.regime(i, j) == regime
    }

    pub fn edges(&self, regime: Regime) -> &[(usize, usize)] {
        match regime {
            Regime::Low => &self.e_minus,
            Regime::High => &self.e_plus,
        }
    }
}

/// Splits edges by supplier weight; `w == 1` is a low-weight edge.
pub fn split_edges(inst: &Instance) -> EdgeSplit {
    let mut e_minus = Vec::new();
    let mut e_plus = Vec::new();
    let mut regimes = Vec::with_capacity(inst.n_customers * inst.n_suppliers);
    for i in 0..inst.n_customers {
        for j in 0..inst.n_suppliers {
            let regime = Regime::of_weight(inst.w(i, j));
            regimes.push(regime);
            match regime {
                Regime::Low => e_minus.push((i, j)),
                Regime::High => e_plus.push((i, j)),
            }
        }
    }
    EdgeSplit {
        e_minus,
        e_plus,
        n_suppliers: inst.n_suppliers,
        regimes,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightScale {
    Uniform,
    LogUniform,
}

/// Parameters for [`generate_random`]. Rewards are always drawn uniformly;
/// `weight_scale` applies to both weight matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct GenParams {
    pub reward_range: [f64; 2],
    pub cust_weight_range: [f64; 2],
    pub supp_weight_range: [f64; 2],
    pub weight_scale: WeightScale,
    pub seed: u64,
}

impl Default for GenParams {
    /// Rewards uniform on `[0, 1]`, weights log-uniform on `[0.1, 10]`.
    fn default() -> Self {
        GenParams {
            reward_range: [0.0, 1.0],
            cust_weight_range: [0.1, 10.0],
            supp_weight_range: [0.1, 10.0],
            weight_scale: WeightScale::LogUniform,
            seed: 0,
        }
    }
}

impl GenParams {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn check(&self) -> Result<()> {
        let ranges = [
            ("reward_range", self.reward_range, false),
            (
                "cust_weight_range",
                self.cust_weight_range,
                self.weight_scale == WeightScale::LogUniform,
            ),
            (
                "supp_weight_range",
                self.supp_weight_range,
                self.weight_scale == WeightScale::LogUniform,
            ),
        ];
        for (name, [lo, hi], positive) in ranges {
            if !(lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo <= hi) {
                return Err(Error::InvalidParams(format!(
                    "{name} must satisfy 0 <= lo <= hi (got [{lo}, {hi}])"
                )));
            }
            if positive && lo <= 0.0 {
                return Err(Error::InvalidParams(format!(
                    "{name} needs lo > 0 for log-uniform weights (got {lo})"
                )));
            }
        }
        Ok(())
    }
}

/// Draws a random instance. Rewards are drawn first, then customer weights,
/// then supplier weights, each row-major from one ChaCha8 stream.
pub fn generate_random(
    n_customers: usize,
    n_suppliers: usize,
    params: &GenParams,
) -> Result<Instance> {
    if n_customers == 0 || n_suppliers == 0 {
        return Err(Error::InvalidParams(format!(
            "customers and suppliers must be >= 1 (got {n_customers} x {n_suppliers})"
        )));
    }
    params.check()?;
    let mut rng = stream_rng(params.seed, 0);
    let [rlo, rhi] = params.reward_range;
    let rewards = Matrix::from_fn(n_customers, n_suppliers, |_, _| {
        rlo + unit_f64(&mut rng) * (rhi - rlo)
    });
    let mut draw_weight = |[lo, hi]: [f64; 2]| -> f64 {
        let t = unit_f64(&mut rng);
        match params.weight_scale {
            WeightScale::Uniform => lo + t * (hi - lo),
            WeightScale::LogUniform => {
                let (a, b) = (libm::log(lo), libm::log(hi));
                libm::exp(a + t * (b - a)).clamp(lo, hi)
            }
        }
    };
    let cust = Matrix::from_fn(n_customers, n_suppliers, |_, _| {
        draw_weight(params.cust_weight_range)
    });
    let supp = Matrix::from_fn(n_customers, n_suppliers, |_, _| {
        draw_weight(params.supp_weight_range)
    });
    Instance::new(rewards, cust, supp)
}
