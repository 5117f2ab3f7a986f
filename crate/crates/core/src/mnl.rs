//! MNL choice primitives, supplier reward functions and the randomized
//! assortment decomposition of choice-polyhedron points.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::ops::{Deref, DerefMut};

use rand_core::RngCore;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::matrix::Matrix;
use crate::rng::unit_f64;

/// Which second-stage rule suppliers follow.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Model {
    /// The platform shows each supplier a revenue-maximizing subset of the
    /// customers who picked it.
    Customized,
    /// Each supplier sees every customer who picked it.
    Inclusive,
}

impl Model {
    pub fn as_str(self) -> &'static str {
        match self {
            Model::Customized => "customized",
            Model::Inclusive => "inclusive",
        }
    }
}

/// `x[i][j]`: probability that customer `i` picks supplier `j`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChoiceMatrix(pub Matrix);

impl ChoiceMatrix {
    pub fn zeros(n_customers: usize, n_suppliers: usize) -> Self {
        ChoiceMatrix(Matrix::zeros(n_customers, n_suppliers))
    }

    /// True when every row lies in its customer's choice polyhedron.
    pub fn is_feasible(&self, inst: &Instance, tol: f64) -> bool {
        self.shape() == (inst.n_customers, inst.n_suppliers)
            && (0..inst.n_customers)
                .all(|i| polyhedron_row_feasible(inst.cust_weights.row(i), self.row(i), tol))
    }
}

impl Deref for ChoiceMatrix {
    type Target = Matrix;

    fn deref(&self) -> &Matrix {
        &self.0
    }
}

impl DerefMut for ChoiceMatrix {
    fn deref_mut(&mut self) -> &mut Matrix {
        &mut self.0
    }
}

/// Supplier sets offered to each customer.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Menu(pub Vec<Vec<usize>>);

impl Menu {
    pub fn empty(n_customers: usize) -> Self {
        Menu(vec![Vec::new(); n_customers])
    }

    pub fn check(&self, inst: &Instance) -> Result<()> {
        if self.0.len() != inst.n_customers {
            return Err(Error::Dimension(alloc::format!(
                "menu has {} customers, instance has {}",
                self.0.len(),
                inst.n_customers
            )));
        }
        for (i, offers) in self.0.iter().enumerate() {
            if let Some(&j) = offers.iter().find(|&&j| j >= inst.n_suppliers) {
                return Err(Error::InvalidMenu {
                    customer: i,
                    supplier: j,
                    n_suppliers: inst.n_suppliers,
                });
            }
        }
        Ok(())
    }
}

/// One nested assortment and the probability of offering it.
#[derive(Clone, Debug, PartialEq)]
pub struct Assortment {
    pub suppliers: Vec<usize>,
    pub prob: f64,
}

/// Per customer, a distribution over nested assortments.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct MenuDistribution {
    pub rows: Vec<Vec<Assortment>>,
}

/// MNL probability of picking `pick` (`None` = outside option) when `offered`
/// is shown and alternative `k` has weight `weights[k]`.
pub fn mnl_prob(weights: &[f64], offered: &[usize], pick: Option<usize>) -> f64 {
    let denom = 1.0 + offered.iter().map(|&k| weights[k]).sum::<f64>();
    match pick {
        None => 1.0 / denom,
        Some(j) if offered.contains(&j) => weights[j] / denom,
        Some(_) => 0.0,
    }
}

/// Probability that customer `i` picks `pick` from `menu_i`.
pub fn choice_prob(inst: &Instance, i: usize, menu_i: &[usize], pick: Option<usize>) -> f64 {
    mnl_prob(inst.cust_weights.row(i), menu_i, pick)
}

/// Expected reward from supplier `j` when it chooses among all of `c_j`.
pub fn f_inclusive(inst: &Instance, j: usize, c_j: &[usize]) -> f64 {
    inclusive_value(c_j.iter().map(|&i| (inst.r(i, j), inst.w(i, j))))
}

/// `sum r*w / (1 + sum w)` over `(reward, weight)` pairs.
pub fn inclusive_value(items: impl Iterator<Item = (f64, f64)>) -> f64 {
    let (num, den) = items.fold((0.0, 1.0), |(n, d), (r, w)| (n + r * w, d + w));
    num / den
}

/// Best expected reward from supplier `j` over subsets `T` of `c_j`, and the
/// smallest maximizing subset (sorted).
///
/// Optimal MNL assortments are revenue-ordered, so only prefixes of `c_j`
/// sorted by decreasing reward are evaluated.
pub fn f_customized(inst: &Instance, j: usize, c_j: &[usize]) -> (f64, Vec<usize>) {
    let mut order = c_j.to_vec();
    sort_by_reward_desc(&mut order, |i| inst.r(i, j));
    let (value, len) = best_prefix(order.iter().map(|&i| (inst.r(i, j), inst.w(i, j))));
    let mut best = order[..len].to_vec();
    best.sort_unstable();
    (value, best)
}

/// Sorts indices by decreasing key, ties by increasing index.
pub(crate) fn sort_by_reward_desc(idx: &mut [usize], key: impl Fn(usize) -> f64) {
    idx.sort_by(|&a, &b| {
        key(b)
            .partial_cmp(&key(a))
            .unwrap_or(Ordering::Equal)
            .then(a.cmp(&b))
    });
}

/// Best inclusive value over prefixes of `items`; returns `(value, length)`.
pub(crate) fn best_prefix(items: impl Iterator<Item = (f64, f64)>) -> (f64, usize) {
    let (mut num, mut den) = (0.0, 1.0);
    let (mut best, mut best_len) = (0.0, 0);
    for (k, (r, w)) in items.enumerate() {
        num += r * w;
        den += w;
        let v = num / den;
        if v > best {
            best = v;
            best_len = k + 1;
        }
    }
    (best, best_len)
}

/// Membership in the MNL choice polyhedron
/// `{x >= 0 : x_j / weights_j <= 1 - sum x}`, up to additive `tol`.
///
/// Works for a customer row of `P^C` (weights `u[i][.]`) as well as a supplier
/// column of `P^S` (weights `w[.][j]`). Zero-weight alternatives must have
/// `x_j <= tol`.
pub fn polyhedron_row_feasible(weights: &[f64], x: &[f64], tol: f64) -> bool {
    if weights.len() != x.len() {
        return false;
    }
    let slack = 1.0 - x.iter().sum::<f64>();
    weights.iter().zip(x).all(|(&u, &xj)| {
        if xj < -tol {
            return false;
        }
        if u <= 0.0 {
            return xj <= tol;
        }
        xj / u <= slack + tol
    })
}

/// Decomposes a polyhedron point into a distribution over nested assortments
/// whose expected MNL choice probabilities reproduce `x` exactly.
///
/// Alternatives are sorted by `x_j / u_j` (descending, ties by index) and only
/// those with `x_j > 0` are kept. The first entry is always the empty
/// assortment. Rows that pass the `tol` check but violate the polyhedron by
/// rounding are shrunk toward the origin before decomposing.
pub fn decompose(weights: &[f64], x: &[f64], tol: f64) -> Result<Vec<Assortment>> {
    if !polyhedron_row_feasible(weights, x, tol) {
        return Err(Error::InfeasibleRow { row: 0 });
    }
    let mut alts: Vec<usize> = (0..x.len())
        .filter(|&j| x[j] > 0.0 && weights[j] > 0.0)
        .collect();
    if alts.is_empty() {
        return Ok(vec![Assortment {
            suppliers: Vec::new(),
            prob: 1.0,
        }]);
    }
    let ratio = |j: usize| x[j] / weights[j];
    sort_by_reward_desc(&mut alts, ratio);

    let total: f64 = alts.iter().map(|&j| x[j]).sum();
    // Shrink rows that sit marginally outside the polyhedron.
    let excess = ratio(alts[0]) + total;
    let scale = if excess > 1.0 { 1.0 / excess } else { 1.0 };

    let m = alts.len();
    let mut probs = Vec::with_capacity(m + 1);
    let mut prev = 1.0 - scale * total;
    let mut cum_weight = 1.0;
    for &j in &alts {
        let t = scale * ratio(j);
        probs.push((prev - t) * cum_weight);
        prev = t;
        cum_weight += weights[j];
    }
    probs.push(prev * cum_weight);

    for p in probs.iter_mut() {
        if *p < 0.0 && *p >= -1e-12 {
            *p = 0.0;
        }
    }
    if probs.iter().any(|&p| p < 0.0) {
        return Err(Error::InfeasibleRow { row: 0 });
    }
    let sum: f64 = probs.iter().sum();
    Ok(probs
        .into_iter()
        .enumerate()
        .map(|(k, p)| Assortment {
            suppliers: alts[..k].to_vec(),
            prob: p / sum,
        })
        .collect())
}

/// Decomposes every customer row of `x`.
pub fn decompose_matrix(inst: &Instance, x: &ChoiceMatrix, tol: f64) -> Result<MenuDistribution> {
    let rows = (0..inst.n_customers)
        .map(|i| {
            decompose(inst.cust_weights.row(i), x.row(i), tol)
                .map_err(|_| Error::InfeasibleRow { row: i })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MenuDistribution { rows })
}

/// Draws one assortment per customer, customers in index order.
pub fn sample_menu<R: RngCore + ?Sized>(dist: &MenuDistribution, rng: &mut R) -> Menu {
    Menu(
        dist.rows
            .iter()
            .map(|row| {
                row[sample_index(row.iter().map(|a| a.prob), rng)]
                    .suppliers
                    .clone()
            })
            .collect(),
    )
}

/// Index drawn from a discrete distribution given by `probs`.
pub(crate) fn sample_index<R: RngCore + ?Sized>(
    probs: impl Iterator<Item = f64> + Clone,
    rng: &mut R,
) -> usize {
    let target = unit_f64(rng);
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (k, p) in probs.enumerate() {
        if p > 0.0 {
            last_positive = k;
        }
        acc += p;
        if target < acc {
            return k;
        }
    }
    last_positive
}

/// Choice probabilities induced by a deterministic menu.
pub fn menu_to_choice_matrix(inst: &Instance, menu: &Menu) -> Result<ChoiceMatrix> {
    menu.check(inst)?;
    let mut x = ChoiceMatrix::zeros(inst.n_customers, inst.n_suppliers);
    for (i, offers) in menu.0.iter().enumerate() {
        for &j in offers {
            x[(i, j)] = choice_prob(inst, i, offers, Some(j));
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn choice_probabilities() {
        assert!(close(mnl_prob(&[1.0, 1.0], &[0, 1], Some(0)), 1.0 / 3.0));
        assert_eq!(mnl_prob(&[1.0, 1.0], &[], None), 1.0);
        assert_eq!(mnl_prob(&[1.0], &[0], Some(0)), 0.5);
        assert_eq!(mnl_prob(&[1.0], &[0], None), 0.5);
        assert_eq!(mnl_prob(&[1.0, 2.0], &[0], Some(1)), 0.0);
    }

    #[test]
    fn inclusive_rewards() {
        let inst = Instance::menu_gap();
        assert!(close(f_inclusive(&inst, 0, &[0, 1]), 1.0 / 3.0));
        assert_eq!(f_inclusive(&inst, 0, &[]), 0.0);
        assert_eq!(f_inclusive(&Instance::unit(), 0, &[0]), 0.5);
    }

    #[test]
    fn customized_rewards() {
        let inst = Instance::menu_gap();
        assert_eq!(f_customized(&inst, 0, &[0, 1]), (0.5, vec![0]));
        assert_eq!(f_customized(&inst, 0, &[]), (0.0, vec![]));
        let one = Instance::from_rows(&[[2.0]], &[[1.0]], &[[3.0]]).unwrap();
        let (v, t) = f_customized(&one, 0, &[0]);
        assert!(close(v, 1.5));
        assert_eq!(t, vec![0]);
    }

    #[test]
    fn polyhedron_membership() {
        assert!(!polyhedron_row_feasible(&[1.0], &[0.6], 1e-9));
        assert!(polyhedron_row_feasible(&[1.0], &[0.5], 1e-9));
        assert!(polyhedron_row_feasible(&[3.0, 0.0, 7.0], &[0.0; 3], 1e-9));
        assert!(!polyhedron_row_feasible(&[0.0], &[0.1], 1e-9));
        assert!(!polyhedron_row_feasible(&[1.0], &[-0.1], 1e-9));
    }

    #[test]
    fn decompose_single_alternative() {
        let d = decompose(&[1.0], &[0.25], 1e-9).unwrap();
        assert_eq!(d.len(), 2);
        assert!(d[0].suppliers.is_empty() && close(d[0].prob, 0.5));
        assert_eq!(d[1].suppliers, vec![0]);
        assert!(close(d[1].prob, 0.5));
    }

    #[test]
    fn decompose_two_alternatives() {
        let d = decompose(&[1.0, 1.0], &[0.3, 0.2], 1e-9).unwrap();
        let probs: Vec<f64> = d.iter().map(|a| a.prob).collect();
        for (p, q) in probs.iter().zip([0.2, 0.2, 0.6]) {
            assert!(close(*p, q), "{probs:?}");
        }
        assert_eq!(d[2].suppliers, vec![0, 1]);
        let e0: f64 = d
            .iter()
            .map(|a| a.prob * mnl_prob(&[1.0, 1.0], &a.suppliers, Some(0)))
            .sum();
        assert!(close(e0, 0.3));
    }

    #[test]
    fn decompose_zero_row_and_ties() {
        let d = decompose(&[2.0, 0.0], &[0.0, 0.0], 1e-9).unwrap();
        assert_eq!(
            d,
            vec![Assortment {
                suppliers: vec![],
                prob: 1.0
            }]
        );
        // equal ratios: lower index first
        let d = decompose(&[1.0, 2.0], &[0.1, 0.2], 1e-9).unwrap();
        assert_eq!(d[1].suppliers, vec![0]);
    }

    #[test]
    fn decompose_rejects_infeasible() {
        assert_eq!(
            decompose(&[1.0], &[0.6], 1e-9),
            Err(Error::InfeasibleRow { row: 0 })
        );
    }

    #[test]
    fn point_mass_always_sampled() {
        let dist = MenuDistribution {
            rows: vec![vec![Assortment {
                suppliers: vec![],
                prob: 1.0,
            }]],
        };
        let mut rng = stream_rng(1, 0);
        for _ in 0..100 {
            assert_eq!(sample_menu(&dist, &mut rng), Menu(vec![vec![]]));
        }
    }

    #[test]
    fn sampled_frequency_matches_probabilities() {
        let row = decompose(&[1.0], &[0.25], 1e-9).unwrap();
        let dist = MenuDistribution { rows: vec![row] };
        let mut rng = stream_rng(5, 0);
        let n = 100_000;
        let hits = (0..n)
            .filter(|_| !sample_menu(&dist, &mut rng).0[0].is_empty())
            .count();
        let freq = hits as f64 / n as f64;
        assert!((freq - 0.5).abs() < 0.01, "{freq}");
    }

    #[test]
    fn customers_sample_independently() {
        let row = decompose(&[1.0], &[0.25], 1e-9).unwrap();
        let dist = MenuDistribution {
            rows: vec![row.clone(), row],
        };
        let mut rng = stream_rng(9, 0);
        let n = 100_000;
        let (mut sa, mut sb, mut sab) = (0.0, 0.0, 0.0);
        for _ in 0..n {
            let m = sample_menu(&dist, &mut rng);
            let a = m.0[0].len() as f64;
            let b = m.0[1].len() as f64;
            sa += a;
            sb += b;
            sab += a * b;
        }
        let nf = n as f64;
        let cov = sab / nf - (sa / nf) * (sb / nf);
        let var_a = sa / nf * (1.0 - sa / nf);
        let var_b = sb / nf * (1.0 - sb / nf);
        let corr = cov / libm::sqrt(var_a * var_b);
        assert!(corr.abs() < 0.02, "{corr}");
    }

    #[test]
    fn menu_choice_matrices() {
        let inst = Instance::menu_gap();
        let x = menu_to_choice_matrix(&inst, &Menu(vec![vec![0], vec![0, 1]])).unwrap();
        assert!(close(x[(0, 0)], 0.5) && x[(0, 1)] == 0.0);
        assert!(close(x[(1, 0)], 1.0 / 3.0) && close(x[(1, 1)], 1.0 / 3.0));
        assert!(x.is_feasible(&inst, 1e-12));
        let zero = menu_to_choice_matrix(&inst, &Menu::empty(2)).unwrap();
        assert!(zero.as_slice().iter().all(|&v| v == 0.0));
        let bad = menu_to_choice_matrix(&inst, &Menu(vec![vec![2], vec![]]));
        assert!(matches!(bad, Err(Error::InvalidMenu { .. })));
    }
}
