//! Exhaustive menu search for tiny instances.

use alloc::vec::Vec;
use core::ops::Range;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::mnl::{menu_to_choice_matrix, Menu, Model};
use crate::reward::{exact_reward, DEFAULT_CUTOFF};

#[derive(Clone, Debug, PartialEq)]
pub struct OracleResult {
    pub best_menu: Menu,
    pub opt_value: f64,
    pub menus_evaluated: u128,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleLimits {
    /// Largest number of menus the search may enumerate.
    pub max_menus: u128,
    /// Enumeration cutoff passed to [`exact_reward`].
    pub cutoff: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits {
            max_menus: 1 << 20,
            cutoff: DEFAULT_CUTOFF,
        }
    }
}

/// Exact expected reward of a deterministic menu.
pub fn exact_menu_reward(inst: &Instance, menu: &Menu, model: Model, cutoff: usize) -> Result<f64> {
    let x = menu_to_choice_matrix(inst, menu)?;
    exact_reward(inst, &x, model, None, cutoff)
}

/// Number of menus, `(2^|S|)^|C|`, saturating at `u128::MAX`.
pub fn menu_count(inst: &Instance) -> u128 {
    let bits = inst.n_suppliers as u128 * inst.n_customers as u128;
    if bits >= 128 {
        u128::MAX
    } else {
        1u128 << bits
    }
}

/// Menu number `index`: customer 0 holds the most significant `|S|`-bit
/// digit, and bit `k` of a digit offers supplier `k`.
pub fn menu_from_index(index: u128, n_customers: usize, n_suppliers: usize) -> Menu {
    let digit_mask = (1u128 << n_suppliers) - 1;
    Menu(
        (0..n_customers)
            .map(|i| {
                let shift = (n_customers - 1 - i) * n_suppliers;
                let digit = (index >> shift) & digit_mask;
                (0..n_suppliers).filter(|k| digit >> k & 1 == 1).collect()
            })
            .collect(),
    )
}

/// Best menu within `range` of the enumeration order; ties keep the lowest
/// index. Returns `None` for an empty range.
pub fn search_range(
    inst: &Instance,
    model: Model,
    range: Range<u128>,
    cutoff: usize,
) -> Result<Option<(u128, f64)>> {
    let mut best: Option<(u128, f64)> = None;
    for index in range {
        let menu = menu_from_index(index, inst.n_customers, inst.n_suppliers);
        let v = exact_menu_reward(inst, &menu, model, cutoff)?;
        if best.is_none_or(|(_, b)| v > b) {
            best = Some((index, v));
        }
    }
    Ok(best)
}

/// Combines per-range results in enumeration order.
pub fn merge_best(parts: impl IntoIterator<Item = Option<(u128, f64)>>) -> Option<(u128, f64)> {
    parts
        .into_iter()
        .flatten()
        .fold(None, |acc, (k, v)| match acc {
            Some((bk, bv)) if bv > v || (bv == v && bk < k) => Some((bk, bv)),
            _ => Some((k, v)),
        })
}

/// Checks the search budget; returns the number of menus to enumerate.
pub fn check_budget(inst: &Instance, limits: &OracleLimits) -> Result<u128> {
    let required = menu_count(inst);
    if required > limits.max_menus {
        return Err(Error::OracleBudget {
            required,
            limit: limits.max_menus,
        });
    }
    Ok(required)
}

/// Optimal menu by exhaustive enumeration of all `(2^|S|)^|C|` menus.
pub fn brute_force_opt(
    inst: &Instance,
    model: Model,
    limits: &OracleLimits,
) -> Result<OracleResult> {
    let total = check_budget(inst, limits)?;
    let (index, opt_value) = search_range(inst, model, 0..total, limits.cutoff)?
        .expect("there is always at least the empty menu");
    Ok(OracleResult {
        best_menu: menu_from_index(index, inst.n_customers, inst.n_suppliers),
        opt_value,
        menus_evaluated: total,
    })
}

/// All menus in enumeration order; test helper for small instances.
pub fn all_menus(inst: &Instance) -> Vec<Menu> {
    (0..menu_count(inst))
        .map(|k| menu_from_index(k, inst.n_customers, inst.n_suppliers))
        .collect()
}
