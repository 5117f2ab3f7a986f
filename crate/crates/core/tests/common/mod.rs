#![allow(dead_code)]

use mnl_match_core::instance::generate_random;
use mnl_match_core::mnl::{menu_to_choice_matrix, Menu};
use mnl_match_core::rng::{stream_rng, unit_f64, StreamRng};
use mnl_match_core::{ChoiceMatrix, GenParams, Instance, Matrix};

pub fn random_instance(nc: usize, ns: usize, seed: u64) -> Instance {
    generate_random(nc, ns, &GenParams::default().with_seed(seed)).unwrap()
}

pub fn rng(seed: u64) -> StreamRng {
    stream_rng(seed, 1)
}

pub fn random_menu(inst: &Instance, rng: &mut StreamRng) -> Menu {
    Menu(
        (0..inst.n_customers)
            .map(|_| {
                (0..inst.n_suppliers)
                    .filter(|_| unit_f64(rng) < 0.5)
                    .collect()
            })
            .collect(),
    )
}

/// A random point of `P^C`: a scaled convex combination of menu-induced
/// choice vectors.
pub fn random_feasible(inst: &Instance, rng: &mut StreamRng) -> ChoiceMatrix {
    let mut x = Matrix::zeros(inst.n_customers, inst.n_suppliers);
    let weights: Vec<f64> = (0..3).map(|_| unit_f64(rng)).collect();
    let total: f64 = weights.iter().sum();
    for w in weights {
        let p = menu_to_choice_matrix(inst, &random_menu(inst, rng)).unwrap();
        for i in 0..inst.n_customers {
            for j in 0..inst.n_suppliers {
                x[(i, j)] += w / total * p[(i, j)];
            }
        }
    }
    let scale = unit_f64(rng);
    ChoiceMatrix(x.map(|_, _, v| v * scale))
}
