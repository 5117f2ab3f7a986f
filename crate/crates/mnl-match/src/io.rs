//! JSON file formats for instances, solutions, menus and estimates.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use mnl_match_core::customized::CustomizedSolution;
use mnl_match_core::inclusive::InclusiveSolution;
use mnl_match_core::oracle::OracleResult;
use mnl_match_core::{
    Assortment, ChoiceMatrix, EstimateReport, Instance, Matrix, Menu, MenuDistribution, Method,
    Model,
};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::Error;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub customers: usize,
    pub suppliers: usize,
    pub rewards: Vec<Vec<f64>>,
    pub customer_weights: Vec<Vec<f64>>,
    pub supplier_weights: Vec<Vec<f64>>,
}

impl From<&Instance> for InstanceFile {
    fn from(inst: &Instance) -> Self {
        InstanceFile {
            customers: inst.n_customers,
            suppliers: inst.n_suppliers,
            rewards: inst.rewards.to_rows(),
            customer_weights: inst.cust_weights.to_rows(),
            supplier_weights: inst.supp_weights.to_rows(),
        }
    }
}

impl InstanceFile {
    pub fn into_instance(self) -> Result<Instance, Error> {
        for (name, m) in [
            ("rewards", &self.rewards),
            ("customer_weights", &self.customer_weights),
            ("supplier_weights", &self.supplier_weights),
        ] {
            if m.len() != self.customers {
                return Err(Error::Format(format!(
                    "{name} has {} rows, expected customers = {}",
                    m.len(),
                    self.customers
                )));
            }
            if let Some((i, row)) = m
                .iter()
                .enumerate()
                .find(|(_, r)| r.len() != self.suppliers)
            {
                return Err(Error::Format(format!(
                    "{name}[{i}] has {} entries, expected suppliers = {}",
                    row.len(),
                    self.suppliers
                )));
            }
        }
        Ok(Instance::from_rows(
            &self.rewards,
            &self.customer_weights,
            &self.supplier_weights,
        )?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AssortmentJson {
    pub assortment: Vec<usize>,
    pub prob: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub value: f64,
    pub method: String,
    pub lower: f64,
    pub upper: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
}

impl EstimateJson {
    pub fn new(label: Option<&str>, rep: &EstimateReport) -> Self {
        EstimateJson {
            label: label.map(str::to_owned),
            value: rep.value,
            method: rep.method.as_str().to_owned(),
            lower: rep.lower,
            upper: rep.upper,
            samples: rep.samples,
            epsilon: rep.epsilon,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionFile {
    pub model: String,
    pub epsilon: Option<f64>,
    pub x: Vec<Vec<f64>>,
    pub menu_distributions: Vec<Vec<AssortmentJson>>,
    pub lp_values: BTreeMap<String, f64>,
    pub estimates: Vec<EstimateJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chosen_regime: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_low: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_high: Option<Vec<Vec<f64>>>,
}

fn dist_json(d: &MenuDistribution) -> Vec<Vec<AssortmentJson>> {
    d.rows
        .iter()
        .map(|row| {
            row.iter()
                .map(|a: &Assortment| AssortmentJson {
                    assortment: a.suppliers.clone(),
                    prob: a.prob,
                })
                .collect()
        })
        .collect()
}

impl From<&CustomizedSolution> for SolutionFile {
    fn from(s: &CustomizedSolution) -> Self {
        SolutionFile {
            model: Model::Customized.as_str().to_owned(),
            epsilon: None,
            x: s.x.to_rows(),
            menu_distributions: dist_json(&s.menu_dists),
            lp_values: BTreeMap::from([("customized".to_owned(), s.lp_value)]),
            estimates: vec![EstimateJson::new(Some("reward"), &s.reward_estimate)],
            chosen_regime: None,
            x_low: None,
            x_high: None,
        }
    }
}

impl From<&InclusiveSolution> for SolutionFile {
    fn from(s: &InclusiveSolution) -> Self {
        SolutionFile {
            model: Model::Inclusive.as_str().to_owned(),
            epsilon: Some(s.epsilon),
            x: s.x.to_rows(),
            menu_distributions: dist_json(&s.menu_dists),
            lp_values: BTreeMap::from([
                ("low".to_owned(), s.lp_low_value),
                ("high".to_owned(), s.lp_high_value),
            ]),
            estimates: vec![
                EstimateJson::new(Some("low"), &s.est_low),
                EstimateJson::new(Some("high"), &s.est_high),
            ],
            chosen_regime: Some(s.chosen_regime.as_str().to_owned()),
            x_low: Some(s.x_low.to_rows()),
            x_high: Some(s.x_high.to_rows()),
        }
    }
}

impl SolutionFile {
    pub fn model(&self) -> Result<Model, Error> {
        parse_model(&self.model)
    }

    pub fn choice_matrix(&self) -> Result<ChoiceMatrix, Error> {
        Ok(ChoiceMatrix(Matrix::from_rows(&self.x)?))
    }
}

pub fn parse_model(s: &str) -> Result<Model, Error> {
    match s {
        "customized" => Ok(Model::Customized),
        "inclusive" => Ok(Model::Inclusive),
        other => Err(Error::Format(format!("unknown model {other:?}"))),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MenuFile {
    pub menu: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleJson {
    pub model: String,
    pub best_menu: Vec<Vec<usize>>,
    pub opt_value: f64,
    pub menus_evaluated: u128,
}

impl OracleJson {
    pub fn new(model: Model, r: &OracleResult) -> Self {
        OracleJson {
            model: model.as_str().to_owned(),
            best_menu: r.best_menu.0.clone(),
            opt_value: r.opt_value,
            menus_evaluated: r.menus_evaluated,
        }
    }
}

/// What `eval` can score: a solution's `x` or a deterministic menu.
#[derive(Clone, Debug, PartialEq)]
pub enum EvalInput {
    Solution(SolutionFile),
    Menu(Menu),
}

/// Deserializes `text`, reporting the JSON path of the first bad field.
pub fn from_json_str<T: DeserializeOwned>(text: &str, what: &str) -> Result<T, Error> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Error::Format(format!("{what}: {path}: {}", e.into_inner()))
    })
}

fn read_text(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })
}

pub fn parse_instance(text: &str) -> Result<Instance, Error> {
    from_json_str::<InstanceFile>(text, "instance")?.into_instance()
}

pub fn read_instance(path: &Path) -> Result<Instance, Error> {
    parse_instance(&read_text(path)?)
}

pub fn instance_json(inst: &Instance) -> String {
    to_json(&InstanceFile::from(inst))
}

pub fn parse_eval_input(text: &str) -> Result<EvalInput, Error> {
    let value: serde_json::Value = from_json_str(text, "input")?;
    if value.get("menu").is_some() {
        Ok(EvalInput::Menu(Menu(
            from_json_str::<MenuFile>(text, "menu")?.menu,
        )))
    } else if value.get("x").is_some() {
        Ok(EvalInput::Solution(from_json_str(text, "solution")?))
    } else {
        Err(Error::Format(
            "input is neither a solution (\"x\") nor a menu (\"menu\") file".into(),
        ))
    }
}

pub fn read_eval_input(path: &Path) -> Result<EvalInput, Error> {
    parse_eval_input(&read_text(path)?)
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("file types always serialize");
    s.push('\n');
    s
}

pub fn write_text(path: &Path, text: &str) -> Result<(), Error> {
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })
}

pub fn method_from_str(s: &str) -> Option<Method> {
    match s {
        "exact" => Some(Method::Exact),
        "mc" | "monte_carlo" => Some(Method::MonteCarlo),
        "dp" => Some(Method::Dp),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instance_roundtrip() {
        let inst = Instance::menu_gap();
        assert_eq!(parse_instance(&instance_json(&inst)).unwrap(), inst);
    }

    #[test]
    fn field_path_in_errors() {
        let text = r#"{"customers":1,"suppliers":1,"rewards":[["a"]],"customer_weights":[[1]],"supplier_weights":[[1]]}"#;
        let err = parse_instance(text).unwrap_err().to_string();
        assert!(err.contains("rewards[0][0]"), "{err}");
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let text = r#"{"customers":2,"suppliers":1,"rewards":[[1]],"customer_weights":[[1]],"supplier_weights":[[1]]}"#;
        let err = parse_instance(text).unwrap_err().to_string();
        assert!(err.contains("rewards has 1 rows"), "{err}");
    }

    #[test]
    fn invalid_values_are_reported() {
        let text = r#"{"customers":1,"suppliers":1,"rewards":[[-1]],"customer_weights":[[1]],"supplier_weights":[[1]]}"#;
        let err = parse_instance(text).unwrap_err().to_string();
        assert!(err.contains("negative reward"), "{err}");
    }

    #[test]
    fn eval_input_kinds() {
        assert_eq!(
            parse_eval_input(r#"{"menu":[[0],[0,1]]}"#).unwrap(),
            EvalInput::Menu(Menu(vec![vec![0], vec![0, 1]]))
        );
        assert!(parse_eval_input(r#"{"y":1}"#).is_err());
    }
}
