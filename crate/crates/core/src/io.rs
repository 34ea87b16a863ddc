//! JSON network files.
//!
//! ```json
//! {
//!   "variables": [{"name": "A", "domain": ["a0", "a1"]}, ...],
//!   "parents": {"B": ["A"]},
//!   "cpt": {"B": [{"parent_config": ["a0"], "alpha": [1.0, 3.0]}, ...]}
//! }
//! ```
//!
//! Variables without an entry in `parents` are roots. Rows may appear in any
//! order; the writer emits them in canonical row-major order.

use std::path::Path;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{Dag, DirichletRow, Network, Variable};
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariableJson {
    pub name: String,
    pub domain: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RowJson {
    pub parent_config: Vec<String>,
    pub alpha: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkJson {
    pub variables: Vec<VariableJson>,
    #[serde(default)]
    pub parents: IndexMap<String, Vec<String>>,
    pub cpt: IndexMap<String, Vec<RowJson>>,
}

impl NetworkJson {
    pub fn into_network<T: Real>(self) -> Result<Network<T>> {
        let variables = self
            .variables
            .into_iter()
            .map(|v| Variable::new(v.name, v.domain))
            .collect::<Result<Vec<_>>>()?;
        let index = |name: &str| {
            variables
                .iter()
                .position(|v| v.name() == name)
                .ok_or_else(|| Error::UnknownVariable(name.to_string()))
        };
        let mut parents = vec![Vec::new(); variables.len()];
        for (child, ps) in &self.parents {
            let c = index(child)?;
            parents[c] = ps.iter().map(|p| index(p)).collect::<Result<_>>()?;
        }
        for name in self.cpt.keys() {
            index(name)?;
        }
        let dag = Dag::new(variables, parents)?;

        let mut rows = Vec::with_capacity(dag.len());
        for v in 0..dag.len() {
            let var = dag.variable(v);
            let listed = self
                .cpt
                .get(var.name())
                .map(Vec::as_slice)
                .unwrap_or_default();
            let mut slots: Vec<Option<DirichletRow<T>>> = vec![None; dag.row_count(v)];
            for row in listed {
                let ps = dag.parents(v);
                if row.parent_config.len() != ps.len() {
                    return Err(Error::IndexMismatch(format!(
                        "row of `{}` lists {} parent values, expected {}",
                        var.name(),
                        row.parent_config.len(),
                        ps.len()
                    )));
                }
                let values = ps
                    .iter()
                    .zip(&row.parent_config)
                    .map(|(&p, value)| {
                        dag.variable(p)
                            .value_index(value)
                            .ok_or_else(|| Error::UnknownValue {
                                var: dag.variable(p).name().to_string(),
                                value: value.clone(),
                            })
                    })
                    .collect::<Result<Vec<_>>>()?;
                let config = dag.parent_config_index(v, &values);
                if slots[config].is_some() {
                    return Err(Error::IndexMismatch(format!(
                        "duplicate row for `{}` at parent configuration {:?}",
                        var.name(),
                        row.parent_config
                    )));
                }
                if row.alpha.len() != var.card() {
                    return Err(Error::IndexMismatch(format!(
                        "row of `{}` has {} α values, domain has {}",
                        var.name(),
                        row.alpha.len(),
                        var.card()
                    )));
                }
                let alpha = row.alpha.iter().map(|&a| T::lit(a)).collect();
                slots[config] = Some(DirichletRow::new(alpha).map_err(|e| match e {
                    Error::NonPositiveAlpha { .. } => Error::NonPositiveAlpha {
                        var: var.name().to_string(),
                    },
                    other => other,
                })?);
            }
            let var_rows = slots
                .into_iter()
                .enumerate()
                .map(|(config, r)| {
                    r.ok_or_else(|| Error::MissingRow {
                        var: var.name().to_string(),
                        config,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(var_rows);
        }
        Network::new(dag, rows)
    }

    pub fn from_network<T: Real>(net: &Network<T>) -> Self {
        let dag = net.dag();
        let variables = dag
            .variables()
            .iter()
            .map(|v| VariableJson {
                name: v.name().to_string(),
                domain: v.domain().to_vec(),
            })
            .collect();
        let mut parents = IndexMap::new();
        let mut cpt = IndexMap::new();
        for v in 0..dag.len() {
            let name = dag.variable(v).name().to_string();
            let ps = dag.parents(v);
            if !ps.is_empty() {
                parents.insert(
                    name.clone(),
                    ps.iter()
                        .map(|&p| dag.variable(p).name().to_string())
                        .collect(),
                );
            }
            let rows = net
                .rows(v)
                .iter()
                .enumerate()
                .map(|(config, row)| RowJson {
                    parent_config: dag
                        .parent_config_values(v, config)
                        .iter()
                        .zip(ps)
                        .map(|(&x, &p)| dag.variable(p).domain()[x].clone())
                        .collect(),
                    alpha: row.alpha().iter().map(|a| a.as_f64()).collect(),
                })
                .collect();
            cpt.insert(name, rows);
        }
        NetworkJson {
            variables,
            parents,
            cpt,
        }
    }
}

pub fn network_from_str<T: Real>(text: &str) -> Result<Network<T>> {
    let json: NetworkJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    json.into_network()
}

pub fn network_to_string<T: Real>(net: &Network<T>) -> String {
    serde_json::to_string_pretty(&NetworkJson::from_network(net)).expect("network serializes")
}

pub fn load_network<T: Real>(path: impl AsRef<Path>) -> Result<Network<T>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    network_from_str(&text)
}
