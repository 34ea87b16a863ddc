//! Discrete network structure, Dirichlet hyperparameters and conjugate updates.
//!
//! CPT rows are indexed row-major over the ordered parent list, each parent
//! contributing its own domain order, with the last parent varying fastest.
//! Within a row, entries follow the child's domain order. The same layout is
//! used by every flat table in the crate (parameter assignments, gradients,
//! count tables and doubled CPTs).

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::factor::{eliminate, Factor};
use crate::inference::ParameterAssignment;
use crate::scalar::Real;

pub type VarId = usize;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Variable {
    name: String,
    domain: Vec<String>,
}

impl Variable {
    pub fn new(name: impl Into<String>, domain: Vec<String>) -> Result<Self> {
        let name = name.into();
        if domain.len() < 2 {
            return Err(Error::InvalidVariable(
                name,
                "domain needs at least two values".into(),
            ));
        }
        for (i, v) in domain.iter().enumerate() {
            if domain[..i].contains(v) {
                return Err(Error::InvalidVariable(
                    name,
                    format!("duplicate value `{v}`"),
                ));
            }
        }
        Ok(Variable { name, domain })
    }

    /// Variable with values `"{name}0"`, `"{name}1"`, ...
    pub fn with_card(name: impl Into<String>, card: usize) -> Result<Self> {
        let name = name.into();
        let domain = (0..card)
            .map(|i| format!("{}{}", name.to_lowercase(), i))
            .collect();
        Variable::new(name, domain)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> &[String] {
        &self.domain
    }

    pub fn card(&self) -> usize {
        self.domain.len()
    }

    pub fn value_index(&self, value: &str) -> Option<usize> {
        self.domain.iter().position(|v| v == value)
    }
}

/// Directed acyclic graph over discrete variables.
#[derive(Clone, Debug, PartialEq)]
pub struct Dag {
    variables: Vec<Variable>,
    parents: Vec<Vec<VarId>>,
    cards: Vec<usize>,
    topo: Vec<VarId>,
    index: HashMap<String, VarId>,
}

impl Dag {
    pub fn new(variables: Vec<Variable>, parents: Vec<Vec<VarId>>) -> Result<Self> {
        if variables.len() != parents.len() {
            return Err(Error::IndexMismatch(format!(
                "{} variables but {} parent lists",
                variables.len(),
                parents.len()
            )));
        }
        let mut index = HashMap::new();
        for (i, v) in variables.iter().enumerate() {
            if index.insert(v.name.clone(), i).is_some() {
                return Err(Error::InvalidVariable(
                    v.name.clone(),
                    "duplicate variable name".into(),
                ));
            }
        }
        for (i, ps) in parents.iter().enumerate() {
            for (j, &p) in ps.iter().enumerate() {
                if p >= variables.len() {
                    return Err(Error::IndexMismatch(format!(
                        "parent index {p} out of range"
                    )));
                }
                if p == i {
                    return Err(Error::CycleDetected(variables[i].name.clone()));
                }
                if ps[..j].contains(&p) {
                    return Err(Error::InvalidVariable(
                        variables[i].name.clone(),
                        format!("parent `{}` listed twice", variables[p].name),
                    ));
                }
            }
        }
        let topo = topological_order(&parents)
            .map_err(|v| Error::CycleDetected(variables[v].name.clone()))?;
        let cards = variables.iter().map(Variable::card).collect();
        Ok(Dag {
            variables,
            parents,
            cards,
            topo,
            index,
        })
    }

    /// Builds a DAG from names, looking parents up by name.
    pub fn from_names(variables: Vec<Variable>, parents: &[(&str, &[&str])]) -> Result<Self> {
        let index: HashMap<&str, usize> = variables
            .iter()
            .enumerate()
            .map(|(i, v)| (v.name(), i))
            .collect();
        let mut lists = vec![Vec::new(); variables.len()];
        for (child, ps) in parents {
            let c = *index
                .get(child)
                .ok_or_else(|| Error::UnknownVariable(child.to_string()))?;
            lists[c] = ps
                .iter()
                .map(|p| {
                    index
                        .get(p)
                        .copied()
                        .ok_or_else(|| Error::UnknownVariable(p.to_string()))
                })
                .collect::<Result<_>>()?;
        }
        Dag::new(variables, lists)
    }

    pub fn len(&self) -> usize {
        self.variables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variables.is_empty()
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn variable(&self, id: VarId) -> &Variable {
        &self.variables[id]
    }

    pub fn parents(&self, id: VarId) -> &[VarId] {
        &self.parents[id]
    }

    pub fn parent_lists(&self) -> &[Vec<VarId>] {
        &self.parents
    }

    pub fn cards(&self) -> &[usize] {
        &self.cards
    }

    pub fn card(&self, id: VarId) -> usize {
        self.cards[id]
    }

    pub fn topological_order(&self) -> &[VarId] {
        &self.topo
    }

    pub fn var_id(&self, name: &str) -> Option<VarId> {
        self.index.get(name).copied()
    }

    pub fn children(&self, id: VarId) -> Vec<VarId> {
        (0..self.len())
            .filter(|&c| self.parents[c].contains(&id))
            .collect()
    }

    /// Number of joint parent configurations (CPT rows) of `id`.
    pub fn row_count(&self, id: VarId) -> usize {
        self.parents[id].iter().map(|&p| self.cards[p]).product()
    }

    /// Length of the flat CPT of `id`: rows times child cardinality.
    pub fn table_len(&self, id: VarId) -> usize {
        self.row_count(id) * self.cards[id]
    }

    pub fn parent_config_index(&self, id: VarId, values: &[usize]) -> usize {
        debug_assert_eq!(values.len(), self.parents[id].len());
        self.parents[id]
            .iter()
            .zip(values)
            .fold(0, |acc, (&p, &v)| acc * self.cards[p] + v)
    }

    pub fn parent_config_values(&self, id: VarId, mut config: usize) -> Vec<usize> {
        let ps = &self.parents[id];
        let mut values = vec![0; ps.len()];
        for (slot, &p) in values.iter_mut().zip(ps).rev() {
            *slot = config % self.cards[p];
            config /= self.cards[p];
        }
        values
    }

    pub(crate) fn family_scope(&self, id: VarId) -> (Vec<VarId>, Vec<usize>) {
        let mut scope = self.parents[id].clone();
        scope.push(id);
        let cards = scope.iter().map(|&v| self.cards[v]).collect();
        (scope, cards)
    }
}

fn topological_order(parents: &[Vec<VarId>]) -> std::result::Result<Vec<VarId>, VarId> {
    let n = parents.len();
    let mut indegree: Vec<usize> = parents.iter().map(Vec::len).collect();
    let mut children = vec![Vec::new(); n];
    for (c, ps) in parents.iter().enumerate() {
        for &p in ps {
            children[p].push(c);
        }
    }
    let mut ready: Vec<VarId> = (0..n).rev().filter(|&v| indegree[v] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(v) = ready.pop() {
        order.push(v);
        for &c in children[v].iter().rev() {
            indegree[c] -= 1;
            if indegree[c] == 0 {
                ready.push(c);
            }
        }
    }
    if order.len() < n {
        return Err((0..n).find(|&v| indegree[v] > 0).unwrap());
    }
    Ok(order)
}

/// Dirichlet hyperparameters of a single CPT row.
#[derive(Clone, Debug, PartialEq)]
pub struct DirichletRow<T> {
    alpha: Vec<T>,
}

impl<T: Real> DirichletRow<T> {
    pub fn new(alpha: Vec<T>) -> Result<Self> {
        if alpha.iter().any(|a| !(*a > T::zero()) || !a.is_finite()) {
            return Err(Error::NonPositiveAlpha { var: String::new() });
        }
        if alpha.len() < 2 {
            return Err(Error::IndexMismatch(
                "Dirichlet row needs at least two entries".into(),
            ));
        }
        Ok(DirichletRow { alpha })
    }

    pub fn alpha(&self) -> &[T] {
        &self.alpha
    }

    pub fn alpha_sum(&self) -> T {
        self.alpha.iter().copied().sum()
    }

    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    pub fn mean(&self, b: usize) -> T {
        self.alpha[b] / self.alpha_sum()
    }

    pub fn means(&self) -> Vec<T> {
        let s = self.alpha_sum();
        self.alpha.iter().map(|&a| a / s).collect()
    }

    pub fn scaled(&self, factor: T) -> Self {
        DirichletRow {
            alpha: self.alpha.iter().map(|&a| a * factor).collect(),
        }
    }
}

/// A discrete network with a Dirichlet distribution on every CPT row.
#[derive(Clone, Debug, PartialEq)]
pub struct Network<T> {
    dag: Dag,
    rows: Vec<Vec<DirichletRow<T>>>,
}

/// Checks the row-count and positivity invariants and returns the network.
pub fn validate_network<T: Real>(dag: Dag, rows: Vec<Vec<DirichletRow<T>>>) -> Result<Network<T>> {
    Network::new(dag, rows)
}

impl<T: Real> Network<T> {
    pub fn new(dag: Dag, rows: Vec<Vec<DirichletRow<T>>>) -> Result<Self> {
        if rows.len() != dag.len() {
            return Err(Error::IndexMismatch(format!(
                "{} variables but CPTs for {}",
                dag.len(),
                rows.len()
            )));
        }
        for (v, var_rows) in rows.iter().enumerate() {
            let name = dag.variable(v).name().to_string();
            let expected = dag.row_count(v);
            if var_rows.len() < expected {
                return Err(Error::MissingRow {
                    var: name,
                    config: var_rows.len(),
                });
            }
            if var_rows.len() > expected {
                return Err(Error::IndexMismatch(format!(
                    "`{name}` has {} rows, expected {expected}",
                    var_rows.len()
                )));
            }
            for row in var_rows {
                if row.len() != dag.card(v) {
                    return Err(Error::IndexMismatch(format!(
                        "row of `{name}` has {} entries, domain has {}",
                        row.len(),
                        dag.card(v)
                    )));
                }
            }
        }
        Ok(Network { dag, rows })
    }

    /// Builds a network from raw α tables (flat per variable), checking positivity.
    pub fn from_alpha_tables(dag: Dag, tables: Vec<Vec<T>>) -> Result<Self> {
        if tables.len() != dag.len() {
            return Err(Error::IndexMismatch(
                "one α table per variable required".into(),
            ));
        }
        let mut rows = Vec::with_capacity(dag.len());
        for (v, table) in tables.into_iter().enumerate() {
            let card = dag.card(v);
            let expected = dag.table_len(v);
            let name = dag.variable(v).name().to_string();
            if table.len() < expected {
                return Err(Error::MissingRow {
                    var: name,
                    config: table.len() / card,
                });
            }
            if table.len() != expected {
                return Err(Error::IndexMismatch(format!(
                    "α table of `{name}` has the wrong length"
                )));
            }
            let var_rows = table
                .chunks(card)
                .map(|c| {
                    DirichletRow::new(c.to_vec()).map_err(|e| match e {
                        Error::NonPositiveAlpha { .. } => {
                            Error::NonPositiveAlpha { var: name.clone() }
                        }
                        other => other,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(var_rows);
        }
        Network::new(dag, rows)
    }

    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    pub fn rows(&self, var: VarId) -> &[DirichletRow<T>] {
        &self.rows[var]
    }

    pub fn row(&self, var: VarId, config: usize) -> &DirichletRow<T> {
        &self.rows[var][config]
    }

    pub fn len(&self) -> usize {
        self.dag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dag.is_empty()
    }

    /// Posterior-mean (predictive) CPTs π_{b|a} = α_{b|a} / α_{·|a}.
    pub fn predictive_means(&self) -> ParameterAssignment<T> {
        let tables = self
            .rows
            .iter()
            .map(|rows| rows.iter().flat_map(DirichletRow::means).collect())
            .collect();
        ParameterAssignment::from_tables_unchecked(tables)
    }

    /// Σ_{a,b} α_{b|a} for one variable.
    pub fn effective_sample_size(&self, var: VarId) -> T {
        self.rows[var].iter().map(DirichletRow::alpha_sum).sum()
    }

    /// Conjugate update α_{b|a} = α̃_{b|a} + n_{ab}.
    pub fn posterior_update(&self, data: &CompleteData) -> Result<Network<T>> {
        if data.counts.len() != self.len() {
            return Err(Error::IndexMismatch(format!(
                "data has counts for {} variables, network has {}",
                data.counts.len(),
                self.len()
            )));
        }
        let mut rows = Vec::with_capacity(self.len());
        for (v, counts) in data.counts.iter().enumerate() {
            if counts.len() != self.dag.table_len(v) {
                return Err(Error::IndexMismatch(format!(
                    "count table for `{}` has {} entries, expected {}",
                    self.dag.variable(v).name(),
                    counts.len(),
                    self.dag.table_len(v)
                )));
            }
            let card = self.dag.card(v);
            let updated = self.rows[v]
                .iter()
                .zip(counts.chunks(card))
                .map(|(row, n)| DirichletRow {
                    alpha: row
                        .alpha
                        .iter()
                        .zip(n)
                        .map(|(&a, &c)| a + T::from_u64(c).expect("count fits scalar"))
                        .collect(),
                })
                .collect();
            rows.push(updated);
        }
        Ok(Network {
            dag: self.dag.clone(),
            rows,
        })
    }

    /// Multiplies every α by `factor`, leaving the predictive means unchanged.
    pub fn scale_effective_sample_size(&self, factor: T) -> Result<Network<T>> {
        if !(factor > T::zero()) || !factor.is_finite() {
            return Err(Error::NonPositiveFactor(factor.as_f64()));
        }
        let rows = self
            .rows
            .iter()
            .map(|rows| rows.iter().map(|r| r.scaled(factor)).collect())
            .collect();
        Ok(Network {
            dag: self.dag.clone(),
            rows,
        })
    }
}

/// BDe hyperparameters α_{b|a} = m · P̂(a) · θ̂_{b|a}.
///
/// P̂(a) is the exact joint probability of the parent configuration under the
/// mean parameters, so every variable ends up with effective sample size `m`.
pub fn bde_prior<T: Real>(dag: &Dag, means: &ParameterAssignment<T>, m: T) -> Result<Network<T>> {
    if !(m > T::zero()) || !m.is_finite() {
        return Err(Error::NonPositiveM(m.as_f64()));
    }
    if means.tables().len() != dag.len() {
        return Err(Error::IndexMismatch(
            "one mean table per variable required".into(),
        ));
    }
    for v in 0..dag.len() {
        let table = means.table(v);
        if table.len() != dag.table_len(v) {
            return Err(Error::IndexMismatch(format!(
                "mean table of `{}` has the wrong length",
                dag.variable(v).name()
            )));
        }
        for row in table.chunks(dag.card(v)) {
            let sum: T = row.iter().copied().sum();
            if (sum - T::one()).abs() > T::tol(1e-10) || row.iter().any(|p| *p < T::zero()) {
                return Err(Error::RowNotNormalized {
                    var: dag.variable(v).name().to_string(),
                    sum: sum.as_f64(),
                });
            }
        }
    }

    let cpt_factors: Vec<Factor<T>> = (0..dag.len())
        .map(|v| {
            let (scope, cards) = dag.family_scope(v);
            Factor::from_parts_unchecked(scope, cards, means.table(v).to_vec())
        })
        .collect();

    let mut rows = Vec::with_capacity(dag.len());
    for v in 0..dag.len() {
        let parent_marginal = eliminate(cpt_factors.clone(), dag.parents(v))?;
        let card = dag.card(v);
        let mut var_rows = Vec::with_capacity(dag.row_count(v));
        for (config, theta) in means.table(v).chunks(card).enumerate() {
            let pa = parent_marginal.table()[config];
            if !(pa > T::zero()) {
                return Err(Error::ZeroParentProbability {
                    var: dag.variable(v).name().to_string(),
                    config,
                });
            }
            let alpha: Vec<T> = theta.iter().map(|&t| m * pa * t).collect();
            if alpha.iter().any(|a| !(*a > T::zero())) {
                return Err(Error::NonPositiveAlpha {
                    var: dag.variable(v).name().to_string(),
                });
            }
            var_rows.push(DirichletRow { alpha });
        }
        rows.push(var_rows);
    }
    Network::new(dag.clone(), rows)
}

/// Sufficient statistics n_{ab} of a complete data set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompleteData {
    counts: Vec<Vec<u64>>,
    n: u64,
}

impl CompleteData {
    pub fn new(dag: &Dag, counts: Vec<Vec<u64>>, n: u64) -> Result<Self> {
        if counts.len() != dag.len() {
            return Err(Error::IndexMismatch(
                "one count table per variable required".into(),
            ));
        }
        for (v, c) in counts.iter().enumerate() {
            if c.len() != dag.table_len(v) {
                return Err(Error::IndexMismatch(format!(
                    "count table of `{}` has the wrong length",
                    dag.variable(v).name()
                )));
            }
            if c.iter().sum::<u64>() != n {
                return Err(Error::IndexMismatch(format!(
                    "counts of `{}` do not sum to n = {n}",
                    dag.variable(v).name()
                )));
            }
        }
        Ok(CompleteData { counts, n })
    }

    pub fn empty(dag: &Dag) -> Self {
        CompleteData {
            counts: (0..dag.len()).map(|v| vec![0; dag.table_len(v)]).collect(),
            n: 0,
        }
    }

    /// Tallies complete tuples given as value indices, one per variable.
    pub fn from_tuples(dag: &Dag, tuples: &[Vec<usize>]) -> Result<Self> {
        let mut data = CompleteData::empty(dag);
        for t in tuples {
            if t.len() != dag.len() {
                return Err(Error::IndexMismatch(format!(
                    "tuple has {} values, network has {} variables",
                    t.len(),
                    dag.len()
                )));
            }
            for v in 0..dag.len() {
                if t[v] >= dag.card(v) {
                    return Err(Error::IndexMismatch(format!(
                        "value index {} out of range for `{}`",
                        t[v],
                        dag.variable(v).name()
                    )));
                }
                let pv: Vec<usize> = dag.parents(v).iter().map(|&p| t[p]).collect();
                let idx = dag.parent_config_index(v, &pv) * dag.card(v) + t[v];
                data.counts[v][idx] += 1;
            }
            data.n += 1;
        }
        Ok(data)
    }

    /// Reads tuples from CSV with a header naming each variable once.
    pub fn from_csv<R: std::io::Read>(dag: &Dag, reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = rdr
            .headers()
            .map_err(|e| Error::Parse(e.to_string()))?
            .clone();
        let columns: Vec<VarId> = headers
            .iter()
            .map(|h| {
                dag.var_id(h)
                    .ok_or_else(|| Error::UnknownVariable(h.to_string()))
            })
            .collect::<Result<_>>()?;
        let mut seen = vec![false; dag.len()];
        for &c in &columns {
            if std::mem::replace(&mut seen[c], true) {
                return Err(Error::IndexMismatch(format!(
                    "column `{}` appears twice",
                    dag.variable(c).name()
                )));
            }
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::IndexMismatch(format!(
                "no column for variable `{}`",
                dag.variable(missing).name()
            )));
        }
        let mut tuples = Vec::new();
        for record in rdr.records() {
            let record = record.map_err(|e| Error::Parse(e.to_string()))?;
            let mut tuple = vec![0; dag.len()];
            for (field, &v) in record.iter().zip(&columns) {
                let var = dag.variable(v);
                tuple[v] = var.value_index(field).ok_or_else(|| Error::UnknownValue {
                    var: var.name().to_string(),
                    value: field.to_string(),
                })?;
            }
            tuples.push(tuple);
        }
        CompleteData::from_tuples(dag, &tuples)
    }

    pub fn counts(&self, var: VarId) -> &[u64] {
        &self.counts[var]
    }

    pub fn n(&self) -> u64 {
        self.n
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binary(name: &str) -> Variable {
        Variable::with_card(name, 2).unwrap()
    }

    fn chain() -> Dag {
        Dag::new(
            vec![binary("A"), binary("B"), binary("C")],
            vec![vec![], vec![0], vec![1]],
        )
        .unwrap()
    }

    #[test]
    fn chain_with_full_rows_validates() {
        let net =
            Network::from_alpha_tables(chain(), vec![vec![1.0, 1.0], vec![1.0; 4], vec![2.0; 4]]);
        assert!(net.is_ok());
    }

    #[test]
    fn two_cycle_is_rejected() {
        let err = Dag::new(vec![binary("A"), binary("B")], vec![vec![1], vec![0]]).unwrap_err();
        assert!(matches!(err, Error::CycleDetected(_)));
    }

    #[test]
    fn zero_alpha_is_rejected() {
        let dag = Dag::new(vec![binary("A")], vec![vec![]]).unwrap();
        let err = Network::from_alpha_tables(dag, vec![vec![1.0, 0.0]]).unwrap_err();
        assert_eq!(err, Error::NonPositiveAlpha { var: "A".into() });
    }

    #[test]
    fn missing_row_is_reported() {
        let err =
            Network::from_alpha_tables(chain(), vec![vec![1.0, 1.0], vec![1.0; 2], vec![1.0; 4]])
                .unwrap_err();
        assert!(matches!(err, Error::MissingRow { .. }));
    }

    #[test]
    fn duplicate_domain_values_rejected() {
        assert!(Variable::new("A", vec!["x".into(), "x".into()]).is_err());
        assert!(Variable::new("A", vec!["x".into()]).is_err());
    }

    #[test]
    fn parent_config_round_trip() {
        let vars = vec![
            Variable::with_card("A", 3).unwrap(),
            Variable::with_card("B", 2).unwrap(),
            Variable::with_card("C", 2).unwrap(),
        ];
        let dag = Dag::new(vars, vec![vec![], vec![], vec![0, 1]]).unwrap();
        assert_eq!(dag.row_count(2), 6);
        for config in 0..6 {
            let vals = dag.parent_config_values(2, config);
            assert_eq!(dag.parent_config_index(2, &vals), config);
        }
        // last parent varies fastest
        assert_eq!(dag.parent_config_values(2, 1), vec![0, 1]);
    }

    #[test]
    fn posterior_update_adds_counts() {
        let dag = Dag::new(vec![binary("A")], vec![vec![]]).unwrap();
        let net = Network::from_alpha_tables(dag.clone(), vec![vec![1.0, 1.0]]).unwrap();
        let data = CompleteData::new(&dag, vec![vec![3, 0]], 3).unwrap();
        let post = net.posterior_update(&data).unwrap();
        assert_eq!(post.row(0, 0).alpha(), &[4.0, 1.0]);
        assert_eq!(
            net.posterior_update(&CompleteData::empty(&dag)).unwrap(),
            net
        );
    }

    #[test]
    fn posterior_update_index_mismatch() {
        let net =
            Network::from_alpha_tables(chain(), vec![vec![1.0, 1.0], vec![1.0; 4], vec![1.0; 4]])
                .unwrap();
        let other = Dag::new(vec![binary("A")], vec![vec![]]).unwrap();
        let data = CompleteData::empty(&other);
        assert!(matches!(
            net.posterior_update(&data),
            Err(Error::IndexMismatch(_))
        ));
    }

    #[test]
    fn scaling_preserves_means() {
        let dag = Dag::new(vec![binary("A")], vec![vec![]]).unwrap();
        let net = Network::from_alpha_tables(dag, vec![vec![2.0, 6.0]]).unwrap();
        assert_eq!(net.scale_effective_sample_size(1.0).unwrap(), net);
        let big = net.scale_effective_sample_size(10.0).unwrap();
        assert_eq!(big.row(0, 0).alpha(), &[20.0, 60.0]);
        assert_eq!(big.row(0, 0).means(), vec![0.25, 0.75]);
        assert!(net.scale_effective_sample_size(0.0).is_err());
    }

    #[test]
    fn bde_rejects_nonpositive_m() {
        let dag = Dag::new(vec![binary("A")], vec![vec![]]).unwrap();
        let means = ParameterAssignment::new(&dag, vec![vec![0.5, 0.5]]).unwrap();
        assert!(matches!(
            bde_prior(&dag, &means, 0.0),
            Err(Error::NonPositiveM(_))
        ));
    }

    #[test]
    fn bde_rejects_zero_probability_parent() {
        // child listed first so it is checked before the root's zero α
        let dag = Dag::new(vec![binary("B"), binary("A")], vec![vec![1], vec![]]).unwrap();
        let means = ParameterAssignment::new(&dag, vec![vec![0.5; 4], vec![1.0, 0.0]]).unwrap();
        assert!(matches!(
            bde_prior(&dag, &means, 10.0),
            Err(Error::ZeroParentProbability { .. })
        ));
    }

    #[test]
    fn csv_tally() {
        let dag = chain();
        let csv = "C,A,B\nc0,a0,b1\nc1,a1,b1\nc1,a0,b1\n";
        let data = CompleteData::from_csv(&dag, csv.as_bytes()).unwrap();
        assert_eq!(data.n(), 3);
        assert_eq!(data.counts(0), &[2, 1]);
        assert_eq!(data.counts(1), &[0, 2, 0, 1]);
        assert_eq!(data.counts(2), &[0, 0, 1, 2]);
        assert!(CompleteData::from_csv(&dag, "A,B\na0,b0\n".as_bytes()).is_err());
        assert!(CompleteData::from_csv(&dag, "A,B,C\na0,b0,zz\n".as_bytes()).is_err());
    }
}
