//! Plug-in query evaluation by variable elimination.
//!
//! Every computation reduces to summing the product of CPT factors under a set
//! of per-variable restrictions. Evaluated at the posterior means, the query
//! value is the posterior query mean given one extra observation of the
//! evidence; evaluated at sampled parameters it is q(Θ) itself.

use crate::error::{Error, Result};
use crate::factor::{eliminate, Factor};
use crate::network::{Dag, VarId};
use crate::scalar::Real;

/// One probability vector per CPT row, stored as flat per-variable tables.
#[derive(Clone, Debug, PartialEq)]
pub struct ParameterAssignment<T> {
    tables: Vec<Vec<T>>,
}

impl<T: Real> ParameterAssignment<T> {
    /// Checks table sizes and that each row is a probability vector (within 1e-10).
    pub fn new(dag: &Dag, tables: Vec<Vec<T>>) -> Result<Self> {
        let pa = Self::unnormalized(dag, tables)?;
        for v in 0..dag.len() {
            for row in pa.tables[v].chunks(dag.card(v)) {
                let sum: T = row.iter().copied().sum();
                if (sum - T::one()).abs() > T::tol(1e-10) {
                    return Err(Error::RowNotNormalized {
                        var: dag.variable(v).name().to_string(),
                        sum: sum.as_f64(),
                    });
                }
            }
        }
        Ok(pa)
    }

    /// Accepts arbitrary nonnegative tables of the right shape.
    ///
    /// Query values are multilinear in the CPT entries, so unnormalized rows
    /// are meaningful as free coordinates (finite-difference checks use this).
    pub fn unnormalized(dag: &Dag, tables: Vec<Vec<T>>) -> Result<Self> {
        if tables.len() != dag.len() {
            return Err(Error::ScopeMismatch(format!(
                "{} tables for {} variables",
                tables.len(),
                dag.len()
            )));
        }
        for (v, t) in tables.iter().enumerate() {
            if t.len() != dag.table_len(v) {
                return Err(Error::ScopeMismatch(format!(
                    "table of `{}` has {} entries, expected {}",
                    dag.variable(v).name(),
                    t.len(),
                    dag.table_len(v)
                )));
            }
            if t.iter().any(|p| !p.is_finite() || *p < T::zero()) {
                return Err(Error::ScopeMismatch(format!(
                    "table of `{}` has a negative or non-finite entry",
                    dag.variable(v).name()
                )));
            }
        }
        Ok(ParameterAssignment { tables })
    }

    pub(crate) fn from_tables_unchecked(tables: Vec<Vec<T>>) -> Self {
        ParameterAssignment { tables }
    }

    pub fn tables(&self) -> &[Vec<T>] {
        &self.tables
    }

    pub fn table(&self, var: VarId) -> &[T] {
        &self.tables[var]
    }

    pub fn row(&self, dag: &Dag, var: VarId, config: usize) -> &[T] {
        let d = dag.card(var);
        &self.tables[var][config * d..(config + 1) * d]
    }

    pub fn into_tables(self) -> Vec<Vec<T>> {
        self.tables
    }
}

/// Indicator query P(H = h | E = e).
///
/// A hypothesis variable may also appear in the evidence: with the same value
/// the query is identically one, with a different value identically zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Query {
    hypothesis: Vec<(VarId, usize)>,
    evidence: Vec<(VarId, usize)>,
}

impl Query {
    pub fn new(
        dag: &Dag,
        hypothesis: Vec<(VarId, usize)>,
        evidence: Vec<(VarId, usize)>,
    ) -> Result<Self> {
        if hypothesis.is_empty() {
            return Err(Error::ScopeMismatch(
                "query needs at least one hypothesis variable".into(),
            ));
        }
        check_assignment(dag, &hypothesis)?;
        check_assignment(dag, &evidence)?;
        Ok(Query {
            hypothesis,
            evidence,
        })
    }

    /// Parses `"A=a1,B=b2"`-style assignments; `evidence` may be empty.
    pub fn parse(dag: &Dag, hypothesis: &str, evidence: &str) -> Result<Self> {
        Query::new(
            dag,
            parse_assignment(dag, hypothesis)?,
            parse_assignment(dag, evidence)?,
        )
    }

    pub fn hypothesis(&self) -> &[(VarId, usize)] {
        &self.hypothesis
    }

    pub fn evidence(&self) -> &[(VarId, usize)] {
        &self.evidence
    }

    /// `H=h | E=e` with names, for reports.
    pub fn describe(&self, dag: &Dag) -> String {
        let fmt = |a: &[(VarId, usize)]| {
            a.iter()
                .map(|&(v, x)| {
                    format!("{}={}", dag.variable(v).name(), dag.variable(v).domain()[x])
                })
                .collect::<Vec<_>>()
                .join(",")
        };
        format!("{}|{}", fmt(&self.hypothesis), fmt(&self.evidence))
    }
}

fn check_assignment(dag: &Dag, assignment: &[(VarId, usize)]) -> Result<()> {
    for (i, &(v, x)) in assignment.iter().enumerate() {
        if v >= dag.len() {
            return Err(Error::ScopeMismatch(format!(
                "variable index {v} out of range"
            )));
        }
        if x >= dag.card(v) {
            return Err(Error::ScopeMismatch(format!(
                "value index {x} out of range for `{}`",
                dag.variable(v).name()
            )));
        }
        if assignment[..i].iter().any(|&(w, _)| w == v) {
            return Err(Error::ScopeMismatch(format!(
                "`{}` assigned twice",
                dag.variable(v).name()
            )));
        }
    }
    Ok(())
}

pub fn parse_assignment(dag: &Dag, text: &str) -> Result<Vec<(VarId, usize)>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|pair| {
            let (name, value) = pair
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected VAR=value, got `{pair}`")))?;
            let (name, value) = (name.trim(), value.trim());
            let v = dag
                .var_id(name)
                .ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
            let x = dag
                .variable(v)
                .value_index(value)
                .ok_or_else(|| Error::UnknownValue {
                    var: name.to_string(),
                    value: value.to_string(),
                })?;
            Ok((v, x))
        })
        .collect()
}

/// Restriction on the values a variable may take inside a sum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Restriction {
    Free,
    Value(usize),
    Mask(Vec<bool>),
}

/// Per-variable restrictions; conjunction when a variable is restricted twice.
#[derive(Clone, Debug)]
pub(crate) struct Restrictions {
    cards: Vec<usize>,
    items: Vec<Restriction>,
}

impl Restrictions {
    pub fn free(cards: &[usize]) -> Self {
        Restrictions {
            cards: cards.to_vec(),
            items: vec![Restriction::Free; cards.len()],
        }
    }

    pub fn from_assignment(cards: &[usize], assignment: &[(VarId, usize)]) -> Self {
        let mut r = Self::free(cards);
        for &(v, x) in assignment {
            r.restrict_value(v, x);
        }
        r
    }

    fn mask_of(&self, var: VarId) -> Vec<bool> {
        match &self.items[var] {
            Restriction::Free => vec![true; self.cards[var]],
            Restriction::Value(x) => (0..self.cards[var]).map(|i| i == *x).collect(),
            Restriction::Mask(m) => m.clone(),
        }
    }

    pub fn restrict_value(&mut self, var: VarId, value: usize) {
        self.items[var] = match &self.items[var] {
            Restriction::Free => Restriction::Value(value),
            Restriction::Value(x) if *x == value => Restriction::Value(value),
            _ => {
                let mut m = self.mask_of(var);
                m.iter_mut().enumerate().for_each(|(i, b)| *b &= i == value);
                Restriction::Mask(m)
            }
        };
    }

    pub fn restrict_mask(&mut self, var: VarId, mask: &[bool]) {
        let mut m = self.mask_of(var);
        m.iter_mut().zip(mask).for_each(|(a, b)| *a &= *b);
        let allowed: Vec<usize> = (0..m.len()).filter(|&i| m[i]).collect();
        self.items[var] = match allowed.as_slice() {
            [x] => Restriction::Value(*x),
            _ if allowed.len() == m.len() => Restriction::Free,
            _ => Restriction::Mask(m),
        };
    }

    fn impossible(&self) -> bool {
        self.items
            .iter()
            .any(|r| matches!(r, Restriction::Mask(m) if !m.iter().any(|&b| b)))
    }
}

/// Borrowed view of a table network: cardinalities, parents and flat CPTs.
#[derive(Clone, Copy)]
pub(crate) struct ModelView<'a, T> {
    pub cards: &'a [usize],
    pub parents: &'a [Vec<VarId>],
    pub tables: &'a [Vec<T>],
}

impl<'a, T: Real> ModelView<'a, T> {
    pub fn new(dag: &'a Dag, params: &'a ParameterAssignment<T>) -> Self {
        ModelView {
            cards: dag.cards(),
            parents: dag.parent_lists(),
            tables: params.tables(),
        }
    }

    fn cpt_factor(&self, var: VarId, restr: &Restrictions) -> Factor<T> {
        let mut scope = self.parents[var].clone();
        scope.push(var);
        let cards: Vec<usize> = scope.iter().map(|&v| self.cards[v]).collect();
        let mut f = Factor::from_parts_unchecked(scope.clone(), cards, self.tables[var].clone());
        for &v in &scope {
            if let Restriction::Value(x) = restr.items[v] {
                f = f.reduce(v, x);
            }
        }
        f
    }

    fn factors(&self, restr: &Restrictions, skip: Option<VarId>) -> Vec<Factor<T>> {
        let mut out: Vec<Factor<T>> = (0..self.cards.len())
            .filter(|&v| Some(v) != skip)
            .map(|v| self.cpt_factor(v, restr))
            .collect();
        for (v, r) in restr.items.iter().enumerate() {
            if let Restriction::Mask(m) = r {
                let table = m
                    .iter()
                    .map(|&b| if b { T::one() } else { T::zero() })
                    .collect();
                out.push(Factor::from_parts_unchecked(
                    vec![v],
                    vec![self.cards[v]],
                    table,
                ));
            }
        }
        out
    }

    /// Σ over all configurations consistent with `restr` of Π CPT entries.
    pub fn probability(&self, restr: &Restrictions) -> T {
        if restr.impossible() {
            return T::zero();
        }
        let result = eliminate(self.factors(restr, None), &[]).expect("consistent model scopes");
        result.table()[0]
    }

    /// Partial derivatives of [`Self::probability`] with respect to every entry of
    /// `var`'s CPT, laid out like the CPT itself.
    ///
    /// The probability is multilinear in the CPT entries, so the partial with
    /// respect to θ_{b|a} is the sum over consistent configurations of the
    /// product of all other factors, i.e. the family marginal with `var`'s own
    /// factor left out.
    pub fn family_derivative(&self, restr: &Restrictions, var: VarId) -> Vec<T> {
        let mut family = self.parents[var].clone();
        family.push(var);
        let len: usize = family.iter().map(|&v| self.cards[v]).product();
        if restr.impossible() {
            return vec![T::zero(); len];
        }
        let keep: Vec<VarId> = family
            .iter()
            .copied()
            .filter(|&v| !matches!(restr.items[v], Restriction::Value(_)))
            .collect();
        let mut factors = self.factors(restr, Some(var));
        for &k in &keep {
            factors.push(Factor::unit(vec![k], vec![self.cards[k]]));
        }
        let marginal = eliminate(factors, &keep).expect("consistent model scopes");

        let mut out = vec![T::zero(); len];
        let mut counter = vec![0usize; family.len()];
        let mut kept_values = Vec::with_capacity(keep.len());
        for slot in out.iter_mut() {
            let consistent = family
                .iter()
                .zip(&counter)
                .all(|(&v, &x)| match restr.items[v] {
                    Restriction::Value(y) => x == y,
                    _ => true,
                });
            if consistent {
                kept_values.clear();
                kept_values.extend(
                    family
                        .iter()
                        .zip(&counter)
                        .filter(|(v, _)| keep.contains(v))
                        .map(|(_, &x)| x),
                );
                *slot = marginal.value(&kept_values);
            }
            for d in (0..family.len()).rev() {
                counter[d] += 1;
                if counter[d] < self.cards[family[d]] {
                    break;
                }
                counter[d] = 0;
            }
        }
        out
    }
}

/// Probability of a (partial) assignment: the sum over unassigned variables of
/// the product of per-variable conditionals.
pub fn joint_prob<T: Real>(
    dag: &Dag,
    params: &ParameterAssignment<T>,
    assignment: &[(VarId, usize)],
) -> Result<T> {
    check_assignment(dag, assignment)?;
    check_shape(dag, params)?;
    let restr = Restrictions::from_assignment(dag.cards(), assignment);
    Ok(ModelView::new(dag, params).probability(&restr))
}

/// P(E = e | params); at the posterior means this is the evidence mean μ_r.
pub fn evidence_probability<T: Real>(
    dag: &Dag,
    params: &ParameterAssignment<T>,
    evidence: &[(VarId, usize)],
) -> Result<T> {
    joint_prob(dag, params, evidence)
}

/// P(H = h | E = e, params).
pub fn evaluate_query<T: Real>(dag: &Dag, params: &ParameterAssignment<T>, q: &Query) -> Result<T> {
    check_shape(dag, params)?;
    let view = ModelView::new(dag, params);
    let (num, den) = query_terms(&view, q);
    if den == T::zero() {
        return Err(Error::ZeroEvidenceProbability);
    }
    Ok(num / den)
}

/// (P(h, e), P(e)) under the view.
pub(crate) fn query_terms<T: Real>(view: &ModelView<'_, T>, q: &Query) -> (T, T) {
    let ev = Restrictions::from_assignment(view.cards, &q.evidence);
    let mut he = ev.clone();
    for &(v, x) in &q.hypothesis {
        he.restrict_value(v, x);
    }
    (view.probability(&he), view.probability(&ev))
}

fn check_shape<T: Real>(dag: &Dag, params: &ParameterAssignment<T>) -> Result<()> {
    if params.tables().len() != dag.len()
        || (0..dag.len()).any(|v| params.table(v).len() != dag.table_len(v))
    {
        return Err(Error::ScopeMismatch(
            "parameter tables do not match the network".into(),
        ));
    }
    Ok(())
}
