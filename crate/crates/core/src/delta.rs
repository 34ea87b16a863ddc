//! Delta-method variance v̂1 = gᵀCg.
//!
//! `g` holds the partial derivatives of q(Θ) = P(h, e | Θ) / P(e | Θ) with
//! respect to every CPT entry, treating row entries as free coordinates. `C`
//! is block diagonal with one Dirichlet covariance block per row; each block
//! has zero row sums, so the quadratic form does not depend on how the
//! gradient is gauged within a row.

use crate::error::{Error, Result};
use crate::inference::{query_terms, ModelView, ParameterAssignment, Query, Restrictions};
use crate::network::{Dag, DirichletRow, Network, VarId};
use crate::scalar::Real;

/// Cov(θ_b, θ_b') = π_b (δ_bb' − π_b') / (α_· + 1), row-major d × d.
#[derive(Clone, Debug, PartialEq)]
pub struct RowCovariance<T> {
    dim: usize,
    entries: Vec<T>,
}

impl<T: Real> RowCovariance<T> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.entries[i * self.dim + j]
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    pub fn quadratic_form(&self, g: &[T]) -> T {
        let mut acc = T::zero();
        for i in 0..self.dim {
            for j in 0..self.dim {
                acc = acc + g[i] * self.get(i, j) * g[j];
            }
        }
        acc
    }
}

pub fn dirichlet_row_covariance<T: Real>(row: &DirichletRow<T>) -> RowCovariance<T> {
    let p = row.means();
    let d = p.len();
    let scale = T::one() / (row.alpha_sum() + T::one());
    let mut entries = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            let delta = if i == j { T::one() } else { T::zero() };
            entries.push(p[i] * (delta - p[j]) * scale);
        }
    }
    RowCovariance { dim: d, entries }
}

/// ∂q/∂θ_{b|a} for every CPT entry, laid out like the CPTs.
#[derive(Clone, Debug, PartialEq)]
pub struct GradientVector<T> {
    tables: Vec<Vec<T>>,
}

impl<T: Real> GradientVector<T> {
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

    pub fn tables_mut(&mut self) -> &mut [Vec<T>] {
        &mut self.tables
    }
}

/// Gradient of the query at arbitrary parameter values (free coordinates).
///
/// Returns the query value alongside the gradient.
pub fn query_gradient_at<T: Real>(
    dag: &Dag,
    params: &ParameterAssignment<T>,
    q: &Query,
) -> Result<(T, GradientVector<T>)> {
    if params.tables().len() != dag.len() {
        return Err(Error::ScopeMismatch(
            "parameter tables do not match the network".into(),
        ));
    }
    let view = ModelView::new(dag, params);
    let (f, g) = query_terms(&view, q);
    if g == T::zero() {
        return Err(Error::ZeroEvidenceProbability);
    }
    let ev = Restrictions::from_assignment(dag.cards(), q.evidence());
    let mut he = ev.clone();
    for &(v, x) in q.hypothesis() {
        he.restrict_value(v, x);
    }
    let g2 = g * g;
    let tables = (0..dag.len())
        .map(|v| {
            let df = view.family_derivative(&he, v);
            let dg = view.family_derivative(&ev, v);
            df.iter()
                .zip(&dg)
                .map(|(&a, &b)| (g * a - f * b) / g2)
                .collect()
        })
        .collect();
    Ok((f / g, GradientVector { tables }))
}

/// Gradient of the query at the posterior means.
pub fn query_gradient<T: Real>(net: &Network<T>, q: &Query) -> Result<GradientVector<T>> {
    let means = net.predictive_means();
    query_gradient_at(net.dag(), &means, q).map(|(_, g)| g)
}

/// Σ over rows of g_rowᵀ C_row g_row.
pub fn delta_quadratic_form<T: Real>(net: &Network<T>, grad: &GradientVector<T>) -> T {
    let dag = net.dag();
    let mut total = T::zero();
    for v in 0..dag.len() {
        for (config, row) in net.rows(v).iter().enumerate() {
            let g = grad.row(dag, v, config);
            // gᵀ(diag π − ππᵀ)g / (α_· + 1)
            let p = row.means();
            let mean: T = p.iter().zip(g).map(|(&pi, &gi)| pi * gi).sum();
            let second: T = p.iter().zip(g).map(|(&pi, &gi)| pi * gi * gi).sum();
            total = total + (second - mean * mean) / (row.alpha_sum() + T::one());
        }
    }
    total
}

/// Delta-method variance of the query, clamped at zero for rounding.
pub fn variance_v1<T: Real>(net: &Network<T>, q: &Query) -> Result<T> {
    let grad = query_gradient(net, q)?;
    let v = delta_quadratic_form(net, &grad);
    if v < -T::tol(1e-12) {
        return Err(Error::NumericalInstability(format!(
            "delta variance {} is negative",
            v.as_f64()
        )));
    }
    Ok(v.max(T::zero()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::Variable;

    #[test]
    fn uniform_row_covariance() {
        let c = dirichlet_row_covariance(&DirichletRow::new(vec![1.0f64, 1.0]).unwrap());
        let t = 1.0 / 12.0;
        for (g, w) in c.entries().iter().zip([t, -t, -t, t]) {
            assert!((g - w).abs() < 1e-15);
        }
    }

    #[test]
    fn covariance_rows_sum_to_zero() {
        let c = dirichlet_row_covariance(&DirichletRow::new(vec![0.5, 3.0, 1.5]).unwrap());
        for i in 0..3 {
            let s: f64 = (0..3).map(|j| c.get(i, j)).sum();
            assert!(s.abs() < 1e-16);
        }
        let c = dirichlet_row_covariance(&DirichletRow::new(vec![2.0f64, 6.0]).unwrap());
        assert!((c.get(0, 0) - 1.0 / 48.0).abs() < 1e-16);
    }

    fn root(alpha: Vec<f64>) -> Network<f64> {
        let dag = Dag::new(
            vec![Variable::with_card("A", alpha.len()).unwrap()],
            vec![vec![]],
        )
        .unwrap();
        Network::from_alpha_tables(dag, vec![alpha]).unwrap()
    }

    #[test]
    fn identity_query_gradient() {
        let net = root(vec![2.0, 6.0]);
        let q = Query::new(net.dag(), vec![(0, 0)], vec![]).unwrap();
        let g = query_gradient(&net, &q).unwrap();
        // free coordinates: only the within-row difference is meaningful
        let t = g.table(0);
        assert!((t[0] - t[1] - 1.0).abs() < 1e-15);
        let v = variance_v1(&net, &q).unwrap();
        assert!((v - 0.25 * 0.75 / 9.0).abs() < 1e-16);
    }

    #[test]
    fn constant_query_has_zero_gradient() {
        let net = root(vec![2.0, 6.0]);
        let q = Query::new(net.dag(), vec![(0, 0)], vec![(0, 0)]).unwrap();
        let g = query_gradient(&net, &q).unwrap();
        assert!(g.table(0).iter().all(|&x| x == 0.0));
        assert_eq!(variance_v1(&net, &q).unwrap(), 0.0);
    }

    #[test]
    fn gauge_invariance() {
        let c = dirichlet_row_covariance(&DirichletRow::new(vec![1.5, 2.0, 0.5]).unwrap());
        let g = [0.3, -1.2, 0.7];
        let shifted: Vec<f64> = g.iter().map(|x| x + 4.25).collect();
        assert!((c.quadratic_form(&g) - c.quadratic_form(&shifted)).abs() < 1e-14);
    }
}
