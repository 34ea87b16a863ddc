//! The doubled network: two replicates of every variable, conditionally
//! independent given the parameters, with the parameters integrated out.
//!
//! A doubled variable B* = (B₁, B₂) takes value index `b₁ · d + b₂`. Its CPT
//! row for parent configuration a* = (a₁, a₂) holds the Dirichlet cross
//! moments E{θ_{b₁|a₁} θ_{b₂|a₂}}, which reduce to a product of means unless
//! both replicates see the same parent configuration. Doubled rows are plain
//! mean tables; they carry no Dirichlet structure.

use crate::error::{Error, Result};
use crate::inference::{ModelView, Query, Restrictions};
use crate::network::{DirichletRow, Network, VarId};
use crate::scalar::Real;

/// E{θ_{b₁|a₁} θ_{b₂|a₂}} for every (b₁, b₂), flattened with b₁ major.
///
/// `same_parent` says whether a₁ = a₂; in that case `first` and `second` must
/// be the same row.
pub fn doubled_row<T: Real>(
    first: &DirichletRow<T>,
    second: &DirichletRow<T>,
    same_parent: bool,
) -> Vec<T> {
    let p1 = first.means();
    let p2 = second.means();
    let d1 = p1.len();
    let d2 = p2.len();
    let mut out = Vec::with_capacity(d1 * d2);
    let shrink = T::one() / (first.alpha_sum() + T::one());
    for (b1, &x) in p1.iter().enumerate() {
        for (b2, &y) in p2.iter().enumerate() {
            let mut v = x * y;
            if same_parent {
                let delta = if b1 == b2 { T::one() } else { T::zero() };
                v = v + x * (delta - y) * shrink;
            }
            out.push(v);
        }
    }
    out
}

/// Doubled table for one Dirichlet row paired with itself.
pub fn double_cpt_row<T: Real>(row: &DirichletRow<T>, same_parent: bool) -> Vec<T> {
    doubled_row(row, row, same_parent)
}

/// Mean tables of the doubled network, sharing the original DAG shape.
#[derive(Clone, Debug, PartialEq)]
pub struct DoubledNetwork<T> {
    base_cards: Vec<usize>,
    cards: Vec<usize>,
    parents: Vec<Vec<VarId>>,
    tables: Vec<Vec<T>>,
}

pub fn double_network<T: Real>(net: &Network<T>) -> DoubledNetwork<T> {
    DoubledNetwork::new(net)
}

impl<T: Real> DoubledNetwork<T> {
    pub fn new(net: &Network<T>) -> Self {
        let dag = net.dag();
        let base_cards = dag.cards().to_vec();
        let cards: Vec<usize> = base_cards.iter().map(|d| d * d).collect();
        let parents = dag.parent_lists().to_vec();
        let tables = (0..dag.len())
            .map(|v| {
                let ps = dag.parents(v);
                let d = base_cards[v];
                let rows_doubled: usize = ps.iter().map(|&p| cards[p]).product();
                let mut table = Vec::with_capacity(rows_doubled * d * d);
                for config in 0..rows_doubled {
                    // split a* into (a₁, a₂), last parent fastest
                    let (mut c1, mut c2, mut rest, mut mul) = (0usize, 0usize, config, 1usize);
                    for &p in ps.iter().rev() {
                        let dp = base_cards[p];
                        let pair = rest % (dp * dp);
                        rest /= dp * dp;
                        c1 += (pair / dp) * mul;
                        c2 += (pair % dp) * mul;
                        mul *= dp;
                    }
                    let r1 = net.row(v, c1);
                    let r2 = net.row(v, c2);
                    table.extend(doubled_row(r1, r2, c1 == c2));
                }
                table
            })
            .collect();
        DoubledNetwork {
            base_cards,
            cards,
            parents,
            tables,
        }
    }

    /// Cardinalities d² of the doubled variables.
    pub fn cards(&self) -> &[usize] {
        &self.cards
    }

    /// Flat doubled CPT of `var` (rows over doubled parent configurations).
    pub fn table(&self, var: VarId) -> &[T] {
        &self.tables[var]
    }

    /// (rows, columns) of a doubled CPT: (d_r², d_c²).
    pub fn table_shape(&self, var: VarId) -> (usize, usize) {
        let rows = self.parents[var].iter().map(|&p| self.cards[p]).product();
        (rows, self.cards[var])
    }

    pub(crate) fn view(&self) -> ModelView<'_, T> {
        ModelView {
            cards: &self.cards,
            parents: &self.parents,
            tables: &self.tables,
        }
    }

    fn pair(&self, var: VarId, first: usize, second: usize) -> usize {
        first * self.base_cards[var] + second
    }

    fn evidence_restrictions(&self, evidence: &[(VarId, usize)]) -> Restrictions {
        let mut r = Restrictions::free(&self.cards);
        for &(v, x) in evidence {
            r.restrict_value(v, self.pair(v, x, x));
        }
        r
    }

    /// P(E₁ = E₂ = e) in the doubled network, which is E{R²}.
    pub fn evidence_second_moment(&self, evidence: &[(VarId, usize)]) -> T {
        self.view()
            .probability(&self.evidence_restrictions(evidence))
    }

    /// q̂2 and v̂2 for `q`: the posterior mean and variance of q(Θ) given two
    /// extra observations of the evidence.
    pub fn estimate(&self, q: &Query) -> Result<DoublingEstimate<T>> {
        let [rr, nr, nn] = self.product_moments(q);
        if rr == T::zero() {
            return Err(Error::ZeroEvidenceProbability);
        }
        let q2 = nr / rr;
        let (v2, clamped) = clamp_variance(nn / rr - q2 * q2)?;
        Ok(DoublingEstimate { q2, v2, clamped })
    }

    /// [E{R²}, E{N R}, E{N²}] with N = P(h, e | Θ) and R = P(e | Θ).
    pub fn product_moments(&self, q: &Query) -> [T; 3] {
        let view = self.view();
        let ev = self.evidence_restrictions(q.evidence());

        let mut first = ev.clone();
        let mut both = ev.clone();
        for &(v, h) in q.hypothesis() {
            let d = self.base_cards[v];
            let mask: Vec<bool> = (0..d * d).map(|x| x / d == h).collect();
            first.restrict_mask(v, &mask);
            both.restrict_value(v, self.pair(v, h, h));
        }
        [
            view.probability(&ev),
            view.probability(&first),
            view.probability(&both),
        ]
    }
}

/// `copies` replicates of every variable, conditionally independent given the
/// parameters, with the parameters integrated out. A replicated value is the
/// tuple (b₁, …, b_r) read as a base-d number, first replicate most
/// significant; [`DoubledNetwork`] is the two-copy case.
///
/// Each row holds the Dirichlet product moments E{Π_j θ_{b_j|a_j}}, which
/// factor over the distinct parent configurations a_j into ratios of rising
/// factorials.
#[derive(Clone, Debug, PartialEq)]
pub struct ReplicatedNetwork<T> {
    copies: usize,
    base_cards: Vec<usize>,
    cards: Vec<usize>,
    parents: Vec<Vec<VarId>>,
    tables: Vec<Vec<T>>,
}

fn rising<T: Real>(x: T, n: usize) -> T {
    (0..n).fold(T::one(), |acc, i| acc * (x + T::lit(i as f64)))
}

fn digits(mut value: usize, base: usize, copies: usize) -> Vec<usize> {
    let mut out = vec![0; copies];
    for slot in out.iter_mut().rev() {
        *slot = value % base;
        value /= base;
    }
    out
}

impl<T: Real> ReplicatedNetwork<T> {
    /// Fails when any replicated table would exceed `max_table` entries.
    pub fn new(net: &Network<T>, copies: usize, max_table: usize) -> Result<Self> {
        if copies == 0 {
            return Err(Error::InvalidConfig("need at least one copy".into()));
        }
        let dag = net.dag();
        let base_cards = dag.cards().to_vec();
        let power = |d: usize| {
            (0..copies).try_fold(1usize, |acc, _| {
                acc.checked_mul(d).filter(|&x| x <= max_table)
            })
        };
        let too_big =
            || Error::InvalidConfig(format!("replicated tables exceed {max_table} entries"));
        let cards: Vec<usize> = base_cards
            .iter()
            .map(|&d| power(d).ok_or_else(too_big))
            .collect::<Result<_>>()?;
        let mut tables = Vec::with_capacity(dag.len());
        for v in 0..dag.len() {
            let ps = dag.parents(v);
            let rows = ps
                .iter()
                .try_fold(1usize, |acc, &p| {
                    acc.checked_mul(cards[p]).filter(|&x| x <= max_table)
                })
                .and_then(|r| {
                    r.checked_mul(cards[v])
                        .filter(|&x| x <= max_table)
                        .map(|_| r)
                })
                .ok_or_else(too_big)?;
            let d = base_cards[v];
            let mut table = Vec::with_capacity(rows * cards[v]);
            for config in 0..rows {
                // per-replicate parent configurations, last parent fastest
                let mut per_copy = vec![0usize; copies];
                let (mut rest, mut mul) = (config, 1usize);
                for &p in ps.iter().rev() {
                    let value = digits(rest % cards[p], base_cards[p], copies);
                    rest /= cards[p];
                    for (c, x) in per_copy.iter_mut().zip(value) {
                        *c += x * mul;
                    }
                    mul *= base_cards[p];
                }
                for value in 0..cards[v] {
                    let bs = digits(value, d, copies);
                    let mut moment = T::one();
                    let mut done = vec![false; copies];
                    for j in 0..copies {
                        if done[j] {
                            continue;
                        }
                        let row = net.row(v, per_copy[j]);
                        let mut counts = vec![0usize; d];
                        for k in j..copies {
                            if per_copy[k] == per_copy[j] {
                                done[k] = true;
                                counts[bs[k]] += 1;
                            }
                        }
                        let n: usize = counts.iter().sum();
                        for (&a, &c) in row.alpha().iter().zip(&counts) {
                            moment = moment * rising(a, c);
                        }
                        moment = moment / rising(row.alpha_sum(), n);
                    }
                    table.push(moment);
                }
            }
            tables.push(table);
        }
        Ok(ReplicatedNetwork {
            copies,
            base_cards,
            cards,
            parents: dag.parent_lists().to_vec(),
            tables,
        })
    }

    pub fn copies(&self) -> usize {
        self.copies
    }

    pub fn table(&self, var: VarId) -> &[T] {
        &self.tables[var]
    }

    /// E{Π_j P(x_j | Θ)}: the probability that replicate j takes the partial
    /// assignment `per_copy[j]`, for every j at once.
    pub fn probability(&self, per_copy: &[Vec<(VarId, usize)>]) -> Result<T> {
        if per_copy.len() != self.copies {
            return Err(Error::DimensionMismatch(format!(
                "{} assignments for {} copies",
                per_copy.len(),
                self.copies
            )));
        }
        let mut restr = Restrictions::free(&self.cards);
        for (j, assignment) in per_copy.iter().enumerate() {
            for &(v, x) in assignment {
                let d = self.base_cards[v];
                if x >= d {
                    return Err(Error::UnknownValue {
                        var: v.to_string(),
                        value: x.to_string(),
                    });
                }
                let mask: Vec<bool> = (0..self.cards[v])
                    .map(|value| digits(value, d, self.copies)[j] == x)
                    .collect();
                restr.restrict_mask(v, &mask);
            }
        }
        let view = ModelView {
            cards: &self.cards,
            parents: &self.parents,
            tables: &self.tables,
        };
        Ok(view.probability(&restr))
    }
}

/// Clamps a variance computed by cancellation: tiny negatives become zero,
/// larger ones are reported.
pub(crate) fn clamp_variance<T: Real>(v: T) -> Result<(T, bool)> {
    if v >= T::zero() {
        Ok((v, false))
    } else if v >= -T::tol(1e-12) {
        Ok((T::zero(), true))
    } else {
        Err(Error::NumericalInstability(format!(
            "variance {} is negative",
            v.as_f64()
        )))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DoublingEstimate<T> {
    pub q2: T,
    pub v2: T,
    /// Set when a slightly negative variance was clamped to zero.
    pub clamped: bool,
}

/// q̂2, v̂2 for a single query; builds the doubled network on the fly.
pub fn estimate_q2_v2<T: Real>(net: &Network<T>, q: &Query) -> Result<DoublingEstimate<T>> {
    DoubledNetwork::new(net).estimate(q)
}

/// Mean and variance of the evidence probability R = P(E = e | Θ).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvidenceMoments<T> {
    pub mu_r: T,
    pub sigma_rr: T,
}

pub fn evidence_moments<T: Real>(
    net: &Network<T>,
    evidence: &[(VarId, usize)],
) -> Result<EvidenceMoments<T>> {
    evidence_moments_with(net, &DoubledNetwork::new(net), evidence)
}

pub fn evidence_moments_with<T: Real>(
    net: &Network<T>,
    doubled: &DoubledNetwork<T>,
    evidence: &[(VarId, usize)],
) -> Result<EvidenceMoments<T>> {
    if evidence.is_empty() {
        return Ok(EvidenceMoments {
            mu_r: T::one(),
            sigma_rr: T::zero(),
        });
    }
    let means = net.predictive_means();
    let mu_r = crate::inference::evidence_probability(net.dag(), &means, evidence)?;
    let second = doubled.evidence_second_moment(evidence);
    let (sigma_rr, _) = clamp_variance(second - mu_r * mu_r)?;
    Ok(EvidenceMoments { mu_r, sigma_rr })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{Dag, Variable};

    fn root(alpha: Vec<f64>) -> Network<f64> {
        let dag = Dag::new(
            vec![Variable::with_card("A", alpha.len()).unwrap()],
            vec![vec![]],
        )
        .unwrap();
        Network::from_alpha_tables(dag, vec![alpha]).unwrap()
    }

    #[test]
    fn uniform_row_same_parent() {
        let row = DirichletRow::new(vec![1.0f64, 1.0]).unwrap();
        let t = double_cpt_row(&row, true);
        let third = 1.0 / 3.0;
        let sixth = 1.0 / 6.0;
        for (got, want) in t.iter().zip([third, sixth, sixth, third]) {
            assert!((got - want).abs() < 1e-15);
        }
    }

    #[test]
    fn distinct_parents_give_outer_product() {
        let r1 = DirichletRow::new(vec![1.0, 3.0]).unwrap();
        let r2 = DirichletRow::new(vec![2.0, 2.0]).unwrap();
        let t = doubled_row(&r1, &r2, false);
        assert_eq!(t, vec![0.125, 0.125, 0.375, 0.375]);
    }

    #[test]
    fn doubled_rows_sum_to_one() {
        let row = DirichletRow::new(vec![0.7, 2.5, 4.0]).unwrap();
        let s: f64 = double_cpt_row(&row, true).iter().sum();
        assert!((s - 1.0).abs() < 1e-14);
    }

    #[test]
    fn figure_one_shape() {
        let dag = Dag::new(
            vec![
                Variable::with_card("A", 2).unwrap(),
                Variable::with_card("B", 2).unwrap(),
            ],
            vec![vec![], vec![0]],
        )
        .unwrap();
        let net = Network::from_alpha_tables(dag, vec![vec![1.0, 2.0], vec![1.0, 1.0, 3.0, 1.0]])
            .unwrap();
        let dn = double_network(&net);
        assert_eq!(dn.table_shape(1), (4, 4));
        assert_eq!(dn.table_shape(0), (1, 4));
        assert_eq!(dn.table(1).len(), 16);
    }

    #[test]
    fn root_doubled_table() {
        let dn = double_network(&root(vec![1.0, 1.0]));
        let want = [1.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 3.0];
        for (g, w) in dn.table(0).iter().zip(want) {
            assert!((g - w).abs() < 1e-15);
        }
    }

    #[test]
    fn root_variance_closed_form() {
        let net = root(vec![2.0, 6.0]);
        let q = Query::new(net.dag(), vec![(0, 0)], vec![]).unwrap();
        let est = estimate_q2_v2(&net, &q).unwrap();
        assert!((est.q2 - 0.25).abs() < 1e-15);
        assert!((est.v2 - 0.25 * 0.75 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn hypothesis_in_evidence_is_degenerate() {
        let net = root(vec![2.0, 6.0]);
        let q = Query::new(net.dag(), vec![(0, 1)], vec![(0, 1)]).unwrap();
        let est = estimate_q2_v2(&net, &q).unwrap();
        assert_eq!(est.q2, 1.0);
        assert_eq!(est.v2, 0.0);
    }

    #[test]
    fn evidence_moments_of_root() {
        let net = root(vec![1.0, 1.0]);
        let m = evidence_moments(&net, &[(0, 0)]).unwrap();
        assert!((m.mu_r - 0.5).abs() < 1e-15);
        assert!((m.sigma_rr - 1.0 / 12.0).abs() < 1e-15);
        let m = evidence_moments(&net, &[]).unwrap();
        assert_eq!((m.mu_r, m.sigma_rr), (1.0, 0.0));
    }

    #[test]
    fn clamping_contract() {
        assert_eq!(clamp_variance(-1e-14f64).unwrap(), (0.0, true));
        assert_eq!(clamp_variance(0.5f64).unwrap(), (0.5, false));
        assert!(clamp_variance(-1e-6f64).is_err());
    }
}
