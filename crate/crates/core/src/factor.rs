//! Factor tables and variable elimination.
//!
//! A [`Factor`] is a nonnegative table over an ordered list of variables,
//! stored row-major (the last variable in the scope varies fastest).
//! Variables are identified by their index in the owning network.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::network::VarId;
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq)]
pub struct Factor<T> {
    scope: Vec<VarId>,
    cards: Vec<usize>,
    table: Vec<T>,
}

impl<T: Real> Factor<T> {
    pub fn new(scope: Vec<VarId>, cards: Vec<usize>, table: Vec<T>) -> Result<Self> {
        if scope.len() != cards.len() {
            return Err(Error::ScopeMismatch(format!(
                "{} variables but {} cardinalities",
                scope.len(),
                cards.len()
            )));
        }
        let unique: BTreeSet<_> = scope.iter().collect();
        if unique.len() != scope.len() {
            return Err(Error::ScopeMismatch("repeated variable in scope".into()));
        }
        let expected: usize = cards.iter().product();
        if table.len() != expected {
            return Err(Error::ScopeMismatch(format!(
                "table has {} entries, scope requires {expected}",
                table.len()
            )));
        }
        if table.iter().any(|v| !v.is_finite() || *v < T::zero()) {
            return Err(Error::ScopeMismatch(
                "factor entries must be finite and nonnegative".into(),
            ));
        }
        Ok(Factor {
            scope,
            cards,
            table,
        })
    }

    /// Factor over `scope` with every entry equal to one.
    pub fn unit(scope: Vec<VarId>, cards: Vec<usize>) -> Self {
        let len = cards.iter().product();
        Factor {
            scope,
            cards,
            table: vec![T::one(); len],
        }
    }

    pub fn scalar(value: T) -> Self {
        Factor {
            scope: Vec::new(),
            cards: Vec::new(),
            table: vec![value],
        }
    }

    pub(crate) fn from_parts_unchecked(
        scope: Vec<VarId>,
        cards: Vec<usize>,
        table: Vec<T>,
    ) -> Self {
        debug_assert_eq!(table.len(), cards.iter().product::<usize>());
        Factor {
            scope,
            cards,
            table,
        }
    }

    pub fn scope(&self) -> &[VarId] {
        &self.scope
    }

    pub fn cards(&self) -> &[usize] {
        &self.cards
    }

    pub fn table(&self) -> &[T] {
        &self.table
    }

    pub fn into_table(self) -> Vec<T> {
        self.table
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn total(&self) -> T {
        self.table.iter().copied().sum()
    }

    fn position(&self, var: VarId) -> Option<usize> {
        self.scope.iter().position(|&v| v == var)
    }

    fn strides(&self) -> Vec<usize> {
        strides(&self.cards)
    }

    /// Value at a full assignment of the scope (in scope order).
    pub fn value(&self, assignment: &[usize]) -> T {
        let idx = assignment
            .iter()
            .zip(self.strides())
            .map(|(a, s)| a * s)
            .sum::<usize>();
        self.table[idx]
    }

    pub fn product(&self, other: &Factor<T>) -> Factor<T> {
        if other.scope.is_empty() {
            let c = other.table[0];
            return Factor {
                scope: self.scope.clone(),
                cards: self.cards.clone(),
                table: self.table.iter().map(|&v| v * c).collect(),
            };
        }
        if self.scope.is_empty() {
            return other.product(self);
        }

        let mut scope = self.scope.clone();
        let mut cards = self.cards.clone();
        for (&v, &c) in other.scope.iter().zip(&other.cards) {
            if !scope.contains(&v) {
                scope.push(v);
                cards.push(c);
            }
        }
        let self_strides = self.strides();
        let other_strides = other.strides();
        let a_step: Vec<usize> = scope
            .iter()
            .map(|v| self.position(*v).map_or(0, |p| self_strides[p]))
            .collect();
        let b_step: Vec<usize> = scope
            .iter()
            .map(|v| other.position(*v).map_or(0, |p| other_strides[p]))
            .collect();

        let len: usize = cards.iter().product();
        let mut table = Vec::with_capacity(len);
        let mut counter = vec![0usize; scope.len()];
        let (mut ia, mut ib) = (0usize, 0usize);
        for _ in 0..len {
            table.push(self.table[ia] * other.table[ib]);
            for d in (0..scope.len()).rev() {
                counter[d] += 1;
                ia += a_step[d];
                ib += b_step[d];
                if counter[d] < cards[d] {
                    break;
                }
                ia -= a_step[d] * cards[d];
                ib -= b_step[d] * cards[d];
                counter[d] = 0;
            }
        }
        Factor {
            scope,
            cards,
            table,
        }
    }

    pub fn sum_out(&self, var: VarId) -> Factor<T> {
        let Some(p) = self.position(var) else {
            return self.clone();
        };
        let card = self.cards[p];
        let inner: usize = self.cards[p + 1..].iter().product();
        let outer: usize = self.cards[..p].iter().product();
        let mut table = vec![T::zero(); outer * inner];
        for o in 0..outer {
            for k in 0..card {
                let base = (o * card + k) * inner;
                let dst = &mut table[o * inner..(o + 1) * inner];
                for (d, &s) in dst.iter_mut().zip(&self.table[base..base + inner]) {
                    *d = *d + s;
                }
            }
        }
        let mut scope = self.scope.clone();
        let mut cards = self.cards.clone();
        scope.remove(p);
        cards.remove(p);
        Factor {
            scope,
            cards,
            table,
        }
    }

    /// Slices the factor at `var = value`, dropping `var` from the scope.
    pub fn reduce(&self, var: VarId, value: usize) -> Factor<T> {
        let Some(p) = self.position(var) else {
            return self.clone();
        };
        let card = self.cards[p];
        assert!(
            value < card,
            "value {value} out of range for variable {var}"
        );
        let inner: usize = self.cards[p + 1..].iter().product();
        let outer: usize = self.cards[..p].iter().product();
        let mut table = Vec::with_capacity(outer * inner);
        for o in 0..outer {
            let base = (o * card + value) * inner;
            table.extend_from_slice(&self.table[base..base + inner]);
        }
        let mut scope = self.scope.clone();
        let mut cards = self.cards.clone();
        scope.remove(p);
        cards.remove(p);
        Factor {
            scope,
            cards,
            table,
        }
    }

    /// Reorders the table so that its scope matches `order` (a permutation of the scope).
    pub fn permute(&self, order: &[VarId]) -> Result<Factor<T>> {
        if order.len() != self.scope.len() || order.iter().any(|v| self.position(*v).is_none()) {
            return Err(Error::ScopeMismatch(
                "permutation does not match factor scope".into(),
            ));
        }
        if order == self.scope.as_slice() {
            return Ok(self.clone());
        }
        let src_strides = self.strides();
        let step: Vec<usize> = order
            .iter()
            .map(|v| src_strides[self.position(*v).unwrap()])
            .collect();
        let cards: Vec<usize> = order
            .iter()
            .map(|v| self.cards[self.position(*v).unwrap()])
            .collect();
        let mut table = Vec::with_capacity(self.table.len());
        let mut counter = vec![0usize; order.len()];
        let mut idx = 0usize;
        for _ in 0..self.table.len() {
            table.push(self.table[idx]);
            for d in (0..order.len()).rev() {
                counter[d] += 1;
                idx += step[d];
                if counter[d] < cards[d] {
                    break;
                }
                idx -= step[d] * cards[d];
                counter[d] = 0;
            }
        }
        Ok(Factor {
            scope: order.to_vec(),
            cards,
            table,
        })
    }
}

pub(crate) fn strides(cards: &[usize]) -> Vec<usize> {
    let mut s = vec![1usize; cards.len()];
    for i in (0..cards.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * cards[i + 1];
    }
    s
}

fn card_map<T: Real>(factors: &[Factor<T>]) -> Result<HashMap<VarId, usize>> {
    let mut cards = HashMap::new();
    for f in factors {
        for (&v, &c) in f.scope.iter().zip(&f.cards) {
            if let Some(prev) = cards.insert(v, c) {
                if prev != c {
                    return Err(Error::ScopeMismatch(format!(
                        "variable {v} has cardinality {prev} and {c} in different factors"
                    )));
                }
            }
        }
    }
    Ok(cards)
}

/// Greedy min-fill ordering of `targets` over the interaction graph of `scopes`.
///
/// Ties are broken by fewest neighbours, then by smallest variable index.
pub fn min_fill_order(scopes: &[&[VarId]], targets: &[VarId]) -> Vec<VarId> {
    let mut adj: HashMap<VarId, BTreeSet<VarId>> = HashMap::new();
    for scope in scopes {
        for &a in scope.iter() {
            let entry = adj.entry(a).or_default();
            for &b in scope.iter() {
                if a != b {
                    entry.insert(b);
                }
            }
        }
    }
    let mut remaining: BTreeSet<VarId> = targets.iter().copied().collect();
    let mut order = Vec::with_capacity(remaining.len());
    while !remaining.is_empty() {
        let mut best: Option<(usize, usize, VarId)> = None;
        for &v in &remaining {
            let nbrs: Vec<VarId> = adj
                .get(&v)
                .map(|s| s.iter().copied().collect())
                .unwrap_or_default();
            let mut fill = 0;
            for (i, a) in nbrs.iter().enumerate() {
                for b in &nbrs[i + 1..] {
                    if !adj[a].contains(b) {
                        fill += 1;
                    }
                }
            }
            let key = (fill, nbrs.len(), v);
            if best.is_none_or(|b| key < b) {
                best = Some(key);
            }
        }
        let (_, _, v) = best.unwrap();
        let nbrs: Vec<VarId> = adj
            .remove(&v)
            .map(|s| s.into_iter().collect())
            .unwrap_or_default();
        for &a in &nbrs {
            let entry = adj.get_mut(&a).unwrap();
            entry.remove(&v);
            entry.extend(nbrs.iter().copied().filter(|&b| b != a));
        }
        remaining.remove(&v);
        order.push(v);
    }
    order
}

/// Sums the product of `factors` over every variable not in `keep`.
///
/// The result is a factor whose scope is exactly `keep`, in the given order.
pub fn eliminate<T: Real>(factors: Vec<Factor<T>>, keep: &[VarId]) -> Result<Factor<T>> {
    let cards = card_map(&factors)?;
    let targets: Vec<VarId> = {
        let mut t: Vec<VarId> = cards
            .keys()
            .copied()
            .filter(|v| !keep.contains(v))
            .collect();
        t.sort_unstable();
        t
    };
    let scopes: Vec<&[VarId]> = factors.iter().map(|f| f.scope()).collect();
    let order = min_fill_order(&scopes, &targets);
    eliminate_in_order(factors, keep, &order)
}

/// Variable elimination with an explicit elimination order.
///
/// `order` must list every variable that appears in `factors` but not in `keep`.
pub fn eliminate_in_order<T: Real>(
    factors: Vec<Factor<T>>,
    keep: &[VarId],
    order: &[VarId],
) -> Result<Factor<T>> {
    let cards = card_map(&factors)?;
    for k in keep {
        if !cards.contains_key(k) {
            return Err(Error::ScopeMismatch(format!(
                "kept variable {k} appears in no factor"
            )));
        }
    }
    for v in cards.keys() {
        if !keep.contains(v) && !order.contains(v) {
            return Err(Error::ScopeMismatch(format!(
                "variable {v} is neither kept nor eliminated"
            )));
        }
    }
    if order.iter().any(|v| keep.contains(v)) {
        return Err(Error::ScopeMismatch(
            "elimination order contains a kept variable".into(),
        ));
    }

    let mut pool = factors;
    for &var in order {
        let (with, without): (Vec<_>, Vec<_>) =
            pool.into_iter().partition(|f| f.scope.contains(&var));
        pool = without;
        let mut iter = with.into_iter();
        if let Some(first) = iter.next() {
            let prod = iter.fold(first, |acc, f| acc.product(&f));
            pool.push(prod.sum_out(var));
        }
    }

    let mut iter = pool.into_iter();
    let mut result = match iter.next() {
        Some(first) => iter.fold(first, |acc, f| acc.product(&f)),
        None => Factor::scalar(T::one()),
    };
    if result.scope.len() != keep.len() {
        for &k in keep {
            if !result.scope.contains(&k) {
                result = result.product(&Factor::unit(vec![k], vec![cards[&k]]));
            }
        }
    }
    result.permute(keep)
}
