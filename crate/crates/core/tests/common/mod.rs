#![allow(dead_code)]

pub mod st;

use beliefvar::{Dag, Network64, ParameterAssignment, Query, Variable};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random DAG in index order with α entries uniform on [lo, hi].
pub fn random_net(
    seed: u64,
    n: usize,
    max_card: usize,
    max_parents: usize,
    lo: f64,
    hi: f64,
) -> Network64 {
    let mut r = rng(seed);
    let mut vars = Vec::new();
    let mut parents = Vec::new();
    for v in 0..n {
        vars.push(Variable::with_card(format!("V{v}"), r.random_range(2..=max_card)).unwrap());
        let mut ps: Vec<usize> = (0..v).filter(|_| r.random_bool(0.5)).collect();
        while ps.len() > max_parents {
            ps.remove(r.random_range(0..ps.len()));
        }
        parents.push(ps);
    }
    let dag = Dag::new(vars, parents).unwrap();
    let tables = (0..n)
        .map(|v| {
            (0..dag.table_len(v))
                .map(|_| r.random_range(lo..hi))
                .collect()
        })
        .collect();
    Network64::from_alpha_tables(dag, tables).unwrap()
}

/// Random query with one or two hypothesis variables and up to `max_ev`
/// evidence variables, all distinct.
pub fn random_query(dag: &Dag, seed: u64, max_ev: usize) -> Query {
    let mut r = rng(seed);
    let mut order: Vec<usize> = (0..dag.len()).collect();
    for i in (1..order.len()).rev() {
        order.swap(i, r.random_range(0..=i));
    }
    let nh = if dag.len() > 2 {
        r.random_range(1..=2)
    } else {
        1
    };
    let ne = r.random_range(0..=max_ev.min(dag.len() - nh));
    let pick = |v: usize, r: &mut ChaCha8Rng| (v, r.random_range(0..dag.card(v)));
    let h = order[..nh].iter().map(|&v| pick(v, &mut r)).collect();
    let e = order[nh..nh + ne]
        .iter()
        .map(|&v| pick(v, &mut r))
        .collect();
    Query::new(dag, h, e).unwrap()
}

/// Σ over complete configurations consistent with `assignment` of Π θ.
pub fn brute_prob(
    dag: &Dag,
    params: &ParameterAssignment<f64>,
    assignment: &[(usize, usize)],
) -> f64 {
    let n = dag.len();
    let total: usize = dag.cards().iter().product();
    let mut x = vec![0usize; n];
    let mut sum = 0.0;
    for mut idx in 0..total {
        for v in (0..n).rev() {
            x[v] = idx % dag.card(v);
            idx /= dag.card(v);
        }
        if assignment.iter().any(|&(v, val)| x[v] != val) {
            continue;
        }
        let mut p = 1.0;
        for v in 0..n {
            let pa: Vec<usize> = dag.parents(v).iter().map(|&u| x[u]).collect();
            let config = dag.parent_config_index(v, &pa);
            p *= params.row(dag, v, config)[x[v]];
        }
        sum += p;
    }
    sum
}

pub fn brute_query(dag: &Dag, params: &ParameterAssignment<f64>, q: &Query) -> f64 {
    let mut he: Vec<(usize, usize)> = q.evidence().to_vec();
    for &(v, x) in q.hypothesis() {
        if let Some(&(_, y)) = he.iter().find(|(u, _)| *u == v) {
            if y != x {
                return 0.0;
            }
        } else {
            he.push((v, x));
        }
    }
    brute_prob(dag, params, &he) / brute_prob(dag, params, q.evidence())
}

/// Binary chain E → B → H with α entries uniform on [1, 10].
pub fn chain(seed: u64) -> Network64 {
    let mut r = rng(seed);
    let vars = ["E", "B", "H"].map(|n| Variable::with_card(n, 2).unwrap());
    let dag = Dag::new(vars.to_vec(), vec![vec![], vec![0], vec![1]]).unwrap();
    let tables = (0..3)
        .map(|v| {
            (0..dag.table_len(v))
                .map(|_| r.random_range(1.0..10.0))
                .collect()
        })
        .collect();
    Network64::from_alpha_tables(dag, tables).unwrap()
}

/// Single root variable with the given α.
pub fn root(alpha: Vec<f64>) -> Network64 {
    let dag = Dag::new(
        vec![Variable::with_card("A", alpha.len()).unwrap()],
        vec![vec![]],
    )
    .unwrap();
    Network64::from_alpha_tables(dag, vec![alpha]).unwrap()
}

pub fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
    (m, (v / n).sqrt())
}

/// Largest scaled discrepancy between the analytic gradient and central
/// differences over every free CPT coordinate: |a − d| / max(|a|, |d|, 1e-4).
pub fn gradient_check(net: &Network64, q: &Query) -> f64 {
    let dag = net.dag();
    let means = net.predictive_means();
    let (_, grad) = beliefvar::delta::query_gradient_at(dag, &means, q).unwrap();
    let base = means.tables().to_vec();
    let h = 1e-6;
    let eval = |tables: Vec<Vec<f64>>| {
        let p = ParameterAssignment::unnormalized(dag, tables).unwrap();
        beliefvar::evaluate_query(dag, &p, q).unwrap()
    };
    let mut worst: f64 = 0.0;
    for v in 0..dag.len() {
        for i in 0..base[v].len() {
            let mut up = base.clone();
            up[v][i] += h;
            let mut down = base.clone();
            down[v][i] -= h;
            let fd = (eval(up) - eval(down)) / (2.0 * h);
            let a = grad.table(v)[i];
            worst = worst.max((a - fd).abs() / a.abs().max(fd.abs()).max(1e-4));
        }
    }
    worst
}
