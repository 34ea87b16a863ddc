//! Benchmarks, error tables and timing runs.
//!
//! Each benchmark network has a fixed table of posterior means, shipped as a
//! JSON fixture, and is turned into a Dirichlet network for any effective
//! sample size m through the BDe construction. For every (m, query) cell the
//! harness runs all estimators plus the Monte-Carlo oracle and reports scaled
//! errors against the oracle.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use rand::seq::index::sample as sample_indices;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::adjustments::full_bundle_with;
use crate::delta::variance_v1;
use crate::doubling::DoubledNetwork;
use crate::error::{Error, Result};
use crate::inference::Query;
use crate::io::network_from_str;
use crate::network::{bde_prior, Dag, Network, Variable};
use crate::oracle::{
    mc_estimates, mc_estimates_controlled_with, sample_parameters_seeded, ControlVariates,
    OracleConfig, CONTROL_ORDER,
};

pub const CSV_VERSION_LINE: &str = "# beliefvar-results v1";

pub const CSV_COLUMNS: [&str; 23] = [
    "bench", "m", "query", "q0", "q1", "q2", "q3", "q4", "v0", "v1", "v2", "v3", "v4", "se_q0",
    "se_v0", "eq1", "eq2", "eq3", "eq4", "ev1", "ev2", "ev3", "ev4",
];

const NB2_FIXTURE: &str = include_str!("../fixtures/nb2.json");
const NB4_FIXTURE: &str = include_str!("../fixtures/nb4.json");
const DIAMOND_FIXTURE: &str = include_str!("../fixtures/diamond.json");

/// Seed behind each fixture's Dirichlet(2, …, 2) draw of mean rows.
const FIXTURE_SEED: u64 = 20_250_101;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Benchmark {
    Nb2,
    Nb4,
    Diamond,
}

impl Benchmark {
    pub const ALL: [Benchmark; 3] = [Benchmark::Nb2, Benchmark::Nb4, Benchmark::Diamond];

    pub fn name(self) -> &'static str {
        match self {
            Benchmark::Nb2 => "nb2",
            Benchmark::Nb4 => "nb4",
            Benchmark::Diamond => "diamond",
        }
    }

    fn index(self) -> u64 {
        match self {
            Benchmark::Nb2 => 0,
            Benchmark::Nb4 => 1,
            Benchmark::Diamond => 2,
        }
    }

    /// The network structure, without parameters.
    pub fn dag(self) -> Dag {
        match self {
            Benchmark::Nb2 => naive_bayes_dag(2),
            Benchmark::Nb4 => naive_bayes_dag(4),
            Benchmark::Diamond => {
                let vars = ["A", "B", "C", "D"]
                    .map(|n| Variable::with_card(n, 2).expect("binary variable"));
                Dag::new(vars.to_vec(), vec![vec![], vec![0], vec![0], vec![1, 2]])
                    .expect("diamond is acyclic")
            }
        }
    }

    /// Fixed mean CPTs, as a network whose α rows are the means.
    pub fn mean_network(self) -> Network<f64> {
        let text = match self {
            Benchmark::Nb2 => NB2_FIXTURE,
            Benchmark::Nb4 => NB4_FIXTURE,
            Benchmark::Diamond => DIAMOND_FIXTURE,
        };
        network_from_str(text).expect("bundled fixture parses")
    }

    pub fn queries(self) -> Vec<Query> {
        let dag = self.dag();
        match self {
            Benchmark::Nb2 | Benchmark::Nb4 => {
                let children: Vec<usize> = (1..dag.len()).collect();
                value_combinations(&dag, &children)
                    .into_iter()
                    .map(|ev| Query::new(&dag, vec![(0, 0)], ev).expect("valid query"))
                    .collect()
            }
            Benchmark::Diamond => {
                let mut out = Vec::with_capacity(108);
                for h in 0..dag.len() {
                    let others: Vec<usize> = (0..dag.len()).filter(|&v| v != h).collect();
                    for mask in 0..(1usize << others.len()) {
                        let subset: Vec<usize> = others
                            .iter()
                            .enumerate()
                            .filter(|(i, _)| mask >> i & 1 == 1)
                            .map(|(_, &v)| v)
                            .collect();
                        for ev in value_combinations(&dag, &subset) {
                            out.push(Query::new(&dag, vec![(h, 0)], ev).expect("valid query"));
                        }
                    }
                }
                out
            }
        }
    }
}

impl fmt::Display for Benchmark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Benchmark {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "").as_str() {
            "nb2" => Ok(Benchmark::Nb2),
            "nb4" => Ok(Benchmark::Nb4),
            "diamond" => Ok(Benchmark::Diamond),
            _ => Err(Error::UnknownBenchmark(s.to_string())),
        }
    }
}

fn naive_bayes_dag(children: usize) -> Dag {
    let mut vars = vec![Variable::with_card("H", 2).expect("binary variable")];
    let mut parents = vec![vec![]];
    for i in 1..=children {
        vars.push(Variable::with_card(format!("E{i}"), 2).expect("binary variable"));
        parents.push(vec![0]);
    }
    Dag::new(vars, parents).expect("naive Bayes is acyclic")
}

/// Every joint value of `vars`, first variable slowest.
fn value_combinations(dag: &Dag, vars: &[usize]) -> Vec<Vec<(usize, usize)>> {
    let total: usize = vars.iter().map(|&v| dag.card(v)).product();
    (0..total)
        .map(|mut idx| {
            let mut values = vec![0; vars.len()];
            for (slot, &v) in values.iter_mut().zip(vars).rev() {
                *slot = idx % dag.card(v);
                idx /= dag.card(v);
            }
            vars.iter().copied().zip(values).collect()
        })
        .collect()
}

/// Seeded Dirichlet(2, …, 2) draw of mean rows; the fixtures hold its output.
pub fn draw_mean_network(bench: Benchmark) -> Network<f64> {
    let dag = bench.dag();
    let tables = (0..dag.len())
        .map(|v| vec![2.0; dag.table_len(v)])
        .collect();
    let prior = Network::from_alpha_tables(dag.clone(), tables).expect("positive α");
    let means = sample_parameters_seeded(&prior, FIXTURE_SEED, bench.index());
    Network::from_alpha_tables(dag, means.into_tables()).expect("Dirichlet draws are positive")
}

/// BDe network with effective sample size `m` and the benchmark's queries.
pub fn build_benchmark(bench: Benchmark, m: f64) -> Result<(Network<f64>, Vec<Query>)> {
    let means = bench.mean_network();
    let net = bde_prior(means.dag(), &means.predictive_means(), m)?;
    Ok((net, bench.queries()))
}

pub fn build_benchmark_by_name(name: &str, m: f64) -> Result<(Network<f64>, Vec<Query>)> {
    build_benchmark(name.parse()?, m)
}

/// Oracle seed for one (benchmark, m, query) cell.
pub fn cell_seed(base: u64, bench: Benchmark, m: f64, query: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(base);
    rng.set_stream(bench.index() << 32 | query as u64);
    rng.set_word_pos(u128::from(m.to_bits() >> 12) << 4);
    rng.random()
}

/// One (m, query) cell of an error table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResultRow {
    pub bench: String,
    pub m: f64,
    pub query: usize,
    pub q: [f64; 5],
    pub v: [f64; 5],
    pub se_q0: f64,
    pub se_v0: f64,
    /// m(q̂ⱼ − q̂0), j = 1..4.
    pub eq: [f64; 4],
    /// m(v̂ⱼ − v̂0)/v̂0, j = 1..4.
    pub ev: [f64; 4],
    pub t_delta: f64,
    pub t_double: f64,
    pub v3_iterations: usize,
    pub v4_iterations: usize,
    pub v3_residual: f64,
    pub v4_residual: f64,
    pub converged: bool,
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub m_grid: Vec<f64>,
    pub samples: usize,
    pub seed: u64,
    /// Worker threads for the whole run; `None` uses the global pool.
    pub threads: Option<usize>,
    pub record_times: bool,
    /// Reduce the noise in q̂0 with exact-mean control variates (see
    /// [`crate::oracle::mc_estimates_controlled`]); v̂0 is unaffected.
    pub control_variate: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            m_grid: vec![20.0, 50.0, 100.0, 200.0, 500.0],
            samples: 100_000,
            seed: 7,
            threads: None,
            record_times: false,
            control_variate: true,
        }
    }
}

/// Warning text when k is too small for the oracle to resolve errors at m.
pub fn oracle_budget_warning(samples: usize, m: f64) -> Option<String> {
    ((samples as f64) < m * m).then(|| {
        format!("oracle sample count {samples} is below m² = {} for m = {m}; variance errors may be noise", m * m)
    })
}

/// A benchmark network with the derived structures every cell reuses.
#[derive(Clone, Debug)]
pub struct PreparedNetwork {
    pub net: Network<f64>,
    pub doubled: DoubledNetwork<f64>,
    pub controls: ControlVariates<f64>,
}

impl PreparedNetwork {
    pub fn new(net: Network<f64>) -> Result<Self> {
        let doubled = DoubledNetwork::new(&net);
        let controls = ControlVariates::new(&net, CONTROL_ORDER)?;
        Ok(PreparedNetwork {
            net,
            doubled,
            controls,
        })
    }
}

/// Every estimator and the oracle for one cell.
pub fn run_cell(
    bench: Benchmark,
    prepared: &PreparedNetwork,
    m: f64,
    query_id: usize,
    q: &Query,
    cfg: &ExperimentConfig,
) -> Result<ResultRow> {
    let (net, doubled) = (&prepared.net, &prepared.doubled);
    let bundle = full_bundle_with(net, doubled, q)?;
    let oracle_cfg = OracleConfig {
        samples: cfg.samples,
        seed: cell_seed(cfg.seed, bench, m, query_id),
        ..OracleConfig::default()
    };
    let oracle = if cfg.control_variate {
        mc_estimates_controlled_with(net, &prepared.controls, q, &oracle_cfg)?
    } else {
        mc_estimates(net, q, &oracle_cfg)?
    };
    if !(oracle.v0 > 0.0) {
        return Err(Error::DegenerateQuery(format!(
            "query {query_id} has zero oracle variance"
        )));
    }

    let (mut t_delta, mut t_double) = (0.0, 0.0);
    if cfg.record_times {
        let start = Instant::now();
        variance_v1(net, q)?;
        t_delta = start.elapsed().as_secs_f64();
        let start = Instant::now();
        doubled.estimate(q)?;
        t_double = start.elapsed().as_secs_f64();
    }

    let b = bundle;
    let q_all = [oracle.q0, b.q1, b.q2, b.q3, b.q4];
    let v_all = [oracle.v0, b.v1, b.v2, b.v3, b.v4];
    let eq = std::array::from_fn(|j| m * (q_all[j + 1] - oracle.q0));
    let ev = std::array::from_fn(|j| m * (v_all[j + 1] - oracle.v0) / oracle.v0);
    Ok(ResultRow {
        bench: bench.name().to_string(),
        m,
        query: query_id,
        q: q_all,
        v: v_all,
        se_q0: oracle.se_mean,
        se_v0: oracle.se_var,
        eq,
        ev,
        t_delta,
        t_double,
        v3_iterations: b.diagnostics.v3_iterations,
        v4_iterations: b.diagnostics.v4_iterations,
        v3_residual: b.diagnostics.v3_residual,
        v4_residual: b.diagnostics.v4_residual,
        converged: b.diagnostics.v3_converged && b.diagnostics.v4_converged,
    })
}

/// One row per (m, query), ordered by m then query id.
pub fn run_error_table(bench: Benchmark, cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    run_error_tables(&[bench], cfg)
}

/// Error tables for several benchmarks, concatenated in the given order.
pub fn run_error_tables(benches: &[Benchmark], cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    if cfg.samples < 2 {
        return Err(Error::InvalidConfig(
            "oracle needs at least two samples".into(),
        ));
    }
    if cfg.m_grid.iter().any(|&m| !(m > 0.0) || !m.is_finite()) {
        return Err(Error::InvalidConfig("every m must be positive".into()));
    }
    let mut cells = Vec::new();
    for &bench in benches {
        for &m in &cfg.m_grid {
            let (net, queries) = build_benchmark(bench, m)?;
            let shared = std::sync::Arc::new(PreparedNetwork::new(net)?);
            for (id, q) in queries.into_iter().enumerate() {
                cells.push((bench, m, id, q, shared.clone()));
            }
        }
    }
    let run = || {
        cells
            .par_iter()
            .map(|(bench, m, id, q, shared)| run_cell(*bench, shared, *m, *id, q, cfg))
            .collect::<Result<Vec<_>>>()
    };
    match cfg.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidConfig(e.to_string()))?
            .install(run),
        None => run(),
    }
}

/// Writes the versioned CSV. Floats use Rust's shortest round-trip format.
pub fn write_csv<W: Write>(mut out: W, rows: &[ResultRow]) -> Result<()> {
    let io_err = |e: std::io::Error| Error::Parse(e.to_string());
    writeln!(out, "{CSV_VERSION_LINE}").map_err(io_err)?;
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| Error::Parse(e.to_string());
    let mut header: Vec<&str> = CSV_COLUMNS.to_vec();
    header.extend(["t_delta", "t_double"]);
    w.write_record(&header).map_err(csv_err)?;
    for r in rows {
        let mut rec = vec![r.bench.clone(), r.m.to_string(), r.query.to_string()];
        rec.extend(r.q.iter().chain(&r.v).map(f64::to_string));
        rec.push(r.se_q0.to_string());
        rec.push(r.se_v0.to_string());
        rec.extend(r.eq.iter().chain(&r.ev).map(f64::to_string));
        rec.push(r.t_delta.to_string());
        rec.push(r.t_double.to_string());
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush().map_err(io_err)
}

pub fn csv_string(rows: &[ResultRow]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(&mut buf, rows)?;
    String::from_utf8(buf).map_err(|e| Error::Parse(e.to_string()))
}

/// Least-squares slope of y on x.
pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len();
    if n < 2 || n != ys.len() {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Some(sxy / sxx)
}

/// Slope of log error against log m, ignoring points whose error is under
/// `3 · noise`. `None` when fewer than two points survive.
pub fn fit_slope(points: &[(f64, f64, f64)]) -> Option<f64> {
    let kept: Vec<(f64, f64)> = points
        .iter()
        .filter(|(_, err, noise)| err.abs() >= 3.0 * noise && err.abs() > 0.0)
        .map(|&(m, err, _)| (m.ln(), err.abs().ln()))
        .collect();
    let (xs, ys): (Vec<f64>, Vec<f64>) = kept.into_iter().unzip();
    least_squares_slope(&xs, &ys)
}

/// Fitted convergence slopes for one query, indexed by estimator 1..4.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateFit {
    pub bench: String,
    pub query: usize,
    pub mean_slopes: [Option<f64>; 4],
    pub variance_slopes: [Option<f64>; 4],
}

/// Groups rows by (bench, query) and fits one slope per estimator.
pub fn fit_convergence_rates(rows: &[ResultRow]) -> Result<Vec<RateFit>> {
    let mut groups: Vec<((String, usize), Vec<&ResultRow>)> = Vec::new();
    for r in rows {
        let key = (r.bench.clone(), r.query);
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, g)) => g.push(r),
            None => groups.push((key, vec![r])),
        }
    }
    groups
        .into_iter()
        .map(|((bench, query), g)| {
            let mut ms: Vec<f64> = g.iter().map(|r| r.m).collect();
            ms.sort_by(f64::total_cmp);
            ms.dedup();
            if ms.len() < 3 {
                return Err(Error::InsufficientData(format!(
                    "{bench} query {query} has {} values of m, need at least 3",
                    ms.len()
                )));
            }
            let mean_slopes = std::array::from_fn(|j| {
                let pts: Vec<_> = g
                    .iter()
                    .map(|r| (r.m, r.q[j + 1] - r.q[0], r.se_q0))
                    .collect();
                fit_slope(&pts)
            });
            let variance_slopes = std::array::from_fn(|j| {
                let pts: Vec<_> = g
                    .iter()
                    .map(|r| (r.m, (r.v[j + 1] - r.v[0]) / r.v[0], r.se_v0 / r.v[0]))
                    .collect();
                fit_slope(&pts)
            });
            Ok(RateFit {
                bench,
                query,
                mean_slopes,
                variance_slopes,
            })
        })
        .collect()
}

/// A network and the queries to time on it.
#[derive(Clone, Debug)]
pub struct TimingCase {
    pub name: String,
    pub net: Network<f64>,
    pub queries: Vec<Query>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TimingRow {
    pub name: String,
    pub queries: usize,
    /// Doubling total over delta total; below 1 means doubling was faster.
    pub ratio: f64,
    pub faster: &'static str,
}

/// Minimum-over-repeats totals for delta and doubling on each case. Doubling
/// is charged for building the doubled network once per batch.
pub fn run_timing_bench(cases: &[TimingCase], repeats: usize) -> Result<Vec<TimingRow>> {
    let repeats = repeats.max(1);
    let mut out = Vec::with_capacity(cases.len());
    for case in cases {
        if case.queries.is_empty() {
            continue;
        }
        let (mut best_delta, mut best_double) = (f64::INFINITY, f64::INFINITY);
        for _ in 0..repeats {
            let start = Instant::now();
            for q in &case.queries {
                std::hint::black_box(variance_v1(&case.net, q)?);
            }
            best_delta = best_delta.min(start.elapsed().as_secs_f64());

            let start = Instant::now();
            let doubled = DoubledNetwork::new(&case.net);
            for q in &case.queries {
                std::hint::black_box(doubled.estimate(q)?);
            }
            best_double = best_double.min(start.elapsed().as_secs_f64());
        }
        let ratio = best_double / best_delta;
        out.push(TimingRow {
            name: case.name.clone(),
            queries: case.queries.len(),
            ratio,
            faster: if ratio < 1.0 { "doubling" } else { "delta" },
        });
    }
    Ok(out)
}

/// Shape of a random test network.
#[derive(Clone, Copy, Debug)]
pub struct RandomNetworkSpec {
    pub variables: usize,
    pub max_parents: usize,
    pub min_card: usize,
    pub max_card: usize,
    /// Effective sample size per variable.
    pub m: f64,
}

impl Default for RandomNetworkSpec {
    fn default() -> Self {
        RandomNetworkSpec {
            variables: 37,
            max_parents: 4,
            min_card: 2,
            max_card: 4,
            m: 50.0,
        }
    }
}

/// Random DAG over a fixed variable order; each variable picks up to
/// `max_parents` parents among the previous eight, and every row gets
/// Dirichlet(2)-drawn means scaled to m / rows.
pub fn random_network(spec: &RandomNetworkSpec, seed: u64) -> Result<Network<f64>> {
    if spec.variables == 0 || spec.min_card < 2 || spec.max_card < spec.min_card || !(spec.m > 0.0)
    {
        return Err(Error::InvalidConfig("bad random network shape".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut vars = Vec::with_capacity(spec.variables);
    let mut parents = Vec::with_capacity(spec.variables);
    for v in 0..spec.variables {
        let card = rng.random_range(spec.min_card..=spec.max_card);
        vars.push(Variable::with_card(format!("X{v}"), card)?);
        let window = v.min(8);
        let k = rng.random_range(0..=spec.max_parents.min(window));
        let mut ps: Vec<usize> = sample_indices(&mut rng, window, k)
            .into_iter()
            .map(|i| v - 1 - i)
            .collect();
        ps.sort_unstable();
        parents.push(ps);
    }
    let dag = Dag::new(vars, parents)?;
    let flat = Network::from_alpha_tables(
        dag.clone(),
        (0..dag.len())
            .map(|v| vec![2.0; dag.table_len(v)])
            .collect(),
    )?;
    let means = sample_parameters_seeded(&flat, seed, 0);
    let tables = (0..dag.len())
        .map(|v| {
            let per_row = spec.m / dag.row_count(v) as f64;
            means.table(v).iter().map(|p| p * per_row).collect()
        })
        .collect();
    Network::from_alpha_tables(dag, tables)
}

/// `count` queries with `hypotheses` hypothesis and `evidence` evidence
/// variables, all distinct within a query and valued uniformly at random.
pub fn random_queries(
    dag: &Dag,
    count: usize,
    hypotheses: usize,
    evidence: usize,
    seed: u64,
) -> Result<Vec<Query>> {
    if hypotheses == 0 || hypotheses + evidence > dag.len() {
        return Err(Error::InvalidConfig(
            "query does not fit in the network".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let picked = sample_indices(&mut rng, dag.len(), hypotheses + evidence).into_vec();
            let mut assign = |vars: &[usize]| -> Vec<(usize, usize)> {
                vars.iter()
                    .map(|&v| (v, rng.random_range(0..dag.card(v))))
                    .collect()
            };
            let h = assign(&picked[..hypotheses]);
            let e = assign(&picked[hypotheses..]);
            Query::new(dag, h, e)
        })
        .collect()
}

/// 100 queries with 3 hypothesis and 5 evidence variables on a default
/// random network.
pub fn random_timing_case(seed: u64) -> Result<TimingCase> {
    let net = random_network(&RandomNetworkSpec::default(), seed)?;
    let queries = random_queries(net.dag(), 100, 3, 5, seed)?;
    Ok(TimingCase {
        name: "random".into(),
        net,
        queries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn query_counts() {
        assert_eq!(Benchmark::Nb2.queries().len(), 4);
        assert_eq!(Benchmark::Nb4.queries().len(), 16);
        assert_eq!(Benchmark::Diamond.queries().len(), 108);
    }

    #[test]
    fn names_round_trip() {
        for b in Benchmark::ALL {
            assert_eq!(b.name().parse::<Benchmark>().unwrap(), b);
        }
        assert_eq!("NB-4".parse::<Benchmark>().unwrap(), Benchmark::Nb4);
        assert!(matches!(
            "alarm".parse::<Benchmark>(),
            Err(Error::UnknownBenchmark(_))
        ));
    }

    #[test]
    fn slopes_of_power_laws() {
        let pts: Vec<_> = [20.0, 50.0, 100.0, 200.0, 500.0]
            .iter()
            .map(|&m: &f64| (m, 3.0 / m, 0.0))
            .collect();
        assert!((fit_slope(&pts).unwrap() + 1.0).abs() < 1e-12);
        let masked: Vec<_> = pts.iter().map(|&(m, e, _)| (m, e, 1.0)).collect();
        assert_eq!(fit_slope(&masked), None);
    }

    #[test]
    fn cell_seeds_differ() {
        let a = cell_seed(7, Benchmark::Nb2, 20.0, 0);
        assert_eq!(a, cell_seed(7, Benchmark::Nb2, 20.0, 0));
        assert_ne!(a, cell_seed(7, Benchmark::Nb2, 50.0, 0));
        assert_ne!(a, cell_seed(7, Benchmark::Nb2, 20.0, 1));
        assert_ne!(a, cell_seed(7, Benchmark::Nb4, 20.0, 0));
    }
}
