use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use beliefvar::continuous::StParams;
use beliefvar::delta::variance_v1;
use beliefvar::doubling::estimate_q2_v2;
use beliefvar::harness::{self, build_benchmark, Benchmark, ExperimentConfig, TimingCase};
use beliefvar::io::{load_network, network_to_string};
use beliefvar::oracle::{mc_estimates, OracleConfig};
use beliefvar::{evaluate_query, full_bundle, CompleteData, Network64, Query};

#[derive(Parser)]
#[command(
    name = "beliefvar",
    version,
    about = "Means and variances of Bayesian network queries"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct QueryArgs {
    /// Network JSON file.
    net: PathBuf,
    /// Hypothesis, e.g. `A=a1` or `A=a1,B=b0`.
    #[arg(long, short = 'H')]
    hypothesis: String,
    /// Evidence, e.g. `B=b1,C=c2`; empty for none.
    #[arg(long, short = 'e', default_value = "")]
    evidence: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Doubling,
    Delta,
}

#[derive(Subcommand)]
enum Command {
    /// Check that a network file is well formed.
    Validate { net: PathBuf },
    /// Add complete-data counts to every α and print the updated network.
    Update {
        net: PathBuf,
        data: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Plug-in mean q̂1.
    Query(QueryArgs),
    /// Variance estimate by network doubling (q̂2, v̂2) or the delta method (v̂1).
    Variance {
        #[command(flatten)]
        query: QueryArgs,
        #[arg(long, value_enum, default_value = "doubling")]
        method: Method,
    },
    /// All eight estimates plus μ_r and σ_rr as one CSV row.
    Bundle {
        #[command(flatten)]
        query: QueryArgs,
        #[arg(long)]
        header: bool,
    },
    /// Monte-Carlo mean and variance of the query.
    Oracle {
        #[command(flatten)]
        query: QueryArgs,
        #[arg(short = 'k', long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Student-t density St₁(η, ω², ν) at a point.
    Stdensity {
        #[arg(long)]
        nu: f64,
        #[arg(long, allow_hyphen_values = true)]
        eta: f64,
        #[arg(long)]
        omega2: f64,
        #[arg(long, allow_hyphen_values = true)]
        at: f64,
    },
    /// Error tables for the benchmark networks.
    Experiment {
        #[arg(long, value_delimiter = ',', default_value = "nb2,nb4,diamond")]
        bench: Vec<String>,
        #[arg(long, value_delimiter = ',', default_value = "20,50,100,200,500")]
        m: Vec<f64>,
        #[arg(short = 'k', long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
        /// Fill t_delta and t_double; the output is then no longer reproducible.
        #[arg(long)]
        record_times: bool,
        /// Plain sample mean for q̂0 instead of the control-variate mean.
        #[arg(long)]
        plain_oracle: bool,
    },
    /// Delta versus doubling timing ratios.
    Bench {
        /// Benchmark names, or `random` for a 37-variable random network.
        #[arg(long, value_delimiter = ',', default_value = "nb4,random")]
        nets: Vec<String>,
        #[arg(long, default_value_t = 20.0)]
        m: f64,
        #[arg(long, default_value_t = 5)]
        repeats: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

fn load(path: &PathBuf) -> Result<Network64> {
    load_network(path).with_context(|| format!("loading {}", path.display()))
}

fn load_query(args: &QueryArgs) -> Result<(Network64, Query)> {
    let net = load(&args.net)?;
    let q = Query::parse(net.dag(), &args.hypothesis, &args.evidence)?;
    Ok((net, q))
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Validate { net } => {
            let n = load(&net)?;
            println!("ok: {} variables", n.len());
        }
        Command::Update {
            net,
            data,
            output: out,
        } => {
            let n = load(&net)?;
            let file = File::open(&data).with_context(|| format!("opening {}", data.display()))?;
            let counts = CompleteData::from_csv(n.dag(), file)?;
            let updated = n.posterior_update(&counts)?;
            writeln!(output(&out)?, "{}", network_to_string(&updated))?;
        }
        Command::Query(args) => {
            let (net, q) = load_query(&args)?;
            println!(
                "{}",
                evaluate_query(net.dag(), &net.predictive_means(), &q)?
            );
        }
        Command::Variance { query, method } => {
            let (net, q) = load_query(&query)?;
            match method {
                Method::Doubling => {
                    let est = estimate_q2_v2(&net, &q)?;
                    println!("q2={} v2={}", est.q2, est.v2);
                }
                Method::Delta => println!("v1={}", variance_v1(&net, &q)?),
            }
        }
        Command::Bundle { query, header } => {
            let (net, q) = load_query(&query)?;
            let b = full_bundle(&net, &q)?;
            if header {
                println!("q1,q2,q3,q4,v1,v2,v3,v4,mu_r,sigma_rr");
            }
            let vals = [
                b.q1, b.q2, b.q3, b.q4, b.v1, b.v2, b.v3, b.v4, b.mu_r, b.sigma_rr,
            ];
            println!("{}", vals.map(|v| v.to_string()).join(","));
        }
        Command::Oracle {
            query,
            samples,
            seed,
            threads,
        } => {
            let (net, q) = load_query(&query)?;
            let cfg = OracleConfig {
                samples,
                seed,
                threads,
                ..OracleConfig::default()
            };
            let r = mc_estimates(&net, &q, &cfg)?;
            println!(
                "q0={} v0={} se_q0={} se_v0={} k={}",
                r.q0, r.v0, r.se_mean, r.se_var, r.k_effective
            );
        }
        Command::Stdensity {
            nu,
            eta,
            omega2,
            at,
        } => {
            let p = StParams::univariate(eta, omega2, nu)?;
            println!("{}", p.density(&[at])?);
        }
        Command::Experiment {
            bench,
            m,
            samples,
            seed,
            output: out,
            threads,
            record_times,
            plain_oracle,
        } => {
            let benches = bench
                .iter()
                .map(|b| b.parse::<Benchmark>())
                .collect::<Result<Vec<_>, _>>()?;
            for &mm in &m {
                if let Some(w) = harness::oracle_budget_warning(samples, mm) {
                    eprintln!("warning: {w}");
                }
            }
            let cfg = ExperimentConfig {
                m_grid: m,
                samples,
                seed,
                threads,
                record_times,
                control_variate: !plain_oracle,
            };
            let rows = harness::run_error_tables(&benches, &cfg)?;
            harness::write_csv(output(&out)?, &rows)?;
        }
        Command::Bench {
            nets,
            m,
            repeats,
            seed,
        } => {
            let mut cases = Vec::new();
            for name in &nets {
                if name == "random" {
                    cases.push(harness::random_timing_case(seed)?);
                } else {
                    let bench: Benchmark = name.parse()?;
                    let (net, queries) = build_benchmark(bench, m)?;
                    cases.push(TimingCase {
                        name: bench.name().into(),
                        net,
                        queries,
                    });
                }
            }
            if cases.is_empty() {
                bail!("no networks given");
            }
            println!("net,queries,ratio_doubling_over_delta,faster");
            for row in harness::run_timing_bench(&cases, repeats)? {
                println!(
                    "{},{},{:.4},{}",
                    row.name, row.queries, row.ratio, row.faster
                );
            }
        }
    }
    Ok(())
}
