//! Monte-Carlo ground truth for query means and variances.
//!
//! Sample `i` draws every CPT row from its Dirichlet posterior using a ChaCha
//! stream keyed by `(seed, i)`, so the sampled values do not depend on how the
//! work is chunked or how many threads run it. Per-sample values are gathered
//! in index order before any reduction, which makes the summary statistics
//! bit-reproducible as well.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use rayon::prelude::*;

use crate::doubling::ReplicatedNetwork;
use crate::error::{Error, Result};
use crate::inference::{query_terms, ModelView, ParameterAssignment, Query};
use crate::network::Network;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleConfig {
    pub samples: usize,
    pub seed: u64,
    pub chunk_size: usize,
    /// Worker threads; `None` uses the global rayon pool.
    pub threads: Option<usize>,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            samples: 100_000,
            seed: 42,
            chunk_size: 4096,
            threads: None,
        }
    }
}

impl OracleConfig {
    pub fn new(samples: usize, seed: u64) -> Self {
        OracleConfig {
            samples,
            seed,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples < 2 {
            return Err(Error::InvalidConfig(
                "oracle needs at least two samples".into(),
            ));
        }
        if self.chunk_size == 0 {
            return Err(Error::InvalidConfig("chunk size must be positive".into()));
        }
        if self.threads == Some(0) {
            return Err(Error::InvalidConfig("thread count must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleResult {
    pub q0: f64,
    pub v0: f64,
    pub se_mean: f64,
    pub se_var: f64,
    pub k_effective: usize,
}

/// RNG for sample `index` under `seed`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Draws every CPT row independently from its Dirichlet distribution.
pub fn sample_parameters<T: Real, R: rand::Rng + ?Sized>(
    net: &Network<T>,
    rng: &mut R,
) -> ParameterAssignment<T> {
    let tables = (0..net.len())
        .map(|v| {
            let mut table = Vec::with_capacity(net.dag().table_len(v));
            for row in net.rows(v) {
                table.extend(sample_dirichlet(row.alpha(), rng));
            }
            table
        })
        .collect();
    ParameterAssignment::from_tables_unchecked(tables)
}

fn sample_dirichlet<T: Real, R: rand::Rng + ?Sized>(alpha: &[T], rng: &mut R) -> Vec<T> {
    loop {
        let draws: Vec<f64> = alpha
            .iter()
            .map(|a| {
                Gamma::new(a.as_f64(), 1.0)
                    .expect("positive shape")
                    .sample(rng)
            })
            .collect();
        let total: f64 = draws.iter().sum();
        // all-zero draws only happen through underflow at tiny shapes
        if total > 0.0 && total.is_finite() {
            return draws.into_iter().map(|g| T::lit(g / total)).collect();
        }
    }
}

/// Deterministic parameter draw number `index` for `seed`.
pub fn sample_parameters_seeded<T: Real>(
    net: &Network<T>,
    seed: u64,
    index: u64,
) -> ParameterAssignment<T> {
    sample_parameters(net, &mut sample_rng(seed, index))
}

/// Evaluates `f` on `cfg.samples` posterior parameter draws, in index order.
///
/// Draws for which `f` returns `None` are dropped.
pub fn map_samples<T, U, F>(net: &Network<T>, cfg: &OracleConfig, f: F) -> Result<Vec<U>>
where
    T: Real,
    U: Send,
    F: Fn(&ParameterAssignment<T>) -> Option<U> + Sync,
{
    cfg.validate()?;
    let chunks: Vec<(usize, usize)> = (0..cfg.samples)
        .step_by(cfg.chunk_size)
        .map(|start| (start, (start + cfg.chunk_size).min(cfg.samples)))
        .collect();
    let run = || -> Vec<Vec<U>> {
        chunks
            .par_iter()
            .map(|&(start, end)| {
                (start..end)
                    .filter_map(|i| f(&sample_parameters_seeded(net, cfg.seed, i as u64)))
                    .collect()
            })
            .collect()
    };
    let per_chunk = match cfg.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidConfig(e.to_string()))?
            .install(run),
        None => run(),
    };
    Ok(per_chunk.into_iter().flatten().collect())
}

/// Sample mean, variance (divisor k − 1) and their standard errors.
pub fn summarize(values: &[f64]) -> Result<OracleResult> {
    let k = values.len();
    if k < 2 {
        return Err(Error::InvalidConfig(format!("only {k} usable samples")));
    }
    let kf = k as f64;
    let mean = values.iter().sum::<f64>() / kf;
    let (mut m2, mut m4) = (0.0, 0.0);
    for &x in values {
        let d = x - mean;
        let d2 = d * d;
        m2 += d2;
        m4 += d2 * d2;
    }
    let var = m2 / (kf - 1.0);
    let central2 = m2 / kf;
    let central4 = m4 / kf;
    Ok(OracleResult {
        q0: mean,
        v0: var,
        se_mean: (var / kf).sqrt(),
        se_var: ((central4 - central2 * central2).max(0.0) / kf).sqrt(),
        k_effective: k,
    })
}

/// q̂0 and v̂0: Monte-Carlo mean and variance of q(Θ) under the posterior.
pub fn mc_estimates<T: Real>(
    net: &Network<T>,
    q: &Query,
    cfg: &OracleConfig,
) -> Result<OracleResult> {
    let values = map_samples(net, cfg, |params| {
        let (num, den) = query_terms(&ModelView::new(net.dag(), params), q);
        (den > T::zero()).then(|| (num / den).as_f64())
    })?;
    summarize(&values)
}

/// Largest replicated table [`ControlVariates::new`] will build.
pub const MAX_REPLICATED_TABLE: usize = 1 << 16;

/// Default upper bound on the Taylor order of the control variates.
pub const CONTROL_ORDER: usize = 8;

/// Seed offset of the pilot run that fits the control coefficients.
const PILOT_SEED_OFFSET: u64 = 0x9e37_79b9_7f4a_7c15;

/// Replicated network backing the control variates of
/// [`mc_estimates_controlled_with`]; build once per network.
#[derive(Clone, Debug)]
pub struct ControlVariates<T> {
    order: usize,
    replicated: Option<ReplicatedNetwork<T>>,
}

impl<T: Real> ControlVariates<T> {
    /// Uses the largest order up to `max_order` whose replicated tables fit
    /// in [`MAX_REPLICATED_TABLE`] entries; order 1 needs no tables.
    pub fn new(net: &Network<T>, max_order: usize) -> Result<Self> {
        let mut order = max_order;
        while order >= 2 {
            match ReplicatedNetwork::new(net, order, MAX_REPLICATED_TABLE) {
                Ok(r) => {
                    return Ok(ControlVariates {
                        order,
                        replicated: Some(r),
                    })
                }
                Err(Error::InvalidConfig(_)) => order -= 1,
                Err(e) => return Err(e),
            }
        }
        Ok(ControlVariates {
            order: 1,
            replicated: None,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }
}

/// Like [`mc_estimates`], but q̂0 is the mean of Q − βᵀc for control variates
/// c with E{c} = 0 exactly.
///
/// With N = P(h, e | Θ), R = P(e | Θ), a = E{N} and b = E{R},
///
/// ```text
/// N/R = Σ_j (a + dN)(−dR)^j / b^{j+1}
/// ```
///
/// and the controls are the terms a(−dR)^j/b^{j+1} (j = 1..K) and
/// dN(−dR)^j/b^{j+1} (j = 0..K−1), each centred by its exact expectation.
/// Those expectations need only E{Rⁱ} and E{N Rⁱ}, probabilities in the
/// K-fold replicated network. The coefficients β are fitted by least squares
/// on an independent pilot run (a tenth of the samples, from a different
/// seed), so q̂0 stays exactly unbiased. v̂0 and its standard error are
/// computed from the raw values as usual.
pub fn mc_estimates_controlled<T: Real>(
    net: &Network<T>,
    q: &Query,
    cfg: &OracleConfig,
) -> Result<OracleResult> {
    let cv = ControlVariates::new(net, CONTROL_ORDER)?;
    mc_estimates_controlled_with(net, &cv, q, cfg)
}

pub fn mc_estimates_controlled_with<T: Real>(
    net: &Network<T>,
    cv: &ControlVariates<T>,
    q: &Query,
    cfg: &OracleConfig,
) -> Result<OracleResult> {
    cfg.validate()?;
    let control = TaylorControl::new(net, cv, q)?;
    let terms = |params: &ParameterAssignment<T>| {
        let (num, den) = query_terms(&ModelView::new(net.dag(), params), q);
        (den > T::zero()).then(|| {
            let value = (num / den).as_f64();
            (value, control.terms(num.as_f64(), den.as_f64()))
        })
    };
    let pilot_cfg = OracleConfig {
        samples: (cfg.samples / 10).max(2),
        seed: cfg.seed.wrapping_add(PILOT_SEED_OFFSET),
        ..*cfg
    };
    let beta = fit_coefficients(&map_samples(net, &pilot_cfg, terms)?, control.len());
    let pairs = map_samples(net, cfg, |params| {
        terms(params).map(|(value, c)| {
            let fitted: f64 = beta.iter().zip(&c).map(|(b, c)| b * c).sum();
            (value, value - fitted)
        })
    })?;
    let (raw, adjusted): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    let plain = summarize(&raw)?;
    let controlled = summarize(&adjusted)?;
    Ok(OracleResult {
        q0: controlled.q0,
        se_mean: controlled.se_mean,
        ..plain
    })
}

/// Least-squares coefficients of the value on the controls (with intercept).
/// Too few pilot draws give the plain series coefficients, all ones.
fn fit_coefficients(pilot: &[(f64, Vec<f64>)], p: usize) -> Vec<f64> {
    let n = pilot.len();
    if n < 2 * p + 2 {
        return vec![1.0; p];
    }
    let nf = n as f64;
    let y_mean = pilot.iter().map(|(y, _)| y).sum::<f64>() / nf;
    let x_mean: Vec<f64> = (0..p)
        .map(|j| pilot.iter().map(|(_, c)| c[j]).sum::<f64>() / nf)
        .collect();
    let x = DMatrix::from_fn(n, p, |i, j| pilot[i].1[j] - x_mean[j]);
    let y = DVector::from_fn(n, |i, _| pilot[i].0 - y_mean);
    // unit-norm columns keep the SVD cutoff meaningful
    let scale: Vec<f64> = (0..p)
        .map(|j| {
            let s = x.column(j).norm();
            if s > 0.0 {
                s
            } else {
                1.0
            }
        })
        .collect();
    let xs = DMatrix::from_fn(n, p, |i, j| x[(i, j)] / scale[j]);
    let svd = xs.svd(true, true);
    let cutoff = svd.singular_values.max() * 1e-10;
    match svd.solve(&y, cutoff) {
        Ok(b) if b.iter().all(|v| v.is_finite()) => (0..p).map(|j| b[j] / scale[j]).collect(),
        _ => vec![1.0; p],
    }
}

/// Series terms for N/R with exact centring constants.
struct TaylorControl {
    mu_n: f64,
    mu_r: f64,
    /// E{dRʲ} for j = 0..=K.
    central_r: Vec<f64>,
    /// E{dN dRʲ} for j = 0..K.
    central_nr: Vec<f64>,
}

impl TaylorControl {
    fn new<T: Real>(net: &Network<T>, cv: &ControlVariates<T>, q: &Query) -> Result<Self> {
        let means = net.predictive_means();
        let (mu_n, mu_r) = query_terms(&ModelView::new(net.dag(), &means), q);
        let (a, b) = (mu_n.as_f64(), mu_r.as_f64());
        if !(b > 0.0) {
            return Err(Error::ZeroEvidenceProbability);
        }
        let order = cv.order;
        // raw[i] = E{Rⁱ}, raw_n[i] = E{N Rⁱ}; unassigned copies sum to one
        let mut raw = vec![1.0, b];
        let mut raw_n = vec![a];
        if let Some(rep) = &cv.replicated {
            let e = q.evidence().to_vec();
            let mut he = e.clone();
            he.extend_from_slice(q.hypothesis());
            for i in 2..=order {
                let copies: Vec<_> = (0..order)
                    .map(|j| if j < i { e.clone() } else { vec![] })
                    .collect();
                raw.push(rep.probability(&copies)?.as_f64());
            }
            for i in 1..order {
                let copies: Vec<_> = (0..order)
                    .map(|j| match j {
                        0 => he.clone(),
                        j if j <= i => e.clone(),
                        _ => vec![],
                    })
                    .collect();
                raw_n.push(rep.probability(&copies)?.as_f64());
            }
        }
        let binom =
            |n: usize, k: usize| (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64);
        let central = |j: usize, f: &dyn Fn(usize) -> f64| {
            (0..=j)
                .map(|i| binom(j, i) * (-b).powi((j - i) as i32) * f(i))
                .sum::<f64>()
        };
        Ok(TaylorControl {
            mu_n: a,
            mu_r: b,
            central_r: (0..=order).map(|j| central(j, &|i| raw[i])).collect(),
            central_nr: (0..order)
                .map(|j| central(j, &|i| raw_n[i] - a * raw[i]))
                .collect(),
        })
    }

    fn len(&self) -> usize {
        self.central_r.len() - 1 + self.central_nr.len()
    }

    fn terms(&self, n: f64, r: f64) -> Vec<f64> {
        let (a, b) = (self.mu_n, self.mu_r);
        let (dn, dr) = (n - a, r - b);
        let mut out = Vec::with_capacity(self.len());
        // scale = (−1)ʲ / b^{j+1}, power = dRʲ
        let (mut scale, mut power) = (1.0 / b, 1.0);
        for j in 0..self.central_r.len() {
            if j > 0 {
                out.push(a * scale * (power - self.central_r[j]));
            }
            if j < self.central_nr.len() {
                out.push(scale * (dn * power - self.central_nr[j]));
            }
            scale /= -b;
            power *= dr;
        }
        out
    }
}
