//! Helpers for the normal-inverse-χ² regression family and Student-t checks.

use beliefvar::RegressionFamily64;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};

pub fn family() -> RegressionFamily64 {
    RegressionFamily64::new(
        DVector::from_vec(vec![0.4, -1.2, 0.7]),
        DMatrix::from_row_slice(3, 3, &[1.5, 0.2, -0.1, 0.2, 0.8, 0.3, -0.1, 0.3, 1.1]),
        9.0,
        0.6,
    )
    .unwrap()
}

/// Draws (β, σ²) from the normal-inverse-χ² law of `fam`.
pub fn draw_parameters(fam: &RegressionFamily64, r: &mut ChaCha8Rng) -> (DVector<f64>, f64) {
    let nu = fam.nu();
    let sigma2 = nu * fam.tau2() / ChiSquared::new(nu).unwrap().sample(r);
    let l = fam.precision().clone().cholesky().unwrap().l();
    let xi = DVector::from_fn(fam.dim(), |_, _| r.sample::<f64, _>(StandardNormal));
    let offset = l.transpose().solve_upper_triangular(&xi).unwrap();
    (fam.mu() + offset * sigma2.sqrt(), sigma2)
}

pub fn observe(beta: &DVector<f64>, sigma2: f64, z: &DVector<f64>, r: &mut ChaCha8Rng) -> f64 {
    z.dot(beta) + sigma2.sqrt() * r.sample::<f64, _>(StandardNormal)
}

/// Composite Simpson rule on [a, b] with n (even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

/// Composite midpoint rule; never evaluates the endpoints.
pub fn midpoint(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    (0..n).map(|i| f(a + (i as f64 + 0.5) * h)).sum::<f64>() * h
}

// t = tan u maps the real line onto (−π/2, π/2)
pub fn tan_weight(u: f64) -> (f64, f64) {
    (u.tan(), 1.0 / (u.cos() * u.cos()))
}
