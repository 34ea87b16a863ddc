//! Normal-(inverse chi-square) regression families and their Student-t
//! predictive densities.
//!
//! For a continuous child with regression covariates `x` (first design column
//! is the constant term),
//!
//! ```text
//! (β | σ²) ~ N(μ, σ² (νΨ)⁻¹),   ν τ² / σ² ~ χ²_ν
//! ```
//!
//! and the predictive law of `Y` at `x` is `St₁(η, ω², ν)`. Two replicates
//! that share a parent configuration share (β, σ²), which gives a bivariate
//! `St₂` law; otherwise the pair factors into two independent `St₁` laws.

use nalgebra::{DMatrix, DVector, RealField};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn to_f64<T: RealField + Copy>(x: T) -> f64 {
    nalgebra::try_convert::<T, f64>(x).expect("scalar converts to f64")
}

fn from_f64<T: RealField + Copy>(x: f64) -> T {
    nalgebra::convert::<f64, T>(x)
}

/// Hyperparameters (μ_a, Ψ_a, ν_a, τ_a²) of one parent configuration.
///
/// Ψ is stored pre-multiplied by ν, the form in which the conjugate update is
/// linear.
#[derive(Clone, Debug, PartialEq)]
pub struct RegressionFamily<T: RealField + Copy> {
    mu: DVector<T>,
    nu_psi: DMatrix<T>,
    nu: T,
    tau2: T,
}

impl<T: RealField + Copy> RegressionFamily<T> {
    pub fn new(mu: DVector<T>, psi: DMatrix<T>, nu: T, tau2: T) -> Result<Self> {
        if !(nu > T::zero()) || !(tau2 > T::zero()) {
            return Err(Error::InvalidConfig("ν and τ² must be positive".into()));
        }
        if psi.nrows() != mu.len() || psi.ncols() != mu.len() {
            return Err(Error::DimensionMismatch(format!(
                "μ has length {}, Ψ is {}×{}",
                mu.len(),
                psi.nrows(),
                psi.ncols()
            )));
        }
        let tol = from_f64::<T>(1e-12);
        for i in 0..psi.nrows() {
            for j in 0..i {
                let scale = psi[(i, j)].abs().max(psi[(j, i)].abs()).max(T::one());
                if (psi[(i, j)] - psi[(j, i)]).abs() > tol * scale {
                    return Err(Error::SingularPsi);
                }
            }
        }
        let nu_psi = psi * nu;
        if nu_psi.clone().cholesky().is_none() {
            return Err(Error::SingularPsi);
        }
        Ok(RegressionFamily {
            mu,
            nu_psi,
            nu,
            tau2,
        })
    }

    /// Number of regression coefficients d + 1.
    pub fn dim(&self) -> usize {
        self.mu.len()
    }

    pub fn mu(&self) -> &DVector<T> {
        &self.mu
    }

    pub fn psi(&self) -> DMatrix<T> {
        &self.nu_psi / self.nu
    }

    /// νΨ.
    pub fn precision(&self) -> &DMatrix<T> {
        &self.nu_psi
    }

    pub fn nu(&self) -> T {
        self.nu
    }

    pub fn tau2(&self) -> T {
        self.tau2
    }

    /// Design row (1, xᵀ).
    pub fn design_row(&self, x: &[T]) -> Result<DVector<T>> {
        if x.len() + 1 != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "expected {} covariates, got {}",
                self.dim() - 1,
                x.len()
            )));
        }
        Ok(DVector::from_iterator(
            self.dim(),
            std::iter::once(T::one()).chain(x.iter().copied()),
        ))
    }

    /// zᵀ(νΨ)⁻¹w.
    fn inverse_form(&self, z: &DVector<T>, w: &DVector<T>) -> Result<T> {
        let chol = self.nu_psi.clone().cholesky().ok_or(Error::SingularPsi)?;
        Ok(z.dot(&chol.solve(w)))
    }

    /// Conjugate update with design matrix rows (1, xᵢᵀ) and responses y.
    pub fn posterior_update(&self, design: &DMatrix<T>, y: &DVector<T>) -> Result<Self> {
        if design.ncols() != self.dim() || design.nrows() != y.len() {
            return Err(Error::DimensionMismatch(format!(
                "design is {}×{}, responses {}, coefficients {}",
                design.nrows(),
                design.ncols(),
                y.len(),
                self.dim()
            )));
        }
        if design.nrows() == 0 {
            return Ok(self.clone());
        }
        let n = from_f64::<T>(design.nrows() as f64);
        let nu = self.nu + n;
        let nu_psi = &self.nu_psi + design.transpose() * design;
        let rhs = &self.nu_psi * &self.mu + design.transpose() * y;
        let chol = nu_psi.clone().cholesky().ok_or(Error::SingularPsi)?;
        let mu = chol.solve(&rhs);
        let prior_energy = self.nu * self.tau2 + self.mu.dot(&(&self.nu_psi * &self.mu));
        let post_quad = mu.dot(&(&nu_psi * &mu));
        let tau2 = (prior_energy + y.dot(y) - post_quad) / nu;
        if !(tau2 > T::zero()) {
            return Err(Error::NumericalInstability(
                "updated τ² is not positive".into(),
            ));
        }
        Ok(RegressionFamily {
            mu,
            nu_psi,
            nu,
            tau2,
        })
    }

    pub fn to_json(&self) -> RegressionFamilyJson {
        let psi = self.psi();
        RegressionFamilyJson {
            mu: self.mu.iter().map(|&v| to_f64(v)).collect(),
            psi: (0..psi.nrows())
                .map(|i| (0..psi.ncols()).map(|j| to_f64(psi[(i, j)])).collect())
                .collect(),
            nu: to_f64(self.nu),
            tau2: to_f64(self.tau2),
        }
    }

    pub fn from_json(j: &RegressionFamilyJson) -> Result<Self> {
        let d = j.mu.len();
        if j.psi.len() != d || j.psi.iter().any(|r| r.len() != d) {
            return Err(Error::DimensionMismatch(
                "psi must be square and match mu".into(),
            ));
        }
        let mu = DVector::from_iterator(d, j.mu.iter().map(|&v| from_f64(v)));
        let psi = DMatrix::from_fn(d, d, |r, c| from_f64(j.psi[r][c]));
        RegressionFamily::new(mu, psi, from_f64(j.nu), from_f64(j.tau2))
    }
}

/// JSON form of a [`RegressionFamily`], mirroring the network file style.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegressionFamilyJson {
    pub mu: Vec<f64>,
    pub psi: Vec<Vec<f64>>,
    pub nu: f64,
    pub tau2: f64,
}

pub fn regression_posterior_update<T: RealField + Copy>(
    prior: &RegressionFamily<T>,
    design: &DMatrix<T>,
    y: &DVector<T>,
) -> Result<RegressionFamily<T>> {
    prior.posterior_update(design, y)
}

/// Location-scale multivariate Student-t St_p(η, Ω, ν).
#[derive(Clone, Debug, PartialEq)]
pub struct StParams<T: RealField + Copy> {
    pub eta: DVector<T>,
    pub omega: DMatrix<T>,
    pub nu: T,
}

impl<T: RealField + Copy> StParams<T> {
    pub fn new(eta: DVector<T>, omega: DMatrix<T>, nu: T) -> Result<Self> {
        if omega.nrows() != eta.len() || omega.ncols() != eta.len() {
            return Err(Error::DimensionMismatch(
                "Ω must be p×p for p-dimensional η".into(),
            ));
        }
        if !(nu > T::zero()) {
            return Err(Error::InvalidConfig("ν must be positive".into()));
        }
        if omega.clone().cholesky().is_none() {
            return Err(Error::SingularPsi);
        }
        Ok(StParams { eta, omega, nu })
    }

    pub fn univariate(eta: T, omega2: T, nu: T) -> Result<Self> {
        StParams::new(
            DVector::from_element(1, eta),
            DMatrix::from_element(1, 1, omega2),
            nu,
        )
    }

    pub fn dim(&self) -> usize {
        self.eta.len()
    }

    pub fn log_density(&self, t: &[T]) -> Result<T> {
        let p = self.dim();
        if t.len() != p {
            return Err(Error::DimensionMismatch(format!(
                "point has {} coordinates, expected {p}",
                t.len()
            )));
        }
        let chol = self.omega.clone().cholesky().ok_or(Error::SingularPsi)?;
        let diff = DVector::from_column_slice(t) - &self.eta;
        let quad = diff.dot(&chol.solve(&diff));
        let l = chol.l();
        let log_det: f64 = (0..p).map(|i| 2.0 * to_f64(l[(i, i)]).ln()).sum();
        let nu = to_f64(self.nu);
        let pf = p as f64;
        let norm = statrs::function::gamma::ln_gamma((nu + pf) / 2.0)
            - statrs::function::gamma::ln_gamma(nu / 2.0)
            - 0.5 * pf * (nu * std::f64::consts::PI).ln()
            - 0.5 * log_det;
        let tail = -0.5 * (nu + pf) * (to_f64(quad) / nu).ln_1p();
        Ok(from_f64(norm + tail))
    }

    pub fn density(&self, t: &[T]) -> Result<T> {
        self.log_density(t).map(|l| l.exp())
    }
}

pub fn st_density<T: RealField + Copy>(p: &StParams<T>, t: &[T]) -> Result<T> {
    p.density(t)
}

/// Predictive St₁ law of Y at covariates `x`.
pub fn predictive_st1<T: RealField + Copy>(
    fam: &RegressionFamily<T>,
    x: &[T],
) -> Result<StParams<T>> {
    let z = fam.design_row(x)?;
    let eta = z.dot(fam.mu());
    let omega2 = fam.tau2() * (fam.inverse_form(&z, &z)? + T::one());
    StParams::univariate(eta, omega2, fam.nu())
}

/// Joint predictive law of two replicates (Y₁, Y₂).
#[derive(Clone, Debug, PartialEq)]
pub enum DoubledPredictive<T: RealField + Copy> {
    /// Different parent configurations: independent parameters.
    Independent(StParams<T>, StParams<T>),
    /// Same parent configuration: shared (β, σ²).
    Joint(StParams<T>),
}

impl<T: RealField + Copy> DoubledPredictive<T> {
    pub fn log_density(&self, y1: T, y2: T) -> Result<T> {
        match self {
            DoubledPredictive::Independent(a, b) => {
                Ok(a.log_density(&[y1])? + b.log_density(&[y2])?)
            }
            DoubledPredictive::Joint(j) => j.log_density(&[y1, y2]),
        }
    }

    pub fn density(&self, y1: T, y2: T) -> Result<T> {
        self.log_density(y1, y2).map(|l| l.exp())
    }
}

/// Doubled predictive for two replicates under the same family.
pub fn predictive_st2_doubled<T: RealField + Copy>(
    fam: &RegressionFamily<T>,
    x1: &[T],
    x2: &[T],
    same_config: bool,
) -> Result<DoubledPredictive<T>> {
    if !same_config {
        return predictive_pair(fam, x1, fam, x2);
    }
    let z1 = fam.design_row(x1)?;
    let z2 = fam.design_row(x2)?;
    let eta = DVector::from_vec(vec![z1.dot(fam.mu()), z2.dot(fam.mu())]);
    let a = fam.inverse_form(&z1, &z1)?;
    let b = fam.inverse_form(&z1, &z2)?;
    let c = fam.inverse_form(&z2, &z2)?;
    let t = fam.tau2();
    let omega = DMatrix::from_row_slice(
        2,
        2,
        &[t * (a + T::one()), t * b, t * b, t * (c + T::one())],
    );
    Ok(DoubledPredictive::Joint(StParams::new(
        eta,
        omega,
        fam.nu(),
    )?))
}

/// Doubled predictive for replicates in different parent configurations.
pub fn predictive_pair<T: RealField + Copy>(
    fam1: &RegressionFamily<T>,
    x1: &[T],
    fam2: &RegressionFamily<T>,
    x2: &[T],
) -> Result<DoubledPredictive<T>> {
    Ok(DoubledPredictive::Independent(
        predictive_st1(fam1, x1)?,
        predictive_st1(fam2, x2)?,
    ))
}
