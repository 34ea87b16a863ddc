//! Bias corrections for the plug-in and doubling estimates.
//!
//! Let Q = q(Θ) and R = P(E = e | Θ). The plug-in mean q̂1 and the doubled
//! mean q̂2 are posterior means of Q reweighted by R and R², and v̂2 is the
//! variance under the R²-reweighting. With beta-shaped third-moment
//! approximations for (Q, R) the reweighting can be undone:
//!
//! * q̂3 = 2q̂1 − q̂2 and v̂3 use only q̂1, q̂2, v̂2;
//! * q̂4 and v̂4 additionally use the exact evidence moments μ_r, σ_rr.
//!
//! v̂3 and v̂4 are defined implicitly and solved by plain fixed-point iteration
//! started at v̂2.

use crate::delta::variance_v1;
use crate::doubling::{evidence_moments_with, DoubledNetwork};
use crate::error::{Error, Result};
use crate::inference::{evaluate_query, Query};
use crate::network::Network;
use crate::scalar::Real;

pub const MAX_ITERATIONS: usize = 100;
pub const STEP_TOLERANCE: f64 = 1e-12;
const DENOMINATOR_FLOOR: f64 = 1e-14;

/// Central moments of (Q, R), with the higher ones approximated.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MomentSet<T> {
    pub mu_q: T,
    pub mu_r: T,
    pub sigma_qq: T,
    pub sigma_rr: T,
    pub sigma_qr: T,
    pub sigma_qqr: T,
    pub sigma_qrr: T,
    pub sigma_qqrr: T,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HigherMoments<T> {
    pub sigma_qqr: T,
    pub sigma_qrr: T,
    pub sigma_qqrr: T,
}

/// Beta-shaped third moments and the normal-limit fourth moment.
pub fn moment_approximations<T: Real>(
    mu_q: T,
    mu_r: T,
    sigma_qq: T,
    sigma_rr: T,
    sigma_qr: T,
) -> HigherMoments<T> {
    let two = T::lit(2.0);
    let third = |mu: T, own: T| {
        let den = mu * (T::one() - mu) + own;
        if den > T::zero() {
            two * sigma_qr * own * (T::one() - two * mu) / den
        } else {
            T::zero()
        }
    };
    HigherMoments {
        sigma_qqr: third(mu_q, sigma_qq),
        sigma_qrr: third(mu_r, sigma_rr),
        sigma_qqrr: two * sigma_qr * sigma_qr + sigma_qq * sigma_rr,
    }
}

impl<T: Real> MomentSet<T> {
    pub fn from_second_moments(mu_q: T, mu_r: T, sigma_qq: T, sigma_rr: T, sigma_qr: T) -> Self {
        let h = moment_approximations(mu_q, mu_r, sigma_qq, sigma_rr, sigma_qr);
        MomentSet {
            mu_q,
            mu_r,
            sigma_qq,
            sigma_rr,
            sigma_qr,
            sigma_qqr: h.sigma_qqr,
            sigma_qrr: h.sigma_qrr,
            sigma_qqrr: h.sigma_qqrr,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SigmaQr<T> {
    pub value: T,
    /// The closed form had a vanishing denominator and σ_rr = 0 was used instead.
    pub fallback: bool,
}

/// Estimate of Cov(Q, R) implied by q̂1, q̂2 and the evidence moments.
pub fn sigma_qr_hat<T: Real>(q1: T, q2: T, mu_r: T, sigma_rr: T) -> Result<SigmaQr<T>> {
    if !(mu_r > T::zero()) || mu_r > T::one() + T::tol(1e-12) {
        return Err(Error::InvalidConfig(format!(
            "μ_r = {} outside (0, 1]",
            mu_r.as_f64()
        )));
    }
    if sigma_rr < T::zero() {
        return Err(Error::InvalidConfig(format!(
            "σ_rr = {} is negative",
            sigma_rr.as_f64()
        )));
    }
    if mu_r >= T::one() {
        return Ok(SigmaQr {
            value: T::zero(),
            fallback: false,
        });
    }
    let one = T::one();
    let two = T::lit(2.0);
    let den = mu_r * mu_r * mu_r * (one - mu_r) + mu_r * (one - two * mu_r) * sigma_rr
        - sigma_rr * sigma_rr;
    if den.abs() < T::lit(DENOMINATOR_FLOOR) {
        return Ok(SigmaQr {
            value: (q2 - q1) * mu_r,
            fallback: true,
        });
    }
    let num = (q2 - q1) * mu_r * (mu_r * mu_r + sigma_rr) * (mu_r * (one - mu_r) + sigma_rr);
    Ok(SigmaQr {
        value: num / den,
        fallback: false,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdjustedMeans<T> {
    pub q3: T,
    pub q4: T,
    pub sigma_qr: SigmaQr<T>,
}

/// q̂3 = 2q̂1 − q̂2 and q̂4 = q̂1 − σ̂_qr/μ_r (unclamped).
pub fn adjusted_means<T: Real>(q1: T, q2: T, mu_r: T, sigma_rr: T) -> Result<AdjustedMeans<T>> {
    let sigma_qr = sigma_qr_hat(q1, q2, mu_r, sigma_rr)?;
    Ok(AdjustedMeans {
        q3: q1 - (q2 - q1),
        q4: q1 - sigma_qr.value / mu_r,
        sigma_qr,
    })
}

/// Outcome of a fixed-point solve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FixedPoint<T> {
    pub value: T,
    pub iterations: usize,
    pub converged: bool,
    /// |F(value) − value| at the reported value.
    pub residual: T,
    /// Set when oscillation was detected and two iterates were averaged.
    pub damped: bool,
}

/// Right-hand side of the v̂3 identity.
pub fn v3_map<T: Real>(q1: T, q2: T, q3: T, v2: T, v: T) -> Result<T> {
    let diff = q2 - q1;
    let two = T::lit(2.0);
    let num = v2 + two * diff * diff;
    let correction_num = T::lit(4.0) * diff * (T::one() - two * q3);
    if correction_num == T::zero() {
        return Ok(num);
    }
    let inner = q3 * (T::one() - q3) + v;
    if inner == T::zero() {
        return Err(Error::DegenerateQuery("q̂3(1 − q̂3) + v vanishes".into()));
    }
    Ok(num / (T::one() + correction_num / inner))
}

/// Right-hand side of the v̂4 identity.
pub fn v4_map<T: Real>(q2: T, q4: T, sigma_qr: T, mu_r: T, sigma_rr: T, v2: T, v: T) -> Result<T> {
    let two = T::lit(2.0);
    let r2 = mu_r * mu_r + sigma_rr;
    let gap = q2 - q4;
    let num = r2 * (v2 + gap * gap) - two * sigma_qr * sigma_qr;
    let correction_num = T::lit(4.0) * mu_r * sigma_qr * (T::one() - two * q4);
    if correction_num == T::zero() {
        return Ok(num / r2);
    }
    let inner = q4 * (T::one() - q4) + v;
    if inner == T::zero() {
        return Err(Error::DegenerateQuery("q̂4(1 − q̂4) + v vanishes".into()));
    }
    Ok(num / (r2 + correction_num / inner))
}

fn solve<T: Real>(start: T, map: impl Fn(T) -> Result<T>) -> Result<FixedPoint<T>> {
    let tol = T::tol(STEP_TOLERANCE);
    let mut v = start;
    let mut prev_step: Option<T> = None;
    let mut damped = false;
    for it in 1..=MAX_ITERATIONS {
        let next = map(v)?;
        let step = next - v;
        if !next.is_finite() {
            return Err(Error::NumericalInstability(
                "fixed-point iterate is not finite".into(),
            ));
        }
        if step.abs() < tol {
            let residual = (map(next)? - next).abs();
            return Ok(FixedPoint {
                value: next,
                iterations: it,
                converged: true,
                residual,
                damped,
            });
        }
        let oscillating = prev_step.is_some_and(|p| p * step < T::zero() && step.abs() >= p.abs());
        if oscillating && !damped {
            damped = true;
            v = (v + next) / T::lit(2.0);
            prev_step = None;
        } else {
            v = next;
            prev_step = Some(step);
        }
    }
    let residual = (map(v)? - v).abs();
    Ok(FixedPoint {
        value: v,
        iterations: MAX_ITERATIONS,
        converged: false,
        residual,
        damped,
    })
}

pub fn adjusted_variance_v3<T: Real>(q1: T, q2: T, q3: T, v2: T) -> Result<FixedPoint<T>> {
    solve(v2, |v| v3_map(q1, q2, q3, v2, v))
}

pub fn adjusted_variance_v4<T: Real>(
    q2: T,
    q4: T,
    sigma_qr: T,
    mu_r: T,
    sigma_rr: T,
    v2: T,
) -> Result<FixedPoint<T>> {
    solve(v2, |v| v4_map(q2, q4, sigma_qr, mu_r, sigma_rr, v2, v))
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Diagnostics {
    pub v3_iterations: usize,
    pub v3_converged: bool,
    pub v3_residual: f64,
    pub v4_iterations: usize,
    pub v4_converged: bool,
    pub v4_residual: f64,
    pub sigma_qr_fallback: bool,
    /// Number of estimates pulled back into [0, 1] or [0, ∞).
    pub clamp_events: usize,
}

/// All mean and variance approximations for one query.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EstimateBundle<T> {
    pub q1: T,
    pub q2: T,
    pub q3: T,
    pub q4: T,
    pub v1: T,
    pub v2: T,
    pub v3: T,
    pub v4: T,
    pub mu_r: T,
    pub sigma_rr: T,
    pub sigma_qr: T,
    pub diagnostics: Diagnostics,
}

fn clamp_unit<T: Real>(x: T, events: &mut usize) -> T {
    if x < T::zero() {
        *events += 1;
        T::zero()
    } else if x > T::one() {
        *events += 1;
        T::one()
    } else {
        x
    }
}

fn clamp_nonneg<T: Real>(x: T, events: &mut usize) -> T {
    if x < T::zero() {
        *events += 1;
        T::zero()
    } else {
        x
    }
}

/// Combines q̂1, q̂2, v̂2 and the evidence moments into the adjusted estimates.
pub fn adjust<T: Real>(
    q1: T,
    q2: T,
    v2: T,
    v1: T,
    mu_r: T,
    sigma_rr: T,
) -> Result<EstimateBundle<T>> {
    let mut diag = Diagnostics::default();
    let means = adjusted_means(q1, q2, mu_r, sigma_rr)?;
    diag.sigma_qr_fallback = means.sigma_qr.fallback;
    let q3 = clamp_unit(means.q3, &mut diag.clamp_events);
    let q4 = clamp_unit(means.q4, &mut diag.clamp_events);

    let v3 = adjusted_variance_v3(q1, q2, q3, v2)?;
    let v4 = adjusted_variance_v4(q2, q4, means.sigma_qr.value, mu_r, sigma_rr, v2)?;
    diag.v3_iterations = v3.iterations;
    diag.v3_converged = v3.converged;
    diag.v3_residual = v3.residual.as_f64();
    diag.v4_iterations = v4.iterations;
    diag.v4_converged = v4.converged;
    diag.v4_residual = v4.residual.as_f64();

    Ok(EstimateBundle {
        q1,
        q2,
        q3,
        q4,
        v1,
        v2,
        v3: clamp_nonneg(v3.value, &mut diag.clamp_events),
        v4: clamp_nonneg(v4.value, &mut diag.clamp_events),
        mu_r,
        sigma_rr,
        sigma_qr: means.sigma_qr.value,
        diagnostics: diag,
    })
}

/// Every estimate in one pass, reusing a prebuilt doubled network.
pub fn full_bundle_with<T: Real>(
    net: &Network<T>,
    doubled: &DoubledNetwork<T>,
    q: &Query,
) -> Result<EstimateBundle<T>> {
    let means = net.predictive_means();
    let q1 = evaluate_query(net.dag(), &means, q)?;
    let dbl = doubled.estimate(q)?;
    let ev = evidence_moments_with(net, doubled, q.evidence())?;
    let v1 = variance_v1(net, q)?;
    let mut bundle = adjust(q1, dbl.q2, dbl.v2, v1, ev.mu_r, ev.sigma_rr)?;
    if dbl.clamped {
        bundle.diagnostics.clamp_events += 1;
    }
    Ok(bundle)
}

pub fn full_bundle<T: Real>(net: &Network<T>, q: &Query) -> Result<EstimateBundle<T>> {
    full_bundle_with(net, &DoubledNetwork::new(net), q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigma_qr_edge_cases() {
        assert_eq!(sigma_qr_hat(0.4, 0.45, 1.0, 0.0).unwrap().value, 0.0);
        let s = sigma_qr_hat(0.4f64, 0.45, 0.3, 0.0).unwrap();
        assert!((s.value - 0.05 * 0.3).abs() < 1e-15);
        assert!(sigma_qr_hat(0.4, 0.45, 0.0, 0.0).is_err());
    }

    #[test]
    fn sigma_qr_matches_moment_relations() {
        // σ̂_qr solves q̂2 − q̂1 = (2μ_r σ_qr + σ_qrr)/(μ_r² + σ_rr) − σ_qr/μ_r
        // with σ_qrr from the beta approximation.
        let (q1, q2, mu_r, s_rr) = (0.6f64, 0.62, 0.3, 0.01);
        let s = sigma_qr_hat(q1, q2, mu_r, s_rr).unwrap().value;
        let s_qrr = 2.0 * s * s_rr * (1.0 - 2.0 * mu_r) / (mu_r * (1.0 - mu_r) + s_rr);
        let mu_q = q1 - s / mu_r;
        let q2_back = mu_q + (2.0 * mu_r * s + s_qrr) / (mu_r * mu_r + s_rr);
        assert!((q2_back - q2).abs() < 1e-14);
    }

    #[test]
    fn means_without_correction() {
        let m = adjusted_means(0.3, 0.3, 0.4, 0.02).unwrap();
        assert_eq!((m.q3, m.q4), (0.3, 0.3));
        let m = adjusted_means(0.5f64, 0.52, 0.4, 0.02).unwrap();
        assert!((m.q3 - 0.48).abs() < 1e-15);
    }

    #[test]
    fn v3_special_cases() {
        let fp = adjusted_variance_v3(0.3, 0.3, 0.3, 0.004).unwrap();
        assert_eq!(fp.value, 0.004);
        assert_eq!(fp.iterations, 1);
        let fp = adjusted_variance_v3(0.52, 0.54, 0.5, 0.004).unwrap();
        assert!((fp.value - (0.004 + 2.0 * 0.02f64.powi(2))).abs() < 1e-15);
    }

    #[test]
    fn v3_self_consistency() {
        let (q1, q2, q3, v2) = (0.3f64, 0.33, 0.27, 0.004);
        let fp = adjusted_variance_v3(q1, q2, q3, v2).unwrap();
        assert!(fp.converged);
        let rhs = v3_map(q1, q2, q3, v2, fp.value).unwrap();
        assert!((rhs - fp.value).abs() < 1e-12);
    }

    #[test]
    fn v4_with_zero_covariance() {
        let fp = adjusted_variance_v4(0.42, 0.4, 0.0, 0.5, 0.01, 0.003).unwrap();
        assert!((fp.value - (0.003 + 0.02f64.powi(2))).abs() < 1e-15);
    }

    #[test]
    fn v4_reduces_to_v3() {
        let (q1, q2, v2, mu_r) = (0.3f64, 0.33, 0.004, 0.4);
        let q3 = 2.0 * q1 - q2;
        let v4 = adjusted_variance_v4(q2, q3, (q2 - q1) * mu_r, mu_r, 0.0, v2).unwrap();
        let v3 = adjusted_variance_v3(q1, q2, q3, v2).unwrap();
        assert!((v4.value - v3.value).abs() < 1e-14);
    }

    #[test]
    fn higher_moment_edge_cases() {
        let h = moment_approximations(0.3f64, 0.6, 0.01, 0.02, 0.0);
        assert_eq!((h.sigma_qqr, h.sigma_qrr), (0.0, 0.0));
        assert!((h.sigma_qqrr - 0.0002).abs() < 1e-18);
        let h = moment_approximations(0.5, 0.6, 0.01, 0.02, 0.003);
        assert_eq!(h.sigma_qqr, 0.0);
        let h = moment_approximations(1.0, 1.0, 0.0, 0.0, 0.0);
        assert_eq!((h.sigma_qqr, h.sigma_qrr, h.sigma_qqrr), (0.0, 0.0, 0.0));
    }

    #[test]
    fn v4_identity_follows_from_moment_approximations() {
        // (μ_r²+σ_rr){v̂2 + (q̂2−μ_q)²} = μ_r² σ_qq + 2μ_r σ_qqr + σ_qqrr at the fixed point
        let (q1, q2, v2, mu_r, s_rr) = (0.35f64, 0.38, 0.006, 0.45, 0.015);
        let m = adjusted_means(q1, q2, mu_r, s_rr).unwrap();
        let fp = adjusted_variance_v4(q2, m.q4, m.sigma_qr.value, mu_r, s_rr, v2).unwrap();
        let ms = MomentSet::from_second_moments(m.q4, mu_r, fp.value, s_rr, m.sigma_qr.value);
        let lhs = (mu_r * mu_r + s_rr) * (v2 + (q2 - m.q4).powi(2));
        let rhs = mu_r * mu_r * ms.sigma_qq + 2.0 * mu_r * ms.sigma_qqr + ms.sigma_qqrr;
        assert!((lhs - rhs).abs() < 1e-13);
    }

    #[test]
    fn degenerate_query_detected() {
        assert!(matches!(
            v3_map(0.0, 0.1, 0.0, 0.0, 0.0),
            Err(Error::DegenerateQuery(_))
        ));
    }

    #[test]
    fn all_ones_for_certain_query() {
        let b = adjust(1.0, 1.0, 0.0, 0.0, 0.3, 0.01).unwrap();
        assert_eq!((b.q3, b.q4, b.v3, b.v4), (1.0, 1.0, 0.0, 0.0));
        assert_eq!(b.diagnostics.clamp_events, 0);
    }
}
