//! Closed-form optimal constants and threshold curves.
//!
//! Conventions used throughout: `a_c = (d-2)/2` is the critical weight
//! exponent, `Lambda(a) = (a - a_c)^2`, `vartheta(p, d) = d(p-2)/(2p)` is the
//! smallest admissible interpolation exponent, and `2* = 2d/(d-2)` (infinite
//! for d < 3). Radial optimizers on R^d correspond to functions of the axial
//! variable alone on the cylinder R x S^{d-1}, which is where every formula
//! here lives. Numerically sensitive expressions are assembled in log form so
//! that exponents like 1/vartheta stay accurate as p approaches 2.

use crate::error::{Error, Result};
use crate::numerics::gamma::{ln_gamma, ln_gamma_ratio_half};
use serde::Serialize;
use std::f64::consts::{E, PI};

/// d(p-2)/(2p), the smallest admissible interpolation exponent.
pub fn vartheta(p: f64, d: u32) -> f64 {
    d as f64 * (p - 2.0) / (2.0 * p)
}

/// Critical weight exponent (d-2)/2.
pub fn critical_a(d: u32) -> f64 {
    (d as f64 - 2.0) / 2.0
}

/// Critical Sobolev exponent 2d/(d-2); infinite for d = 1, 2.
pub fn two_star(d: u32) -> f64 {
    if d >= 3 {
        2.0 * d as f64 / (d as f64 - 2.0)
    } else {
        f64::INFINITY
    }
}

/// (a - a_c)^2, the spectral parameter induced by the weight exponent a.
pub fn lambda_of(a: f64, d: u32) -> f64 {
    let t = a - critical_a(d);
    t * t
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Exponents {
    pub vartheta: f64,
    pub a_c: f64,
    pub two_star: f64,
}

/// Derived exponents for dimension d and integrability p.
pub fn exponents(d: u32, p: f64) -> Result<Exponents> {
    if d < 1 {
        return Err(Error::domain("dimension must be at least 1"));
    }
    if !(2.0..=two_star(d)).contains(&p) {
        return Err(Error::domain(format!(
            "p = {p} outside [2, 2*] = [2, {}] for d = {d}",
            two_star(d)
        )));
    }
    Ok(Exponents {
        vartheta: vartheta(p, d),
        a_c: critical_a(d),
        two_star: two_star(d),
    })
}

/// Integrability exponent selected by the weight pair (a, b):
/// p = 2d / (d - 2 + 2(b - a)).
pub fn p_from_weights(d: u32, a: f64, b: f64) -> Result<f64> {
    let den = d as f64 - 2.0 + 2.0 * (b - a);
    if den <= 0.0 {
        return Err(Error::domain(format!(
            "weight pair (a, b) = ({a}, {b}) gives nonpositive denominator {den}"
        )));
    }
    Ok(2.0 * d as f64 / den)
}

/// Surface measure of the unit sphere S^{d-1} in R^d.
pub fn sphere_measure(d: u32) -> f64 {
    2.0 * PI.powf(d as f64 / 2.0) / crate::numerics::gamma(d as f64 / 2.0)
}

/// Optimal constant in || u ||_{2*}^2 <= S_d || grad u ||_2^2 on R^d, d >= 3,
/// attained by the inverted-parabola bubble (1 + |x|^2)^{-(d-2)/2}.
pub fn sobolev_constant(d: u32) -> Result<f64> {
    if d < 3 {
        return Err(Error::domain("the Sobolev constant needs d >= 3"));
    }
    let df = d as f64;
    let g = (ln_gamma(df) - ln_gamma(df / 2.0)) * 2.0 / df;
    Ok(g.exp() / (PI * df * (df - 2.0)))
}

/// Optimal constant 2/(pi d e) in the scale-invariant logarithmic Sobolev
/// inequality on R^d.
pub fn log_sobolev_constant(d: u32) -> f64 {
    2.0 / (PI * d as f64 * E)
}

fn validate_ckn(d: u32, p: f64, theta: f64, a: f64) -> Result<()> {
    if d < 1 {
        return Err(Error::domain("dimension must be at least 1"));
    }
    if !(p > 2.0) || p > two_star(d) {
        return Err(Error::domain(format!(
            "p = {p} outside (2, 2*] for d = {d}"
        )));
    }
    if d == 1 {
        if !(theta > 0.5 && theta <= 1.0) {
            return Err(Error::domain(format!(
                "theta = {theta} outside (1/2, 1] for d = 1"
            )));
        }
    } else {
        let vt = vartheta(p, d);
        if !(theta >= vt - 1e-14 && theta <= 1.0) {
            return Err(Error::domain(format!(
                "theta = {theta} outside [{vt}, 1] for d = {d}, p = {p}"
            )));
        }
    }
    if !(a < critical_a(d)) {
        return Err(Error::domain(format!(
            "weight exponent a = {a} must lie below a_c = {}",
            critical_a(d)
        )));
    }
    Ok(())
}

/// log of the radial optimal constant, parameterized by Lambda directly.
fn log_ckn_star_lambda(d: u32, p: f64, theta: f64, lambda: f64) -> f64 {
    let t = 2.0 + (2.0 * theta - 1.0) * p;
    let x = 2.0 / (p - 2.0);
    -(p - 2.0) / p * sphere_measure(d).ln()
        + (p - 2.0) / (2.0 * p) * (lambda * (p - 2.0) * (p - 2.0) / t).ln()
        + theta * (t / (2.0 * p * theta * lambda)).ln()
        + (6.0 - p) / (2.0 * p) * (4.0 / (p + 2.0)).ln()
        + (p - 2.0) / p * (ln_gamma_ratio_half(x) - 0.5 * PI.ln())
}

/// Optimal constant among radial functions for the power-weight interpolation
/// inequality with parameters (theta, p, a); attained by the cosh-power
/// profile of `profiles::ckn_profile`.
pub fn ckn_star(d: u32, p: f64, theta: f64, a: f64) -> Result<f64> {
    validate_ckn(d, p, theta, a)?;
    let t = 2.0 + (2.0 * theta - 1.0) * p;
    if !(t > 0.0) {
        return Err(Error::domain(format!(
            "2 + (2 theta - 1) p = {t} must be positive"
        )));
    }
    Ok(log_ckn_star_lambda(d, p, theta, lambda_of(a, d)).exp())
}

/// log ckn_star at the critical theta = vartheta(p, d) and Lambda = 1,
/// the reference point of every scaling relation used by the atlas.
pub(crate) fn log_ckn_star_critical_unit(d: u32, p: f64) -> Result<f64> {
    let theta = vartheta(p, d);
    validate_ckn(d, p, theta, critical_a(d) - 1.0)?;
    Ok(log_ckn_star_lambda(d, p, theta, 1.0))
}

/// Limit of ckn_star(d, p, vartheta(p,d), a_c - 1)^{1/vartheta(p,d)} as p
/// decreases to 2. Requires d >= 2.
pub fn ckn_star_limit(d: u32) -> Result<f64> {
    Ok(log_ckn_star_limit(d)?.exp())
}

pub(crate) fn log_ckn_star_limit(d: u32) -> Result<f64> {
    if d < 2 {
        return Err(Error::domain("the critical-exponent limit needs d >= 2"));
    }
    let df = d as f64;
    Ok((df - 1.0).ln() * (df - 1.0) / df + ln_gamma(df / 2.0) * 2.0 / df
        - df.ln()
        - (2.0 * E).ln() / df
        - PI.ln() * (df + 1.0) / df)
}

fn validate_wlh(d: u32, gamma: f64, a: f64) -> Result<()> {
    if d < 1 {
        return Err(Error::domain("dimension must be at least 1"));
    }
    let floor = d as f64 / 4.0;
    if gamma < floor - 1e-14 {
        return Err(Error::domain(format!(
            "gamma = {gamma} below d/4 = {floor} for d = {d}"
        )));
    }
    if d == 2 && gamma <= 0.5 {
        return Err(Error::domain("d = 2 requires gamma > 1/2"));
    }
    if !(a < critical_a(d)) {
        return Err(Error::domain(format!(
            "weight exponent a = {a} must lie below a_c = {}",
            critical_a(d)
        )));
    }
    Ok(())
}

/// Optimal constant among radial functions for the logarithmic endpoint
/// inequality with parameters (gamma, a); attained by the Gaussian profile of
/// `profiles::wlh_profile`.
pub fn wlh_star(d: u32, gamma: f64, a: f64) -> Result<f64> {
    validate_wlh(d, gamma, a)?;
    let df = d as f64;
    let lambda = lambda_of(a, d);
    if gamma == 0.25 {
        // only admissible when d = 1; the constant no longer depends on a
        return Ok((2.0 * ln_gamma(df / 2.0) - (2.0 * PI.powf(df + 1.0) * E).ln()).exp());
    }
    let fg = 4.0 * gamma;
    let log = -(fg.ln()) + ln_gamma(df / 2.0) / (2.0 * gamma)
        - (2.0 * PI.powf(df + 1.0) * E).ln() / fg
        + ((fg - 1.0) / lambda).ln() * (fg - 1.0) / fg;
    Ok(log.exp())
}

/// Symmetry-breaking onset curves.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SymmetryBreaking {
    /// Below this weight exponent the cosh-power profile is linearly unstable.
    pub a_bar: f64,
    pub lambda_bar: f64,
    /// Gaussian-profile analogue of `a_bar` for the logarithmic endpoint.
    pub a_tilde: f64,
    pub lambda_tilde: f64,
    /// Sharper endpoint threshold obtained from the optimal-constant
    /// comparison rather than linearization.
    pub a_sb: f64,
    pub lambda_sb: f64,
}

/// Instability onset for the cosh-power profile:
/// a_bar = a_c - 2 sqrt(d-1)/(p+2) * sqrt(2 p theta/(p-2) - 1).
pub fn a_bar(d: u32, p: f64, theta: f64) -> Result<f64> {
    if d < 2 {
        return Err(Error::domain("symmetry breaking needs d >= 2"));
    }
    if !(p > 2.0) {
        return Err(Error::domain("a_bar needs p > 2"));
    }
    let s = 2.0 * p * theta / (p - 2.0) - 1.0;
    if s < 0.0 {
        return Err(Error::domain(format!(
            "2 p theta / (p - 2) - 1 = {s} is negative"
        )));
    }
    let df = d as f64;
    Ok(critical_a(d) - 2.0 * (df - 1.0).sqrt() / (p + 2.0) * s.sqrt())
}

/// Instability onset for the Gaussian endpoint profile:
/// a_tilde = a_c - sqrt((d-1)(4 gamma - 1)) / 2.
pub fn a_tilde(d: u32, gamma: f64) -> Result<f64> {
    if d < 2 {
        return Err(Error::domain("symmetry breaking needs d >= 2"));
    }
    if gamma < 0.25 {
        return Err(Error::domain("a_tilde needs gamma >= 1/4"));
    }
    let df = d as f64;
    Ok(critical_a(d) - 0.5 * ((df - 1.0) * (4.0 * gamma - 1.0)).sqrt())
}

/// Endpoint symmetry-breaking threshold in Lambda:
/// (4g-1)/8 * e * (pi^{4g-d-1}/16)^{1/(4g-1)} * (d/g)^{4g/(4g-1)}
///   * Gamma(d/2)^{2/(4g-1)}.
pub fn lambda_sb(d: u32, gamma: f64) -> Result<f64> {
    if d < 2 {
        return Err(Error::domain("symmetry breaking needs d >= 2"));
    }
    if !(gamma > 0.25) {
        return Err(Error::domain("lambda_sb needs gamma > 1/4"));
    }
    let df = d as f64;
    let fg = 4.0 * gamma;
    let log = ((fg - 1.0) / 8.0).ln()
        + 1.0
        + ((fg - df - 1.0) * PI.ln() - 16.0_f64.ln()) / (fg - 1.0)
        + (df / gamma).ln() * fg / (fg - 1.0)
        + ln_gamma(df / 2.0) * 2.0 / (fg - 1.0);
    Ok(log.exp())
}

/// All symmetry-breaking thresholds for one parameter point.
pub fn symmetry_breaking_thresholds(
    d: u32,
    p: f64,
    theta: f64,
    gamma: f64,
) -> Result<SymmetryBreaking> {
    let ab = a_bar(d, p, theta)?;
    let at = a_tilde(d, gamma)?;
    let lsb = lambda_sb(d, gamma)?;
    Ok(SymmetryBreaking {
        a_bar: ab,
        lambda_bar: lambda_of(ab, d),
        a_tilde: at,
        lambda_tilde: lambda_of(at, d),
        a_sb: critical_a(d) - lsb.sqrt(),
        lambda_sb: lsb,
    })
}

/// Existence-side thresholds at the critical interpolation exponent.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ExistenceThresholds {
    /// Below lambda_1 the concentration-compactness argument applies; min of
    /// the two candidate bounds.
    pub lambda_1: f64,
    pub lambda_1_candidates: (f64, f64),
    pub lambda_1_first_branch: bool,
    pub a_1: f64,
    /// Below lambda_0 the radial constant itself certifies existence.
    pub lambda_0: f64,
    pub a_0: f64,
    /// Endpoint threshold where the Gaussian endpoint constant matches the
    /// flat logarithmic Sobolev constant.
    pub lambda_double_star: f64,
    pub a_double_star: f64,
}

/// (d-1) e (Gamma(d/2)^2 / (2^{d+1} pi))^{1/(d-1)}, the endpoint threshold
/// that `a_double_star` is built from. Requires d >= 2.
pub fn lambda_double_star(d: u32) -> Result<f64> {
    if d < 2 {
        return Err(Error::domain("lambda_double_star needs d >= 2"));
    }
    let df = d as f64;
    let log = (2.0 * ln_gamma(df / 2.0) - (df + 1.0) * 2.0_f64.ln() - PI.ln()) / (df - 1.0);
    Ok((df - 1.0) * E * log.exp())
}

/// Existence thresholds lambda_1, lambda_0 (with their a-forms) at the
/// critical theta = vartheta(p, d); requires d >= 3 so the Sobolev constant
/// exists.
pub fn existence_thresholds(d: u32, p: f64) -> Result<ExistenceThresholds> {
    if d < 3 {
        return Err(Error::domain("existence thresholds need d >= 3"));
    }
    let theta = vartheta(p, d);
    let log_c1 = log_ckn_star_critical_unit(d, p)? / theta;
    let df = d as f64;
    let a_c = critical_a(d);
    let log_sd = sobolev_constant(d)?.ln();
    let t1 = ((log_c1 - log_sd) * df / (df - 1.0)).exp();
    let t2 = (((a_c * a_c).ln() + log_sd - log_c1) * df).exp();
    let first = t1 <= t2;
    let lambda_1 = if first { t1 } else { t2 };
    let lambda_0 = ((theta.ln() + log_c1 - log_sd) * df / (df - 1.0)).exp();
    let lss = lambda_double_star(d)?;
    Ok(ExistenceThresholds {
        lambda_1,
        lambda_1_candidates: (t1, t2),
        lambda_1_first_branch: first,
        a_1: a_c - lambda_1.sqrt(),
        lambda_0,
        a_0: a_c - lambda_0.sqrt(),
        lambda_double_star: lss,
        a_double_star: a_c - lss.sqrt(),
    })
}

/// Closed form of lim_{p -> 2+} lambda_1(p): min of
///   1/4 [ (2/e) (d-2)^d (d-1)^{d-3} (Gamma(d/2)/Gamma((d-1)/2))^2 ]^{1/(d-1)}
/// and
///   e/8 (d-2)^d (d-1)^{3-d} (Gamma((d-1)/2)/Gamma(d/2))^2 .
pub fn lambda_one_limit(d: u32) -> Result<(f64, bool)> {
    if d < 3 {
        return Err(Error::domain("lambda_one_limit needs d >= 3"));
    }
    let df = d as f64;
    let lg = ln_gamma(df / 2.0) - ln_gamma((df - 1.0) / 2.0);
    let t1 = 0.25
        * (((2.0_f64 / E).ln() + df * (df - 2.0).ln() + (df - 3.0) * (df - 1.0).ln() + 2.0 * lg)
            / (df - 1.0))
            .exp();
    let t2 = E / 8.0
        * ((df * (df - 2.0).ln() + (3.0 - df) * (df - 1.0).ln() - 2.0 * lg).exp());
    Ok((t1.min(t2), t1 <= t2))
}

/// Logarithmic derivative with respect to B of the spherical rearrangement
/// comparison function h(B) = (A - lambda B)^theta B^{1-theta} at the point
/// (A, B), where lambda = a (2 a_c - a).
pub fn schwarz_h_log_derivative(d: u32, a: f64, theta: f64, big_a: f64, big_b: f64) -> Result<f64> {
    if d < 3 {
        return Err(Error::domain("the rearrangement comparison needs d >= 3"));
    }
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::domain("theta must lie in [0, 1]"));
    }
    let lambda = a * (2.0 * critical_a(d) - a);
    if !(big_b > 0.0) || !(big_a - lambda * big_b > 0.0) {
        return Err(Error::domain(format!(
            "need B > 0 and A - lambda B > 0 (got A = {big_a}, B = {big_b}, lambda = {lambda})"
        )));
    }
    Ok((1.0 - theta) / big_b - lambda * theta / (big_a - lambda * big_b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn exponent_helpers() {
        assert!((vartheta(4.0, 3) - 0.75).abs() < 1e-15);
        let e = exponents(3, 6.0).unwrap();
        assert!((e.vartheta - 1.0).abs() < 1e-15);
        assert!((e.a_c - 0.5).abs() < 1e-15);
        assert!((e.two_star - 6.0).abs() < 1e-15);
        assert_eq!(two_star(2), f64::INFINITY);
        assert!(exponents(3, 7.0).is_err());
        assert!(exponents(3, 1.9).is_err());
    }

    #[test]
    fn weight_pair_selects_p() {
        // b = a gives the critical exponent, b = a + 1 gives p = 2
        assert!((p_from_weights(5, 0.3, 0.3).unwrap() - two_star(5)).abs() < 1e-14);
        assert!((p_from_weights(5, 0.3, 1.3).unwrap() - 2.0).abs() < 1e-14);
        assert!(p_from_weights(1, 0.0, -0.3).is_err());
    }

    #[test]
    fn sphere_measures() {
        assert!(rel(sphere_measure(1), 2.0) < 1e-14);
        assert!(rel(sphere_measure(2), 2.0 * PI) < 1e-14);
        assert!(rel(sphere_measure(3), 4.0 * PI) < 1e-14);
        assert!(rel(sphere_measure(4), 2.0 * PI * PI) < 1e-14);
    }

    #[test]
    fn sobolev_constant_closed_forms() {
        // d = 3: (4/sqrt(pi))^{2/3} / (3 pi); d = 4: sqrt(6) / (8 pi)
        let s3 = (4.0 / PI.sqrt()).powf(2.0 / 3.0) / (3.0 * PI);
        assert!(rel(sobolev_constant(3).unwrap(), s3) < 1e-14);
        let s4 = 6.0_f64.sqrt() / (8.0 * PI);
        assert!(rel(sobolev_constant(4).unwrap(), s4) < 1e-14);
        assert!(sobolev_constant(2).is_err());
    }

    #[test]
    fn sobolev_constant_against_bubble_quadrature() {
        // S_d = ||u||_{2*}^2 / ||grad u||_2^2 for u = (1 + r^2)^{-(d-2)/2};
        // substitute r = t/(1-t) to tame the slow polynomial tails.
        use crate::numerics::integrate_interval;
        for d in [3u32, 4, 5] {
            let df = d as f64;
            let q = 2.0 * df / (df - 2.0);
            let u_pow = integrate_interval(
                |t: f64| {
                    let r = t / (1.0 - t);
                    let jac = 1.0 / ((1.0 - t) * (1.0 - t));
                    (1.0 + r * r).powf(-(df - 2.0) / 2.0 * q) * r.powf(df - 1.0) * jac
                },
                0.0,
                1.0 - 1e-14,
                1e-13,
            )
            .unwrap()
            .value;
            let grad = integrate_interval(
                |t: f64| {
                    let r = t / (1.0 - t);
                    let jac = 1.0 / ((1.0 - t) * (1.0 - t));
                    let du = -(df - 2.0) * r * (1.0 + r * r).powf(-df / 2.0);
                    du * du * r.powf(df - 1.0) * jac
                },
                0.0,
                1.0 - 1e-14,
                1e-13,
            )
            .unwrap()
            .value;
            let s = sphere_measure(d);
            let ratio = (s * u_pow).powf(2.0 / q) / (s * grad);
            assert!(
                rel(ratio, sobolev_constant(d).unwrap()) < 1e-9,
                "d = {d}: quadrature {ratio} vs closed form {}",
                sobolev_constant(d).unwrap()
            );
        }
    }

    #[test]
    fn ckn_star_reference_point() {
        // d=3, p=4, theta=1, a = a_c - 1: the constant is sqrt(3)/(8 sqrt(pi))
        let c = ckn_star(3, 4.0, 1.0, critical_a(3) - 1.0).unwrap();
        assert!(rel(c, 3.0_f64.sqrt() / (8.0 * PI.sqrt())) < 1e-13, "{c}");
    }

    #[test]
    fn ckn_star_rejects_inadmissible_parameters() {
        assert!(ckn_star(3, 4.0, 0.3, 0.0).is_err()); // theta below vartheta
        assert!(ckn_star(3, 4.0, 1.0, 0.5).is_err()); // a = a_c
        assert!(ckn_star(3, 4.0, 1.0, 0.7).is_err()); // a above a_c
        assert!(ckn_star(3, 6.5, 1.0, 0.0).is_err()); // p above 2*
        assert!(ckn_star(1, 4.0, 0.4, -1.0).is_err()); // theta <= 1/2 at d = 1
        assert!(ckn_star(1, 4.0, 0.9, -1.0).is_ok());
    }

    #[test]
    fn ckn_scaling_relation_in_a() {
        // C(a) = C(a_c - 1) Lambda(a)^{(p-2)/(2p) - theta}, relative 1e-12
        let mut state = 0x9e37_79b9_7f4a_7c15_u64;
        let mut next = move || {
            state = state.wrapping_mul(6_364_136_223_846_793_005).wrapping_add(1);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        let mut checked = 0;
        while checked < 300 {
            let d = 1 + (next() * 10.0) as u32;
            let p_hi = two_star(d).min(12.0);
            let p = 2.0 + next() * (p_hi - 2.0) * 0.98 + 1e-3;
            if p >= p_hi {
                continue;
            }
            let th_lo = if d == 1 {
                0.5 + 1e-6
            } else {
                vartheta(p, d)
            };
            let theta = th_lo + next() * (1.0 - th_lo);
            let a = critical_a(d) - (next() * 6.0 - 3.0_f64).exp();
            let lam = lambda_of(a, d);
            let lhs = ckn_star(d, p, theta, a).unwrap();
            let rhs = ckn_star(d, p, theta, critical_a(d) - 1.0).unwrap()
                * lam.powf((p - 2.0) / (2.0 * p) - theta);
            assert!(
                rel(lhs, rhs) < 1e-12,
                "d={d} p={p} theta={theta} a={a}: {lhs} vs {rhs}"
            );
            checked += 1;
        }
    }

    #[test]
    fn ckn_star_increases_in_a_when_exponent_negative() {
        // Lambda decreases as a rises toward a_c; with a negative Lambda
        // exponent the constant must increase.
        let d = 4;
        let p = 3.0;
        let theta = 0.8; // exponent (p-2)/(2p) - theta < 0
        let mut prev = 0.0;
        for i in 0..20 {
            let a = critical_a(d) - 3.0 + i as f64 * 0.14;
            let c = ckn_star(d, p, theta, a).unwrap();
            assert!(c > prev, "not increasing at a = {a}");
            prev = c;
        }
    }

    #[test]
    fn ckn_star_limit_closed_form_d5() {
        // 4^{4/5} Gamma(5/2)^{2/5} / (5 (2e)^{1/5} pi^{6/5})
        let g52 = 0.75 * PI.sqrt() * 2.0 / 2.0; // Gamma(5/2) = 3 sqrt(pi) / 4
        let expect = 4.0_f64.powf(0.8) * g52.powf(0.4)
            / (5.0 * (2.0 * E).powf(0.2) * PI.powf(1.2));
        assert!(rel(ckn_star_limit(5).unwrap(), expect) < 1e-13);
    }

    #[test]
    fn ckn_star_limit_is_the_wlh_endpoint_constant() {
        // the limit equals wlh_star(d, d/4, a_c - 1); d = 2 is skipped since
        // gamma = 1/2 is not admissible there
        for d in 3..=10 {
            let lim = ckn_star_limit(d).unwrap();
            let wlh = wlh_star(d, d as f64 / 4.0, critical_a(d) - 1.0).unwrap();
            assert!(rel(lim, wlh) < 1e-13, "d = {d}: {lim} vs {wlh}");
        }
    }

    #[test]
    fn ckn_star_limit_consistency_along_p() {
        // ckn_star(...)^{1/vartheta} approaches the limit as p -> 2+
        for d in [2u32, 3, 5, 8] {
            let lim = log_ckn_star_limit(d).unwrap();
            let mut prev_err = f64::INFINITY;
            for k in 2..=5 {
                let p = 2.0 + 10.0_f64.powi(-k);
                let log_c1 = log_ckn_star_critical_unit(d, p).unwrap() / vartheta(p, d);
                let err = (log_c1 - lim).abs();
                assert!(err < prev_err, "d={d} p={p}: {err} !< {prev_err}");
                prev_err = err;
            }
            assert!(prev_err < 1e-3, "d={d}: final error {prev_err}");
        }
    }

    #[test]
    fn wlh_star_endpoint_d1() {
        // gamma = 1/4, d = 1: Gamma(1/2)^2 / (2 pi^2 e) = 1/(2 pi e)
        let c = wlh_star(1, 0.25, critical_a(1) - 2.0).unwrap();
        assert!(rel(c, 1.0 / (2.0 * PI * E)) < 1e-14);
    }

    #[test]
    fn wlh_scaling_relation_in_a() {
        let mut state = 0xcafe_f00d_dead_beef_u64;
        let mut next = move || {
            state = state.wrapping_mul(6_364_136_223_846_793_005).wrapping_add(1);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..300 {
            let d = 1 + (next() * 10.0) as u32;
            let gamma = d as f64 / 4.0 + next() * 4.0 + if d == 2 { 0.26 } else { 1e-3 };
            let a = critical_a(d) - (next() * 6.0 - 3.0_f64).exp();
            let lam = lambda_of(a, d);
            let lhs = wlh_star(d, gamma, a).unwrap();
            let rhs = wlh_star(d, gamma, critical_a(d) - 1.0).unwrap()
                * lam.powf(-1.0 + 1.0 / (4.0 * gamma));
            assert!(rel(lhs, rhs) < 1e-12, "d={d} gamma={gamma} a={a}");
        }
    }

    #[test]
    fn wlh_star_rejects_inadmissible_parameters() {
        assert!(wlh_star(2, 0.5, -1.0).is_err()); // gamma must exceed 1/2
        assert!(wlh_star(5, 1.0, -1.0).is_err()); // gamma below d/4
        assert!(wlh_star(3, 1.0, 0.5).is_err()); // a at a_c
    }

    #[test]
    fn a_bar_closed_form_point() {
        // d=5, p=3, theta=1: a_c - (4/5) sqrt(5)
        let v = a_bar(5, 3.0, 1.0).unwrap();
        assert!(rel(v, 1.5 - 0.8 * 5.0_f64.sqrt()) < 1e-14, "{v}");
    }

    #[test]
    fn a_bar_critical_theta_lambda_identity() {
        // Lambda(a_bar(1, p)) = 4(d-1)/((p+2)(p-2)) for theta = 1
        let mut state = 0x1234_5678_9abc_def0_u64;
        let mut next = move || {
            state = state.wrapping_mul(6_364_136_223_846_793_005).wrapping_add(1);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..50 {
            let d = 2 + (next() * 9.0) as u32;
            let p = 2.05 + next() * 6.0;
            let ab = a_bar(d, p, 1.0).unwrap();
            let expect = 4.0 * (d as f64 - 1.0) / ((p + 2.0) * (p - 2.0));
            assert!(
                rel(lambda_of(ab, d), expect) < 1e-12,
                "d={d} p={p}: {} vs {expect}",
                lambda_of(ab, d)
            );
        }
    }

    #[test]
    fn a_bar_critical_theta_limit_is_minus_half() {
        // at theta = vartheta(p, d) the limit p -> 2+ is -1/2 for every d
        for d in [2u32, 3, 5, 9] {
            let p = 2.0 + 1e-9;
            let v = a_bar(d, p, vartheta(p, d)).unwrap();
            assert!((v + 0.5).abs() < 1e-6, "d={d}: {v}");
        }
    }

    #[test]
    fn a_tilde_endpoint_gamma() {
        // gamma = d/4: a_tilde = a_c - (d-1)/2
        for d in [2u32, 3, 5, 7] {
            let v = a_tilde(d, d as f64 / 4.0).unwrap();
            assert!(rel(v, critical_a(d) - (d as f64 - 1.0) / 2.0) < 1e-14);
        }
        assert!((a_tilde(5, 1.25).unwrap() + 0.5).abs() < 1e-14);
    }

    #[test]
    fn lambda_sb_at_gamma_d_quarter_matches_lambda_double_star() {
        for d in 3..=10 {
            let lsb = lambda_sb(d, d as f64 / 4.0).unwrap();
            let lss = lambda_double_star(d).unwrap();
            assert!(rel(lsb, lss) < 1e-12, "d = {d}: {lsb} vs {lss}");
        }
    }

    #[test]
    fn lambda_double_star_closed_form_d5() {
        // 4 e (9/1024)^{1/4}
        let expect = 4.0 * E * (9.0_f64 / 1024.0).powf(0.25);
        assert!(rel(lambda_double_star(5).unwrap(), expect) < 1e-13);
    }

    #[test]
    fn lambda_sb_below_linearization_threshold_at_endpoint() {
        // at gamma = d/4 the constant-comparison threshold undercuts the
        // linearization one, (d-1)^2/4 (away from the endpoint the ordering
        // can flip, e.g. d = 2, gamma = 0.76)
        for d in 2..=10 {
            let g = d as f64 / 4.0;
            let lsb = lambda_sb(d, g).unwrap();
            let lt = lambda_of(a_tilde(d, g).unwrap(), d);
            assert!(rel(lt, (d as f64 - 1.0).powi(2) / 4.0) < 1e-13);
            assert!(lsb < lt, "d = {d}: {lsb} !< {lt}");
        }
    }

    #[test]
    fn existence_thresholds_ordering_and_forms() {
        let t = existence_thresholds(5, 2.8).unwrap();
        assert!(t.lambda_0 < t.lambda_1, "{} !< {}", t.lambda_0, t.lambda_1);
        assert!(rel(critical_a(5) - t.lambda_1.sqrt(), t.a_1) < 1e-14);
        assert!(rel(critical_a(5) - t.lambda_0.sqrt(), t.a_0) < 1e-14);
        assert!(t.a_0 < critical_a(5));
        assert!(t.a_1 <= t.a_0);
        assert!(existence_thresholds(2, 2.5).is_err());
    }

    #[test]
    fn lambda_one_limit_agreement_near_p_equals_2() {
        for d in 3..=10 {
            let (lim, first) = lambda_one_limit(d).unwrap();
            let t = existence_thresholds(d, 2.001).unwrap();
            assert!(
                rel(t.lambda_1, lim) < 0.01,
                "d = {d}: {} vs {lim}",
                t.lambda_1
            );
            assert!(first, "d = {d}: second branch unexpectedly active");
            assert!(t.lambda_1_first_branch, "d = {d}");
        }
    }

    #[test]
    fn lambda_one_limit_below_lambda_double_star() {
        for d in 3..=10 {
            let (lim, _) = lambda_one_limit(d).unwrap();
            assert!(lim <= lambda_double_star(d).unwrap(), "d = {d}");
        }
    }

    #[test]
    fn schwarz_derivative_example() {
        // A=10, B=1, theta=1/2, a=1, d=5: lambda = 2, value 1/2 - 1/8 = 3/8
        let v = schwarz_h_log_derivative(5, 1.0, 0.5, 10.0, 1.0).unwrap();
        assert!(rel(v, 0.375) < 1e-14);
        assert!(schwarz_h_log_derivative(5, 1.0, 0.5, 1.9, 1.0).is_err());
    }

    #[test]
    fn log_sobolev_constant_value() {
        assert!(rel(log_sobolev_constant(3), 2.0 / (3.0 * PI * E)) < 1e-15);
    }
}
