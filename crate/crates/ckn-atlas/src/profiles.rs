//! Extremal profiles on the cylinder R x S^{d-1} and numerical evaluation of
//! the interpolation functionals they optimize.
//!
//! Functions of the axial variable s alone ("s-symmetric") carry the sphere
//! measure as a constant factor, so every integral here is one-dimensional;
//! the scaling-sign probe on the 2-cylinder is the one place a genuine
//! angular quadrature shows up.

use crate::constants::{log_sobolev_constant, sphere_measure, vartheta};
use crate::error::{Error, Result};
use crate::numerics::{integrate_interval, DecayEnvelope};
use std::f64::consts::PI;
use std::sync::Arc;

type ProfileFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Analytic shape of a profile, or a caller-supplied pair of closures with a
/// declared decay envelope.
#[derive(Clone)]
pub enum ProfileShape {
    /// (cosh(lambda s))^{-m}
    CoshPower { lambda: f64, m: f64 },
    /// exp(-beta s^2)
    GaussianS { beta: f64 },
    Custom {
        eval: ProfileFn,
        deriv: ProfileFn,
        envelope: DecayEnvelope,
        /// log of the constant C in |f(s)| <= C * envelope(s)
        log_amplitude: f64,
    },
}

/// A function of the axial cylinder variable (or of the radius, for the
/// flat-space entropy functional), with enough decay information attached to
/// pick safe truncation widths automatically.
#[derive(Clone)]
pub struct RadialProfile {
    pub shape: ProfileShape,
    /// multiplicative prefactor; profiles stay in their analytic family
    /// under scaling
    pub scale: f64,
}

impl RadialProfile {
    pub fn custom<F, G>(eval: F, deriv: G, envelope: DecayEnvelope, log_amplitude: f64) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        G: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        RadialProfile {
            shape: ProfileShape::Custom {
                eval: Arc::new(eval),
                deriv: Arc::new(deriv),
                envelope,
                log_amplitude,
            },
            scale: 1.0,
        }
    }

    pub fn value(&self, s: f64) -> f64 {
        self.scale
            * match &self.shape {
                // exp(-m log cosh) with log cosh(x) = |x| + log1p(e^{-2|x|}) - log 2,
                // which never overflows however large m |s| gets
                ProfileShape::CoshPower { lambda, m } => {
                    let x = (lambda * s).abs();
                    (-m * (x + (-2.0 * x).exp().ln_1p() - std::f64::consts::LN_2)).exp()
                }
                ProfileShape::GaussianS { beta } => (-beta * s * s).exp(),
                ProfileShape::Custom { eval, .. } => eval(s),
            }
    }

    pub fn derivative(&self, s: f64) -> f64 {
        self.scale
            * match &self.shape {
                ProfileShape::CoshPower { lambda, m } => {
                    -m * lambda * (lambda * s).tanh() * (self.value(s) / self.scale)
                }
                ProfileShape::GaussianS { beta } => {
                    -2.0 * beta * s * (-beta * s * s).exp()
                }
                ProfileShape::Custom { deriv, .. } => deriv(s),
            }
    }

    /// Decay envelope of the profile values (prefactor excluded; see
    /// `log_amplitude`).
    pub fn envelope(&self) -> DecayEnvelope {
        match &self.shape {
            ProfileShape::CoshPower { lambda, m } => DecayEnvelope::Exponential { rate: m * lambda },
            ProfileShape::GaussianS { beta } => DecayEnvelope::Gaussian {
                sigma: 1.0 / (2.0 * beta).sqrt(),
            },
            ProfileShape::Custom { envelope, .. } => *envelope,
        }
    }

    /// log of the prefactor bounding |value| by the envelope: cosh powers
    /// satisfy (cosh x)^{-m} <= 2^m e^{-m|x|}.
    pub fn log_amplitude(&self) -> f64 {
        let base = match &self.shape {
            ProfileShape::CoshPower { m, .. } => m * std::f64::consts::LN_2,
            ProfileShape::GaussianS { .. } => 0.0,
            ProfileShape::Custom { log_amplitude, .. } => *log_amplitude,
        };
        base + self.scale.abs().max(1e-300).ln()
    }

    // crude bound on |f'| / |f| over the region that matters, used to widen
    // truncation when derivatives are integrated
    fn slope_log_factor(&self) -> f64 {
        match &self.shape {
            ProfileShape::CoshPower { lambda, m } => (m * lambda).abs().ln_1p(),
            ProfileShape::GaussianS { beta } => (2.0 * beta * (beta.recip().sqrt() + 50.0)).ln_1p(),
            ProfileShape::Custom { .. } => (50.0_f64).ln_1p(),
        }
    }

    /// Same profile multiplied by `c`.
    pub fn scaled(&self, c: f64) -> RadialProfile {
        RadialProfile {
            shape: self.shape.clone(),
            scale: self.scale * c,
        }
    }

    /// Truncation half-width making the tail of |value|^q smaller than `tol`.
    fn half_width_pow(&self, q: f64, tol: f64, with_derivative: bool) -> f64 {
        let mut log_amp = self.log_amplitude();
        if with_derivative {
            log_amp += self.slope_log_factor();
        }
        let scaled_tol = tol * (-q * log_amp).exp();
        self.envelope()
            .power(q)
            .half_width(scaled_tol)
            .clamp(12.0, 2.0e4)
    }

    /// Width of the region holding the bulk of the profile's mass; panel
    /// splitting starts at this scale so narrow peaks cannot slip between
    /// quadrature nodes of a wide first pass.
    fn core_width(&self) -> f64 {
        match &self.shape {
            // cosh powers look Gaussian of width 1/(lambda sqrt(m)) near the
            // peak and exponential of rate m lambda in the tail
            ProfileShape::CoshPower { lambda, m } => 1.0 / (lambda * (1.0 + m.sqrt())),
            ProfileShape::GaussianS { beta } => 1.0 / (2.0 * beta).sqrt(),
            ProfileShape::Custom { envelope, .. } => match *envelope {
                DecayEnvelope::Exponential { rate } => 1.0 / rate,
                DecayEnvelope::Gaussian { sigma } => sigma,
            },
        }
    }
}

// Panel boundaries growing dyadically away from the origin, so every length
// scale between `core` and `half_width` is resolved by at least one panel.
fn dyadic_panels(half_width: f64, core: f64) -> Vec<f64> {
    let core = core.clamp(half_width * 1e-9, half_width);
    let mut ticks = vec![0.0];
    let mut b = core;
    while b < half_width {
        ticks.push(b);
        b *= 2.0;
    }
    ticks.push(half_width);
    let mut all: Vec<f64> = ticks.iter().rev().map(|t| -t).collect();
    all.extend_from_slice(&ticks);
    all.dedup();
    all
}

// Adaptive integral over panels with a relative tolerance anchored to the
// coarse |f| mass, so profiles scaled by 1e+-3 resolve equally well.
fn integrate_panels<F: Fn(f64) -> f64>(f: F, panels: &[f64], tol_rel: f64) -> Result<f64> {
    let mut mass = 0.0;
    for w in panels.windows(2) {
        mass += integrate_interval(|s| f(s).abs(), w[0], w[1], f64::MAX)?.value;
    }
    let tol = (tol_rel * mass + 1e-300) / (panels.len() - 1) as f64;
    let mut total = 0.0;
    for w in panels.windows(2) {
        total += integrate_interval(&f, w[0], w[1], tol)?.value;
    }
    Ok(total)
}

/// Norms and derived quantities of one profile on the cylinder, sphere
/// factor included.
#[derive(Debug, Clone, Copy)]
pub struct CylinderFunctionValue {
    pub norm_p: f64,
    pub norm_2: f64,
    pub grad_norm_2: f64,
    /// integral of w^2 log w^2 (0 log 0 read as 0)
    pub entropy: f64,
    /// the functional value the caller asked for; see `ckn_quotient` and
    /// `wlh_value` for the exact meaning
    pub quotient: f64,
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::domain(format!("Lambda = {lambda} must be positive")));
    }
    Ok(())
}

fn check_ckn_exponents(d: u32, p: f64, theta: f64) -> Result<()> {
    if d < 1 {
        return Err(Error::domain("dimension must be at least 1"));
    }
    if !(p > 2.0) || p > crate::constants::two_star(d) {
        return Err(Error::domain(format!("p = {p} outside (2, 2*] for d = {d}")));
    }
    if d == 1 {
        if !(theta > 0.5 && theta <= 1.0) {
            return Err(Error::domain("theta outside (1/2, 1] for d = 1"));
        }
    } else if !(theta >= vartheta(p, d) - 1e-14 && theta <= 1.0) {
        return Err(Error::domain(format!(
            "theta = {theta} outside [{}, 1]",
            vartheta(p, d)
        )));
    }
    Ok(())
}

/// The cosh-power optimizer of the power-weight interpolation inequality
/// among s-symmetric functions, normalized to 1 at s = 0.
pub fn ckn_profile(d: u32, p: f64, theta: f64, lambda: f64) -> Result<RadialProfile> {
    check_ckn_exponents(d, p, theta)?;
    check_lambda(lambda)?;
    let t = 2.0 + (2.0 * theta - 1.0) * p;
    if !(t > 0.0) {
        return Err(Error::domain(format!(
            "2 + (2 theta - 1) p = {t} must be positive"
        )));
    }
    let rate = 0.5 * (p - 2.0) * (lambda * (p + 2.0) / t).sqrt();
    Ok(RadialProfile {
        shape: ProfileShape::CoshPower {
            lambda: rate,
            m: 2.0 / (p - 2.0),
        },
        scale: 1.0,
    })
}

/// The Gaussian optimizer of the logarithmic endpoint inequality, normalized
/// to unit L^2 norm on the cylinder.
pub fn wlh_profile(d: u32, gamma: f64, lambda: f64) -> Result<RadialProfile> {
    if d < 1 {
        return Err(Error::domain("dimension must be at least 1"));
    }
    if !(gamma > 0.25) {
        return Err(Error::domain(format!(
            "gamma = {gamma} must exceed 1/4 for a Gaussian profile"
        )));
    }
    check_lambda(lambda)?;
    let beta = lambda / (4.0 * gamma - 1.0);
    // |S^{d-1}| c^2 sqrt(pi / (2 beta)) = 1
    let c = (2.0 * beta / PI).powf(0.25) / sphere_measure(d).sqrt();
    Ok(RadialProfile {
        shape: ProfileShape::GaussianS { beta },
        scale: c,
    })
}

// dyadic panels on [0, t] for radial integrals
fn dyadic_panels_half(half_width: f64, core: f64) -> Vec<f64> {
    let core = core.clamp(half_width * 1e-9, half_width);
    let mut ticks = vec![0.0];
    let mut b = core;
    while b < half_width {
        ticks.push(b);
        b *= 2.0;
    }
    ticks.push(half_width);
    ticks
}

fn entropy_term(w2: f64) -> f64 {
    if w2 <= 1e-300 {
        0.0
    } else {
        w2 * w2.ln()
    }
}

/// Norms of `profile` on the cylinder and the interpolation quotient
/// ‖v‖_p^2 / [(‖∇v‖_2^2 + Λ‖v‖_2^2)^θ ‖v‖_2^{2(1-θ)}]; equals
/// `constants::ckn_star` exactly when `profile` is `ckn_profile`.
pub fn ckn_quotient(
    profile: &RadialProfile,
    d: u32,
    p: f64,
    theta: f64,
    lambda: f64,
) -> Result<CylinderFunctionValue> {
    check_ckn_exponents(d, p, theta)?;
    check_lambda(lambda)?;
    let sphere = sphere_measure(d);
    let tol = 1e-13;
    let core = profile.core_width();
    let t2 = profile.half_width_pow(2.0, tol, false);
    let tp = profile.half_width_pow(p, tol, false).max(t2);
    let tg = profile.half_width_pow(2.0, tol, true);
    let i2 = sphere
        * integrate_panels(
            |s| profile.value(s).powi(2),
            &dyadic_panels(t2, core),
            tol,
        )?;
    let ip = sphere
        * integrate_panels(
            |s| profile.value(s).abs().powf(p),
            &dyadic_panels(tp, core),
            tol,
        )?;
    let ig = sphere
        * integrate_panels(
            |s| profile.derivative(s).powi(2),
            &dyadic_panels(tg, core),
            tol,
        )?;
    let ent = sphere
        * integrate_panels(
            |s| entropy_term(profile.value(s).powi(2)),
            &dyadic_panels(t2 + 5.0, core),
            tol,
        )?;
    if !(i2 > 0.0 && ip > 0.0) {
        return Err(Error::precondition("profile has vanishing norm"));
    }
    let quotient = ip.powf(2.0 / p) / ((ig + lambda * i2).powf(theta) * i2.powf(1.0 - theta));
    Ok(CylinderFunctionValue {
        norm_p: ip.powf(1.0 / p),
        norm_2: i2.sqrt(),
        grad_norm_2: ig.sqrt(),
        entropy: ent,
        quotient,
    })
}

/// The logarithmic endpoint functional (‖∇w‖_2^2 + Λ) e^{-entropy/(2γ)} of a
/// unit-L^2-norm profile, stored in `quotient`; its reciprocal equals
/// `constants::wlh_star` when `profile` is `wlh_profile`.
pub fn wlh_value(
    profile: &RadialProfile,
    d: u32,
    gamma: f64,
    lambda: f64,
) -> Result<CylinderFunctionValue> {
    if d < 1 {
        return Err(Error::domain("dimension must be at least 1"));
    }
    if !(gamma > 0.25) {
        return Err(Error::domain("gamma must exceed 1/4"));
    }
    check_lambda(lambda)?;
    let sphere = sphere_measure(d);
    let tol = 1e-13;
    let core = profile.core_width();
    let t2 = profile.half_width_pow(2.0, tol, false);
    let tg = profile.half_width_pow(2.0, tol, true);
    let i2 = sphere
        * integrate_panels(
            |s| profile.value(s).powi(2),
            &dyadic_panels(t2, core),
            tol,
        )?;
    if (i2.sqrt() - 1.0).abs() > 1e-10 {
        return Err(Error::precondition(format!(
            "the endpoint functional needs a unit-norm profile; got ||w|| = {}",
            i2.sqrt()
        )));
    }
    let ig = sphere
        * integrate_panels(
            |s| profile.derivative(s).powi(2),
            &dyadic_panels(tg, core),
            tol,
        )?;
    let ent = sphere
        * integrate_panels(
            |s| entropy_term(profile.value(s).powi(2)),
            &dyadic_panels(t2 + 5.0, core),
            tol,
        )?;
    let value = (ig + lambda) * (-ent / (2.0 * gamma)).exp();
    Ok(CylinderFunctionValue {
        norm_p: f64::NAN,
        norm_2: i2.sqrt(),
        grad_norm_2: ig.sqrt(),
        entropy: ent,
        quotient: value,
    })
}

/// Rescale a profile to unit L^2 norm on the cylinder.
pub fn normalize_cylinder(profile: &RadialProfile, d: u32) -> Result<RadialProfile> {
    let tol = 1e-13;
    let t2 = profile.half_width_pow(2.0, tol, false);
    let i2 = sphere_measure(d)
        * integrate_panels(
            |s| profile.value(s).powi(2),
            &dyadic_panels(t2, profile.core_width()),
            tol,
        )?;
    if !(i2 > 0.0) {
        return Err(Error::precondition("cannot normalize a vanishing profile"));
    }
    Ok(profile.scaled(1.0 / i2.sqrt()))
}

/// Rescale a profile u(r) to unit L^2 norm with the radial measure on R^d,
/// the normalization `log_sobolev_deficit` expects.
pub fn normalize_radial(profile: &RadialProfile, d: u32) -> Result<RadialProfile> {
    if d < 1 {
        return Err(Error::domain("dimension must be at least 1"));
    }
    let tol = 1e-13;
    let t = profile.half_width_pow(2.0, tol, false) + d as f64;
    let i2 = sphere_measure(d)
        * integrate_panels(
            |r| profile.value(r).powi(2) * r.powf(d as f64 - 1.0),
            &dyadic_panels_half(t, profile.core_width()),
            tol,
        )?;
    if !(i2 > 0.0) {
        return Err(Error::precondition("cannot normalize a vanishing profile"));
    }
    Ok(profile.scaled(1.0 / i2.sqrt()))
}

/// Deficit of the flat-space logarithmic Sobolev inequality at a radial
/// function u(r) on R^d with unit L^2 norm:
/// (d/2) log(C ‖∇u‖_2^2) - ∫ u^2 log u^2, with C = 2/(π d e).
/// Nonnegative, and zero exactly at u(x) = (2π)^{-d/4} e^{-|x|^2/4}.
pub fn log_sobolev_deficit(u: &RadialProfile, d: u32) -> Result<f64> {
    if d < 1 {
        return Err(Error::domain("dimension must be at least 1"));
    }
    let sphere = sphere_measure(d);
    let tol = 1e-13;
    let core = u.core_width();
    let half = |with_deriv: bool| u.half_width_pow(2.0, tol, with_deriv) + d as f64;
    let radial = |f: &dyn Fn(f64) -> f64, t: f64| -> Result<f64> {
        integrate_panels(|r| f(r), &dyadic_panels_half(t, core), tol)
    };
    let dm = d as f64 - 1.0;
    let i2 = sphere * radial(&|r: f64| u.value(r).powi(2) * r.powf(dm), half(false))?;
    if (i2.sqrt() - 1.0).abs() > 1e-10 {
        return Err(Error::precondition(format!(
            "the deficit needs a unit-norm input; got ||u|| = {}",
            i2.sqrt()
        )));
    }
    let ig = sphere * radial(&|r: f64| u.derivative(r).powi(2) * r.powf(dm), half(true))?;
    let ent = sphere * radial(
        &|r: f64| entropy_term(u.value(r).powi(2)) * r.powf(dm),
        half(false) + 5.0,
    )?;
    Ok(d as f64 / 2.0 * (log_sobolev_constant(d) * ig).ln() - ent)
}

/// Signed scaling quantity behind the sharp symmetry-breaking threshold, for
/// v(s, φ) = f(s) + g(s) cos φ on the 2-cylinder and v_σ(s, φ) = v(σs, φ):
///
///   σ^{(2θ-1+2/p)/θ} (E_{θ,Λ}[v] / ‖v‖_p^2)^{1/θ}
///     - (E_{θ,σ²Λ}[v_σ] / ‖v_σ‖_p^2)^{1/θ}
///
/// where E_{θ,Λ}[v] = (‖∇v‖_2^2 + Λ‖v‖_2^2)^θ (‖v‖_2^2)^{1-θ}. Vanishes when
/// g ≡ 0 and otherwise has the sign of σ - 1.
pub fn scaling_sign_probe(
    f: &RadialProfile,
    g: &RadialProfile,
    sigma: f64,
    d: u32,
    p: f64,
    theta: f64,
    lambda: f64,
) -> Result<f64> {
    if d != 2 {
        return Err(Error::precondition(
            "the scaling probe runs on the 2-cylinder only",
        ));
    }
    check_ckn_exponents(d, p, theta)?;
    check_lambda(lambda)?;
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::domain(format!("sigma = {sigma} must be positive")));
    }
    let term = |scl: f64| -> Result<f64> {
        let tol = 1e-13;
        let t = f
            .half_width_pow(2.0, tol, true)
            .max(g.half_width_pow(2.0, tol, true))
            .max(f.half_width_pow(p, tol, false))
            .max(g.half_width_pow(p, tol, false))
            / scl;
        let panels = dyadic_panels(t, f.core_width().min(g.core_width()) / scl);
        let n_phi = 64;
        let dphi = 2.0 * PI / n_phi as f64;
        // uniform angular rule, spectrally accurate for smooth periodic
        // integrands; the s-integral is adaptive
        let phi_avg = |h: &dyn Fn(f64) -> f64| -> f64 {
            (0..n_phi)
                .map(|j| h(dphi * (j as f64 + 0.5)))
                .sum::<f64>()
                * dphi
        };
        let l2 = integrate_panels(
            |s| {
                let (vf, vg) = (f.value(scl * s), g.value(scl * s));
                phi_avg(&|phi: f64| (vf + vg * phi.cos()).powi(2))
            },
            &panels,
            tol,
        )?;
        let grad = integrate_panels(
            |s| {
                let (df, dg) = (scl * f.derivative(scl * s), scl * g.derivative(scl * s));
                let vg = g.value(scl * s);
                phi_avg(&|phi: f64| {
                    (df + dg * phi.cos()).powi(2) + (vg * phi.sin()).powi(2)
                })
            },
            &panels,
            tol,
        )?;
        let np = integrate_panels(
            |s| {
                let (vf, vg) = (f.value(scl * s), g.value(scl * s));
                phi_avg(&|phi: f64| (vf + vg * phi.cos()).abs().powf(p))
            },
            &panels,
            tol,
        )?;
        if !(l2 > 0.0 && np > 0.0) {
            return Err(Error::precondition("probe input has vanishing norm"));
        }
        let energy = (grad + scl * scl * lambda * l2).powf(theta) * l2.powf(1.0 - theta);
        Ok((energy / np.powf(2.0 / p)).powf(1.0 / theta))
    };
    let exponent = (2.0 * theta - 1.0 + 2.0 / p) / theta;
    Ok(sigma.powf(exponent) * term(1.0)? - term(sigma)?)
}

/// Which of the two elementary strict inequalities behind the compactness
/// argument to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GapForm {
    /// (1+x)^η (1+y)^{1-η} - 1 - x^η y^{1-η}; zero only at x = y
    Product,
    /// η x^{1/η} + (1-η) y^{1/(1-η)} - x y; zero only at x = y, η = 1/2
    Young,
}

/// Gap of the selected elementary inequality at (x, y, η). Nonnegative for
/// x, y > 0 and η in (0, 1); meaningless outside that domain.
pub fn elementary_inequality_gap(x: f64, y: f64, eta: f64, which: GapForm) -> f64 {
    match which {
        GapForm::Product => {
            (1.0 + x).powf(eta) * (1.0 + y).powf(1.0 - eta) - 1.0 - x.powf(eta) * y.powf(1.0 - eta)
        }
        GapForm::Young => {
            eta * x.powf(1.0 / eta) + (1.0 - eta) * y.powf(1.0 / (1.0 - eta)) - x * y
        }
    }
}
