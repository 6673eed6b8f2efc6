//! Ground states of the radial equation
//!
//!   u'' + ((d-1)/r) u' + a u^{p-1} - b u = 0,   u(0) = alpha, u'(0) = 0,
//!
//! found by shooting in the height alpha, and the interpolation constant
//! C(p) built from the matched profile. The trajectory is classified by
//! event detection: a sign change of u is an overshoot, a rising zero of
//! u' with u still positive is an undershoot, and the matched solution
//! decays like e^{-sqrt(b) r} between the two.

use std::f64::consts::PI;

use crate::constants::{log_sobolev_constant, sphere_measure, two_star, vartheta};
use crate::error::{Error, Result};
use crate::numerics::ode::{integrate_ivp, Event, EventDirection, IvpOptions, IvpStatus};

/// Outcome of a single shot. `Undershoot` means u turned back up while still
/// positive (alpha too small), `CrossedZero` that u went negative (alpha too
/// large). `BlewUp` is a defensive cap on |u|; it cannot fire for exact
/// trajectories of this equation, only for numerical runaways.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    GroundState,
    CrossedZero,
    BlewUp,
    Undershoot,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::GroundState => "ground_state",
            Classification::CrossedZero => "crossed_zero",
            Classification::BlewUp => "blew_up",
            Classification::Undershoot => "undershoot",
        }
    }
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ShootingConfig {
    pub d: u32,
    pub p: f64,
    pub coef_a: f64,
    pub coef_b: f64,
    pub alpha: f64,
}

impl ShootingConfig {
    pub fn new(d: u32, p: f64, coef_a: f64, coef_b: f64, alpha: f64) -> Result<Self> {
        if d == 0 {
            return Err(Error::domain("dimension must be at least 1"));
        }
        if !(p > 2.0 && p < two_star(d)) {
            return Err(Error::domain(format!(
                "p = {p} outside (2, {}) for d = {d}",
                two_star(d)
            )));
        }
        if !(coef_a > 0.0 && coef_a.is_finite() && coef_b > 0.0 && coef_b.is_finite()) {
            return Err(Error::domain(
                "coefficients must be positive for a decaying ground state",
            ));
        }
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::domain("shooting height alpha must be positive"));
        }
        Ok(ShootingConfig {
            d,
            p,
            coef_a,
            coef_b,
            alpha,
        })
    }
}

/// Relative defects of the two integral identities satisfied by a decayed
/// ground state:
///   gradient_identity:  (|grad u|^2 - a*theta*|u|_p^p) / |grad u|^2
///   mass_identity:      (b*|u|_2^2 - a*(1-theta)*|u|_p^p) / (b*|u|_2^2)
/// with theta = d(p-2)/(2p). Near zero only for a matched, fully decayed
/// trajectory; order one otherwise.
#[derive(Debug, Clone, Copy)]
pub struct Residuals {
    pub gradient_identity: f64,
    pub mass_identity: f64,
}

#[derive(Debug, Clone)]
pub struct ShootingSolution {
    pub config: ShootingConfig,
    /// Sampled (r, u(r)) along the accepted trajectory.
    pub profile: Vec<(f64, f64)>,
    pub norm_2_sq: f64,
    pub norm_p_p: f64,
    pub grad_norm_sq: f64,
    pub classification: Classification,
    pub residuals: Residuals,
}

impl ShootingSolution {
    /// u(r) by linear interpolation in the stored samples; 0 beyond the tail.
    pub fn value_at(&self, r: f64) -> f64 {
        let pts = &self.profile;
        if pts.is_empty() {
            return 0.0;
        }
        if r <= pts[0].0 {
            return pts[0].1;
        }
        if r >= pts[pts.len() - 1].0 {
            return 0.0;
        }
        let k = pts.partition_point(|&(rk, _)| rk <= r);
        let (r0, u0) = pts[k - 1];
        let (r1, u1) = pts[k];
        let t = (r - r0) / (r1 - r0);
        u0 + t * (u1 - u0)
    }

    /// Scale-invariant interpolation quotient
    /// |u|_p^2 / (|grad u|^{2 theta} |u|_2^{2(1-theta)}).
    pub fn quotient(&self) -> f64 {
        let th = vartheta(self.config.p, self.config.d);
        self.norm_p_p.powf(2.0 / self.config.p)
            / (self.grad_norm_sq.powf(th) * self.norm_2_sq.powf(1.0 - th))
    }
}

// |u|^{q} * sign(u); keeps the nonlinearity odd so trajectories that dip
// negative before the terminal event fires stay well defined.
fn pow_odd(u: f64, q: f64) -> f64 {
    u.abs().powf(q).copysign(u)
}

/// Integration horizon: sqrt(b) sets the tail rate, the middle term covers
/// the wide near-Gaussian bulk when p is close to 2, and the constant is
/// slack so the tail event fires strictly inside the window.
fn r_horizon(p: f64, b: f64) -> f64 {
    35.0 / b.sqrt() + 2.0 * (70.0 / ((p - 2.0) * b)).max(0.0).sqrt() + 20.0
}

// Series start at r0: u = alpha + c2 r^2 + O(r^4) avoids the (d-1)/r
// division at the origin. State layout: [u, u', I2, Ip, Ig] where the
// I's accumulate r^{d-1} u^2, r^{d-1} |u|^p, r^{d-1} u'^2.
fn series_start(cfg: &ShootingConfig) -> (f64, [f64; 5]) {
    let r0 = 1e-4_f64;
    let a = cfg.alpha;
    let c2 = (cfg.coef_b * a - cfg.coef_a * pow_odd(a, cfg.p - 1.0)) / (2.0 * cfg.d as f64);
    let d = cfg.d as f64;
    let i2 = a * a * r0.powi(cfg.d as i32) / d;
    let ip = a.powf(cfg.p) * r0.powi(cfg.d as i32) / d;
    let ig = 4.0 * c2 * c2 * r0.powi(cfg.d as i32 + 2) / (d + 2.0);
    (r0, [a + c2 * r0 * r0, 2.0 * c2 * r0, i2, ip, ig])
}

struct Shot {
    classification: Classification,
    r_end: f64,
    y_end: [f64; 5],
    trace: Option<Vec<(f64, f64)>>,
}

fn run_shot(cfg: &ShootingConfig, rel_tol: f64, with_tail: bool, keep_trace: bool) -> Result<Shot> {
    let (r0, y0) = series_start(cfg);
    let rmax = r_horizon(cfg.p, cfg.coef_b);
    let u_eq = (cfg.coef_b / cfg.coef_a).powf(1.0 / (cfg.p - 2.0));
    let cap = 100.0 * cfg.alpha.max(u_eq);
    let cut = 1e-7 * cfg.alpha;

    let mut events = vec![
        Event::new("cross", EventDirection::Falling, true, |_, y: &[f64]| y[0]),
        Event::new("turn", EventDirection::Rising, true, |_, y: &[f64]| y[1]),
        Event::new("blow", EventDirection::Rising, true, move |_, y: &[f64]| {
            y[0] - cap
        }),
    ];
    if with_tail {
        events.push(Event::new(
            "tail",
            EventDirection::Falling,
            true,
            move |_, y: &[f64]| y[0] - cut,
        ));
    }

    let (d, p, ca, cb) = (cfg.d as f64, cfg.p, cfg.coef_a, cfg.coef_b);
    let rhs = move |r: f64, y: &[f64], dy: &mut [f64]| {
        let vol = r.powf(d - 1.0);
        dy[0] = y[1];
        dy[1] = -(d - 1.0) / r * y[1] - ca * pow_odd(y[0], p - 1.0) + cb * y[0];
        dy[2] = vol * y[0] * y[0];
        dy[3] = vol * y[0].abs().powf(p);
        dy[4] = vol * y[1] * y[1];
    };

    let opts = IvpOptions {
        rel_tol,
        abs_tol: rel_tol * cfg.alpha,
        max_steps: 4_000_000,
        max_step: Some(2.0 / cfg.coef_b.sqrt()),
    };
    let sol = integrate_ivp(rhs, r0, rmax, &y0, &opts, &events)?;

    let classification = match &sol.status {
        IvpStatus::TerminalEvent("cross") => Classification::CrossedZero,
        IvpStatus::TerminalEvent("turn") => Classification::Undershoot,
        IvpStatus::TerminalEvent("blow") => Classification::BlewUp,
        // an overshoot passes the cut level too, but steeply; only a
        // trajectory gliding at the linear rate u'/u ~ -sqrt(b) has decayed
        IvpStatus::TerminalEvent("tail") => {
            let y = sol.last_y();
            if y[1] < 0.0 && y[1].abs() > 3.0 * cb.sqrt() * y[0].abs() {
                Classification::CrossedZero
            } else {
                Classification::GroundState
            }
        }
        // ran out of window with u still positive: treat as a slow undershoot
        _ => {
            if sol.last_y()[0] > 0.0 {
                Classification::Undershoot
            } else {
                Classification::CrossedZero
            }
        }
    };

    let mut y_end = [0.0; 5];
    y_end.copy_from_slice(sol.last_y());
    Ok(Shot {
        classification,
        r_end: sol.last_t(),
        y_end,
        trace: keep_trace.then(|| {
            sol.ts
                .iter()
                .zip(sol.ys.iter())
                .map(|(&r, y)| (r, y[0]))
                .collect()
        }),
    })
}

// Tail closure: past the cut the profile follows u ~ r^{-(d-1)/2} e^{-sqrt(b) r},
// so the truncated integrals gain u_c^2 r_c^{d-1}/(2 sqrt(b)) and the obvious
// p-th and gradient analogues (u' ~ -sqrt(b) u there).
fn finish_solution(cfg: &ShootingConfig, shot: Shot) -> ShootingSolution {
    let b = cfg.coef_b;
    let (r_c, y) = (shot.r_end, shot.y_end);
    let u_c = y[0].max(0.0);
    let vol_c = r_c.powf(cfg.d as f64 - 1.0);
    let d2 = u_c * u_c * vol_c / (2.0 * b.sqrt());
    let dp = u_c.powf(cfg.p) * vol_c / (cfg.p * b.sqrt());
    let dg = b * d2;

    let s = sphere_measure(cfg.d);
    let norm_2_sq = s * (y[2] + d2);
    let norm_p_p = s * (y[3] + dp);
    let grad_norm_sq = s * (y[4] + dg);

    let th = vartheta(cfg.p, cfg.d);
    let residuals = Residuals {
        gradient_identity: (grad_norm_sq - cfg.coef_a * th * norm_p_p) / grad_norm_sq,
        mass_identity: (b * norm_2_sq - cfg.coef_a * (1.0 - th) * norm_p_p) / (b * norm_2_sq),
    };

    ShootingSolution {
        config: *cfg,
        profile: shot.trace.unwrap_or_default(),
        norm_2_sq,
        norm_p_p,
        grad_norm_sq,
        classification: shot.classification,
        residuals,
    }
}

/// Integrate a single trajectory and classify it. Norms cover the computed
/// arc (with the tail closure applied only when the decay event fired), so
/// they are diagnostic for anything but a ground state.
pub fn shoot(config: &ShootingConfig) -> Result<ShootingSolution> {
    ShootingConfig::new(
        config.d,
        config.p,
        config.coef_a,
        config.coef_b,
        config.alpha,
    )?;
    let mut shot = run_shot(config, 1e-10, true, true)?;
    if shot.classification != Classification::GroundState {
        // no decayed tail to close; zero the end height so the closure is a no-op
        shot.y_end[0] = match shot.classification {
            Classification::CrossedZero => 0.0,
            _ => shot.y_end[0],
        };
    }
    Ok(finish_solution(config, shot))
}

const ALPHA_LO: f64 = 1e-6;
const ALPHA_HI: f64 = 1e6;
const SCAN_POINTS: usize = 20;

// under = turned back up; over = crossed zero or ran away.
fn is_over(c: Classification) -> bool {
    matches!(c, Classification::CrossedZero | Classification::BlewUp)
}

/// Geometric scan of the bracket; enforces the shooting dichotomy (all
/// undershoots, then all overshoots) before handing back the straddle pair.
fn scan_bracket(d: u32, p: f64, coef_a: f64, coef_b: f64, rel_tol: f64) -> Result<(f64, f64)> {
    let ratio = (ALPHA_HI / ALPHA_LO).ln();
    let mut last_under = None;
    let mut first_over = None;
    let mut prev_over = false;
    for k in 0..SCAN_POINTS {
        let alpha = ALPHA_LO * (ratio * k as f64 / (SCAN_POINTS - 1) as f64).exp();
        let cfg = ShootingConfig::new(d, p, coef_a, coef_b, alpha)?;
        let shot = run_shot(&cfg, rel_tol, false, false)?;
        let over = is_over(shot.classification);
        if over {
            if first_over.is_none() {
                first_over = Some(alpha);
            }
        } else {
            if prev_over {
                return Err(Error::Solver {
                    what: format!(
                        "shooting classification not monotone in alpha near {alpha:e} \
                         (d = {d}, p = {p})"
                    ),
                });
            }
            last_under = Some(alpha);
        }
        prev_over = over;
    }
    match (last_under, first_over) {
        (Some(lo), Some(hi)) => Ok((lo, hi)),
        _ => Err(Error::Bracket {
            lo: ALPHA_LO,
            hi: ALPHA_HI,
            what: format!("no undershoot/overshoot straddle for d = {d}, p = {p}"),
        }),
    }
}

/// Matched decaying solution via bisection in alpha, then one high-accuracy
/// pass with the tail event enabled. `tol` is the relative tolerance of the
/// final integration; the bisection runs one decade looser.
pub fn ground_state_with_tolerance(
    d: u32,
    p: f64,
    coef_a: f64,
    coef_b: f64,
    tol: f64,
) -> Result<ShootingSolution> {
    ShootingConfig::new(d, p, coef_a, coef_b, 1.0)?;
    if !(tol > 0.0) {
        return Err(Error::domain("tolerance must be positive"));
    }
    let final_tol = tol.clamp(1e-13, 1e-5);
    let bisect_tol = (10.0 * final_tol).clamp(1e-13, 1e-4);

    let (mut lo, mut hi) = scan_bracket(d, p, coef_a, coef_b, 1e-8)?;
    for _ in 0..90 {
        if hi - lo <= 1e-15 * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let cfg = ShootingConfig::new(d, p, coef_a, coef_b, mid)?;
        let shot = run_shot(&cfg, bisect_tol, false, false)?;
        if is_over(shot.classification) {
            hi = mid;
        } else {
            lo = mid;
        }
    }

    let alpha = 0.5 * (lo + hi);
    let cfg = ShootingConfig::new(d, p, coef_a, coef_b, alpha)?;
    let mut shot = run_shot(&cfg, final_tol, true, true)?;
    if shot.classification != Classification::GroundState {
        // the matched trajectory should fall through the cut before any other
        // event; accept a turn a whisker above it, otherwise report failure
        let u_end = shot.y_end[0];
        if u_end.abs() <= 10.0 * 1e-7 * alpha {
            shot.classification = Classification::GroundState;
        } else {
            return Err(Error::Convergence {
                what: format!("bisected trajectory did not settle into the tail (d = {d}, p = {p})"),
                best: alpha,
                error_estimate: u_end,
            });
        }
    }
    Ok(finish_solution(&cfg, shot))
}

pub fn ground_state(d: u32, p: f64, coef_a: f64, coef_b: f64) -> Result<ShootingSolution> {
    ground_state_with_tolerance(d, p, coef_a, coef_b, 1e-12)
}

/// Upper p limit of the normalization coef_a = 2/(p-2),
/// coef_b = 2/(p-2) - (d/2)(2 + ln pi); beyond it coef_b turns negative and
/// no decaying ground state exists for that choice.
pub fn special_normalization_window(d: u32) -> f64 {
    2.0 + 4.0 / (d as f64 * (2.0 + PI.ln()))
}

/// Closed-form factor linking the interpolation constant to the ground state
/// of the special normalization: C(p) = g(p) |u_p|_p^{2-p}. Defined for
/// 2 <= p < special_normalization_window(d); g(2) = 1.
pub fn g_factor(d: u32, p: f64) -> Result<f64> {
    if d == 0 {
        return Err(Error::domain("dimension must be at least 1"));
    }
    let df = d as f64;
    if !(2.0..two_star(d)).contains(&p) || p >= special_normalization_window(d) {
        return Err(Error::domain(format!(
            "g factor needs 2 <= p < {}",
            special_normalization_window(d).min(two_star(d))
        )));
    }
    let th = vartheta(p, d);
    let inner = p * (4.0 - df * (p - 2.0) * (2.0 + PI.ln())) / (2.0 * p - df * (p - 2.0));
    Ok(0.5 * (2.0 * p / df).powf(th) * inner.powf(1.0 - th))
}

/// Interpolation constant C(p) on R^d: the quotient of the (a,b) = (1,1)
/// ground state, cross-checked in the window where the special normalization
/// admits a decaying solution.
pub fn cgn(d: u32, p: f64) -> Result<f64> {
    if d < 2 {
        return Err(Error::domain("cgn needs d >= 2"));
    }
    let gs = ground_state(d, p, 1.0, 1.0)?;
    let q = gs.quotient();

    if p < special_normalization_window(d) {
        let a = 2.0 / (p - 2.0);
        let b = a - 0.5 * d as f64 * (2.0 + PI.ln());
        let gs2 = ground_state(d, p, a, b)?;
        let check = g_factor(d, p)? * gs2.norm_p_p.powf((2.0 - p) / p);
        if ((check - q) / q).abs() > 1e-5 {
            return Err(Error::Solver {
                what: format!(
                    "normalization cross-check disagrees at d = {d}, p = {p}: \
                     quotient {q:.10e} vs closed-form path {check:.10e}"
                ),
            });
        }
    }
    Ok(q)
}

/// Quotient of the unit Gaussian pi^{-d/4} e^{-|x|^2/2}: a closed-form lower
/// bound for cgn at every p, exact at p = 2.
pub fn gaussian_q(d: u32, p: f64) -> Result<f64> {
    if d == 0 {
        return Err(Error::domain("dimension must be at least 1"));
    }
    if !(p >= 2.0 && p.is_finite()) {
        return Err(Error::domain("gaussian quotient needs p >= 2"));
    }
    let df = d as f64;
    let th = vartheta(p, d);
    Ok(PI.powf(-df / 2.0) * (2.0 * PI / p).powf(df / p) * (df / 2.0).powf(-th))
}

/// Limit of (cgn(p) - 1)/(p - 2) as p -> 2+: (d/4) ln(2/(pi d e)).
pub fn slope_limit(d: u32) -> f64 {
    0.25 * d as f64 * log_sobolev_constant(d).ln()
}

/// Two-point Richardson estimate of that limit from computed constants.
/// Requires p_far - 2 = 2 (p_near - 2).
pub fn slope_estimate(d: u32, p_far: f64, p_near: f64) -> Result<f64> {
    let (hf, hn) = (p_far - 2.0, p_near - 2.0);
    if !(hn > 0.0 && (hf - 2.0 * hn).abs() <= 1e-12 * hf) {
        return Err(Error::domain(
            "slope estimate needs p_far - 2 = 2 (p_near - 2) > 0",
        ));
    }
    let s_far = (cgn(d, p_far)? - 1.0) / hf;
    let s_near = (cgn(d, p_near)? - 1.0) / hn;
    Ok(2.0 * s_near - s_far)
}
