//! Self-check suite behind the `verify` subcommand. Every check compares a
//! computed quantity against an independent reference (closed form, second
//! computation path, or sign/ordering argument) and folds the outcome into
//! one pass/fail line. The checks are free functions over the public crate
//! API so the integration tests can run them with their full parameter sets
//! while the CLI runs the subset admissible for one dimension.

use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::constants::{
    a_bar, a_tilde, critical_a, ckn_star, existence_thresholds, lambda_double_star,
    lambda_of, lambda_one_limit, lambda_sb, two_star, vartheta, wlh_star,
};
use crate::error::{Error, Result};
use crate::gn::{gaussian_q, ground_state, slope_limit};
use crate::numerics::DecayEnvelope;
use crate::profiles::{
    ckn_profile, ckn_quotient, log_sobolev_deficit, normalize_radial, scaling_sign_probe,
    wlh_profile, wlh_value, ProfileShape, RadialProfile,
};
use crate::spectrum::{mode_eigenvalues, mode_operator, stability_threshold};

use super::config::RunConfigBuilder;
use super::svg::is_well_formed_xml;
use super::{a_star_ckn, curve_scan, render_csv, render_svg};

#[derive(Debug, Clone)]
pub enum CheckStatus {
    Pass(String),
    Fail(String),
    /// Not applicable for the requested dimension; counts as passed.
    Skip(String),
}

impl CheckStatus {
    pub fn passed(&self) -> bool {
        !matches!(self, CheckStatus::Fail(_))
    }

    pub fn word(&self) -> &'static str {
        match self {
            CheckStatus::Pass(_) => "PASS",
            CheckStatus::Fail(_) => "FAIL",
            CheckStatus::Skip(_) => "SKIP",
        }
    }

    pub fn detail(&self) -> &str {
        match self {
            CheckStatus::Pass(s) | CheckStatus::Fail(s) | CheckStatus::Skip(s) => s,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CriterionResult {
    pub id: u32,
    pub name: &'static str,
    pub status: CheckStatus,
}

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub d: u32,
    pub results: Vec<CriterionResult>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.results.iter().all(|r| r.status.passed())
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "verification suite, d = {}", self.d);
        for r in &self.results {
            let _ = writeln!(
                out,
                "{:>2} {:<4} {}: {}",
                r.id,
                r.status.word(),
                r.name,
                r.status.detail()
            );
        }
        let _ = writeln!(
            out,
            "overall: {}",
            if self.all_passed() { "PASS" } else { "FAIL" }
        );
        out
    }
}

fn run_check<F>(body: F) -> CheckStatus
where
    F: FnOnce() -> Result<CheckStatus>,
{
    match body() {
        Ok(status) => status,
        Err(e) => CheckStatus::Fail(format!("aborted: {e}")),
    }
}

fn bounded(worst: f64, limit: f64, detail: String) -> CheckStatus {
    if worst <= limit {
        CheckStatus::Pass(detail)
    } else {
        CheckStatus::Fail(format!("{detail}; allowed {limit:.1e}"))
    }
}

// inadmissible parameter combinations are filtered, every other failure is real
fn skip_domain<T>(r: Result<T>) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::Domain { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Splitmix-style generator so verification runs are reproducible without
/// carrying a seed through the CLI.
struct Lcg(u64);

impl Lcg {
    fn new(seed: u64) -> Self {
        Lcg(seed)
    }

    fn next(&mut self) -> f64 {
        self.0 = self
            .0
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (self.0 >> 11) as f64 / (1u64 << 53) as f64
    }
}

/// Cosh-power profiles attain the closed-form radial constant of the
/// interpolation family.
pub fn check_ckn_attainment(ds: &[u32]) -> CheckStatus {
    ckn_attainment_scaled(ds, 1.0)
}

// `reference_factor` multiplies the closed form; anything but 1.0 must make
// the check fail, which is itself checked (the suite stays sensitive)
pub(crate) fn ckn_attainment_scaled(ds: &[u32], reference_factor: f64) -> CheckStatus {
    run_check(|| {
        let mut worst = 0.0_f64;
        let mut points = 0usize;
        for &d in ds {
            for p in [2.2, 3.0] {
                if p >= two_star(d) {
                    continue;
                }
                for theta in [vartheta(p, d) + 0.05, 1.0] {
                    if theta > 1.0 {
                        continue;
                    }
                    for lam in [0.25, 1.0, 4.0] {
                        let Some(w) = skip_domain(ckn_profile(d, p, theta, lam))? else {
                            continue;
                        };
                        let a = critical_a(d) - lam.sqrt();
                        let Some(star) = skip_domain(ckn_star(d, p, theta, a))? else {
                            continue;
                        };
                        let q = ckn_quotient(&w, d, p, theta, lam)?.quotient;
                        worst = worst.max((q / (reference_factor * star) - 1.0).abs());
                        points += 1;
                    }
                }
            }
        }
        Ok(bounded(
            worst,
            1e-8,
            format!("max rel err {worst:.2e} over {points} parameter points"),
        ))
    })
}

/// Gaussian profiles attain the closed-form radial constant of the
/// logarithmic endpoint family.
pub fn check_wlh_attainment(ds: &[u32]) -> CheckStatus {
    run_check(|| {
        let mut worst = 0.0_f64;
        let mut points = 0usize;
        for &d in ds {
            for gamma in [d as f64 / 4.0 + 0.1, 1.0, 5.0] {
                for lam in [0.5_f64, 1.0, 2.0] {
                    let a = critical_a(d) - lam.sqrt();
                    let Some(star) = skip_domain(wlh_star(d, gamma, a))? else {
                        continue;
                    };
                    let w = wlh_profile(d, gamma, lam)?;
                    let value = wlh_value(&w, d, gamma, lam)?.quotient;
                    worst = worst.max((1.0 / (value * star) - 1.0).abs());
                    points += 1;
                }
            }
        }
        Ok(bounded(
            worst,
            1e-8,
            format!("max rel err {worst:.2e} over {points} parameter points"),
        ))
    })
}

/// Both radial constants follow exact power laws in Lambda; random admissible
/// parameter draws must satisfy them to near machine precision.
pub fn check_scaling_laws(ds: &[u32], draws: usize) -> CheckStatus {
    run_check(|| {
        let mut rng = Lcg::new(0x00c0_ffee_0003);
        let mut worst = 0.0_f64;
        for i in 0..draws {
            let d = ds[i % ds.len()];
            let l1 = 10.0_f64.powf(2.0 * rng.next() - 1.0);
            let l2 = 10.0_f64.powf(2.0 * rng.next() - 1.0);
            let a_c = critical_a(d);
            let (c1, c2, exponent) = if i % 2 == 0 {
                let p_hi = two_star(d).min(6.0);
                let p = 2.0 + (p_hi - 2.0) * (0.02 + 0.96 * rng.next());
                // the admissible strength window is [vartheta, 1] except on
                // the line, where it is (1/2, 1]
                let t_lo = if d == 1 { 0.5 + 1e-6 } else { vartheta(p, d) };
                let theta = t_lo + (1.0 - t_lo) * rng.next();
                (
                    ckn_star(d, p, theta, a_c - l1.sqrt())?,
                    ckn_star(d, p, theta, a_c - l2.sqrt())?,
                    (p - 2.0) / (2.0 * p) - theta,
                )
            } else {
                let floor = match d {
                    1 => 0.3,
                    2 => 0.55,
                    _ => d as f64 / 4.0 + 1e-3,
                };
                let gamma = floor + 3.0 * rng.next();
                (
                    wlh_star(d, gamma, a_c - l1.sqrt())?,
                    wlh_star(d, gamma, a_c - l2.sqrt())?,
                    -(4.0 * gamma - 1.0) / (4.0 * gamma),
                )
            };
            let predicted = c1 * (l2 / l1).powf(exponent);
            worst = worst.max((c2 / predicted - 1.0).abs());
        }
        Ok(bounded(
            worst,
            1e-12,
            format!("max rel err {worst:.2e} over {draws} random draws"),
        ))
    })
}

/// The unit Gaussian saturates the logarithmic Sobolev inequality; random
/// radial profiles never fall below saturation.
pub fn check_log_sobolev(ds: &[u32], random_profiles: usize) -> CheckStatus {
    run_check(|| {
        let mut worst_gaussian = 0.0_f64;
        for &d in ds {
            let u = RadialProfile {
                shape: ProfileShape::GaussianS { beta: 0.25 },
                scale: (2.0 * PI).powf(-(d as f64) / 4.0),
            };
            worst_gaussian = worst_gaussian.max(log_sobolev_deficit(&u, d)?.abs());
        }
        let mut least = f64::INFINITY;
        let mut rng = Lcg::new(0x00c0_ffee_0004);
        for i in 0..random_profiles {
            let d = ds[i % ds.len()];
            let b1 = 0.1 + rng.next();
            let b2 = 0.1 + rng.next();
            let c2 = 0.5 * rng.next();
            let raw = RadialProfile::custom(
                move |r| (-b1 * r * r).exp() + c2 * (-b2 * r * r).exp(),
                move |r| {
                    -2.0 * b1 * r * (-b1 * r * r).exp() - 2.0 * c2 * b2 * r * (-b2 * r * r).exp()
                },
                DecayEnvelope::Gaussian {
                    sigma: 1.0 / (2.0 * b1.min(b2)).sqrt(),
                },
                1.0,
            );
            let u = normalize_radial(&raw, d)?;
            least = least.min(log_sobolev_deficit(&u, d)?);
        }
        if worst_gaussian <= 1e-9 && least >= -1e-9 {
            Ok(CheckStatus::Pass(format!(
                "gaussian deficit {worst_gaussian:.1e}; least random deficit {least:+.1e} \
                 over {random_profiles} profiles"
            )))
        } else {
            Ok(CheckStatus::Fail(format!(
                "gaussian deficit {worst_gaussian:.1e} (allowed 1e-9), least random deficit \
                 {least:+.1e} (allowed -1e-9)"
            )))
        }
    })
}

/// At gamma = d/4 the linearization threshold of the endpoint family equals
/// the closed-form matching threshold, and sits strictly inside the
/// instability threshold of the Gaussian profile.
pub fn check_endpoint_identity(ds: &[u32]) -> CheckStatus {
    run_check(|| {
        let mut worst = 0.0_f64;
        let mut margin = f64::INFINITY;
        for &d in ds {
            let gamma = d as f64 / 4.0;
            let lsb = lambda_sb(d, gamma)?;
            let lss = lambda_double_star(d)?;
            worst = worst.max((lsb / lss - 1.0).abs());
            margin = margin.min(lambda_of(a_tilde(d, gamma)?, d) - lss);
        }
        if margin <= 0.0 {
            return Ok(CheckStatus::Fail(format!(
                "threshold not below the linear-instability value (margin {margin:.3e})"
            )));
        }
        Ok(bounded(
            worst,
            1e-12,
            format!("identity holds to {worst:.2e}; strict ordering margin {margin:.3}"),
        ))
    })
}

/// The existence bound approaches its closed-form limit as p decreases to 2,
/// on the branch the limit formula picks, and stays below the endpoint
/// matching threshold.
pub fn check_lambda_one_limit(ds: &[u32]) -> CheckStatus {
    run_check(|| {
        let mut worst = 0.0_f64;
        for &d in ds {
            let (limit, first_branch) = lambda_one_limit(d)?;
            let et = existence_thresholds(d, 2.001)?;
            worst = worst.max((et.lambda_1 / limit - 1.0).abs());
            if !first_branch || !et.lambda_1_first_branch {
                return Ok(CheckStatus::Fail(format!(
                    "d = {d}: expected the first candidate branch on both sides of the limit"
                )));
            }
            let lss = lambda_double_star(d)?;
            if !(limit <= lss) {
                return Ok(CheckStatus::Fail(format!(
                    "d = {d}: limit {limit:.6} above the endpoint threshold {lss:.6}"
                )));
            }
        }
        Ok(bounded(
            worst,
            0.01,
            format!("limit agreement {worst:.2e} at p = 2.001"),
        ))
    })
}

/// The numerically located instability threshold matches its closed form,
/// and the translation mode of the first sector sits at zero.
pub fn check_spectral(cases: &[(u32, f64)], zero_mode: (u32, f64, f64)) -> CheckStatus {
    run_check(|| {
        let mut worst = 0.0_f64;
        for &(d, p) in cases {
            let found = stability_threshold(d, p)?;
            let target = 4.0 * (d as f64 - 1.0) / ((p + 2.0) * (p - 2.0));
            worst = worst.max((found / target - 1.0).abs());
        }
        let (d, p, lam) = zero_mode;
        let spec = mode_operator(d, p, lam, 0)?;
        let neutral = mode_eigenvalues(&spec, 2, 8000)?[1];
        if neutral.abs() > 1e-4 {
            return Ok(CheckStatus::Fail(format!(
                "axial zero mode off by {neutral:.2e} (allowed 1e-4)"
            )));
        }
        Ok(bounded(
            worst,
            0.01,
            format!(
                "threshold err {worst:.2e} over {} cases; zero mode at {neutral:.1e}",
                cases.len()
            ),
        ))
    })
}

/// The flat interpolation constant stays above the Gaussian quotient, its
/// ground states satisfy the integral identities, and the extrapolated slope
/// at p = 2 matches the closed form.
pub fn check_gn_slope(ds: &[u32]) -> CheckStatus {
    run_check(|| {
        let mut worst_slope = 0.0_f64;
        let mut worst_residual = 0.0_f64;
        for &d in ds {
            let mut secants = [0.0_f64; 2];
            for (i, p) in [2.02, 2.01].into_iter().enumerate() {
                let gs = ground_state(d, p, 1.0, 1.0)?;
                let c = gs.quotient();
                worst_residual = worst_residual
                    .max(gs.residuals.gradient_identity.abs())
                    .max(gs.residuals.mass_identity.abs());
                if c < gaussian_q(d, p)? {
                    return Ok(CheckStatus::Fail(format!(
                        "d = {d}, p = {p}: constant fell below the gaussian lower bound"
                    )));
                }
                secants[i] = (c - 1.0) / (p - 2.0);
            }
            let slope = 2.0 * secants[1] - secants[0];
            worst_slope = worst_slope.max((slope / slope_limit(d) - 1.0).abs());
        }
        if worst_residual > 1e-6 {
            return Ok(CheckStatus::Fail(format!(
                "ground-state identity residual {worst_residual:.2e} (allowed 1e-6)"
            )));
        }
        Ok(bounded(
            worst_slope,
            0.05,
            format!("slope err {worst_slope:.2e}, identity residuals {worst_residual:.1e}"),
        ))
    })
}

/// Near p = 2 at d = 5 the linear-instability curve sits strictly below the
/// matching curve, so symmetry breaks while the radial profile is still
/// linearly stable.
pub fn check_symmetry_gap() -> CheckStatus {
    run_check(|| {
        let mut least = f64::INFINITY;
        for p in [2.05, 2.1] {
            let gap = a_star_ckn(5, p)? - a_bar(5, p, vartheta(p, 5))?;
            least = least.min(gap);
        }
        if least > 0.0 {
            Ok(CheckStatus::Pass(format!("least gap {least:.4}")))
        } else {
            Ok(CheckStatus::Fail(format!(
                "matching curve not above the instability curve (least gap {least:.3e})"
            )))
        }
    })
}

/// The matching curve approaches the endpoint threshold as p decreases to 2,
/// monotonically on the sampled sequence.
pub fn check_a_star_limit(ds: &[u32]) -> CheckStatus {
    run_check(|| {
        let mut worst_final = 0.0_f64;
        for &d in ds {
            let target = critical_a(d) - lambda_double_star(d)?.sqrt();
            let mut previous = f64::INFINITY;
            for p in [2.1, 2.05, 2.02, 2.01] {
                let gap = (a_star_ckn(d, p)? - target).abs();
                if gap >= previous {
                    return Ok(CheckStatus::Fail(format!(
                        "d = {d}: endpoint gap stopped shrinking at p = {p}"
                    )));
                }
                previous = gap;
            }
            worst_final = worst_final.max(previous);
        }
        Ok(bounded(
            worst_final,
            0.05,
            format!("endpoint gap {worst_final:.4} at p = 2.01"),
        ))
    })
}

/// Full table pipeline: the scan is deterministic, the curves keep their
/// ordering below a_c, and the chart renders as well-formed SVG with every
/// curve present.
pub fn check_figures(d: u32, steps: usize) -> CheckStatus {
    run_check(|| {
        let config = RunConfigBuilder::new().d(d).steps(steps).finish()?;
        let table = curve_scan(&config)?;
        let again = curve_scan(&config)?;
        if render_csv(&table) != render_csv(&again) {
            return Ok(CheckStatus::Fail(
                "repeated scans disagree byte-for-byte".to_string(),
            ));
        }
        for (i, &p) in table.p_grid.iter().enumerate() {
            let (Some(ab), Some(s), Some(a1), Some(a0)) =
                (table.a_bar[i], table.a_star[i], table.a_1[i], table.a_0[i])
            else {
                return Ok(CheckStatus::Fail(format!("absent curve entry at p = {p}")));
            };
            if !(s <= a1 && a1 <= a0 && a0 < table.a_c && ab < table.a_c) {
                return Ok(CheckStatus::Fail(format!(
                    "curve ordering broken at p = {p}: {s:.6} {a1:.6} {a0:.6} (a_c {})",
                    table.a_c
                )));
            }
        }
        let svg = render_svg(&table)?;
        if !is_well_formed_xml(&svg) {
            return Ok(CheckStatus::Fail("svg is not well-formed".to_string()));
        }
        let drawn = svg.matches("<polyline").count();
        if drawn < 4 {
            return Ok(CheckStatus::Fail(format!(
                "expected all four curves in the chart, found {drawn}"
            )));
        }
        Ok(CheckStatus::Pass(format!(
            "{} points: ordering holds, csv deterministic, svg carries {drawn} curves",
            table.p_grid.len()
        )))
    })
}

/// The scaling probe vanishes on axially symmetric inputs and carries the
/// sign of sigma - 1 once an angular component is present.
pub fn check_scaling_probe() -> CheckStatus {
    run_check(|| {
        let f = ckn_profile(2, 4.0, 1.0, 1.0)?;
        let g = RadialProfile {
            shape: ProfileShape::GaussianS { beta: 1.0 },
            scale: 0.3,
        };
        let mut worst_axial = 0.0_f64;
        for sigma in [0.5, 2.0] {
            let v = scaling_sign_probe(&f, &g.scaled(0.0), sigma, 2, 2.5, 0.8, 1.0)?;
            worst_axial = worst_axial.max(v.abs());
        }
        let up = scaling_sign_probe(&f, &g, 2.0, 2, 2.5, 0.8, 1.0)?;
        let down = scaling_sign_probe(&f, &g, 0.5, 2, 2.5, 0.8, 1.0)?;
        if worst_axial <= 1e-10 && up > 0.0 && down < 0.0 {
            Ok(CheckStatus::Pass(format!(
                "axial residual {worst_axial:.1e}; signed values {down:+.2e} and {up:+.2e}"
            )))
        } else {
            Ok(CheckStatus::Fail(format!(
                "axial residual {worst_axial:.1e}, probe values {down:+.2e} and {up:+.2e}"
            )))
        }
    })
}

/// Run every check admissible at dimension `d`. `fast` shrinks the sampled
/// sets for interactive runs; the integration tests use the full sizes.
pub fn verify_all(d: u32, fast: bool) -> Result<VerifyReport> {
    if !(2..=10).contains(&d) {
        return Err(Error::domain("verification is wired for 2 <= d <= 10"));
    }
    let draws = if fast { 200 } else { 1000 };
    let lsi_profiles = if fast { 30 } else { 100 };
    let figure_steps = if fast { 20 } else { 100 };
    let skip = |why: &str| CheckStatus::Skip(why.to_string());

    let mut results = Vec::new();
    let mut push = |id: u32, name: &'static str, status: CheckStatus| {
        results.push(CriterionResult { id, name, status });
    };
    push(
        1,
        "radial attainment, interpolation family",
        check_ckn_attainment(&[d]),
    );
    push(
        2,
        "radial attainment, logarithmic endpoint",
        check_wlh_attainment(&[d]),
    );
    push(
        3,
        "power-law scaling of the radial constants",
        check_scaling_laws(&[d], draws),
    );
    push(
        4,
        "logarithmic Sobolev deficit",
        check_log_sobolev(&[d], lsi_profiles),
    );
    push(
        5,
        "endpoint threshold identity",
        if d >= 3 {
            check_endpoint_identity(&[d])
        } else {
            skip("requires d >= 3")
        },
    );
    push(
        6,
        "existence bound small-p limit",
        if d >= 3 {
            check_lambda_one_limit(&[d])
        } else {
            skip("requires d >= 3")
        },
    );
    push(
        7,
        "spectral instability threshold",
        match d {
            3 => check_spectral(&[(3, 4.0)], (3, 3.0, 0.25)),
            4 => check_spectral(&[(4, 2.5)], (4, 3.0, 0.25)),
            5 => check_spectral(&[(5, 3.0)], (5, 3.0, 0.25)),
            _ => skip("no closed-form reference pair at this dimension"),
        },
    );
    push(
        8,
        "flat constant slope and lower bound",
        if d == 3 || d == 5 {
            check_gn_slope(&[d])
        } else {
            skip("slope reference covers d in {3, 5}")
        },
    );
    push(
        9,
        "instability strictly below the matching curve",
        if d == 5 {
            check_symmetry_gap()
        } else {
            skip("reference gap is stated at d = 5")
        },
    );
    push(
        10,
        "matching curve endpoint limit",
        if d == 3 || d == 5 {
            check_a_star_limit(&[d])
        } else {
            skip("endpoint reference covers d in {3, 5}")
        },
    );
    push(
        11,
        "curve table and chart emission",
        if d == 5 {
            check_figures(5, figure_steps)
        } else {
            skip("chart reproduction is pinned to d = 5")
        },
    );
    push(
        12,
        "scaling sign probe on the 2-cylinder",
        check_scaling_probe(),
    );
    Ok(VerifyReport { d, results })
}
