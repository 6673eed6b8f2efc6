//! Threshold curves in the (p, a) plane, their assembly into a table, and
//! flat-file emission. Everything here composes the closed-form thresholds
//! from [`crate::constants`] with the computed interpolation constant from
//! [`crate::gn`]; the one genuinely new quantity is the matching curve
//! a_star(p), where the best constant over cylinder profiles equals the flat
//! interpolation constant.

pub mod config;
pub mod csv;
pub mod svg;
pub mod verify;

use rayon::prelude::*;

use crate::constants::{
    critical_a, existence_thresholds, log_ckn_star_critical_unit, two_star, vartheta,
};
use crate::error::{Error, Result};
use crate::gn::{cgn, ground_state_with_tolerance};

pub use config::RunConfig;
pub use csv::{emit_csv, render_csv};
pub use svg::{emit_svg, render_svg};
pub use verify::{verify_all, VerifyReport};

/// Weight exponent at which the best cylinder constant (at the critical
/// interpolation exponent) matches the flat interpolation constant. The
/// lambda-dependence of the cylinder constant is an exact power law with
/// exponent e = (p-2)(1-d)/(2p), so the match is a closed-form inversion of
/// the computed flat constant; no root finding.
pub fn a_star_ckn(d: u32, p: f64) -> Result<f64> {
    check_matching_domain(d, p)?;
    a_star_from_constant(d, p, cgn(d, p)?)
}

fn check_matching_domain(d: u32, p: f64) -> Result<()> {
    if d < 2 {
        return Err(Error::domain("the matching curve needs d >= 2"));
    }
    if !(p > 2.0 && p < two_star(d)) {
        return Err(Error::domain(format!(
            "p = {p} outside (2, {}) for d = {d}",
            two_star(d)
        )));
    }
    Ok(())
}

fn a_star_from_constant(d: u32, p: f64, c_flat: f64) -> Result<f64> {
    let log_unit = log_ckn_star_critical_unit(d, p)?;
    let e = (p - 2.0) * (1.0 - d as f64) / (2.0 * p);
    let lambda = ((c_flat.ln() - log_unit) / e).exp();
    Ok(critical_a(d) - lambda.sqrt())
}

/// One threshold table: the four curves of the phase diagrams over a common
/// p grid, entries absent where a quantity is inadmissible or failed to
/// compute. `a_c` is the vertical asymptote all curves stay below.
#[derive(Debug, Clone)]
pub struct CurveTable {
    pub d: u32,
    pub version: &'static str,
    pub p_grid: Vec<f64>,
    /// Linear-instability boundary at the critical interpolation exponent.
    pub a_bar: Vec<Option<f64>>,
    /// Matching curve from the flat interpolation constant.
    pub a_star: Vec<Option<f64>>,
    /// Concentration-compactness existence bound (d >= 3).
    pub a_1: Vec<Option<f64>>,
    /// Radial-constant existence bound (d >= 3).
    pub a_0: Vec<Option<f64>>,
    pub a_c: f64,
}

impl CurveTable {
    /// Structural soundness: grid strictly increasing inside (2, 2*), all
    /// columns aligned, and every finite entry strictly below a_c.
    pub fn validate(&self) -> Result<()> {
        let n = self.p_grid.len();
        if self.a_bar.len() != n
            || self.a_star.len() != n
            || self.a_1.len() != n
            || self.a_0.len() != n
        {
            return Err(Error::precondition("curve columns out of step with grid"));
        }
        for w in self.p_grid.windows(2) {
            if !(w[0] < w[1]) {
                return Err(Error::precondition("p grid must increase strictly"));
            }
        }
        if let (Some(&first), Some(&last)) = (self.p_grid.first(), self.p_grid.last()) {
            if !(first > 2.0 && last < two_star(self.d)) {
                return Err(Error::precondition("p grid leaves (2, 2*)"));
            }
        }
        for col in [&self.a_bar, &self.a_star, &self.a_1, &self.a_0] {
            if col.iter().flatten().any(|&v| !(v < self.a_c)) {
                return Err(Error::precondition("curve entry at or above a_c"));
            }
        }
        Ok(())
    }
}

/// Fill the four curves over the configured grid. Grid points are
/// independent and evaluated in parallel; a point that fails numerically
/// leaves absent entries. More than 10% failed points is reported as an
/// error rather than a sparser table.
pub fn curve_scan(config: &RunConfig) -> Result<CurveTable> {
    config.validate()?;
    let d = config.d;
    let grid = config.p_grid();

    struct Row {
        a_bar: Option<f64>,
        a_star: Option<f64>,
        a_1: Option<f64>,
        a_0: Option<f64>,
    }

    let tol = config.gn_tolerance;
    let rows: Vec<Row> = grid
        .par_iter()
        .map(|&p| {
            let existence = if d >= 3 { existence_thresholds(d, p).ok() } else { None };
            // the scan follows the configured shooting tolerance and skips
            // cgn's normalization cross-check; a_star_ckn keeps both defaults
            let a_star = ground_state_with_tolerance(d, p, 1.0, 1.0, tol)
                .map(|gs| gs.quotient())
                .and_then(|c| a_star_from_constant(d, p, c))
                .ok();
            Row {
                a_bar: crate::constants::a_bar(d, p, vartheta(p, d)).ok(),
                a_star,
                a_1: existence.as_ref().map(|e| e.a_1),
                a_0: existence.as_ref().map(|e| e.a_0),
            }
        })
        .collect();

    let expected_cols = if d >= 3 { 4 } else { 2 };
    let failed = rows
        .iter()
        .filter(|r| {
            let filled = [r.a_bar, r.a_star, r.a_1, r.a_0]
                .iter()
                .filter(|c| c.is_some())
                .count();
            filled < expected_cols
        })
        .count();
    if 10 * failed > grid.len() {
        return Err(Error::Solver {
            what: format!(
                "{failed} of {} grid points failed to evaluate (d = {d})",
                grid.len()
            ),
        });
    }

    let table = CurveTable {
        d,
        version: env!("CARGO_PKG_VERSION"),
        p_grid: grid,
        a_bar: rows.iter().map(|r| r.a_bar).collect(),
        a_star: rows.iter().map(|r| r.a_star).collect(),
        a_1: rows.iter().map(|r| r.a_1).collect(),
        a_0: rows.iter().map(|r| r.a_0).collect(),
        a_c: critical_a(d),
    };
    table.validate()?;
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::{a_bar, ckn_star, existence_thresholds, lambda_of};

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn matching_curve_inverts_the_constant_exactly() {
        // feeding a_star back into the cylinder constant must reproduce the
        // flat constant: the inversion is exact up to solver error
        for (d, p) in [(3u32, 2.4), (5, 2.2)] {
            let a = a_star_ckn(d, p).unwrap();
            assert!(a < critical_a(d));
            let back = ckn_star(d, p, vartheta(p, d), a).unwrap();
            let flat = cgn(d, p).unwrap();
            assert!(
                rel(back, flat) <= 1e-6,
                "d {d} p {p}: {back} vs {flat}"
            );
        }
    }

    #[test]
    fn matching_curve_approaches_the_endpoint_value() {
        for d in [3u32, 5] {
            let a_limit = existence_thresholds(d, 2.5).unwrap().a_double_star;
            let mut prev = f64::INFINITY;
            for p in [2.1, 2.05, 2.02, 2.01] {
                let gap = (a_star_ckn(d, p).unwrap() - a_limit).abs();
                assert!(gap < prev, "d {d}: gap grew at p = {p}");
                prev = gap;
            }
            assert!(prev <= 0.05, "d {d}: final gap {prev}");
        }
    }

    #[test]
    fn instability_sits_strictly_below_the_matching_curve_near_two() {
        for p in [2.05, 2.1] {
            let a_star = a_star_ckn(5, p).unwrap();
            let a_lin = a_bar(5, p, vartheta(p, 5)).unwrap();
            assert!(
                a_lin < a_star,
                "p = {p}: linear bound {a_lin} not below matching {a_star}"
            );
        }
    }

    #[test]
    fn scan_produces_a_full_ordered_table() {
        let cfg = RunConfig {
            d: 5,
            p_min: 2.1,
            p_max: 3.1,
            steps: 12,
            gn_tolerance: 1e-10,
            out: None,
            svg: None,
        };
        let t = curve_scan(&cfg).unwrap();
        t.validate().unwrap();
        assert_eq!(t.p_grid.len(), 12);
        for i in 0..12 {
            let (s, a1, a0) = (
                t.a_star[i].unwrap(),
                t.a_1[i].unwrap(),
                t.a_0[i].unwrap(),
            );
            assert!(s <= a1 && a1 <= a0 && a0 < t.a_c, "row {i}: {s} {a1} {a0}");
            assert!(t.a_bar[i].unwrap() < t.a_c);
        }

        // determinism of the numbers themselves
        let t2 = curve_scan(&cfg).unwrap();
        for i in 0..12 {
            assert_eq!(t.a_star[i], t2.a_star[i]);
            assert_eq!(t.a_bar[i], t2.a_bar[i]);
        }
    }

    #[test]
    fn curves_vary_smoothly_on_the_grid() {
        // adjacent jumps should not exceed a few times the locally observed
        // slope; a branch flip or solver glitch would spike this ratio
        let cfg = RunConfig {
            d: 5,
            p_min: 2.2,
            p_max: 2.9,
            steps: 15,
            gn_tolerance: 1e-10,
            out: None,
            svg: None,
        };
        let t = curve_scan(&cfg).unwrap();
        let h = t.p_grid[1] - t.p_grid[0];
        for col in [&t.a_bar, &t.a_star, &t.a_1, &t.a_0] {
            let vals: Vec<f64> = col.iter().map(|v| v.unwrap()).collect();
            let slope = vals
                .windows(2)
                .map(|w| (w[1] - w[0]).abs() / h)
                .fold(0.0_f64, f64::max)
                .max(1e-9);
            for w in vals.windows(2) {
                assert!((w[1] - w[0]).abs() <= 5.0 * h * slope);
            }
        }
    }

    #[test]
    fn lopsided_grids_are_rejected() {
        let bad = RunConfig {
            d: 5,
            p_min: 2.5,
            p_max: 2.2,
            steps: 10,
            gn_tolerance: 1e-10,
            out: None,
            svg: None,
        };
        assert!(curve_scan(&bad).is_err());
        assert!(a_star_ckn(1, 2.5).is_err());
        assert!(a_star_ckn(3, 2.0).is_err());
    }

    #[test]
    fn endpoint_limits_match_the_closed_forms() {
        // near p = 2 the instability curve tends to a_c - (d-1)/2 and the
        // existence bound a_0 climbs to a_c
        let d = 5u32;
        let p = 2.001;
        let ab = a_bar(d, p, vartheta(p, d)).unwrap();
        let want = critical_a(d) - 2.0 * (d as f64 - 1.0) / (p + 2.0);
        assert!((ab - want).abs() <= 1e-12);
        let et = existence_thresholds(d, p).unwrap();
        assert!(critical_a(d) - et.a_0 < 0.1);
        assert!(lambda_of(et.a_0, d) < 0.01);
    }
}
