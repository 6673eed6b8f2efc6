//! Bracketed root finding by plain bisection: deterministic, no derivative,
//! immune to the scaling pathologies of secant steps near flat thresholds.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct RootResult {
    pub x: f64,
    /// Final bracket width, always <= the requested tolerance.
    pub width: f64,
    pub iterations: u32,
}

/// Root of `f` in [lo, hi]; requires a sign change across the bracket.
/// Bisects until the bracket is narrower than `tol` (absolute).
pub fn find_root<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> Result<RootResult> {
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::domain(format!("bad bracket [{lo}, {hi}]")));
    }
    if tol <= 0.0 {
        return Err(Error::domain("root tolerance must be positive"));
    }
    let f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(RootResult { x: lo, width: 0.0, iterations: 0 });
    }
    if f_hi == 0.0 {
        return Ok(RootResult { x: hi, width: 0.0, iterations: 0 });
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::Bracket {
            lo,
            hi,
            what: format!("f({lo:e}) = {f_lo:e} and f({hi:e}) = {f_hi:e} share a sign"),
        });
    }
    let (mut lo, mut hi) = (lo, hi);
    let mut f_lo = f_lo;
    let mut iterations = 0;
    while hi - lo > tol {
        iterations += 1;
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break; // bracket at machine resolution
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(RootResult { x: mid, width: 0.0, iterations });
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(RootResult {
        x: 0.5 * (lo + hi),
        width: hi - lo,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_root() {
        let r = find_root(|x| x * x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert!((r.x - 2.0_f64.powf(1.0 / 3.0)).abs() < 1e-13);
    }

    #[test]
    fn cosine_root() {
        let r = find_root(|x: f64| x.cos(), 0.0, 3.0, 1e-13).unwrap();
        assert!((r.x - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn no_sign_change_is_an_error() {
        match find_root(|x| x * x + 1.0, -1.0, 1.0, 1e-10) {
            Err(Error::Bracket { .. }) => {}
            other => panic!("expected bracket error, got {other:?}"),
        }
    }

    #[test]
    fn endpoint_root_detected() {
        let r = find_root(|x| x - 1.0, 1.0, 2.0, 1e-12).unwrap();
        assert_eq!(r.x, 1.0);
    }

    #[test]
    fn width_respects_tolerance() {
        let r = find_root(|x: f64| x.sin() - 0.3, 0.0, 1.5, 1e-6).unwrap();
        assert!(r.width <= 1e-6);
        assert!((r.x.sin() - 0.3).abs() < 1e-6);
    }
}
