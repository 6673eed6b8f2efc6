//! Linearized stability of the s-symmetric extremal in the theta = 1 regime.
//!
//! Expanding the functional to second order at the matched profile w and
//! separating variables on the sphere turns each angular sector k into a
//! one-dimensional Schroedinger operator on the cylinder axis,
//!
//!   -d^2/ds^2 + Lambda + mu_k - (p-1) c w(s)^{p-2},   mu_k = k(k+d-2),
//!
//! with c = m(m+1) lambda_w^2 the coupling of the profile equation
//! -w'' + Lambda w = c w^{p-1}. The k = 0 sector keeps the translation zero
//! mode w'; the k = 1 sector loses positivity first as Lambda grows, and the
//! Lambda where its lowest eigenvalue crosses zero is the instability
//! threshold located here.

use std::cell::RefCell;

use crate::constants::{a_bar, lambda_of, two_star};
use crate::error::{Error, Result};
use crate::numerics::eigen::{lowest_eigenvalues, GridOperator};
use crate::numerics::roots::find_root;
use crate::profiles::{ckn_profile, RadialProfile};

/// Grid size used when no explicit resolution is requested.
pub const DEFAULT_RESOLUTION: usize = 8000;

#[derive(Clone)]
pub struct ModeOperatorSpec {
    pub d: u32,
    pub p: f64,
    /// Lambda, the squared distance of the weight exponent from critical.
    pub lambda: f64,
    pub k: u32,
    /// Sphere eigenvalue k(k+d-2) shifting the continuum edge.
    pub mu_k: f64,
    /// Coupling m(m+1) lambda_w^2 of the profile equation.
    pub coupling: f64,
    pub profile: RadialProfile,
}

impl ModeOperatorSpec {
    pub fn potential(&self, s: f64) -> f64 {
        self.lambda + self.mu_k
            - (self.p - 1.0) * self.coupling * self.profile.value(s).powf(self.p - 2.0)
    }

    /// Truncation half-width: wide enough that both the potential has
    /// settled to its asymptote and the slowest relevant eigenfunction
    /// (decay rate min(2 lambda_w, sqrt(Lambda))) has died out.
    pub fn half_width(&self) -> f64 {
        let lam_w = 0.5 * (self.p - 2.0) * self.lambda.sqrt();
        let rate = (2.0 * lam_w).min(self.lambda.sqrt());
        28.0_f64.max(14.0 / rate)
    }

    pub fn grid(&self, n: usize) -> Result<GridOperator> {
        GridOperator::from_potential(self.half_width(), n, |s| self.potential(s))
    }
}

pub fn mode_operator(d: u32, p: f64, lambda: f64, k: u32) -> Result<ModeOperatorSpec> {
    if d < 2 {
        return Err(Error::domain("mode decomposition needs d >= 2"));
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::domain("lambda must be positive"));
    }
    let profile = ckn_profile(d, p, 1.0, lambda)?;
    let m = 2.0 / (p - 2.0);
    let lam_w = 0.5 * (p - 2.0) * lambda.sqrt();
    Ok(ModeOperatorSpec {
        d,
        p,
        lambda,
        k,
        mu_k: (k * (k + d - 2)) as f64,
        coupling: m * (m + 1.0) * lam_w * lam_w,
        profile,
    })
}

/// The `count` lowest eigenvalues at resolution `n`, sharpened by one
/// Richardson step on the nested half-step grid (2n - 1 points).
pub fn mode_eigenvalues(spec: &ModeOperatorSpec, count: usize, n: usize) -> Result<Vec<f64>> {
    let coarse = lowest_eigenvalues(&spec.grid(n)?, count)?;
    let fine = lowest_eigenvalues(&spec.grid(2 * n - 1)?, count)?;
    Ok(coarse
        .iter()
        .zip(fine.iter())
        .map(|(c, f)| (4.0 * f - c) / 3.0)
        .collect())
}

/// Lowest eigenvalue at the default resolution, with the Richardson gap
/// |fine - coarse|/3 as the discretization error estimate.
pub fn lowest_mode_eigenvalue_with_error(spec: &ModeOperatorSpec) -> Result<(f64, f64)> {
    let coarse = lowest_eigenvalues(&spec.grid(DEFAULT_RESOLUTION)?, 1)?[0];
    let fine = lowest_eigenvalues(&spec.grid(2 * DEFAULT_RESOLUTION - 1)?, 1)?[0];
    Ok(((4.0 * fine - coarse) / 3.0, (fine - coarse).abs() / 3.0))
}

pub fn lowest_mode_eigenvalue(spec: &ModeOperatorSpec) -> Result<f64> {
    lowest_mode_eigenvalue_with_error(spec).map(|(v, _)| v)
}

fn k1_lowest(d: u32, p: f64, lambda: f64) -> Result<f64> {
    lowest_mode_eigenvalue(&mode_operator(d, p, lambda, 1)?)
}

/// Lambda at which the lowest k = 1 eigenvalue crosses zero. The scan range
/// is anchored at the closed-form threshold from the explicit boundary curve;
/// the eigenvalue is required to decrease strictly across the 10-point scan
/// before the root is trusted.
pub fn stability_threshold(d: u32, p: f64) -> Result<f64> {
    if d < 2 {
        return Err(Error::domain("stability threshold needs d >= 2"));
    }
    if !(p > 2.0 && p < two_star(d)) {
        return Err(Error::domain(format!(
            "p = {p} outside (2, {}) for d = {d}",
            two_star(d)
        )));
    }
    let anchor = lambda_of(a_bar(d, p, 1.0)?, d);
    let (lo, hi) = (0.01 * anchor, 100.0 * anchor);

    let mut grid_vals = [0.0; 10];
    let mut bracket = None;
    for i in 0..grid_vals.len() {
        let lam = lo * (hi / lo).powf(i as f64 / 9.0);
        grid_vals[i] = k1_lowest(d, p, lam)?;
        if i > 0 {
            if grid_vals[i] >= grid_vals[i - 1] {
                return Err(Error::Solver {
                    what: format!(
                        "k = 1 eigenvalue fails to decrease in lambda near {lam:e} \
                         (d = {d}, p = {p})"
                    ),
                });
            }
            if bracket.is_none() && grid_vals[i - 1] > 0.0 && grid_vals[i] <= 0.0 {
                let prev = lo * (hi / lo).powf((i - 1) as f64 / 9.0);
                bracket = Some((prev, lam));
            }
        }
    }
    let (blo, bhi) = bracket.ok_or(Error::Bracket {
        lo,
        hi,
        what: format!("k = 1 eigenvalue does not change sign for d = {d}, p = {p}"),
    })?;

    let failure = RefCell::new(None);
    let root = find_root(
        |lam| match k1_lowest(d, p, lam) {
            Ok(v) => v,
            Err(e) => {
                *failure.borrow_mut() = Some(e);
                f64::NAN
            }
        },
        blo,
        bhi,
        1e-7 * anchor,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(root?.x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::critical_a;

    // the k = 0 sector is an exactly solvable well: eigenvalues
    // Lambda + mu_k - lam_w^2 (m+1-j)^2, so the lowest sits at
    // Lambda (1 - p^2/4) + mu_k and the j = 1 state is the zero mode
    fn exact_lowest(lambda: f64, p: f64, mu_k: f64) -> f64 {
        lambda * (1.0 - 0.25 * p * p) + mu_k
    }

    #[test]
    fn operator_construction_and_asymptote() {
        let spec = mode_operator(5, 3.0, 0.25, 1).unwrap();
        assert_eq!(spec.mu_k, 4.0);
        assert_eq!(mode_operator(3, 3.0, 1.0, 0).unwrap().mu_k, 0.0);
        assert_eq!(mode_operator(3, 3.0, 1.0, 2).unwrap().mu_k, 6.0);

        // even potential settling to Lambda + mu_k at the wall
        for s in [0.3, 1.1, 2.9] {
            let diff = (spec.potential(s) - spec.potential(-s)).abs();
            assert!(diff <= 1e-12);
        }
        // at the wall the well term is bounded by its envelope
        // (p-1) c sech^2 <= 4 (p-1) c e^{-2 lam_w s}
        let lam_w = 0.5 * (spec.p - 2.0) * spec.lambda.sqrt();
        let bound =
            4.0 * (spec.p - 1.0) * spec.coupling * (-2.0 * lam_w * spec.half_width()).exp();
        let wall = (spec.potential(spec.half_width()) - (0.25 + 4.0)).abs();
        assert!(bound < 1e-4, "half-width leaves the potential unsettled");
        assert!(wall <= 1.05 * bound, "wall gap {wall:e} vs envelope {bound:e}");
        // well depth at the center
        assert!(spec.potential(0.0) < 0.25 + 4.0);

        assert!(mode_operator(1, 3.0, 1.0, 1).is_err());
        assert!(mode_operator(3, 2.0, 1.0, 1).is_err());
        assert!(mode_operator(3, 7.0, 1.0, 1).is_err());
        assert!(mode_operator(3, 3.0, -0.5, 1).is_err());
    }

    #[test]
    fn translation_mode_is_annihilated() {
        // apply the discretized k = 0 operator to w' and compare against the
        // zero eigenvalue; resolution chosen so the stencil error is small
        let spec = mode_operator(5, 3.0, 0.25, 0).unwrap();
        let op = GridOperator::from_potential(60.0, 50_001, |s| spec.potential(s)).unwrap();
        let f: Vec<f64> = (0..op.n)
            .map(|i| spec.profile.derivative(op.grid_point(i)))
            .collect();
        let r = op.apply(&f);
        let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let ratio = norm(&r) / norm(&f);
        assert!(ratio <= 1e-6, "zero-mode residual {ratio:e}");
    }

    #[test]
    fn k0_spectrum_matches_the_solvable_well() {
        let spec = mode_operator(5, 3.0, 0.25, 0).unwrap();
        let eigs = mode_eigenvalues(&spec, 2, DEFAULT_RESOLUTION).unwrap();
        let exact = exact_lowest(0.25, 3.0, 0.0);
        assert!(
            (eigs[0] - exact).abs() <= 1e-6,
            "ground {} vs exact {exact}",
            eigs[0]
        );
        assert!(eigs[1].abs() <= 1e-4, "zero mode off: {:e}", eigs[1]);
    }

    #[test]
    fn lowest_eigenvalues_match_exact_values_across_sectors() {
        for (d, p, lambda, k) in [(3u32, 4.0, 0.5, 1u32), (4, 2.5, 3.0, 2), (5, 3.0, 1.7, 0)] {
            let spec = mode_operator(d, p, lambda, k).unwrap();
            let (got, err) = lowest_mode_eigenvalue_with_error(&spec).unwrap();
            let want = exact_lowest(lambda, p, spec.mu_k);
            assert!(
                (got - want).abs() <= 1e-5 * want.abs().max(1.0),
                "d {d} p {p} k {k}: {got} vs {want} (err est {err:e})"
            );
            assert!(err <= 1e-4);
        }
    }

    #[test]
    fn eigenvalues_do_not_decrease_with_the_sector() {
        let vals: Vec<f64> = (0..3)
            .map(|k| {
                lowest_mode_eigenvalue(&mode_operator(3, 3.0, 1.0, k).unwrap()).unwrap()
            })
            .collect();
        assert!(vals[1] >= vals[0] && vals[2] >= vals[1], "{vals:?}");
    }

    #[test]
    fn threshold_agrees_with_the_boundary_curve() {
        for (d, p, closed) in [
            (3u32, 4.0, 2.0 / 3.0),
            (4, 2.5, 16.0 / 3.0),
            (5, 3.0, 16.0 / 5.0),
        ] {
            let lam_star = stability_threshold(d, p).unwrap();
            assert!(
                (lam_star - closed).abs() <= 0.01 * closed,
                "d {d} p {p}: threshold {lam_star} vs {closed}"
            );

            // same point reported as a weight exponent
            let a_form = critical_a(d) - lam_star.sqrt();
            let want = a_bar(d, p, 1.0).unwrap();
            assert!(
                (a_form - want).abs() <= 0.01 * lam_star.sqrt(),
                "d {d} p {p}: a form {a_form} vs {want}"
            );

            // just below the crossing every low sector stays nonnegative
            for k in 1..=3 {
                let spec = mode_operator(d, p, 0.99 * lam_star, k).unwrap();
                let val = lowest_mode_eigenvalue(&spec).unwrap();
                assert!(val > 0.0, "d {d} p {p} k {k}: {val} below threshold");
            }
        }
    }

    #[test]
    fn sign_flips_across_the_threshold() {
        let anchor = 2.0 / 3.0;
        assert!(k1_lowest(3, 4.0, 0.2 * anchor).unwrap() > 0.0);
        assert!(k1_lowest(3, 4.0, 5.0 * anchor).unwrap() < 0.0);
    }
}
