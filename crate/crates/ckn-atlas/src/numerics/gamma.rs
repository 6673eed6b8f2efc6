//! Gamma function via the Lanczos approximation (g = 7, 9 terms).
//!
//! Double precision only. Relative error is below 1e-13 on [0.5, 50], which
//! covers every direct call in this crate; ratios of huge arguments go through
//! `ln_gamma` instead so nothing overflows.

const G: f64 = 7.0;

const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Lanczos series at `x` (expects `x >= 0.5`), returns `(series, w)` with
/// `w = x - 1 + g + 0.5`.
fn lanczos_sum(x: f64) -> (f64, f64) {
    let z = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    (acc, z + G + 0.5)
}

/// Gamma(x) for x > 0. Arguments below 0.5 go through the reflection formula.
pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection keeps the Lanczos argument >= 0.5
        std::f64::consts::PI / ((std::f64::consts::PI * x).sin() * gamma(1.0 - x))
    } else {
        let (series, w) = lanczos_sum(x);
        let sqrt_two_pi = (2.0 * std::f64::consts::PI).sqrt();
        sqrt_two_pi * w.powf(x - 0.5) * (-w).exp() * series
    }
}

/// log Gamma(x) for x > 0. Stays finite where `gamma` would overflow,
/// so differences of large arguments (Gamma ratios) remain computable.
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        let s = (std::f64::consts::PI * x).sin();
        std::f64::consts::PI.ln() - s.ln() - ln_gamma(1.0 - x)
    } else {
        let (series, w) = lanczos_sum(x);
        0.5 * (2.0 * std::f64::consts::PI).ln() + (x - 0.5) * w.ln() - w + series.ln()
    }
}

/// log of Gamma(x + 1/2) / Gamma(x), stable for arbitrarily large x.
///
/// A naive `ln_gamma(x + 0.5) - ln_gamma(x)` cancels catastrophically once x
/// is large (two O(x log x) values differing by O(log x)), so past x = 20 the
/// Stirling expansions are subtracted term by term instead.
pub fn ln_gamma_ratio_half(x: f64) -> f64 {
    if x < 20.0 {
        return ln_gamma(x + 0.5) - ln_gamma(x);
    }
    // (x - 1/2) ln(x + 1/2) - (x - 1/2) ln x telescopes into x ln1p(1/(2x));
    // the Bernoulli corrections B_2n/(2n(2n-1)) (y^{1-2n} - x^{1-2n}) with
    // y = x + 1/2 carry their own built-in cancellation but the terms are
    // already tiny relative to the total, so plain subtraction is safe.
    let y = x + 0.5;
    let mut s = 0.5 * x.ln() + x * (0.5 / x).ln_1p() - 0.5;
    let (xi, yi) = (1.0 / (x * x), 1.0 / (y * y));
    let (mut px, mut py) = (1.0 / x, 1.0 / y);
    for c in [
        1.0 / 12.0,
        -1.0 / 360.0,
        1.0 / 1260.0,
        -1.0 / 1680.0,
    ] {
        s += c * (py - px);
        px *= xi;
        py *= yi;
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn integer_factorials() {
        // against an exact product, error budget 1e-13 on [0.5, 50]
        let mut fact = 1.0_f64;
        for n in 1..=49u32 {
            assert!(
                rel(gamma(n as f64), fact) < 1e-13,
                "gamma({n}) off by {:e}",
                rel(gamma(n as f64), fact)
            );
            fact *= n as f64;
        }
        assert!(rel(gamma(50.0), fact) < 1e-13);
    }

    #[test]
    fn half_integers_from_recurrence() {
        // Gamma(1/2) = sqrt(pi), then Gamma(x+1) = x Gamma(x)
        let mut exact = PI.sqrt();
        let mut x = 0.5_f64;
        while x < 50.0 {
            assert!(rel(gamma(x), exact) < 1e-13, "gamma({x})");
            exact *= x;
            x += 1.0;
        }
    }

    #[test]
    fn named_values() {
        assert!(rel(gamma(2.5), 1.5 * 0.5 * PI.sqrt()) < 1e-14);
        assert!(rel(gamma(1.5), 0.5 * PI.sqrt()) < 1e-14);
        assert!((gamma(1.0) - 1.0).abs() < 1e-14);
        assert!((gamma(2.0) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn reflection_region() {
        // Gamma(0.25) Gamma(0.75) = pi / sin(pi/4)
        let lhs = gamma(0.25) * gamma(0.75);
        assert!(rel(lhs, PI / (PI / 4.0).sin()) < 1e-13);
    }

    #[test]
    fn ln_gamma_matches_gamma_on_moderate_range() {
        let mut x = 0.5;
        while x <= 50.0 {
            assert!(
                (ln_gamma(x) - gamma(x).ln()).abs() < 1e-12 * (1.0 + ln_gamma(x).abs()),
                "x = {x}"
            );
            x += 0.37;
        }
    }

    #[test]
    fn ln_gamma_against_stirling_series_at_large_x() {
        // Stirling with three correction terms is essentially exact here
        for &x in &[1.0e3_f64, 1.0e4, 2.0e5, 1.0e6] {
            let stirling = (x - 0.5) * x.ln() - x + 0.5 * (2.0 * PI).ln() + 1.0 / (12.0 * x)
                - 1.0 / (360.0 * x.powi(3))
                + 1.0 / (1260.0 * x.powi(5));
            assert!(
                (ln_gamma(x) - stirling).abs() / stirling.abs() < 1e-14,
                "x = {x}"
            );
        }
    }

    #[test]
    fn ratio_half_asymptotics() {
        // Gamma(x+1/2)/Gamma(x) ~ sqrt(x) (1 - 1/(8x) + 1/(128 x^2) + ...)
        for &x in &[1.0e4_f64, 2.0e5] {
            let series = x.sqrt()
                * (1.0 - 1.0 / (8.0 * x) + 1.0 / (128.0 * x * x) + 5.0 / (1024.0 * x.powi(3)));
            assert!(
                (ln_gamma_ratio_half(x).exp() - series).abs() / series < 1e-11,
                "x = {x}"
            );
        }
    }
}
