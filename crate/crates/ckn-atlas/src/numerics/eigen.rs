//! Lowest eigenvalues of -d^2/ds^2 + V(s) on [-L, L] with Dirichlet walls,
//! discretized by the three-point stencil on a uniform grid. The symmetric
//! tridiagonal eigenvalues come from bisection on the Sturm sequence, which is
//! robust at any matrix size and costs O(N) per probe.

use crate::error::{Error, Result};

/// Uniform-grid discretization of a Schroedinger operator. Grid points are
/// s_i = -L + i h, i = 0..n-1, with h = 2L/(n-1); the walls sit one step
/// outside the grid.
#[derive(Debug, Clone)]
pub struct GridOperator {
    pub half_width: f64,
    pub n: usize,
    pub diagonal: Vec<f64>,
    /// Uniform off-diagonal entry, -1/h^2.
    pub off_diagonal: f64,
}

impl GridOperator {
    pub fn from_potential<V: Fn(f64) -> f64>(half_width: f64, n: usize, v: V) -> Result<Self> {
        if !(half_width > 0.0) {
            return Err(Error::domain("grid half-width must be positive"));
        }
        if n < 3 {
            return Err(Error::domain("grid needs at least 3 points"));
        }
        let h = 2.0 * half_width / (n - 1) as f64;
        let inv_h2 = 1.0 / (h * h);
        let diagonal = (0..n)
            .map(|i| 2.0 * inv_h2 + v(-half_width + i as f64 * h))
            .collect();
        Ok(GridOperator {
            half_width,
            n,
            diagonal,
            off_diagonal: -inv_h2,
        })
    }

    pub fn h(&self) -> f64 {
        2.0 * self.half_width / (self.n - 1) as f64
    }

    pub fn grid_point(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.h()
    }

    /// Matrix-vector product (Dirichlet: values beyond the grid are zero).
    pub fn apply(&self, f: &[f64]) -> Vec<f64> {
        assert_eq!(f.len(), self.n);
        let b = self.off_diagonal;
        (0..self.n)
            .map(|i| {
                let left = if i > 0 { f[i - 1] } else { 0.0 };
                let right = if i + 1 < self.n { f[i + 1] } else { 0.0 };
                self.diagonal[i] * f[i] + b * (left + right)
            })
            .collect()
    }

    /// Number of eigenvalues strictly below `x` (Sturm sequence count).
    fn count_below(&self, x: f64) -> usize {
        let b2 = self.off_diagonal * self.off_diagonal;
        let pivmin = 1e-290;
        let mut count = 0;
        let mut d = 1.0;
        for (i, &a) in self.diagonal.iter().enumerate() {
            d = if i == 0 { a - x } else { (a - x) - b2 / d };
            if d.abs() < pivmin {
                d = -pivmin;
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }
}

/// The `count` smallest eigenvalues, ascending. Bisection converges to
/// machine-level bracket width; the discretization error of the stencil
/// itself (O(h^2)) is the caller's business.
pub fn lowest_eigenvalues(op: &GridOperator, count: usize) -> Result<Vec<f64>> {
    if count == 0 || count > op.n {
        return Err(Error::domain(format!(
            "asked for {count} eigenvalues of a {}-point operator",
            op.n
        )));
    }
    let b = op.off_diagonal.abs();
    let lo0 = op.diagonal.iter().cloned().fold(f64::INFINITY, f64::min) - 2.0 * b;
    let hi0 = op.diagonal.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + 2.0 * b;
    let mut out = Vec::with_capacity(count);
    for k in 0..count {
        let mut lo = if k == 0 { lo0 } else { out[k - 1] };
        let mut hi = hi0;
        // invariant: count_below(lo) <= k < count_below(hi)
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if op.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 1e-13 * (1.0 + mid.abs()) {
                break;
            }
        }
        out.push(0.5 * (lo + hi));
    }
    Ok(out)
}
