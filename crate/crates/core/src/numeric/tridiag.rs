//! Real symmetric tridiagonal eigenproblems: lowest eigenpair only.

use crate::error::{Error, Result};

/// Symmetric tridiagonal matrix stored as its diagonal and first off-diagonal.
#[derive(Debug, Clone)]
pub struct SymTridiag {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiag {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert_eq!(off.len() + 1, diag.len(), "off-diagonal length must be n-1");
        Self { diag, off }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.off[i - 1].abs() } else { 0.0 }
                + if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// Number of eigenvalues strictly below `x` (Sturm sequence count).
    pub fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = 1.0;
        for i in 0..self.len() {
            let e2 = if i > 0 { self.off[i - 1] * self.off[i - 1] } else { 0.0 };
            q = self.diag[i] - x - if i > 0 { e2 / q } else { 0.0 };
            if q == 0.0 {
                q = -f64::EPSILON * (self.diag[i].abs() + x.abs() + 1.0);
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Smallest eigenvalue by bisection on the Sturm count.
    pub fn lowest_eigenvalue(&self) -> f64 {
        let (mut lo, mut hi) = self.gershgorin();
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) >= 1 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    fn matvec(&self, x: &[f64], y: &mut [f64]) {
        let n = self.len();
        for i in 0..n {
            let mut s = self.diag[i] * x[i];
            if i > 0 {
                s += self.off[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                s += self.off[i] * x[i + 1];
            }
            y[i] = s;
        }
    }

    /// Eigenvector for the eigenvalue `lambda` from a twisted factorisation:
    /// ratio recurrences run inward from both ends and meet where the twist
    /// `γ_k` is smallest, so exponentially small tails keep their relative
    /// accuracy.
    fn twisted_vector(&self, lambda: f64) -> Vec<f64> {
        let n = self.len();
        let tiny = f64::MIN_POSITIVE.sqrt();
        let guard = |p: f64| if p.abs() < tiny { tiny.copysign(p) } else { p };
        let mut top = vec![0.0; n];
        top[0] = guard(self.diag[0] - lambda);
        for i in 1..n {
            top[i] = guard(self.diag[i] - lambda - self.off[i - 1] * self.off[i - 1] / top[i - 1]);
        }
        let mut bottom = vec![0.0; n];
        bottom[n - 1] = guard(self.diag[n - 1] - lambda);
        for i in (0..n - 1).rev() {
            bottom[i] = guard(self.diag[i] - lambda - self.off[i] * self.off[i] / bottom[i + 1]);
        }
        let twist = (0..n)
            .min_by(|&i, &j| {
                let gi = (top[i] + bottom[i] - (self.diag[i] - lambda)).abs();
                let gj = (top[j] + bottom[j] - (self.diag[j] - lambda)).abs();
                gi.total_cmp(&gj)
            })
            .unwrap_or(0);
        let mut z = vec![0.0; n];
        z[twist] = 1.0;
        for i in (0..twist).rev() {
            z[i] = -self.off[i] / top[i] * z[i + 1];
        }
        for i in twist..n - 1 {
            z[i + 1] = -self.off[i] / bottom[i + 1] * z[i];
        }
        let nrm = z.iter().map(|v| v * v).sum::<f64>().sqrt();
        z.iter_mut().for_each(|v| *v /= nrm);
        z
    }

    /// Lowest eigenpair; the vector is unit-norm in the Euclidean sense with
    /// nonnegative sum. Fails when the residual exceeds `tol·‖T‖`.
    pub fn lowest_eigenpair(&self, tol: f64) -> Result<(f64, Vec<f64>)> {
        let n = self.len();
        if n == 0 {
            return Err(crate::error::invalid("lowest_eigenpair", "empty matrix"));
        }
        let lambda = self.lowest_eigenvalue();
        let (glo, ghi) = self.gershgorin();
        let scale = glo.abs().max(ghi.abs()).max(1.0);
        let mut x = self.twisted_vector(lambda);
        let mut y = vec![0.0; n];
        self.matvec(&x, &mut y);
        let residual = x.iter().zip(&y).map(|(a, b)| (b - lambda * a).powi(2)).sum::<f64>().sqrt();
        if !(residual <= tol * scale) {
            return Err(Error::NoConvergence { op: "lowest_eigenpair", residual });
        }
        if x.iter().sum::<f64>() < 0.0 {
            x.iter_mut().for_each(|v| *v = -*v);
        }
        Ok((lambda, x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laplacian_lowest_mode() {
        let n = 50;
        let t = SymTridiag::new(vec![2.0; n], vec![-1.0; n - 1]);
        let exact = 2.0 - 2.0 * (std::f64::consts::PI / (n as f64 + 1.0)).cos();
        let (l, v) = t.lowest_eigenpair(1e-12).unwrap();
        assert!((l - exact).abs() < 1e-13);
        assert!(v.iter().all(|x| *x > 0.0));
        assert_eq!(t.count_below(exact + 1e-9), 1);
    }
}
