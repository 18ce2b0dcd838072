//! Derivative-free one- and two-dimensional optimisation and root finding.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section minimisation of a unimodal `f` on `[a, b]`.
///
/// Returns `(x, f(x))`; stops when the bracket is narrower than `tol`.
pub fn golden_section<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let (mut a, mut b) = if a < b { (a, b) } else { (b, a) };
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        if b - a <= f64::EPSILON * (a.abs() + b.abs()) {
            break;
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Outcome of a coarse scan of a function on a uniform grid.
#[derive(Debug, Clone)]
pub struct Scan {
    pub xs: Vec<f64>,
    pub values: Vec<f64>,
    /// Index of the smallest sample.
    pub argmin: usize,
    /// Number of strict interior local minima (plateaus count once).
    pub local_minima: usize,
}

impl Scan {
    /// Bracket `[x_{i-1}, x_{i+1}]` around the smallest sample, clamped to the grid.
    pub fn bracket(&self) -> (f64, f64) {
        let i = self.argmin;
        let lo = self.xs[i.saturating_sub(1)];
        let hi = self.xs[(i + 1).min(self.xs.len() - 1)];
        (lo, hi)
    }

    /// Whether the smallest sample sits on either end of the grid.
    pub fn at_edge(&self) -> bool {
        self.argmin == 0 || self.argmin + 1 == self.xs.len()
    }
}

/// Sample `f` at `n` uniformly spaced points of `[a, b]`.
pub fn scan<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, n: usize) -> Scan {
    let n = n.max(3);
    let xs: Vec<f64> = (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect();
    let values: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let argmin = values
        .iter()
        .enumerate()
        .fold(0, |best, (i, v)| if *v < values[best] { i } else { best });
    let mut local_minima = 0;
    let mut i = 1;
    while i + 1 < n {
        if values[i] < values[i - 1] {
            // walk across a plateau
            let mut j = i;
            while j + 1 < n && values[j + 1] == values[i] {
                j += 1;
            }
            if j + 1 < n && values[j + 1] > values[i] {
                local_minima += 1;
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    Scan { xs, values, argmin, local_minima }
}

/// Brent's method for a root of `f` in `[a, b]`; requires a sign change.
pub fn brent_root<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, xtol: f64, max_iter: usize) -> Option<f64> {
    let (fa, fb) = (f(a), f(b));
    brent_root_bracketed(f, (a, fa), (b, fb), xtol, max_iter)
}

/// [`brent_root`] with the endpoint values already known. Stops when the
/// bracket or the last step is below `xtol`.
pub fn brent_root_bracketed<F: FnMut(f64) -> f64>(
    mut f: F,
    (a, fa): (f64, f64),
    (b, fb): (f64, f64),
    xtol: f64,
    max_iter: usize,
) -> Option<f64> {
    let (mut a, mut b, mut fa, mut fb) = (a, b, fa, fb);
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if fa.signum() == fb.signum() {
        return None;
    }
    if fa.abs() < fb.abs() {
        std::mem::swap(&mut a, &mut b);
        std::mem::swap(&mut fa, &mut fb);
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut bisected = true;
    for _ in 0..max_iter {
        if fb == 0.0 || (b - a).abs() <= xtol {
            return Some(b);
        }
        let mut s = if fa != fc && fb != fc {
            a * fb * fc / ((fa - fb) * (fa - fc))
                + b * fa * fc / ((fb - fa) * (fb - fc))
                + c * fa * fb / ((fc - fa) * (fc - fb))
        } else {
            b - fb * (b - a) / (fb - fa)
        };
        let m = (3.0 * a + b) / 4.0;
        let out = !((s > m.min(b) && s < m.max(b)) || (s < m.min(b) && s > m.max(b)));
        let slow = if bisected {
            (s - b).abs() >= (b - c).abs() / 2.0 || (b - c).abs() < xtol
        } else {
            (s - b).abs() >= (c - d).abs() / 2.0 || (c - d).abs() < xtol
        };
        if out || slow {
            s = 0.5 * (a + b);
            bisected = true;
        } else {
            bisected = false;
        }
        let fs = f(s);
        if (s - b).abs() <= 0.5 * xtol {
            return Some(s);
        }
        d = c;
        c = b;
        fc = fb;
        if fa.signum() != fs.signum() {
            b = s;
            fb = fs;
        } else {
            a = s;
            fa = fs;
        }
        if fa.abs() < fb.abs() {
            std::mem::swap(&mut a, &mut b);
            std::mem::swap(&mut fa, &mut fb);
        }
    }
    Some(b)
}

/// Nelder–Mead simplex minimisation in two dimensions.
///
/// `project` maps trial points back into the feasible set before evaluation.
pub fn nelder_mead_2d<F, P>(mut f: F, project: P, x0: [f64; 2], step: [f64; 2], ftol: f64, max_iter: usize) -> ([f64; 2], f64)
where
    F: FnMut([f64; 2]) -> f64,
    P: Fn([f64; 2]) -> [f64; 2],
{
    let mut eval = |p: [f64; 2]| {
        let q = project(p);
        (q, f(q))
    };
    let mut s = [
        eval(x0),
        eval([x0[0] + step[0], x0[1]]),
        eval([x0[0], x0[1] + step[1]]),
    ];
    for _ in 0..max_iter {
        s.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = (s[2].1 - s[0].1).abs();
        let size = ((s[2].0[0] - s[0].0[0]).abs() + (s[2].0[1] - s[0].0[1]).abs())
            .max((s[1].0[0] - s[0].0[0]).abs() + (s[1].0[1] - s[0].0[1]).abs());
        if spread <= ftol * (1.0 + s[0].1.abs()) && size < 1e-10 {
            break;
        }
        if spread == 0.0 && size < 1e-14 {
            break;
        }
        let c = [(s[0].0[0] + s[1].0[0]) / 2.0, (s[0].0[1] + s[1].0[1]) / 2.0];
        let w = s[2].0;
        let at = |t: f64| [c[0] + t * (w[0] - c[0]), c[1] + t * (w[1] - c[1])];
        let r = eval(at(-1.0));
        if r.1 < s[0].1 {
            let e = eval(at(-2.0));
            s[2] = if e.1 < r.1 { e } else { r };
        } else if r.1 < s[1].1 {
            s[2] = r;
        } else {
            let k = if r.1 < s[2].1 { eval(at(-0.5)) } else { eval(at(0.5)) };
            if k.1 < s[2].1.min(r.1) {
                s[2] = k;
            } else {
                let b = s[0].0;
                for v in s.iter_mut().skip(1) {
                    *v = eval([(v.0[0] + b[0]) / 2.0, (v.0[1] + b[1]) / 2.0]);
                }
            }
        }
    }
    s.sort_by(|a, b| a.1.total_cmp(&b.1));
    s[0]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_parabola_vertex() {
        let (x, fx) = golden_section(|x| (x - 0.3).powi(2), -1.0, 2.0, 1e-10);
        assert!((x - 0.3).abs() < 1e-9, "{x}");
        assert!(fx < 1e-18);
        // with an offset the vertex is only resolved to about sqrt(eps)
        let (x, fx) = golden_section(|x| (x - 0.3).powi(2) + 1.0, -1.0, 2.0, 1e-10);
        assert!((x - 0.3).abs() < 5e-8, "{x}");
        assert!((fx - 1.0).abs() < 1e-15);
    }

    #[test]
    fn scan_counts_minima() {
        let s = scan(|x: f64| (3.0 * x).cos(), -3.0, 3.0, 61);
        assert_eq!(s.local_minima, 2);
        let s = scan(|x| x * x, -1.0, 1.0, 21);
        assert_eq!(s.local_minima, 1);
        assert_eq!(s.argmin, 10);
        assert!(!s.at_edge());
    }

    #[test]
    fn brent_cubic_root() {
        let r = brent_root(|x| x * x * x - 2.0, 0.0, 2.0, 1e-14, 200).unwrap();
        assert!((r - 2f64.cbrt()).abs() < 1e-12);
        assert!(brent_root(|x| x * x + 1.0, -1.0, 1.0, 1e-12, 50).is_none());
    }

    #[test]
    fn nelder_mead_rosenbrock() {
        let (x, _) = nelder_mead_2d(
            |p| (1.0 - p[0]).powi(2) + 100.0 * (p[1] - p[0] * p[0]).powi(2),
            |p| p,
            [-1.2, 1.0],
            [0.1, 0.1],
            1e-16,
            5000,
        );
        assert!((x[0] - 1.0).abs() < 1e-5 && (x[1] - 1.0).abs() < 1e-5, "{x:?}");
    }
}
