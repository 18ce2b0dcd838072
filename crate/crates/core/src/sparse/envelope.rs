use super::CsrMatrix;
use crate::error::{Error, Result};
use num_complex::Complex64 as C64;

/// `Σ a_k · conj(b_k)` with split accumulators so the loop vectorises.
#[inline]
fn dot_conj(a: &[C64], b: &[C64]) -> C64 {
    let n = a.len().min(b.len());
    let (mut r0, mut r1, mut i0, mut i1) = (0.0, 0.0, 0.0, 0.0);
    let mut k = 0;
    while k + 2 <= n {
        let (x, y) = (a[k], b[k]);
        r0 += x.re * y.re + x.im * y.im;
        i0 += x.im * y.re - x.re * y.im;
        let (x, y) = (a[k + 1], b[k + 1]);
        r1 += x.re * y.re + x.im * y.im;
        i1 += x.im * y.re - x.re * y.im;
        k += 2;
    }
    if k < n {
        let (x, y) = (a[k], b[k]);
        r0 += x.re * y.re + x.im * y.im;
        i0 += x.im * y.re - x.re * y.im;
    }
    C64::new(r0 + r1, i0 + i1)
}

/// Row-oriented envelope (profile) Cholesky factor `A - shift = L Lᴴ`.
#[derive(Debug, Clone)]
pub struct EnvelopeCholesky {
    first: Vec<usize>,
    start: Vec<usize>,
    data: Vec<C64>,
}

impl EnvelopeCholesky {
    /// Factor `a - shift·I`; `a` must already be in a low-profile ordering.
    pub fn factor(a: &CsrMatrix, shift: f64) -> Result<Self> {
        let n = a.dim();
        let mut first = Vec::with_capacity(n);
        let mut start = Vec::with_capacity(n + 1);
        let mut total = 0usize;
        for i in 0..n {
            let f = a.row(i).0.first().copied().unwrap_or(i).min(i);
            first.push(f);
            start.push(total);
            total += i - f + 1;
        }
        start.push(total);
        let mut data = vec![C64::new(0.0, 0.0); total];
        for i in 0..n {
            let fi = first[i];
            let si = start[i];
            let (cols, vals) = a.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                if j <= i {
                    data[si + j - fi] = v;
                }
            }
            data[si + i - fi] -= shift;
            let (done, row) = data.split_at_mut(si);
            for j in fi..i {
                let fj = first[j];
                let lo = fi.max(fj);
                let rj = &done[start[j] + lo - fj..start[j] + j - fj + 1];
                let (ljj, rj) = rj.split_last().unwrap();
                let s = dot_conj(&row[lo - fi..j - fi], rj);
                row[j - fi] = (row[j - fi] - s) / ljj.re;
            }
            let (diag, ri) = row[..i - fi + 1].split_last_mut().unwrap();
            let d = diag.re - ri.iter().map(|z| z.norm_sqr()).sum::<f64>();
            if !(d > 0.0) {
                return Err(Error::NotPositiveDefinite { op: "envelope_cholesky", pivot: i, value: d });
            }
            *diag = C64::new(d.sqrt(), 0.0);
        }
        Ok(Self { first, start, data })
    }

    pub fn dim(&self) -> usize {
        self.first.len()
    }

    pub fn stored(&self) -> usize {
        self.data.len()
    }

    /// Solve `(A - shift) x = b` in place.
    pub fn solve_in_place(&self, b: &mut [C64]) {
        let n = self.dim();
        for i in 0..n {
            let fi = self.first[i];
            let row = &self.data[self.start[i]..self.start[i + 1]];
            let (d, off) = row.split_last().unwrap();
            let mut s = b[i];
            for (l, x) in off.iter().zip(&b[fi..i]) {
                s -= l * x;
            }
            b[i] = s / d.re;
        }
        for i in (0..n).rev() {
            let fi = self.first[i];
            let row = &self.data[self.start[i]..self.start[i + 1]];
            let (d, off) = row.split_last().unwrap();
            let xi = b[i] / d.re;
            b[i] = xi;
            for (l, y) in off.iter().zip(&mut b[fi..i]) {
                *y -= l.conj() * xi;
            }
        }
    }
}
