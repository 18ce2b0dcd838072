use num_complex::Complex64 as C64;

/// Complex sparse matrix in compressed-row form, intended to hold Hermitian
/// operators (both triangles stored).
#[derive(Debug, Clone)]
pub struct CsrMatrix {
    n: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<C64>,
}

impl CsrMatrix {
    /// Assemble from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, C64)]) -> Self {
        let mut counts = vec![0usize; n + 1];
        for &(r, c, _) in triplets {
            assert!(r < n && c < n, "triplet index out of range");
            counts[r + 1] += 1;
        }
        for i in 0..n {
            counts[i + 1] += counts[i];
        }
        let mut next = counts.clone();
        let mut cols = vec![0usize; triplets.len()];
        let mut vals = vec![C64::new(0.0, 0.0); triplets.len()];
        for &(r, c, v) in triplets {
            cols[next[r]] = c;
            vals[next[r]] = v;
            next[r] += 1;
        }
        let mut indptr = Vec::with_capacity(n + 1);
        let mut indices = Vec::with_capacity(triplets.len());
        let mut values = Vec::with_capacity(triplets.len());
        indptr.push(0);
        let mut row: Vec<(usize, C64)> = Vec::new();
        for i in 0..n {
            row.clear();
            row.extend((counts[i]..counts[i + 1]).map(|k| (cols[k], vals[k])));
            row.sort_by_key(|e| e.0);
            let mut k = 0;
            while k < row.len() {
                let (c, mut v) = row[k];
                k += 1;
                while k < row.len() && row[k].0 == c {
                    v += row[k].1;
                    k += 1;
                }
                indices.push(c);
                values.push(v);
            }
            indptr.push(indices.len());
        }
        Self { n, indptr, indices, values }
    }

    /// Diagonal matrix.
    pub fn from_diagonal(d: &[f64]) -> Self {
        let t: Vec<_> = d.iter().enumerate().map(|(i, &v)| (i, i, C64::new(v, 0.0))).collect();
        Self::from_triplets(d.len(), &t)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[C64]) {
        let r = self.indptr[i]..self.indptr[i + 1];
        (&self.indices[r.clone()], &self.values[r])
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        let (c, v) = self.row(i);
        match c.binary_search(&j) {
            Ok(k) => v[k],
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    /// `y = A x`.
    pub fn matvec(&self, x: &[C64], y: &mut [C64]) {
        for (i, yi) in y.iter_mut().enumerate().take(self.n) {
            let mut s = C64::new(0.0, 0.0);
            for k in self.indptr[i]..self.indptr[i + 1] {
                s += self.values[k] * x[self.indices[k]];
            }
            *yi = s;
        }
    }

    /// Largest `|A_ij - conj(A_ji)|` over stored entries.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            let (c, v) = self.row(i);
            for (&j, &a) in c.iter().zip(v) {
                worst = worst.max((a - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    /// Maximum absolute row sum; an upper bound for the spectral norm of a
    /// Hermitian matrix.
    pub fn norm_bound(&self) -> f64 {
        (0..self.n)
            .map(|i| self.row(i).1.iter().map(|v| v.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Gershgorin lower bound on the spectrum.
    pub fn gershgorin_lower(&self) -> f64 {
        (0..self.n)
            .map(|i| {
                let (c, v) = self.row(i);
                let mut d = 0.0;
                let mut r = 0.0;
                for (&j, a) in c.iter().zip(v) {
                    if j == i {
                        d = a.re;
                    } else {
                        r += a.norm();
                    }
                }
                d - r
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Symmetric permutation `P A Pᵀ` where `perm[new] = old`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut inv = vec![0usize; self.n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let mut t = Vec::with_capacity(self.nnz());
        for (new, &old) in perm.iter().enumerate() {
            let (c, v) = self.row(old);
            for (&j, &a) in c.iter().zip(v) {
                t.push((new, inv[j], a));
            }
        }
        Self::from_triplets(self.n, &t)
    }

    /// Dense copy, for small matrices and tests.
    pub fn to_dense(&self) -> nalgebra::DMatrix<C64> {
        let mut m = nalgebra::DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            let (c, v) = self.row(i);
            for (&j, &a) in c.iter().zip(v) {
                m[(i, j)] = a;
            }
        }
        m
    }
}
