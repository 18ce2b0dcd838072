use super::{order::reverse_cuthill_mckee, CsrMatrix, EnvelopeCholesky};
use crate::error::{invalid, Error, Result};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Controls for [`lowest_eigs`].
#[derive(Debug, Clone)]
pub struct EigOptions {
    /// Number of eigenpairs wanted.
    pub m: usize,
    /// Relative residual target: `‖Av − λv‖ ≤ tol·‖A‖`.
    pub tol: f64,
    pub seed: u64,
    /// Shift for the inverted operator. Must lie below the spectrum; it is
    /// lowered automatically when the factorisation fails. `None` uses a
    /// Gershgorin bound.
    pub shift: Option<f64>,
    /// Extra block vectors beyond `m`.
    pub guard: usize,
    /// Krylov blocks per restart cycle.
    pub blocks: usize,
    pub max_cycles: usize,
    pub want_vectors: bool,
}

impl Default for EigOptions {
    fn default() -> Self {
        Self { m: 4, tol: 1e-10, seed: 0, shift: None, guard: 3, blocks: 6, max_cycles: 60, want_vectors: false }
    }
}

/// Result of [`lowest_eigs`]; values ascending.
#[derive(Debug, Clone)]
pub struct Eigs {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<C64>>,
    /// Residual norms `‖Av − λv‖` (not divided by `‖A‖`).
    pub residuals: Vec<f64>,
    pub norm: f64,
    pub shift: f64,
}

const DENSE_LIMIT: usize = 200;

/// The `m` lowest eigenpairs of the Hermitian matrix `a`.
///
/// Small matrices go to a dense solver. Otherwise `a` is reordered by reverse
/// Cuthill–McKee, `a − σ` is factored by envelope Cholesky and a restarted
/// block Krylov iteration on `(a − σ)⁻¹` is combined with Rayleigh–Ritz on `a`.
pub fn lowest_eigs(a: &CsrMatrix, opts: &EigOptions) -> Result<Eigs> {
    let n = a.dim();
    if opts.m == 0 || opts.m > n {
        return Err(invalid("lowest_eigs", format!("need 0 < m <= dim, got m={} dim={n}", opts.m)));
    }
    let norm = a.norm_bound().max(f64::MIN_POSITIVE);
    if n <= DENSE_LIMIT {
        return dense_lowest(a, opts, norm);
    }
    let perm = reverse_cuthill_mckee(a);
    let ap = a.permuted(&perm);
    let glo = a.gershgorin_lower();
    let mut shift = opts.shift.unwrap_or(glo - 1e-3 * norm);
    let mut step = 1e-4 * norm.max(1.0);
    let chol = loop {
        match EnvelopeCholesky::factor(&ap, shift) {
            Ok(c) => break c,
            Err(Error::NotPositiveDefinite { .. }) if shift > glo - norm => {
                shift -= step;
                step *= 2.0;
            }
            Err(e) => return Err(e),
        }
    };
    let mut out = krylov(&ap, &chol, shift, norm, opts)?;
    // undo the permutation
    for v in out.vectors.iter_mut() {
        let mut w = vec![C64::new(0.0, 0.0); n];
        for (new, &old) in perm.iter().enumerate() {
            w[old] = v[new];
        }
        *v = w;
    }
    if !opts.want_vectors {
        out.vectors.clear();
    }
    Ok(out)
}

fn dense_lowest(a: &CsrMatrix, opts: &EigOptions, norm: f64) -> Result<Eigs> {
    let d = a.to_dense();
    let h = (&d + d.adjoint()) * C64::new(0.5, 0.0);
    let eig = h.symmetric_eigen();
    let mut idx: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    idx.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let mut values = Vec::new();
    let mut vectors = Vec::new();
    let mut residuals = Vec::new();
    for &k in idx.iter().take(opts.m) {
        let v = eig.eigenvectors.column(k).into_owned();
        let lam = eig.eigenvalues[k];
        residuals.push((&d * &v - &v * C64::new(lam, 0.0)).norm());
        values.push(lam);
        if opts.want_vectors {
            vectors.push(v.iter().copied().collect());
        }
    }
    Ok(Eigs { values, vectors, residuals, norm, shift: f64::NAN })
}

fn dotc(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

fn nrm(x: &[C64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Orthogonalise `v` against `basis` twice (CGS2) and normalise; returns false
/// when `v` is numerically dependent.
fn orthonormalize_against(basis: &[Vec<C64>], v: &mut [C64]) -> bool {
    let before = nrm(v);
    if before == 0.0 {
        return false;
    }
    for _ in 0..2 {
        for q in basis {
            let c = dotc(q, v);
            for (vi, qi) in v.iter_mut().zip(q) {
                *vi -= c * qi;
            }
        }
    }
    let after = nrm(v);
    if after <= 1e-10 * before {
        return false;
    }
    v.iter_mut().for_each(|z| *z /= after);
    true
}

fn krylov(a: &CsrMatrix, chol: &EnvelopeCholesky, shift: f64, norm: f64, opts: &EigOptions) -> Result<Eigs> {
    let n = a.dim();
    let p = (opts.m + opts.guard).min(n);
    let max_basis = (p * opts.blocks.max(2)).min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut block: Vec<Vec<C64>> = (0..p)
        .map(|_| (0..n).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect())
        .collect();
    let mut worst = f64::INFINITY;
    for _cycle in 0..opts.max_cycles {
        let mut basis: Vec<Vec<C64>> = Vec::with_capacity(max_basis);
        for mut v in block.drain(..) {
            if orthonormalize_against(&basis, &mut v) {
                basis.push(v);
            }
        }
        let mut frontier: Vec<usize> = (0..basis.len()).collect();
        while basis.len() < max_basis && !frontier.is_empty() {
            let mut next = Vec::new();
            for &k in &frontier {
                if basis.len() >= max_basis {
                    break;
                }
                let mut w = basis[k].clone();
                chol.solve_in_place(&mut w);
                if orthonormalize_against(&basis, &mut w) {
                    basis.push(w);
                    next.push(basis.len() - 1);
                }
            }
            frontier = next;
        }
        let k = basis.len();
        let ab: Vec<Vec<C64>> = basis
            .iter()
            .map(|q| {
                let mut y = vec![C64::new(0.0, 0.0); n];
                a.matvec(q, &mut y);
                y
            })
            .collect();
        let mut h = DMatrix::<C64>::zeros(k, k);
        for i in 0..k {
            for j in i..k {
                let z = dotc(&basis[i], &ab[j]);
                h[(i, j)] = z;
                h[(j, i)] = z.conj();
            }
        }
        let eig = h.symmetric_eigen();
        let mut idx: Vec<usize> = (0..k).collect();
        idx.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
        let keep = p.min(k);
        let mut values = Vec::with_capacity(keep);
        let mut vectors = Vec::with_capacity(keep);
        let mut residuals = Vec::with_capacity(keep);
        for &c in idx.iter().take(keep) {
            let y: DVector<C64> = eig.eigenvectors.column(c).into_owned();
            let lam = eig.eigenvalues[c];
            let mut x = vec![C64::new(0.0, 0.0); n];
            let mut ax = vec![C64::new(0.0, 0.0); n];
            for (j, yj) in y.iter().enumerate() {
                for ((xi, axi), (qi, aqi)) in x.iter_mut().zip(ax.iter_mut()).zip(basis[j].iter().zip(&ab[j])) {
                    *xi += qi * yj;
                    *axi += aqi * yj;
                }
            }
            let r = ax.iter().zip(&x).map(|(u, v)| (u - v * lam).norm_sqr()).sum::<f64>().sqrt();
            values.push(lam);
            vectors.push(x);
            residuals.push(r);
        }
        worst = residuals[..opts.m].iter().cloned().fold(0.0, f64::max);
        if worst <= opts.tol * norm {
            values.truncate(opts.m);
            vectors.truncate(opts.m);
            residuals.truncate(opts.m);
            return Ok(Eigs { values, vectors, residuals, norm, shift });
        }
        block = vectors;
    }
    Err(Error::NoConvergence { op: "lowest_eigs", residual: worst / norm })
}
