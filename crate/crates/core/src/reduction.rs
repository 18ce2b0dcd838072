//! Reduction of a Hermitian operator to the interaction matrix on its
//! low-lying eigenspace, circulant structure and crossing prediction.

use crate::error::{check_failed, invalid, Result};
use crate::sparse::{lowest_eigs, CsrMatrix, EigOptions};
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub type CMatrix = DMatrix<C64>;

/// `Σ conj(x_i)·y_i`.
pub fn dotc(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

/// A Hermitian operator on `ℂᵈ` that can report its lowest eigenpairs.
pub trait HermitianOperator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[C64]) -> Vec<C64>;
    /// Lowest `m` eigenvalues (ascending) with orthonormal eigenvectors.
    fn lowest(&self, m: usize) -> Result<(Vec<f64>, Vec<Vec<C64>>)>;
}

impl HermitianOperator for CMatrix {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, x: &[C64]) -> Vec<C64> {
        (self * nalgebra::DVector::from_column_slice(x)).iter().copied().collect()
    }

    fn lowest(&self, m: usize) -> Result<(Vec<f64>, Vec<Vec<C64>>)> {
        let h = (self + self.adjoint()) * C64::new(0.5, 0.0);
        let eig = h.symmetric_eigen();
        let mut idx: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        idx.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
        let idx = &idx[..m.min(idx.len())];
        Ok((
            idx.iter().map(|&k| eig.eigenvalues[k]).collect(),
            idx.iter().map(|&k| eig.eigenvectors.column(k).iter().copied().collect()).collect(),
        ))
    }
}

/// A sparse operator `A − offset` solved with [`lowest_eigs`].
pub struct ShiftedSparse<'a> {
    pub matrix: &'a CsrMatrix,
    pub offset: f64,
    pub opts: EigOptions,
}

impl HermitianOperator for ShiftedSparse<'_> {
    fn dim(&self) -> usize {
        self.matrix.dim()
    }

    fn apply(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![C64::new(0.0, 0.0); x.len()];
        self.matrix.matvec(x, &mut y);
        y.iter_mut().zip(x).for_each(|(yi, xi)| *yi -= xi * self.offset);
        y
    }

    fn lowest(&self, m: usize) -> Result<(Vec<f64>, Vec<Vec<C64>>)> {
        let opts = EigOptions { m, want_vectors: true, ..self.opts.clone() };
        let e = lowest_eigs(self.matrix, &opts)?;
        Ok((e.values.iter().map(|v| v - self.offset).collect(), e.vectors))
    }
}

/// A site map `(P u)[i] = phase[i] · u[src[i]]` representing a unitary
/// cyclic symmetry.
#[derive(Debug, Clone)]
pub struct SiteMap {
    pub src: Vec<usize>,
    pub phase: Vec<C64>,
}

impl SiteMap {
    pub fn apply(&self, u: &[C64]) -> Vec<C64> {
        self.src.iter().zip(&self.phase).map(|(&s, &p)| p * u[s]).collect()
    }

    /// Cyclic shift by `k` sites: `(P u)[i] = u[i − k]`.
    pub fn roll(n: usize, k: usize) -> Self {
        Self { src: (0..n).map(|i| (i + n - k % n) % n).collect(), phase: vec![C64::new(1.0, 0.0); n] }
    }
}

/// Localised quasimodes `u₁..u_n`, optionally generated by a cyclic map.
#[derive(Debug, Clone)]
pub struct QuasimodeFamily {
    pub vectors: Vec<Vec<C64>>,
    pub shift: Option<SiteMap>,
}

impl QuasimodeFamily {
    /// `u_{k+1} = P u_k` starting from `u₁`.
    pub fn from_generator(u1: Vec<C64>, p: SiteMap, n: usize) -> Self {
        let mut vectors = vec![u1];
        for _ in 1..n {
            let next = p.apply(vectors.last().unwrap());
            vectors.push(next);
        }
        Self { vectors, shift: Some(p) }
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

/// Gram matrix `g_ij = ⟨v_i, v_j⟩` (linear in the first slot).
pub fn gram(vs: &[Vec<C64>]) -> CMatrix {
    let n = vs.len();
    CMatrix::from_fn(n, n, |i, j| dotc(&vs[j], &vs[i]))
}

/// Positive inverse square root of a Hermitian positive definite matrix.
pub fn inverse_sqrt(g: &CMatrix) -> Result<CMatrix> {
    let eig = ((g + g.adjoint()) * C64::new(0.5, 0.0)).symmetric_eigen();
    let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(min > 1e-12) {
        return Err(check_failed("symmetric_orthonormalize", format!("Gram matrix not positive definite (min eigenvalue {min:.3e})")));
    }
    let d = CMatrix::from_diagonal(&eig.eigenvalues.map(|l| C64::new(1.0 / l.sqrt(), 0.0)));
    Ok(&eig.eigenvectors * d * eig.eigenvectors.adjoint())
}

/// `w = G^{−1/2} v`: returns `G` and the orthonormal family.
pub fn symmetric_orthonormalize(vs: &[Vec<C64>]) -> Result<(CMatrix, Vec<Vec<C64>>)> {
    if vs.is_empty() {
        return Err(invalid("symmetric_orthonormalize", "empty family"));
    }
    let g = gram(vs);
    let s = inverse_sqrt(&g)?;
    let dim = vs[0].len();
    let ws = (0..vs.len())
        .map(|i| {
            let mut w = vec![C64::new(0.0, 0.0); dim];
            for (j, v) in vs.iter().enumerate() {
                let c = s[(i, j)];
                w.iter_mut().zip(v).for_each(|(wk, vk)| *wk += c * vk);
            }
            w
        })
        .collect();
    Ok((g, ws))
}

/// Matrix `M_ij = ⟨T x_i, x_j⟩`.
fn interaction<T: HermitianOperator + ?Sized>(t: &T, xs: &[Vec<C64>]) -> CMatrix {
    let txs: Vec<Vec<C64>> = xs.iter().map(|x| t.apply(x)).collect();
    let n = xs.len();
    CMatrix::from_fn(n, n, |i, j| dotc(&xs[j], &txs[i]))
}

/// The cyclic shift `τ_{j,k} = δ_{j+1,k}`.
pub fn shift_matrix(n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |j, k| if (j + 1) % n == k { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CirculantCoeffs {
    pub coeffs: Vec<C64>,
    /// Frobenius norm of `W − Σ I_k τ^k`.
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub struct ReductionResult {
    pub gram: CMatrix,
    pub basis: Vec<Vec<C64>>,
    pub u: CMatrix,
    pub w: CMatrix,
    pub r: CMatrix,
    /// Lowest eigenvalues of the operator (`n_eigs` of them).
    pub eigenvalues: Vec<f64>,
    /// Eigenvalues of `W`, ascending.
    pub w_spectrum: Vec<f64>,
    pub circulant: Option<CirculantCoeffs>,
    /// `‖Wτ − τW‖_F` when a cyclic map was supplied.
    pub commutator: Option<f64>,
}

/// Spectral norm of a Hermitian matrix.
pub fn hermitian_norm(m: &CMatrix) -> f64 {
    ((m + m.adjoint()) * C64::new(0.5, 0.0)).symmetric_eigen().eigenvalues.iter().fold(0.0, |a, l| a.max(l.abs()))
}

pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut v: Vec<f64> = ((m + m.adjoint()) * C64::new(0.5, 0.0)).symmetric_eigen().eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Project the quasimodes on the span of the lowest `n` eigenvectors,
/// orthonormalise symmetrically and form `U`, `W` and `R = W − U`.
pub fn spectral_reduce<T: HermitianOperator + ?Sized>(t: &T, family: &QuasimodeFamily, n_eigs: usize) -> Result<ReductionResult> {
    let n = family.len();
    if n == 0 || n_eigs < n {
        return Err(invalid("spectral_reduce", format!("need n_eigs >= family size ({n_eigs} < {n})")));
    }
    let (eigenvalues, evecs) = t.lowest(n_eigs)?;
    if n_eigs > n && !(eigenvalues[n] > eigenvalues[n - 1]) {
        return Err(check_failed("spectral_reduce", "no gap above the lowest n eigenvalues"));
    }
    let evecs = &evecs[..n];
    let projected: Vec<Vec<C64>> = family
        .vectors
        .iter()
        .map(|u| {
            let mut v = vec![C64::new(0.0, 0.0); u.len()];
            for e in evecs {
                let c = dotc(e, u);
                v.iter_mut().zip(e).for_each(|(vi, ei)| *vi += c * ei);
            }
            v
        })
        .collect();
    let (g, basis) = symmetric_orthonormalize(&projected).map_err(|_| {
        check_failed("spectral_reduce", "projected quasimodes are dependent; they miss the low eigenspace")
    })?;
    let w = interaction(t, &basis);
    let w = (&w + w.adjoint()) * C64::new(0.5, 0.0);
    let u = interaction(t, &family.vectors);
    let u = (&u + u.adjoint()) * C64::new(0.5, 0.0);
    let r = &w - &u;
    let w_spectrum = hermitian_eigenvalues(&w);
    let (circulant, commutator) = if family.shift.is_some() {
        let tau = shift_matrix(n);
        (Some(circulant_coeffs(&w)), Some((&w * &tau - &tau * &w).norm()))
    } else {
        (None, None)
    };
    Ok(ReductionResult { gram: g, basis, u, w, r, eigenvalues, w_spectrum, circulant, commutator })
}

/// Least-squares fit `W ≈ Σ I_k τ^k` by averaging cyclic diagonals, with the
/// Hermitian constraints `I₀ ∈ ℝ`, `I_k = conj(I_{n−k})` imposed.
pub fn circulant_coeffs(w: &CMatrix) -> CirculantCoeffs {
    let n = w.nrows();
    let raw: Vec<C64> = (0..n).map(|k| (0..n).map(|i| w[(i, (i + k) % n)]).sum::<C64>() / n as f64).collect();
    let coeffs: Vec<C64> = (0..n)
        .map(|k| {
            let z = (raw[k] + raw[(n - k) % n].conj()) * 0.5;
            if k == 0 {
                C64::new(z.re, 0.0)
            } else {
                z
            }
        })
        .collect();
    let fit = circulant_matrix(&coeffs);
    CirculantCoeffs { residual: (w - fit).norm(), coeffs }
}

/// `Σ I_k τ^k`.
pub fn circulant_matrix(coeffs: &[C64]) -> CMatrix {
    let n = coeffs.len();
    CMatrix::from_fn(n, n, |i, j| coeffs[(j + n - i) % n])
}

/// Eigenvalues of the Hermitian circulant `Σ I_k τ^k`, ascending.
pub fn circulant_eigs(coeffs: &[C64]) -> Result<Vec<f64>> {
    let n = coeffs.len();
    if n == 0 {
        return Err(invalid("circulant_eigs", "no coefficients"));
    }
    let scale = coeffs.iter().fold(1.0f64, |a, z| a.max(z.norm()));
    if coeffs[0].im.abs() > 1e-12 * scale {
        return Err(invalid("circulant_eigs", "I_0 is not real"));
    }
    for k in 1..n {
        if (coeffs[k] - coeffs[n - k].conj()).norm() > 1e-12 * scale {
            return Err(invalid("circulant_eigs", format!("I_{k} != conj(I_{})", n - k)));
        }
    }
    let i0 = coeffs[0].re;
    let mut v = match n {
        1 => vec![i0],
        2 => vec![i0 - coeffs[1].re.abs(), i0 + coeffs[1].re.abs()],
        3 => {
            let (rho, theta) = coeffs[1].to_polar();
            (0..3).map(|k| i0 + 2.0 * rho * (theta + k as f64 * 2.0 * PI / 3.0).cos()).collect()
        }
        _ => (0..n)
            .map(|k| {
                (0..n)
                    .map(|j| coeffs[j] * C64::from_polar(1.0, 2.0 * PI * (k * j) as f64 / n as f64))
                    .sum::<C64>()
                    .re
            })
            .collect(),
    };
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// The three-well branches `μ_k = I₀ + 2ρ cos(θ + (k−1)2π/3)` in label order.
pub fn three_well_branches(i0: f64, i1: C64) -> [f64; 3] {
    let (rho, theta) = i1.to_polar();
    [0, 1, 2].map(|k| i0 + 2.0 * rho * (theta + k as f64 * 2.0 * PI / 3.0).cos())
}

/// An angle at which two labelled branches coincide.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossingAngle {
    pub angle: f64,
    /// Labels (1-based) of the branches that meet.
    pub pair: (usize, usize),
}

/// Angles `θ` of `I₁ = ρe^{iθ}` where two of the three branches meet.
pub fn crossing_angles(n: usize) -> Result<Vec<CrossingAngle>> {
    if n != 3 {
        return Err(invalid("crossing_angles", format!("crossing classification is only available for n = 3, got {n}")));
    }
    let mut v = vec![
        CrossingAngle { angle: 0.0, pair: (2, 3) },
        CrossingAngle { angle: PI / 3.0, pair: (1, 3) },
        CrossingAngle { angle: 2.0 * PI / 3.0, pair: (1, 2) },
        CrossingAngle { angle: PI, pair: (2, 3) },
        CrossingAngle { angle: 4.0 * PI / 3.0, pair: (1, 3) },
        CrossingAngle { angle: 5.0 * PI / 3.0, pair: (1, 2) },
    ];
    v.sort_by(|a, b| a.angle.total_cmp(&b.angle));
    Ok(v)
}

/// Crossing status of a three-well interaction coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CrossingStatus {
    /// `ρ = 0`: the three branches collapse to a triple eigenvalue.
    Degenerate,
    /// Two branches meet at this angle.
    Crossing(CrossingAngle),
    /// All branches distinct.
    Simple,
}

pub fn crossing_status(i1: C64, angle_tol: f64) -> CrossingStatus {
    let (rho, theta) = i1.to_polar();
    if rho == 0.0 {
        return CrossingStatus::Degenerate;
    }
    let theta = theta.rem_euclid(2.0 * PI);
    for c in crossing_angles(3).unwrap() {
        let d = (theta - c.angle + PI).rem_euclid(2.0 * PI) - PI;
        if d.abs() <= angle_tol {
            return CrossingStatus::Crossing(c);
        }
    }
    CrossingStatus::Simple
}

/// `a(x) = cos(x/3 + 2π/3) − cos(x/3)`, `b(x) = cos(x/3 + 4π/3) − cos(x/3 + 2π/3)`.
pub fn braid_functions(x: f64) -> (f64, f64) {
    let y = x / 3.0;
    let a = (y + 2.0 * PI / 3.0).cos() - y.cos();
    let b = (y + 4.0 * PI / 3.0).cos() - (y + 2.0 * PI / 3.0).cos();
    (a, b)
}

/// How the phase of the interaction coefficient depends on `h`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PhaseLaw {
    /// `θ = α₀ + slope/h` (wells).
    InverseH,
    /// `θ = α₀ + slope·h^{−1/2}` (boundary and edge problems).
    InverseSqrtH,
}

impl PhaseLaw {
    pub fn g(self, h: f64) -> f64 {
        match self {
            Self::InverseH => 1.0 / h,
            Self::InverseSqrtH => 1.0 / h.sqrt(),
        }
    }

    pub fn h(self, g: f64) -> f64 {
        match self {
            Self::InverseH => 1.0 / g,
            Self::InverseSqrtH => 1.0 / (g * g),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PredictedCrossing {
    pub h: f64,
    /// `1/h` or `h^{−1/2}` according to the phase law.
    pub g: f64,
    pub angle: CrossingAngle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BraidPrediction {
    pub slope: f64,
    pub alpha0: f64,
    pub law: PhaseLaw,
    pub angles: Vec<CrossingAngle>,
    /// Sorted by decreasing `h`.
    pub crossings: Vec<PredictedCrossing>,
}

impl BraidPrediction {
    pub fn theta(&self, h: f64) -> f64 {
        self.alpha0 + self.slope * self.law.g(h)
    }
}

/// Values of `h` in `[h_lo, h_hi]` where `θ(h) = α₀ + slope·g(h)` hits a
/// crossing angle modulo 2π.
pub fn predict_crossings(slope: f64, alpha0: f64, h_lo: f64, h_hi: f64, law: PhaseLaw, n: usize) -> Result<BraidPrediction> {
    if !(slope > 0.0) {
        return Err(invalid("predict_crossings", format!("phase slope {slope} must be positive")));
    }
    let angles = crossing_angles(n)?;
    let mut crossings = Vec::new();
    if h_lo > 0.0 && h_lo <= h_hi {
        let (g_lo, g_hi) = (law.g(h_hi), law.g(h_lo));
        let (th_lo, th_hi) = (alpha0 + slope * g_lo, alpha0 + slope * g_hi);
        for a in &angles {
            let m0 = ((th_lo - a.angle) / (2.0 * PI)).ceil() as i64;
            let m1 = ((th_hi - a.angle) / (2.0 * PI)).floor() as i64;
            for m in m0..=m1 {
                let g = (a.angle + 2.0 * PI * m as f64 - alpha0) / slope;
                crossings.push(PredictedCrossing { h: law.h(g), g, angle: *a });
            }
        }
    }
    crossings.sort_by(|a, b| a.g.total_cmp(&b.g));
    Ok(BraidPrediction { slope, alpha0, law, angles, crossings })
}

/// Ring of `sites` nodes with `n_wells` potential dips and a uniform
/// complex hopping phase.
#[derive(Debug, Clone)]
pub struct Testbed {
    /// `T = H − λ_single`.
    pub operator: CMatrix,
    pub family: QuasimodeFamily,
    /// Ground energy of the single-dip ring.
    pub lambda_single: f64,
}

/// Width of each dip in sites.
pub fn testbed_dip_width(sites: usize, n_wells: usize) -> usize {
    (sites / (5 * n_wells)).max(1)
}

fn ring_hamiltonian(sites: usize, centres: &[usize], width: usize, barrier: f64, flux_phase: f64) -> CMatrix {
    let t = C64::from_polar(1.0, flux_phase / sites as f64);
    let mut h = CMatrix::zeros(sites, sites);
    let mut v = vec![barrier; sites];
    for &c in centres {
        for d in 0..width {
            v[(c + sites + d - width / 2) % sites] = 0.0;
        }
    }
    for j in 0..sites {
        let k = (j + 1) % sites;
        h[(k, j)] -= t;
        h[(j, k)] -= t.conj();
        h[(j, j)] += C64::new(2.0 + v[j], 0.0);
    }
    h
}

/// Synthetic cyclic-symmetric operator with localised quasimodes.
pub fn synth_testbed(sites: usize, n_wells: usize, barrier: f64, flux_phase: f64) -> Result<Testbed> {
    if n_wells == 0 || sites % n_wells != 0 {
        return Err(invalid("synth_testbed", format!("{sites} sites not divisible by {n_wells} wells")));
    }
    if sites < 3 {
        return Err(invalid("synth_testbed", "need at least 3 sites"));
    }
    let period = sites / n_wells;
    let width = testbed_dip_width(sites, n_wells);
    let centres: Vec<usize> = (0..n_wells).map(|k| k * period).collect();
    let h = ring_hamiltonian(sites, &centres, width, barrier, flux_phase);
    let single = ring_hamiltonian(sites, &[0], width, barrier, flux_phase);
    let (ls, vs) = single.lowest(1)?;
    let lambda_single = ls[0];
    let operator = h - CMatrix::identity(sites, sites) * C64::new(lambda_single, 0.0);
    let family = QuasimodeFamily::from_generator(vs[0].clone(), SiteMap::roll(sites, period), n_wells);
    Ok(Testbed { operator, family, lambda_single })
}
