//! Sweeps of the low-lying spectrum over `h`: symmetry sectors, crossing
//! detection and refinement, rate fits and the fitted phase law.

use crate::error::{invalid, Error, Result};
use crate::numeric::optimize::{brent_root_bracketed, golden_section};
use crate::operator::{lowest_eigs, SparseHermitianOperator};
use crate::reduction::{crossing_angles, dotc, predict_crossings, BraidPrediction, PhaseLaw, SiteMap};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Eigensolver settings shared by all points of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverParams {
    /// Relative residual target of [`lowest_eigs`].
    pub tol: f64,
    pub seed: u64,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self { tol: 1e-10, seed: 0 }
    }
}

/// One solved point of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub h: f64,
    /// Lowest `m` eigenvalues, ascending.
    pub values: Vec<f64>,
    /// Energies of the `n` cyclic symmetry sectors, indexed by branch label.
    pub sectors: Option<Vec<f64>>,
    /// `I₁` recovered from the sector energies.
    pub i1: Option<C64>,
    /// `θ(h)` of the fitted phase law, in the measured orientation.
    pub theta_fit: Option<f64>,
    /// Relabelled branches `μ_k` (three wells).
    pub branches: Option<Vec<f64>>,
    /// Largest relative residual of the eigenpairs.
    pub residual: f64,
    /// Norm bound of the discretised operator.
    pub norm: f64,
}

impl SweepRow {
    /// `λ_{i+1} − λ_i` (1-based `i`).
    pub fn gap(&self, i: usize) -> Option<f64> {
        Some(self.values.get(i)? - self.values.get(i - 1)?)
    }
}

/// A located crossing of `λ_{lower+1}` and `λ_lower`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub h: f64,
    /// The phase-law abscissa (`1/h` or `h^{−1/2}`).
    pub g: f64,
    /// 1 for a crossing of the first gap, 2 for the second.
    pub lower: usize,
    /// Branch labels that meet, when symmetry sectors are available.
    pub branches: Option<(usize, usize)>,
    /// `|λ_{lower+1} − λ_lower|` at the refined point.
    pub gap_residual: f64,
}

/// Least-squares fit `ln(λ₂ − λ₁) = −s/h + c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub s: f64,
    pub intercept: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    /// Rows in the order of the input `h` list (descending).
    pub rows: Vec<SweepRow>,
    /// Sorted by increasing `g`.
    pub crossings: Vec<Crossing>,
    pub rate: Option<RateFit>,
    pub prediction: Option<BraidPrediction>,
    /// Sign of `dθ/dg` measured from the sector data (+1 when unknown).
    pub orientation: f64,
}

/// Description of a sweep over `h`.
pub struct SweepPlan<'a> {
    /// Number of wells (size of the low-lying cluster).
    pub n: usize,
    /// Eigenvalues per row; at least `n`.
    pub m: usize,
    pub law: PhaseLaw,
    /// Magnitude of the phase slope `dθ/dg`, when a prediction is wanted.
    pub slope: Option<f64>,
    pub solver: SolverParams,
    /// Locate and refine crossings (three or more wells).
    pub crossings: bool,
    pub build: &'a (dyn Fn(f64) -> Result<SparseHermitianOperator> + Sync),
}

/// Sector energies of the lowest `values.len()` eigenpairs under the cyclic
/// map `p`. Sector `k` carries the character `ω^{−(k−1)}`, `ω = e^{2πi/n}`.
pub fn sector_energies(values: &[f64], vectors: &[Vec<C64>], p: &SiteMap) -> Result<Vec<f64>> {
    let n = values.len();
    if vectors.len() != n || n == 0 {
        return Err(invalid("sector_energies", "need one vector per value"));
    }
    // m[(i, j)] = ⟨P v_j, v_i⟩
    let pv: Vec<Vec<C64>> = vectors.iter().map(|v| p.apply(v)).collect();
    let m = nalgebra::DMatrix::<C64>::from_fn(n, n, |i, j| dotc(&vectors[i], &pv[j]));
    let omega = C64::from_polar(1.0, 2.0 * PI / n as f64);
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        // projector (1/n) Σ_j ω^{k j} P^j in the eigenvector coordinates
        let mut proj = nalgebra::DMatrix::<C64>::zeros(n, n);
        let mut power = nalgebra::DMatrix::<C64>::identity(n, n);
        for j in 0..n {
            proj += &power * omega.powu((k * j) as u32);
            power = &m * &power;
        }
        proj /= C64::new(n as f64, 0.0);
        let col = (0..n)
            .max_by(|&a, &b| proj.column(a).norm().total_cmp(&proj.column(b).norm()))
            .unwrap_or(0);
        let c = proj.column(col);
        let weight: f64 = c.iter().map(|z| z.norm_sqr()).sum();
        if !(weight > 0.25 / n as f64) {
            return Err(Error::CheckFailed {
                op: "sector_energies",
                msg: format!("sector {} missing from the low-lying cluster", k + 1),
            });
        }
        out.push(c.iter().zip(values).map(|(z, l)| z.norm_sqr() * l).sum::<f64>() / weight);
    }
    Ok(out)
}

/// `I₁ = (1/n) Σ_k E_k ω^{−(k−1)}` from sector energies.
pub fn i1_from_sectors(sectors: &[f64]) -> C64 {
    let n = sectors.len() as f64;
    sectors.iter().enumerate().map(|(k, e)| C64::from_polar(*e, -2.0 * PI * k as f64 / n)).sum::<C64>() / n
}

fn solve_row(plan: &SweepPlan, h: f64) -> Result<SweepRow> {
    let op = (plan.build)(h)?;
    let want = op.symmetry.is_some();
    let eig = lowest_eigs(&op, plan.m, plan.solver.tol, plan.solver.seed, want)?;
    let sectors = match &op.symmetry {
        Some(p) => Some(sector_energies(&eig.values[..plan.n], &eig.vectors[..plan.n], p)?),
        None => None,
    };
    let i1 = sectors.as_deref().map(i1_from_sectors);
    let residual = eig.residuals.iter().cloned().fold(0.0, f64::max) / eig.norm;
    Ok(SweepRow { h, values: eig.values, sectors, i1, theta_fit: None, branches: None, residual, norm: eig.norm })
}

fn solve_rows(plan: &SweepPlan, hs: &[f64]) -> Result<Vec<SweepRow>> {
    hs.par_iter().map(|&h| solve_row(plan, h)).collect()
}

/// Solve every `h`, locate crossings, and fit the rate and phase law.
pub fn run_sweep(plan: &SweepPlan, hs: &[f64]) -> Result<SweepResult> {
    if hs.len() < 2 {
        return Err(invalid("sweep", "need at least two values of h"));
    }
    if hs.windows(2).any(|w| !(w[0] > w[1])) || !(hs[hs.len() - 1] > 0.0) {
        return Err(invalid("sweep", "h list must be positive and strictly descending"));
    }
    if plan.m < plan.n {
        return Err(invalid("sweep", format!("m = {} below the well count {}", plan.m, plan.n)));
    }
    let mut rows = solve_rows(plan, hs)?;
    let crossings = if plan.n >= 3 && plan.crossings { find_crossings(plan, &rows)? } else { Vec::new() };
    let rate = (plan.n == 2).then(|| fit_rate(&rows)).flatten();
    let orientation = measured_orientation(plan.law, &rows).unwrap_or(1.0);
    let prediction = match plan.slope {
        Some(slope) if plan.n == 3 => fit_alpha0(&crossings, slope, orientation, plan.law, hs[hs.len() - 1], hs[0])?,
        _ => None,
    };
    if let Some(pred) = &prediction {
        for row in rows.iter_mut() {
            let theta = (orientation * pred.theta(row.h)).rem_euclid(2.0 * PI);
            row.theta_fit = Some(theta);
            row.branches = Some(relabel(&row.values[..3], theta).to_vec());
        }
    }
    Ok(SweepResult { rows, crossings, rate, prediction, orientation })
}

fn fit_rate(rows: &[SweepRow]) -> Option<RateFit> {
    let pts: Vec<(f64, f64)> =
        rows.iter().filter_map(|r| r.gap(1).filter(|g| *g > 0.0).map(|g| (1.0 / r.h, g.ln()))).collect();
    let (slope, intercept) = linear_fit(&pts)?;
    Some(RateFit { s: -slope, intercept, points: pts.len() })
}

/// Ordinary least squares `y = slope·x + intercept`.
pub fn linear_fit(pts: &[(f64, f64)]) -> Option<(f64, f64)> {
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

/// Sign of `dθ/dg` from the unwrapped phase of `I₁` across the rows.
fn measured_orientation(law: PhaseLaw, rows: &[SweepRow]) -> Option<f64> {
    let mut pts = Vec::new();
    let mut prev: Option<f64> = None;
    for r in rows {
        let mut th = r.i1?.arg();
        if let Some(p) = prev {
            th += 2.0 * PI * ((p - th) / (2.0 * PI)).round();
        }
        prev = Some(th);
        pts.push((law.g(r.h), th));
    }
    let (slope, _) = linear_fit(&pts)?;
    Some(if slope < 0.0 { -1.0 } else { 1.0 })
}

/// Assign the sorted eigenvalues to branch labels by the order of
/// `cos(θ + (k−1)2π/3)`.
pub fn relabel(sorted: &[f64], theta: f64) -> [f64; 3] {
    let key = |k: usize| (theta + k as f64 * 2.0 * PI / 3.0).cos();
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| key(a).total_cmp(&key(b)));
    let mut out = [0.0; 3];
    for (rank, &k) in order.iter().enumerate() {
        out[k] = sorted[rank];
    }
    out
}

/// Angle of a crossing in the positive-slope frame: the sorted gap fixes
/// the angle up to the branch pair, and the pair fixes it completely.
fn crossing_angle(c: &Crossing, orientation: f64) -> Option<f64> {
    let (a, b) = c.branches?;
    // conjugating I₁ swaps branches 2 and 3
    let map = |k: usize| if orientation < 0.0 && k > 1 { 5 - k } else { k };
    let pair = {
        let (x, y) = (map(a), map(b));
        (x.min(y), x.max(y))
    };
    crossing_angles(3).ok()?.into_iter().find_map(|ang| {
        // gap21 closes at 0, 2π/3, 4π/3; gap32 at π/3, π, 5π/3
        let step = (ang.angle / (PI / 3.0)).round() as usize;
        let lower = if step % 2 == 0 { 1 } else { 2 };
        (ang.pair == pair && lower == c.lower).then_some(ang.angle)
    })
}

/// Fit `α₀` so that the predicted phase law passes through the first
/// detected crossing.
fn fit_alpha0(
    crossings: &[Crossing],
    slope: f64,
    orientation: f64,
    law: PhaseLaw,
    h_lo: f64,
    h_hi: f64,
) -> Result<Option<BraidPrediction>> {
    let Some(first) = crossings.first() else {
        return Ok(None);
    };
    let angle = crossing_angle(first, orientation).unwrap_or(if first.lower == 1 { 0.0 } else { PI / 3.0 });
    let alpha0 = (angle - slope * first.g).rem_euclid(2.0 * PI);
    predict_crossings(slope, alpha0, h_lo, h_hi, law, 3).map(Some)
}

fn sector_order(e: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..e.len()).collect();
    idx.sort_by(|&a, &b| e[a].total_cmp(&e[b]));
    idx
}

struct Candidate {
    g_lo: f64,
    g_hi: f64,
    lower: usize,
    /// Sector pair and its energy difference at both ends.
    sectors: Option<(usize, usize, f64, f64)>,
    /// Larger gap at the two ends of an unsymmetrised bracket.
    end_gap: f64,
}

fn find_crossings(plan: &SweepPlan, rows: &[SweepRow]) -> Result<Vec<Crossing>> {
    let law = plan.law;
    let mut cands = Vec::new();
    let with_sectors = rows.iter().all(|r| r.sectors.is_some());
    if with_sectors {
        for w in rows.windows(2) {
            let (ea, eb) = (w[0].sectors.as_ref().unwrap(), w[1].sectors.as_ref().unwrap());
            let (oa, ob) = (sector_order(ea), sector_order(eb));
            for i in 0..plan.n {
                for j in i + 1..plan.n {
                    if (ea[i] - ea[j]).signum() != (eb[i] - eb[j]).signum() {
                        let pos = |o: &[usize], k: usize| o.iter().position(|&x| x == k).unwrap();
                        let lower = pos(&oa, i).min(pos(&oa, j)).min(pos(&ob, i)).min(pos(&ob, j)) + 1;
                        cands.push(Candidate {
                            g_lo: law.g(w[0].h),
                            g_hi: law.g(w[1].h),
                            lower,
                            sectors: Some((i, j, ea[i] - ea[j], eb[i] - eb[j])),
                            end_gap: 0.0,
                        });
                    }
                }
            }
        }
    } else {
        for lower in 1..plan.n.min(3) {
            let gaps: Vec<f64> = rows.iter().map(|r| r.gap(lower).unwrap_or(f64::INFINITY)).collect();
            for i in 1..rows.len().saturating_sub(1) {
                if gaps[i] < gaps[i - 1] && gaps[i] <= gaps[i + 1] {
                    cands.push(Candidate {
                        g_lo: law.g(rows[i - 1].h),
                        g_hi: law.g(rows[i + 1].h),
                        lower,
                        sectors: None,
                        end_gap: gaps[i - 1].max(gaps[i + 1]),
                    });
                }
            }
        }
    }
    let refined: Vec<Option<Crossing>> = cands.par_iter().map(|c| refine(plan, c)).collect::<Result<Vec<_>>>()?;
    let mut out: Vec<Crossing> = refined.into_iter().flatten().collect();
    out.sort_by(|a, b| a.g.total_cmp(&b.g));
    Ok(out)
}

fn refine(plan: &SweepPlan, c: &Candidate) -> Result<Option<Crossing>> {
    let law = plan.law;
    let mut failure: Option<Error> = None;
    // evaluated row with the smallest |objective|
    let mut best: Option<(f64, SweepRow)> = None;
    let mut keep = |d: f64, row: SweepRow| {
        if best.as_ref().map_or(true, |(b, _)| d.abs() < *b) {
            best = Some((d.abs(), row));
        }
    };
    let span = (c.g_hi - c.g_lo).abs();
    // gap a true crossing can still show once the minimiser is pinned to
    // `xtol`; zero on the sector path, where the root is exact
    let mut resolution = 0.0;
    let g = match c.sectors {
        Some((i, j, d_lo, d_hi)) => {
            let f = |g: f64| -> f64 {
                if failure.is_some() {
                    return f64::NAN;
                }
                match solve_row(plan, law.h(g)) {
                    Ok(row) => {
                        let e = row.sectors.as_ref().unwrap();
                        let d = e[i] - e[j];
                        keep(d, row);
                        d
                    }
                    Err(e) => {
                        failure = Some(e);
                        f64::NAN
                    }
                }
            };
            brent_root_bracketed(f, (c.g_lo, d_lo), (c.g_hi, d_hi), 1e-5 * span.max(1e-12), 60)
        }
        None => {
            let f = |g: f64| -> f64 {
                if failure.is_some() {
                    return f64::NAN;
                }
                match solve_row(plan, law.h(g)) {
                    Ok(row) => {
                        let d = row.gap(c.lower).unwrap_or(f64::INFINITY);
                        keep(d, row);
                        d
                    }
                    Err(e) => {
                        failure = Some(e);
                        f64::NAN
                    }
                }
            };
            let xtol = 1e-9 * span;
            resolution = 4.0 * (2.0 * c.end_gap / span) * xtol;
            Some(golden_section(f, c.g_lo, c.g_hi, xtol).0)
        }
    };
    if let Some(e) = failure {
        return Err(e);
    }
    let (Some(g), Some((gap_residual, row))) = (g, best) else {
        return Ok(None);
    };
    // reported only when the solver resolves the closing gap
    if gap_residual > (10.0 * plan.solver.tol * row.norm).max(resolution) {
        return Ok(None);
    }
    Ok(Some(Crossing {
        h: law.h(g),
        g,
        lower: c.lower,
        branches: c.sectors.map(|(i, j, _, _)| (i + 1, j + 1)),
        gap_residual,
    }))
}
