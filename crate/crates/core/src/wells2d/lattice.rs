use super::WellConfig;
use crate::error::{invalid, Result};
use crate::operator::{GridInfo, Lattice, SparseHermitianOperator};
use crate::reduction::SiteMap;
use crate::sparse::CsrMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// Gauge function `χ(x, y) = xx·x² + xy·xy + yy·y²`; the vector potential
/// becomes `bA + ∇χ`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct QuadraticGauge {
    pub xx: f64,
    pub xy: f64,
    pub yy: f64,
}

impl QuadraticGauge {
    pub fn eval(&self, p: [f64; 2]) -> f64 {
        self.xx * p[0] * p[0] + self.xy * p[0] * p[1] + self.yy * p[1] * p[1]
    }

    pub fn is_zero(&self) -> bool {
        self.xx == 0.0 && self.xy == 0.0 && self.yy == 0.0
    }
}

/// Options of [`discretize`] beyond the physical configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscretizeOptions {
    pub lattice: Lattice,
    pub gauge: QuadraticGauge,
}

impl Default for DiscretizeOptions {
    fn default() -> Self {
        Self { lattice: Lattice::Square, gauge: QuadraticGauge::default() }
    }
}

/// Default box half-width: circumradius + a + 5√h.
pub fn default_half_width(config: &WellConfig, h: f64) -> f64 {
    config.circumradius() + config.well.a() + 5.0 * h.sqrt()
}

/// Exact `∫ bA·dl / h` along the segment `p → q` for `A = ½(−y, x)`.
fn peierls(b: f64, h: f64, p: [f64; 2], q: [f64; 2]) -> f64 {
    0.5 * b * (p[0] * q[1] - q[0] * p[1]) / h
}

/// Finite-difference `(−ih∇ − bA)² + V` on a Dirichlet box with Peierls link
/// phases.
///
/// The square lattice uses the 5-point stencil on `N × N` interior nodes of
/// `[−R, R]²`. The triangular lattice uses the 7-point stencil with the same
/// spacing `2R/(N+1)` on the disk of radius `R`; it is invariant under
/// rotations by `π/3`, so the three-well symmetry is exact on the grid.
pub fn discretize(h: f64, config: &WellConfig, r: f64, n: usize, opts: DiscretizeOptions) -> Result<SparseHermitianOperator> {
    if !(h > 0.0) {
        return Err(invalid("discretize", format!("h = {h} must be positive")));
    }
    if n < 64 {
        return Err(invalid("discretize", format!("N = {n} below 64")));
    }
    let dx = 2.0 * r / (n + 1) as f64;
    let reach = config.circumradius() + config.well.a();
    if r < reach + 2.0 * dx {
        return Err(invalid("discretize", format!("R = {r} too small: wells reach {reach}")));
    }
    let (points, links, lattice_map, cell_area) = match opts.lattice {
        Lattice::Square => square_nodes(n, dx, r),
        Lattice::Triangular => triangular_nodes(dx, r),
    };
    let (off, diag) = match opts.lattice {
        Lattice::Square => (h * h / (dx * dx), 4.0 * h * h / (dx * dx)),
        Lattice::Triangular => (2.0 * h * h / (3.0 * dx * dx), 4.0 * h * h / (dx * dx)),
    };
    let mut trip = Vec::with_capacity(points.len() + 2 * links.len());
    for (i, p) in points.iter().enumerate() {
        trip.push((i, i, C64::new(diag + config.potential(*p), 0.0)));
    }
    for &(i, j) in &links {
        let (p, q) = (points[i], points[j]);
        let theta = peierls(config.b, h, p, q) + (opts.gauge.eval(q) - opts.gauge.eval(p)) / h;
        let t = C64::from_polar(off, -theta);
        trip.push((i, j, -t));
        trip.push((j, i, -t.conj()));
    }
    let matrix = CsrMatrix::from_triplets(points.len(), &trip);
    let symmetry = if opts.gauge.is_zero() { lattice_map(config.n) } else { None };
    Ok(SparseHermitianOperator {
        matrix,
        grid: GridInfo::Box {
            lattice: opts.lattice,
            half_width: r,
            nodes_per_side: n,
            spacing: dx,
            plaquette_flux: config.b * cell_area / h,
        },
        points,
        symmetry,
        shift_hint: None,
    })
}

type Nodes = (Vec<[f64; 2]>, Vec<(usize, usize)>, Box<dyn Fn(usize) -> Option<SiteMap>>, f64);

fn square_nodes(n: usize, dx: f64, r: f64) -> Nodes {
    let coord = |i: usize| -r + (i + 1) as f64 * dx;
    let idx = move |i: usize, j: usize| i * n + j;
    let mut points = Vec::with_capacity(n * n);
    let mut links = Vec::with_capacity(2 * n * n);
    for i in 0..n {
        for j in 0..n {
            points.push([coord(i), coord(j)]);
            if i + 1 < n {
                links.push((idx(i, j), idx(i + 1, j)));
            }
            if j + 1 < n {
                links.push((idx(i, j), idx(i, j + 1)));
            }
        }
    }
    let map = move |wells: usize| -> Option<SiteMap> {
        // g⁻¹ for the rotation by 2π/wells
        let inv: fn(usize, usize, usize) -> (usize, usize) = match wells {
            2 => |i, j, n| (n - 1 - i, n - 1 - j),
            4 => |i, j, n| (j, n - 1 - i),
            _ => return None,
        };
        let src = (0..n * n)
            .map(|s| {
                let (i, j) = inv(s / n, s % n, n);
                idx(i, j)
            })
            .collect();
        Some(SiteMap { src, phase: vec![C64::new(1.0, 0.0); n * n] })
    };
    (points, links, Box::new(map), dx * dx)
}

fn triangular_nodes(dx: f64, r: f64) -> Nodes {
    let k = (r / dx).ceil() as i64 + 1;
    let limit = (r / dx) * (r / dx);
    // |x|² / dx² = i² + ij + j², exact under the lattice rotations
    let inside = |i: i64, j: i64| ((i * i + i * j + j * j) as f64) < limit;
    let mut key: HashMap<(i64, i64), usize> = HashMap::new();
    let mut cells = Vec::new();
    let mut points = Vec::new();
    for j in -2 * k..=2 * k {
        for i in -2 * k..=2 * k {
            if inside(i, j) {
                key.insert((i, j), points.len());
                cells.push((i, j));
                points.push([dx * (i as f64 + 0.5 * j as f64), dx * (3f64.sqrt() / 2.0) * j as f64]);
            }
        }
    }
    let mut links = Vec::with_capacity(3 * points.len());
    for (p, &(i, j)) in cells.iter().enumerate() {
        for (di, dj) in [(1, 0), (0, 1), (-1, 1)] {
            if let Some(&q) = key.get(&(i + di, j + dj)) {
                links.push((p, q));
            }
        }
    }
    let map = move |wells: usize| -> Option<SiteMap> {
        let inv: fn(i64, i64) -> (i64, i64) = match wells {
            2 => |i, j| (-i, -j),
            3 => |i, j| (j, -i - j),
            6 => |i, j| (i + j, -i),
            _ => return None,
        };
        let src = cells.iter().map(|&(i, j)| key[&inv(i, j)]).collect();
        Some(SiteMap { src, phase: vec![C64::new(1.0, 0.0); cells.len()] })
    };
    (points, links, Box::new(map), 3f64.sqrt() / 4.0 * dx * dx)
}
