//! Chebyshev collocation of the coupled fourth/second-order system.
//!
//! Independent of the Galerkin bases: `W` and `Theta` are nodal values,
//! clamped and Dirichlet conditions replace the first and last rows of each
//! block, and replaced rows are zero in `B`.

use nalgebra::{DMatrix, DVector};

use crate::eigensolve::{real_eigenvector, solve_generalized, DEFAULT_TOL_IMAG};
use crate::error::{Error, Result};
use crate::physics::ProblemParams;

pub const DEFAULT_POINTS: usize = 64;
pub const MIN_POINTS: usize = 16;

/// Chebyshev extrema on `[lo, hi]` and differentiation matrices of orders
/// 1 to 4. `degree + 1` nodes, ordered from `hi` down to `lo`.
#[derive(Debug, Clone)]
pub struct CollocationGrid {
    pub points: Vec<f64>,
    /// `diff[k]` differentiates `k + 1` times.
    pub diff: [DMatrix<f64>; 4],
}

impl CollocationGrid {
    pub fn new(degree: usize, lo: f64, hi: f64) -> Result<Self> {
        if degree < 2 {
            return Err(Error::Contract(format!(
                "collocation degree must be at least 2, got {degree}"
            )));
        }
        if lo.partial_cmp(&hi) != Some(std::cmp::Ordering::Less) {
            return Err(Error::Contract(format!("collocation interval [{lo}, {hi}] is empty")));
        }
        let p = degree as f64;
        let n = degree + 1;
        let pi = std::f64::consts::PI;
        let theta: Vec<f64> = (0..n).map(|k| k as f64 * pi / p).collect();
        // sine form keeps the nodes exactly antisymmetric
        let x: Vec<f64> = (0..n).map(|k| (pi * (p - 2.0 * k as f64) / (2.0 * p)).sin()).collect();

        // x_i - x_j from half-angle products, flipped for the lower half
        let mut dx = DMatrix::from_fn(n, n, |i, j| {
            2.0 * ((theta[j] + theta[i]) / 2.0).sin() * ((theta[j] - theta[i]) / 2.0).sin()
        });
        let half = n / 2;
        for i in half..n {
            for j in 0..n {
                dx[(i, j)] = -dx[(n - 1 - i, n - 1 - j)];
            }
        }
        let c: Vec<f64> = (0..n)
            .map(|k| {
                let s = if k % 2 == 0 { 1.0 } else { -1.0 };
                if k == 0 || k == n - 1 {
                    2.0 * s
                } else {
                    s
                }
            })
            .collect();
        let z = DMatrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { 1.0 / dx[(i, j)] });

        let scale = 2.0 / (hi - lo);
        let mut d = DMatrix::<f64>::identity(n, n);
        let mut diff: Vec<DMatrix<f64>> = Vec::with_capacity(4);
        for ell in 1..=4 {
            let prev = d.clone();
            let l = ell as f64;
            d = DMatrix::from_fn(n, n, |i, j| l * z[(i, j)] * (c[i] / c[j] * prev[(i, i)] - prev[(i, j)]));
            for i in 0..n {
                let off: f64 = (0..n).filter(|&j| j != i).map(|j| d[(i, j)]).sum();
                d[(i, i)] = -off;
            }
            diff.push(&d * scale.powi(ell));
        }
        let (mid, half_width) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        let points = x.iter().map(|&xi| mid + xi * half_width).collect();
        let diff: [DMatrix<f64>; 4] = diff.try_into().expect("four orders");
        Ok(Self { points, diff })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Onset eigenpair on the collocation grid.
#[derive(Debug, Clone)]
pub struct CollocationMode {
    pub rayleigh: f64,
    pub points: Vec<f64>,
    pub w: Vec<f64>,
    pub theta: Vec<f64>,
}

impl CollocationMode {
    /// `|odd part| / |even part|` of `W` about the layer midplane.
    pub fn odd_fraction(&self) -> f64 {
        let n = self.w.len();
        let (mut odd, mut even) = (0.0, 0.0);
        for i in 0..n {
            let (u, v) = (self.w[i], self.w[n - 1 - i]);
            odd += (0.5 * (u - v)).powi(2);
            even += (0.5 * (u + v)).powi(2);
        }
        (odd / even).sqrt()
    }
}

fn collocation_pencil(params: &ProblemParams, degree: usize) -> Result<(CollocationGrid, DMatrix<f64>, DMatrix<f64>)> {
    if degree < MIN_POINTS {
        return Err(Error::Contract(format!(
            "collocation needs at least {MIN_POINTS} points, got {degree}"
        )));
    }
    let (lo, hi) = params.domain.interval();
    let grid = CollocationGrid::new(degree, lo, hi)?;
    let n = grid.len();
    let a2 = params.a2;
    let [d1, d2, _, d4] = &grid.diff;

    let mut a = DMatrix::zeros(2 * n, 2 * n);
    let mut b = DMatrix::zeros(2 * n, 2 * n);
    let bih = d4 - d2 * (2.0 * a2) + DMatrix::identity(n, n) * (a2 * a2);
    let lap = d2 - DMatrix::identity(n, n) * a2;
    a.view_mut((0, 0), (n, n)).copy_from(&bih);
    a.view_mut((n, n), (n, n)).copy_from(&lap);
    for i in 0..n {
        a[(i, n + i)] = -1.0;
        b[(n + i, i)] = -a2 * params.profile(grid.points[i]);
    }

    let mut replace = |row: usize, values: &[(usize, f64)]| {
        a.row_mut(row).fill(0.0);
        b.row_mut(row).fill(0.0);
        for &(col, v) in values {
            a[(row, col)] = v;
        }
    };
    replace(0, &[(0, 1.0)]);
    replace(n - 1, &[(n - 1, 1.0)]);
    let first: Vec<(usize, f64)> = (0..n).map(|j| (j, d1[(0, j)])).collect();
    let last: Vec<(usize, f64)> = (0..n).map(|j| (j, d1[(n - 1, j)])).collect();
    replace(1, &first);
    replace(n - 2, &last);
    replace(n, &[(n, 1.0)]);
    replace(2 * n - 1, &[(2 * n - 1, 1.0)]);
    Ok((grid, a, b))
}

/// Smallest positive Rayleigh number on a degree-`points` grid.
pub fn collocation_rayleigh(params: &ProblemParams, points: usize) -> Result<f64> {
    let (_, a, b) = collocation_pencil(params, points)?;
    let spectrum = solve_generalized(&a, &b, DEFAULT_TOL_IMAG)?;
    Ok(spectrum.r_min.expect("solve_generalized guarantees an onset"))
}

/// Onset eigenvalue together with the nodal eigenfunctions.
pub fn collocation_mode(params: &ProblemParams, points: usize) -> Result<CollocationMode> {
    let (grid, a, b) = collocation_pencil(params, points)?;
    let spectrum = solve_generalized(&a, &b, DEFAULT_TOL_IMAG)?;
    let r = spectrum.r_min.expect("solve_generalized guarantees an onset");
    let c: DVector<f64> = real_eigenvector(&a, &b, r)?;
    let n = grid.len();
    Ok(CollocationMode {
        rayleigh: r,
        w: c.rows(0, n).iter().copied().collect(),
        theta: c.rows(n, n).iter().copied().collect(),
        points: grid.points,
    })
}
