//! Spectrum of a pencil `A c = R B c` and the physically relevant root.
//!
//! Eigenvalues come from shift-invert: `(A - s B)^{-1} B` has eigenvalues
//! `1/(R - s)`, so the infinite eigenvalues produced by singular `B` blocks
//! map to zero and drop out. Rows are equilibrated first, which leaves the
//! spectrum unchanged.

use nalgebra::{Complex, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::assembly::GalerkinPencil;
use crate::error::{Error, Result};

pub const DEFAULT_TOL_IMAG: f64 = 1e-6;
/// Eigenvalues with `|R|` above this are treated as infinite.
pub const INFINITE_THRESHOLD: f64 = 1e12;
/// Residual bound certified for `r_min`.
pub const RESIDUAL_BOUND: f64 = 1e-6;

const PIVOT_RATIO: f64 = 1e-13;
const SCHUR_MAX_ITER: usize = 10_000;

pub type Complex64 = Complex<f64>;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Spectrum {
    /// Finite eigenvalues, sorted by real part then imaginary part.
    pub eigenvalues: Vec<Complex64>,
    /// Smallest positive real eigenvalue.
    pub r_min: Option<f64>,
    /// Normalised eigenvector residual of `r_min`.
    pub r_min_residual: Option<f64>,
    pub shift: f64,
}

impl Spectrum {
    /// Real positive eigenvalues in increasing order.
    pub fn positive_real(&self, tol_imag: f64) -> Vec<f64> {
        let mut v: Vec<f64> = self
            .eigenvalues
            .iter()
            .filter(|z| is_real_positive(**z, tol_imag))
            .map(|z| z.re)
            .collect();
        v.sort_by(f64::total_cmp);
        v
    }
}

fn is_real_positive(z: Complex64, tol_imag: f64) -> bool {
    z.re > 0.0 && z.im.abs() <= tol_imag * z.re.abs()
}

/// Divide each row of both matrices by its largest entry.
fn equilibrate(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let mut a = a.clone();
    let mut b = b.clone();
    for i in 0..a.nrows() {
        let s = a.row(i).amax().max(b.row(i).amax());
        if s == 0.0 || !s.is_finite() {
            return Err(Error::Numeric(format!(
                "pencil row {i} is identically zero (singular pencil)"
            )));
        }
        a.row_mut(i).scale_mut(1.0 / s);
        b.row_mut(i).scale_mut(1.0 / s);
    }
    Ok((a, b))
}

fn well_conditioned_lu(m: DMatrix<f64>) -> Option<nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>> {
    let lu = m.lu();
    let diag = lu.u().diagonal();
    let max = diag.amax();
    let min = diag.iter().fold(f64::INFINITY, |acc, v| acc.min(v.abs()));
    if max > 0.0 && min / max > PIVOT_RATIO {
        Some(lu)
    } else {
        None
    }
}

/// Every finite eigenvalue of `A c = R B c`, without requiring an onset.
pub fn pencil_spectrum(a: &DMatrix<f64>, b: &DMatrix<f64>, tol_imag: f64) -> Result<Spectrum> {
    if !a.is_square() || a.shape() != b.shape() {
        return Err(Error::Contract(format!(
            "pencil matrices must be square and equal-sized, got {:?} and {:?}",
            a.shape(),
            b.shape()
        )));
    }
    let (a_eq, b_eq) = equilibrate(a, b)?;
    let norm_b = b_eq.amax();
    if norm_b == 0.0 {
        return Ok(Spectrum {
            eigenvalues: Vec::new(),
            r_min: None,
            r_min_residual: None,
            shift: 0.0,
        });
    }
    let scale = a_eq.amax() / norm_b;
    let shifts = [
        0.0,
        std::f64::consts::FRAC_1_SQRT_2 * scale,
        -1.324_717_957 * scale,
        2.915_576_7 * scale,
    ];
    let (shift, lu) = shifts
        .iter()
        .find_map(|&s| well_conditioned_lu(&a_eq - &b_eq * s).map(|lu| (s, lu)))
        .ok_or_else(|| Error::Numeric("no admissible shift: pencil appears singular".into()))?;
    let m = lu
        .solve(&b_eq)
        .ok_or_else(|| Error::Numeric("shift-invert solve failed".into()))?;
    let schur = nalgebra::linalg::Schur::try_new(m, f64::EPSILON, SCHUR_MAX_ITER)
        .ok_or_else(|| Error::Numeric("Schur iteration did not converge".into()))?;
    let nu_max = schur
        .complex_eigenvalues()
        .iter()
        .fold(0.0f64, |acc, z| acc.max(z.norm()));
    // at least n - rank(B) eigenvalues are infinite: keep the rank(B)
    // largest |nu|
    let sv = b_eq.singular_values();
    let rank_tol = f64::EPSILON * a.nrows() as f64 * sv.max();
    let rank = sv.iter().filter(|&&s| s > rank_tol).count();
    let mut nus: Vec<Complex64> = schur.complex_eigenvalues().iter().copied().collect();
    nus.sort_by(|x, y| y.norm().total_cmp(&x.norm()));
    nus.truncate(rank);
    let mut eigenvalues: Vec<Complex64> = nus
        .iter()
        .filter(|nu| nu.norm() > f64::EPSILON * nu_max * 1e-3 && nu.norm() > 0.0)
        .map(|nu| Complex64::new(shift, 0.0) + nu.inv())
        .filter(|r| r.norm() < INFINITE_THRESHOLD && r.re.is_finite() && r.im.is_finite())
        .collect();
    eigenvalues.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));

    let r_min = eigenvalues
        .iter()
        .filter(|z| is_real_positive(**z, tol_imag))
        .map(|z| z.re)
        .min_by(f64::total_cmp);
    let r_min_residual = match r_min {
        Some(r) => Some(real_residual(a, b, r)?),
        None => None,
    };
    Ok(Spectrum {
        eigenvalues,
        r_min,
        r_min_residual,
        shift,
    })
}

/// Spectrum of a matrix pair; fails with no-onset when no positive real
/// eigenvalue exists and with a numeric error when `r_min` is not certified.
pub fn solve_generalized(a: &DMatrix<f64>, b: &DMatrix<f64>, tol_imag: f64) -> Result<Spectrum> {
    let spectrum = pencil_spectrum(a, b, tol_imag)?;
    match (spectrum.r_min, spectrum.r_min_residual) {
        (None, _) => Err(Error::NoOnset(format!(
            "{} finite eigenvalues, none real and positive",
            spectrum.eigenvalues.len()
        ))),
        (Some(r), Some(res)) if res > RESIDUAL_BOUND => Err(Error::Numeric(format!(
            "eigenvalue {r} fails residual check ({res:.3e})"
        ))),
        _ => Ok(spectrum),
    }
}

pub fn solve_pencil(pencil: &GalerkinPencil, tol_imag: f64) -> Result<Spectrum> {
    let p = &pencil.meta.params;
    solve_generalized(&pencil.mat_a, &pencil.mat_b, tol_imag).map_err(|e| match e {
        Error::NoOnset(msg) => Error::NoOnset(format!("a2 = {}, N = {}: {msg}", p.a2, p.n_rate)),
        other => other,
    })
}

/// `|(A - R B) c| / ((|A| + |R| |B|) |c|)` with `c` from inverse iteration.
pub fn eigen_residual(a: &DMatrix<f64>, b: &DMatrix<f64>, r: Complex64) -> Result<f64> {
    let ac = a.map(|v| Complex64::new(v, 0.0));
    let bc = b.map(|v| Complex64::new(v, 0.0));
    let m = &ac - &bc * r;
    // Nudge off the eigenvalue so the factorisation stays regular.
    let nudge = r * Complex64::new(1e-13, 1e-13) + Complex64::new(1e-300, 0.0);
    let lu = (&ac - &bc * (r + nudge)).lu();
    let n = a.nrows();
    let mut c = DVector::from_fn(n, |i, _| Complex64::new(1.0 + 0.37 * ((i * 7919) % 13) as f64, 0.0));
    for _ in 0..3 {
        c = lu
            .solve(&c)
            .ok_or_else(|| Error::Numeric("inverse iteration solve failed".into()))?;
        let norm = c.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::Numeric("inverse iteration produced a degenerate vector".into()));
        }
        c.unscale_mut(norm);
    }
    let res = (&m * &c).norm();
    Ok(res / (a.norm() + r.norm() * b.norm()))
}

/// Unit eigenvector of `A c = r B c` for a real eigenvalue `r`, by inverse
/// iteration. The sign makes the largest-magnitude entry positive.
pub fn real_eigenvector(a: &DMatrix<f64>, b: &DMatrix<f64>, r: f64) -> Result<DVector<f64>> {
    let lu = (a - b * (r * (1.0 + 1e-13) + 1e-300)).lu();
    let n = a.nrows();
    let mut c = DVector::from_fn(n, |i, _| 1.0 + 0.37 * ((i * 7919) % 13) as f64);
    for _ in 0..4 {
        c = lu
            .solve(&c)
            .ok_or_else(|| Error::Numeric("inverse iteration solve failed".into()))?;
        let norm = c.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::Numeric("inverse iteration produced a degenerate vector".into()));
        }
        c.unscale_mut(norm);
    }
    let imax = c.iamax();
    if c[imax] < 0.0 {
        c.neg_mut();
    }
    Ok(c)
}

fn real_residual(a: &DMatrix<f64>, b: &DMatrix<f64>, r: f64) -> Result<f64> {
    eigen_residual(a, b, Complex64::new(r, 0.0))
}

impl Spectrum {
    pub fn residual(&self, pencil: &GalerkinPencil, index: usize) -> Result<f64> {
        let r = *self
            .eigenvalues
            .get(index)
            .ok_or_else(|| Error::Contract(format!("eigenvalue index {index} out of range")))?;
        eigen_residual(&pencil.mat_a, &pencil.mat_b, r)
    }
}

/// `(sign, ln|det|)` via LU.
fn log_det(m: DMatrix<f64>, scale: f64) -> (f64, f64) {
    let n = m.nrows();
    let lu = m.lu();
    let mut sign = 1.0;
    let mut log = 0.0;
    for i in 0..n {
        let u = lu.u()[(i, i)] / scale;
        if u == 0.0 {
            return (0.0, f64::NEG_INFINITY);
        }
        if u < 0.0 {
            sign = -sign;
        }
        log += u.abs().ln();
    }
    sign *= lu.p().determinant::<f64>();
    (sign, log)
}

/// `det(A - r B) / det(A)`.
///
/// Falls back to `det(A - r B)` of the row-equilibrated pencil, scaled by
/// `max|A|` per row, when `A` is numerically singular.
pub fn secular_determinant(pencil: &GalerkinPencil, r: f64) -> Result<f64> {
    if !r.is_finite() {
        return Err(Error::Contract(format!(
            "candidate Rayleigh number must be finite, got {r}"
        )));
    }
    let (a, b) = equilibrate(&pencil.mat_a, &pencil.mat_b)?;
    let shifted = &a - &b * r;
    let (s0, l0) = log_det(a.clone(), 1.0);
    let singular = well_conditioned_lu(a.clone()).is_none() || s0 == 0.0;
    if singular {
        let scale = a.amax();
        let (s, l) = log_det(shifted, scale);
        return Ok(if s == 0.0 { 0.0 } else { s * l.exp() });
    }
    let (s1, l1) = log_det(shifted, 1.0);
    if s1 == 0.0 {
        return Ok(0.0);
    }
    Ok(s1 * s0 * (l1 - l0).exp())
}

/// Bisection on a sign change of the secular determinant in `[lo, hi]`.
pub fn bisect_secular(pencil: &GalerkinPencil, lo: f64, hi: f64) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    let mut fa = secular_determinant(pencil, a)?;
    let fb = secular_determinant(pencil, b)?;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Contract(format!(
            "no sign change of the secular determinant on [{lo}, {hi}]"
        )));
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if b - a <= 1e-14 * m.abs().max(1.0) {
            break;
        }
        let fm = secular_determinant(pencil, m)?;
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Smallest positive root of the secular determinant found by scanning
/// `(0, r_max]` in `steps` equal steps and bisecting the first sign change.
pub fn first_secular_root(pencil: &GalerkinPencil, r_max: f64, steps: usize) -> Result<f64> {
    let h = r_max / steps as f64;
    let mut prev = secular_determinant(pencil, 0.0)?;
    for i in 1..=steps {
        let r = h * i as f64;
        let cur = secular_determinant(pencil, r)?;
        if cur == 0.0 || cur.signum() != prev.signum() {
            return bisect_secular(pencil, r - h, r);
        }
        prev = cur;
    }
    Err(Error::NoOnset(format!(
        "secular determinant keeps its sign on (0, {r_max}]"
    )))
}
