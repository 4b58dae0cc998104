//! Integrated shifted-Legendre families on `[0, 1]`.
//!
//! With `Q_m(z) = P_m(2z - 1)`:
//!
//! ```text
//! beta_m(z) = int_0^z int_0^s Q_{m+1}
//!           = 1/4 [ (Q_{m+3} - Q_{m+1}) / ((2m+3)(2m+5)) - (Q_{m+1} - Q_{m-1}) / ((2m+1)(2m+3)) ]
//! phi_m(z)  = int_0^z Q_m = (Q_{m+1} - Q_{m-1}) / (2(2m+1))
//! ```
//!
//! `Q_{-1}` is taken as `-1`, which keeps both closed forms valid at `m = 0`.
//! `beta_m` is clamped at both walls only for `m >= 1`, `phi_m` vanishes at
//! both walls only for `m >= 1`; the solver families start at `m = 1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::physics::check_in;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LegendreKind {
    Beta,
    Phi,
}

/// `table[n][d] = D^d Q_n(z)` for `n <= nmax`, `d <= dmax`, derivatives in `z`.
pub fn shifted_legendre_table(nmax: usize, z: f64, dmax: usize) -> Vec<Vec<f64>> {
    let t = 2.0 * z - 1.0;
    let mut p = vec![vec![0.0; dmax + 1]; nmax + 1];
    p[0][0] = 1.0;
    if nmax >= 1 {
        p[1][0] = t;
        if dmax >= 1 {
            p[1][1] = 1.0;
        }
    }
    for n in 1..nmax {
        let nf = n as f64;
        p[n + 1][0] = ((2.0 * nf + 1.0) * t * p[n][0] - nf * p[n - 1][0]) / (nf + 1.0);
        for d in 1..=dmax {
            p[n + 1][d] = p[n - 1][d] + (2.0 * nf + 1.0) * p[n][d - 1];
        }
    }
    for row in p.iter_mut() {
        let mut scale = 1.0;
        for v in row.iter_mut() {
            *v *= scale;
            scale *= 2.0;
        }
    }
    p
}

fn q_at(table: &[Vec<f64>], n: isize, d: usize) -> f64 {
    if n < 0 {
        // Q_{-1} = -1
        if d == 0 {
            -1.0
        } else {
            0.0
        }
    } else {
        table[n as usize][d]
    }
}

pub fn eval_legendre_integrated(kind: LegendreKind, m: usize, z: f64, deriv: usize) -> Result<f64> {
    if deriv > 4 {
        return Err(Error::UnsupportedDerivative { order: deriv, max: 4 });
    }
    check_in("z", z, 0.0, 1.0)?;
    let table = shifted_legendre_table(m + 3, z, deriv);
    Ok(from_table(kind, m, &table, deriv))
}

pub(crate) fn from_table(kind: LegendreKind, m: usize, table: &[Vec<f64>], d: usize) -> f64 {
    let mi = m as isize;
    let mf = m as f64;
    match kind {
        LegendreKind::Beta => {
            let upper = (q_at(table, mi + 3, d) - q_at(table, mi + 1, d)) / ((2.0 * mf + 3.0) * (2.0 * mf + 5.0));
            let lower = (q_at(table, mi + 1, d) - q_at(table, mi - 1, d)) / ((2.0 * mf + 1.0) * (2.0 * mf + 3.0));
            0.25 * (upper - lower)
        }
        LegendreKind::Phi => (q_at(table, mi + 1, d) - q_at(table, mi - 1, d)) / (2.0 * (2.0 * mf + 1.0)),
    }
}
