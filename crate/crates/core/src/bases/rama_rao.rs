//! Weighted polynomials `h1_m = (1 - 4x^2)^(m+2)` (velocity) and
//! `h2_m = (1 - 4x^2)^(m+1)` (temperature) on `[-1/2, 1/2]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::physics::check_in;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RamaRaoKind {
    H1,
    H2,
}

impl RamaRaoKind {
    fn exponent(self, m: usize) -> usize {
        match self {
            RamaRaoKind::H1 => m + 2,
            RamaRaoKind::H2 => m + 1,
        }
    }
}

pub fn eval_rama_rao(kind: RamaRaoKind, m: usize, x: f64, deriv: usize) -> Result<f64> {
    if deriv > 4 {
        return Err(Error::UnsupportedDerivative { order: deriv, max: 4 });
    }
    check_in("x", x, -0.5, 0.5)?;
    Ok(weighted_power(kind.exponent(m), x, deriv))
}

/// `D^deriv (1 - 4x^2)^k` via the chain rule with `u' = -8x`, `u'' = -8`.
pub(crate) fn weighted_power(k: usize, x: f64, deriv: usize) -> f64 {
    let u = 1.0 - 4.0 * x * x;
    let du = -8.0 * x;
    let ddu = -8.0;
    // k (k-1) ... (k-j+1) u^(k-j), zero once j > k.
    let term = |j: usize| -> f64 {
        if j > k {
            return 0.0;
        }
        let falling: f64 = (0..j).map(|i| (k - i) as f64).product();
        falling * u.powi((k - j) as i32)
    };
    match deriv {
        0 => term(0),
        1 => term(1) * du,
        2 => term(2) * du * du + term(1) * ddu,
        3 => term(3) * du.powi(3) + 3.0 * term(2) * du * ddu,
        4 => term(4) * du.powi(4) + 6.0 * term(3) * du * du * ddu + 3.0 * term(2) * ddu * ddu,
        _ => unreachable!("derivative order checked by caller"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_values() {
        assert_eq!(eval_rama_rao(RamaRaoKind::H1, 0, 0.0, 0).unwrap(), 1.0);
        for x in [-0.5, 0.5] {
            assert_eq!(eval_rama_rao(RamaRaoKind::H1, 0, x, 0).unwrap(), 0.0);
            assert_eq!(eval_rama_rao(RamaRaoKind::H1, 0, x, 1).unwrap(), 0.0);
            assert_eq!(eval_rama_rao(RamaRaoKind::H2, 3, x, 0).unwrap(), 0.0);
        }
        assert!((eval_rama_rao(RamaRaoKind::H2, 0, 0.25, 0).unwrap() - 0.75).abs() < 1e-15);
    }

    #[test]
    fn second_derivative_at_center() {
        // (1-4x^2)^2 = 1 - 8x^2 + 16x^4, so D^2 at 0 is -16.
        let exact = eval_rama_rao(RamaRaoKind::H1, 0, 0.0, 2).unwrap();
        assert_eq!(exact, -16.0);
        let h = 1e-4;
        let f = |x| eval_rama_rao(RamaRaoKind::H1, 0, x, 0).unwrap();
        let fd = (f(h) - 2.0 * f(0.0) + f(-h)) / (h * h);
        assert!(((fd - exact) / exact).abs() < 1e-6);
    }

    #[test]
    fn derivatives_match_expanded_polynomial() {
        // (1-4x^2)^3 = 1 - 12x^2 + 48x^4 - 64x^6
        let x: f64 = 0.31;
        let d4 = 48.0 * 24.0 - 64.0 * 360.0 * x * x;
        let d3 = 48.0 * 24.0 * x - 64.0 * 120.0 * x.powi(3);
        assert!((weighted_power(3, x, 4) - d4).abs() < 1e-10);
        assert!((weighted_power(3, x, 3) - d3).abs() < 1e-10);
        // low powers: fourth derivative of (1-4x^2) vanishes
        assert_eq!(weighted_power(1, x, 4), 0.0);
        assert_eq!(weighted_power(1, x, 2), -8.0);
    }

    #[test]
    fn errors() {
        assert!(eval_rama_rao(RamaRaoKind::H1, 0, 0.7, 0).is_err());
        assert!(eval_rama_rao(RamaRaoKind::H2, 0, 0.1, 5).is_err());
    }
}
