//! Clamped-beam (Chandrasekhar) functions on `[-1/2, 1/2]`.
//!
//! ```text
//! C_n(x) = cosh(l_n x)/cosh(l_n/2) - cos(l_n x)/cos(l_n/2),   tanh(l/2) + tan(l/2) = 0
//! S_n(x) = sinh(m_n x)/sinh(m_n/2) - sin(m_n x)/sin(m_n/2),   coth(m/2) - cot(m/2) = 0
//! ```
//!
//! Both families are orthonormal on the layer and satisfy `D^4 f = k^4 f`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::physics::check_in;

/// Above this root the hyperbolic ratios are evaluated in exponential form.
const RATIO_SWITCH: f64 = 40.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Parity {
    /// `C_n`
    Even,
    /// `S_n`
    Odd,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChandrasekharRoots {
    pub lambdas: Vec<f64>,
    pub mus: Vec<f64>,
}

/// `tanh(l/2) + tan(l/2)`
pub fn even_residual(l: f64) -> f64 {
    (0.5 * l).tanh() + (0.5 * l).tan()
}

/// `coth(m/2) - cot(m/2)`
pub fn odd_residual(m: f64) -> f64 {
    1.0 / (0.5 * m).tanh() - 1.0 / (0.5 * m).tan()
}

/// Root inside `(lo, hi)` where `f` runs from large negative values to a
/// positive value. Bisection to 1e-14, then a few secant steps.
fn bracketed_root(f: fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    let (mut a, mut b) = (lo, hi);
    let mut fa = f(a);
    while b - a > 1e-14 * b.abs() {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    // Secant polish; kept only if it improves the residual and stays in range.
    let mut x0 = a;
    let mut x1 = b;
    let mut best = if f(a).abs() < f(b).abs() { a } else { b };
    for _ in 0..4 {
        let (f0, f1) = (f(x0), f(x1));
        if f1 == f0 {
            break;
        }
        let x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
        if !(x2 > lo && x2 < hi) {
            break;
        }
        if f(x2).abs() < f(best).abs() {
            best = x2;
        }
        x0 = x1;
        x1 = x2;
    }
    best
}

/// First `count_even` roots `l_n` and `count_odd` roots `m_n`.
///
/// The n-th even root lies in `((2n-1)pi, 2n pi)` around `(2n - 1/2)pi`;
/// the n-th odd root in `(2n pi, (2n+1)pi)` around `(2n + 1/2)pi`.
pub fn chandrasekhar_roots(count_even: usize, count_odd: usize) -> Result<ChandrasekharRoots> {
    if count_even + count_odd == 0 {
        return Err(Error::Contract(
            "at least one Chandrasekhar root must be requested".into(),
        ));
    }
    let inset = 1e-9;
    let lambdas = (1..=count_even)
        .map(|n| {
            let n = n as f64;
            bracketed_root(even_residual, (2.0 * n - 1.0) * PI + inset, 2.0 * n * PI - inset)
        })
        .collect();
    let mus = (1..=count_odd)
        .map(|n| {
            let n = n as f64;
            bracketed_root(odd_residual, 2.0 * n * PI + inset, (2.0 * n + 1.0) * PI - inset)
        })
        .collect();
    Ok(ChandrasekharRoots { lambdas, mus })
}

impl ChandrasekharRoots {
    pub fn count_even(&self) -> usize {
        self.lambdas.len()
    }

    pub fn count_odd(&self) -> usize {
        self.mus.len()
    }

    pub fn root(&self, parity: Parity, n: usize) -> Result<f64> {
        let list = match parity {
            Parity::Even => &self.lambdas,
            Parity::Odd => &self.mus,
        };
        list.get(n).copied().ok_or_else(|| {
            Error::Contract(format!(
                "{parity:?} mode index {n} exceeds constructed count {}",
                list.len()
            ))
        })
    }
}

/// `f(k x) / g(k/2)` with `f`, `g` each cosh or sinh, overflow-free.
pub(crate) fn hyperbolic_ratio(k: f64, x: f64, num_sinh: bool, den_sinh: bool) -> f64 {
    if k <= RATIO_SWITCH {
        let num = if num_sinh { (k * x).sinh() } else { (k * x).cosh() };
        let den = if den_sinh { (0.5 * k).sinh() } else { (0.5 * k).cosh() };
        return num / den;
    }
    let ax = x.abs();
    let decay = (-2.0 * k * ax).exp();
    let num = if num_sinh {
        -(-2.0 * k * ax).exp_m1() * x.signum()
    } else {
        1.0 + decay
    };
    let den = if den_sinh { -(-k).exp_m1() } else { 1.0 + (-k).exp() };
    (k * (ax - 0.5)).exp() * num / den
}

/// Derivative `deriv` (0..=4) of `C_n` or `S_n` at `x`. `n` is 0-based.
pub fn eval_chandrasekhar(roots: &ChandrasekharRoots, parity: Parity, n: usize, x: f64, deriv: usize) -> Result<f64> {
    if deriv > 4 {
        return Err(Error::UnsupportedDerivative { order: deriv, max: 4 });
    }
    check_in("x", x, -0.5, 0.5)?;
    let k = roots.root(parity, n)?;
    Ok(chandrasekhar_unchecked(parity, k, x, deriv))
}

pub(crate) fn chandrasekhar_unchecked(parity: Parity, k: f64, x: f64, deriv: usize) -> f64 {
    let scale = k.powi(deriv as i32);
    let odd_order = deriv % 2 == 1;
    match parity {
        Parity::Even => {
            let hyp = hyperbolic_ratio(k, x, odd_order, false);
            let c = 1.0 / (0.5 * k).cos();
            let trig = match deriv % 4 {
                0 => (k * x).cos(),
                1 => -(k * x).sin(),
                2 => -(k * x).cos(),
                _ => (k * x).sin(),
            };
            scale * (hyp - c * trig)
        }
        Parity::Odd => {
            let hyp = hyperbolic_ratio(k, x, !odd_order, true);
            let s = 1.0 / (0.5 * k).sin();
            let trig = match deriv % 4 {
                0 => (k * x).sin(),
                1 => (k * x).cos(),
                2 => -(k * x).sin(),
                _ => -(k * x).cos(),
            };
            scale * (hyp - s * trig)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bases::quadrature::gauss_legendre;

    #[test]
    fn first_roots() {
        let r = chandrasekhar_roots(1, 1).unwrap();
        assert!((r.lambdas[0] - 4.730_040_7).abs() < 1e-7, "{}", r.lambdas[0]);
        assert!((r.mus[0] - 7.853_204_6).abs() < 1e-7, "{}", r.mus[0]);
        assert!(even_residual(r.lambdas[0]).abs() < 1e-12);
        assert!(odd_residual(r.mus[0]).abs() < 1e-12);
    }

    #[test]
    fn zero_odd_count_is_allowed() {
        let r = chandrasekhar_roots(1, 0).unwrap();
        assert_eq!(r.count_odd(), 0);
        assert!(chandrasekhar_roots(0, 0).is_err());
    }

    #[test]
    fn roots_residual_asymptotics_and_interlacing() {
        let r = chandrasekhar_roots(30, 30).unwrap();
        for (i, (&l, &m)) in r.lambdas.iter().zip(&r.mus).enumerate() {
            let n = (i + 1) as f64;
            assert!(
                even_residual(l).abs() < 1e-12,
                "lambda_{n} residual {}",
                even_residual(l)
            );
            assert!(odd_residual(m).abs() < 1e-12, "mu_{n} residual {}", odd_residual(m));
            if i >= 1 {
                assert!((l - (2.0 * n - 0.5) * PI).abs() < 0.1);
                assert!((m - (2.0 * n + 0.5) * PI).abs() < 0.1);
            }
            assert!(l < m);
            if let Some(&next) = r.lambdas.get(i + 1) {
                assert!(m < next);
            }
        }
    }

    #[test]
    fn clamped_at_walls() {
        let r = chandrasekhar_roots(25, 25).unwrap();
        for parity in [Parity::Even, Parity::Odd] {
            for n in 0..25 {
                for x in [-0.5, 0.5] {
                    let v = eval_chandrasekhar(&r, parity, n, x, 0).unwrap();
                    let d = eval_chandrasekhar(&r, parity, n, x, 1).unwrap();
                    // DW scales like k; compare relative to it.
                    let k = r.root(parity, n).unwrap();
                    assert!(v.abs() < 1e-10, "{parity:?} {n} value {v}");
                    assert!(d.abs() / k < 1e-10, "{parity:?} {n} slope {d}");
                }
            }
        }
    }

    #[test]
    fn parity_and_orthonormality() {
        let r = chandrasekhar_roots(6, 6).unwrap();
        for n in 0..6 {
            for &x in &[0.05, 0.21, 0.37, 0.49] {
                let c = |x| eval_chandrasekhar(&r, Parity::Even, n, x, 0).unwrap();
                let s = |x| eval_chandrasekhar(&r, Parity::Odd, n, x, 0).unwrap();
                assert!((c(x) - c(-x)).abs() < 1e-13);
                assert!((s(x) + s(-x)).abs() < 1e-13);
            }
        }
        let q = gauss_legendre(120, -0.5, 0.5).unwrap();
        for p in [Parity::Even, Parity::Odd] {
            for i in 0..6 {
                for j in 0..6 {
                    let v = q.integrate(|x| {
                        eval_chandrasekhar(&r, p, i, x, 0).unwrap() * eval_chandrasekhar(&r, p, j, x, 0).unwrap()
                    });
                    let expected = if i == j { 1.0 } else { 0.0 };
                    assert!((v - expected).abs() < 1e-10, "{p:?} ({i},{j}) -> {v}");
                }
            }
        }
    }

    #[test]
    fn fourth_derivative_matches_finite_differences() {
        let r = chandrasekhar_roots(1, 1).unwrap();
        let h = 1e-3;
        let x = 0.3;
        let f = |x: f64| eval_chandrasekhar(&r, Parity::Even, 0, x, 0).unwrap();
        let fd = (f(x - 2.0 * h) - 4.0 * f(x - h) + 6.0 * f(x) - 4.0 * f(x + h) + f(x + 2.0 * h)) / h.powi(4);
        let exact = eval_chandrasekhar(&r, Parity::Even, 0, x, 4).unwrap();
        assert!(((fd - exact) / exact).abs() < 1e-5, "{fd} vs {exact}");
        let l4 = r.lambdas[0].powi(4);
        assert!((exact - l4 * f(x)).abs() < 1e-9 * l4);
    }

    #[test]
    fn ratio_forms_match_direct_evaluation() {
        for &k in &[40.5, 55.0, 80.0] {
            for &x in &[-0.5, -0.31, 0.0, 0.12, 0.5] {
                for (ns, ds) in [(false, false), (true, false), (false, true), (true, true)] {
                    let stable = hyperbolic_ratio(k, x, ns, ds);
                    let num = if ns { (k * x).sinh() } else { (k * x).cosh() };
                    let den = if ds { (0.5 * k).sinh() } else { (0.5 * k).cosh() };
                    let direct = num / den;
                    assert!((stable - direct).abs() <= 1e-13 * direct.abs().max(1e-300) + 1e-300);
                }
            }
        }
    }

    #[test]
    fn rejects_high_order_and_out_of_range() {
        let r = chandrasekhar_roots(2, 2).unwrap();
        assert!(matches!(
            eval_chandrasekhar(&r, Parity::Even, 0, 0.1, 5),
            Err(Error::UnsupportedDerivative { .. })
        ));
        assert!(eval_chandrasekhar(&r, Parity::Odd, 2, 0.1, 0).is_err());
        assert!(eval_chandrasekhar(&r, Parity::Odd, 0, 0.6, 0).is_err());
    }
}
