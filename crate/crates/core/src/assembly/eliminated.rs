//! Temperature elimination for the Chandrasekhar velocity basis.
//!
//! For each velocity mode `f` the temperature equation is solved exactly:
//! `(D^2 - a^2) psi = (1 - N x) f`, `psi(+-1/2) = 0`, so that
//! `Theta = -a^2 R sum_n c_n psi_n`. The particular part follows from the
//! ansatz `(c1 + c2 x) cosh + (c3 + c4 x) sinh + (c5 + c6 x) cos + (c7 + c8 x) sin`
//! at the mode's own frequency; `A cosh(a x) + B sinh(a x)` restores the wall
//! conditions.

use nalgebra::DMatrix;

use super::{domain_rule, weighted_dot, GalerkinPencil, PencilMeta, PencilPath};
use crate::bases::chandrasekhar::{chandrasekhar_unchecked, hyperbolic_ratio};
use crate::bases::{Basis, BasisFamily, BasisKind, ChandrasekharRoots, Field, Parity};
use crate::error::{Error, Result};
use crate::physics::ProblemParams;

const RESONANCE_GAP: f64 = 1e-6;
const RESIDUAL_SAMPLES: usize = 20;

/// Closed-form temperature response to one velocity mode.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaParticular {
    pub parity: Parity,
    /// Mode frequency (`lambda_n` or `mu_n`).
    pub k: f64,
    pub a: f64,
    pub n_rate: f64,
    /// Coefficients of `c1, x, c3, x` on the scaled `cosh(kx)/den`, `sinh(kx)/den`,
    /// with `den = cosh(k/2)` (even) or `sinh(k/2)` (odd): `[c1, c2, c3, c4]`.
    pub hyperbolic: [f64; 4],
    /// `[c5, c6, c7, c8]` on `cos(kx)`, `sin(kx)`.
    pub trigonometric: [f64; 4],
    /// `A_h`, `B_h` on `cosh(a x)`, `sinh(a x)`.
    pub homogeneous: [f64; 2],
}

impl ThetaParticular {
    fn den_sinh(&self) -> bool {
        self.parity == Parity::Odd
    }

    /// Derivative `d` (0..=2) of the particular solution at `x`.
    pub fn particular(&self, x: f64, d: usize) -> f64 {
        let k = self.k;
        let ch = |dd: usize| k.powi(dd as i32) * hyperbolic_ratio(k, x, dd % 2 == 1, self.den_sinh());
        let sh = |dd: usize| k.powi(dd as i32) * hyperbolic_ratio(k, x, dd.is_multiple_of(2), self.den_sinh());
        let (c, s) = ((k * x).cos(), (k * x).sin());
        let cs = |dd: usize| k.powi(dd as i32) * [c, -s, -c, s][dd % 4];
        let sn = |dd: usize| k.powi(dd as i32) * [s, c, -s, -c][dd % 4];
        let [c1, c2, c3, c4] = self.hyperbolic;
        let [c5, c6, c7, c8] = self.trigonometric;
        // D^d [(u + v x) f] = (u + v x) f^(d) + d v f^(d-1)
        let lin = |u: f64, v: f64, f: &dyn Fn(usize) -> f64| -> f64 {
            let mut out = (u + v * x) * f(d);
            if d >= 1 {
                out += d as f64 * v * f(d - 1);
            }
            out
        };
        lin(c1, c2, &ch) + lin(c3, c4, &sh) + lin(c5, c6, &cs) + lin(c7, c8, &sn)
    }

    pub fn homogeneous(&self, x: f64, d: usize) -> f64 {
        let a = self.a;
        let [ah, bh] = self.homogeneous;
        let (ch, sh) = ((a * x).cosh(), (a * x).sinh());
        let scale = a.powi(d as i32);
        if d.is_multiple_of(2) {
            scale * (ah * ch + bh * sh)
        } else {
            scale * (ah * sh + bh * ch)
        }
    }

    /// Full `psi = particular + homogeneous`, derivative `d` (0..=2).
    pub fn eval(&self, x: f64, d: usize) -> f64 {
        self.particular(x, d) + self.homogeneous(x, d)
    }

    /// `(1 - N x) f(x)`, the right-hand side.
    pub fn forcing(&self, x: f64) -> f64 {
        (1.0 - self.n_rate * x) * chandrasekhar_unchecked(self.parity, self.k, x, 0)
    }

    /// `(D^2 - a^2) psi_p - (1 - N x) f` at `x`.
    pub fn ode_residual(&self, x: f64) -> f64 {
        self.particular(x, 2) - self.a * self.a * self.particular(x, 0) - self.forcing(x)
    }
}

/// Particular solution for mode `n` (0-based) of the given parity.
pub fn theta_particular(
    params: &ProblemParams,
    roots: &ChandrasekharRoots,
    parity: Parity,
    n: usize,
) -> Result<ThetaParticular> {
    let k = roots.root(parity, n)?;
    let a2 = params.a2;
    let a = a2.sqrt();
    let nr = params.n_rate;

    let gap = k * k - a2;
    if gap.abs() < RESONANCE_GAP {
        return Err(Error::Resonance {
            mode: format!("{parity:?} #{}", n + 1),
            gap: gap.abs(),
        });
    }
    let e = -(k * k + a2);

    // Forcing (1 - N x) f split into (p + q x) times each kernel.
    // Even: f = cosh/den - cos/cos(k/2); odd: f = sinh/den - sin/sin(k/2).
    let (pc, qc, ps, qs, pcos, qcos, psin, qsin) = match parity {
        Parity::Even => {
            let gamma = 1.0 / (0.5 * k).cos();
            (1.0, -nr, 0.0, 0.0, -gamma, gamma * nr, 0.0, 0.0)
        }
        Parity::Odd => {
            let sigma = 1.0 / (0.5 * k).sin();
            (0.0, 0.0, 1.0, -nr, 0.0, 0.0, -sigma, sigma * nr)
        }
    };

    // (D^2-a^2)[(u+vx)cosh] = gap (u+vx) cosh + 2kv sinh, and the mirror for sinh.
    let c2 = qc / gap;
    let c4 = qs / gap;
    let c1 = (pc - 2.0 * k * c4) / gap;
    let c3 = (ps - 2.0 * k * c2) / gap;
    // (D^2-a^2)[(u+vx)cos] = e (u+vx) cos - 2kv sin; [(u+vx)sin] = e (u+vx) sin + 2kv cos.
    let c6 = qcos / e;
    let c8 = qsin / e;
    let c5 = (pcos - 2.0 * k * c8) / e;
    let c7 = (psin + 2.0 * k * c6) / e;

    let mut theta = ThetaParticular {
        parity,
        k,
        a,
        n_rate: nr,
        hyperbolic: [c1, c2, c3, c4],
        trigonometric: [c5, c6, c7, c8],
        homogeneous: [0.0, 0.0],
    };
    let (top, bottom) = (theta.particular(0.5, 0), theta.particular(-0.5, 0));
    theta.homogeneous = [
        -(top + bottom) / (2.0 * (0.5 * a).cosh()),
        -(top - bottom) / (2.0 * (0.5 * a).sinh()),
    ];

    // Certify the coefficients against the ODE itself.
    let forcing_scale = (0..=RESIDUAL_SAMPLES)
        .map(|i| theta.forcing(-0.5 + i as f64 / RESIDUAL_SAMPLES as f64).abs())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    for i in 0..RESIDUAL_SAMPLES {
        let x = -0.5 + (i as f64 + 0.5) / RESIDUAL_SAMPLES as f64;
        let r = theta.ode_residual(x);
        if r.abs() > 1e-8 * forcing_scale {
            return Err(Error::AssemblyBug(format!(
                "particular solution residual {r:.3e} at x = {x} for {parity:?} #{}",
                n + 1
            )));
        }
    }
    let wall = theta.eval(0.5, 0).abs().max(theta.eval(-0.5, 0).abs());
    if wall > 1e-10 {
        return Err(Error::AssemblyBug(format!("temperature wall residual {wall:.3e}")));
    }
    Ok(theta)
}

/// Velocity-only pencil: `A_mn = <(D^2-a^2)^2 f_n, f_m>`, `B_mn = -a^2 <psi_n, f_m>`.
pub fn assemble_theta_eliminated(
    params: &ProblemParams,
    family: BasisFamily,
    quad_order: Option<usize>,
) -> Result<GalerkinPencil> {
    if family.kind != BasisKind::Chandrasekhar {
        return Err(Error::Contract(format!(
            "temperature elimination needs the Chandrasekhar family, got {:?}",
            family.kind
        )));
    }
    let basis = Basis::new(family, Field::Velocity)?;
    let roots = basis.roots().expect("Chandrasekhar basis carries roots");
    let thetas = (0..basis.len())
        .map(|i| {
            let (parity, n) = basis.chandrasekhar_member(i).unwrap();
            theta_particular(params, roots, parity, n)
        })
        .collect::<Result<Vec<_>>>()?;

    let rule = domain_rule(params, basis.max_index(), quad_order)?;
    let w = basis.sample(params.domain, &rule.nodes, 4)?;
    let centered: Vec<f64> = rule.nodes.iter().map(|&s| params.to_centered(s)).collect();
    let psi: Vec<Vec<f64>> = thetas
        .iter()
        .map(|t| centered.iter().map(|&x| t.eval(x, 0)).collect())
        .collect();
    let a2 = params.a2;
    let m = basis.len();
    let lw: Vec<Vec<f64>> = (0..m)
        .map(|n| {
            (0..rule.order())
                .map(|q| w[4][n][q] - 2.0 * a2 * w[2][n][q] + a2 * a2 * w[0][n][q])
                .collect()
        })
        .collect();

    let mut mat_a = DMatrix::zeros(m, m);
    let mut mat_b = DMatrix::zeros(m, m);
    for row in 0..m {
        for col in 0..m {
            mat_a[(row, col)] = weighted_dot(&rule.weights, &lw[col], &w[0][row]);
            mat_b[(row, col)] = -a2 * weighted_dot(&rule.weights, &psi[col], &w[0][row]);
        }
    }
    GalerkinPencil::new(
        mat_a,
        mat_b,
        PencilMeta {
            params: *params,
            family,
            theta_family: None,
            path: PencilPath::ThetaEliminated,
            quad_order: rule.order(),
        },
    )
}
