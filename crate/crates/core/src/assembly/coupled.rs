use nalgebra::DMatrix;

use super::{domain_rule, weighted_dot, GalerkinPencil, PencilMeta, PencilPath};
use crate::bases::{Basis, BasisFamily, BasisKind, Field};
use crate::error::Result;
use crate::physics::ProblemParams;

/// Coupled block pencil for any clamped velocity family and Dirichlet
/// temperature family. Test functions equal trial functions.
pub fn assemble_coupled(
    params: &ProblemParams,
    w_family: BasisFamily,
    theta_family: BasisFamily,
    quad_order: Option<usize>,
) -> Result<GalerkinPencil> {
    let path = if w_family.kind == BasisKind::RamaRaoWeighted && theta_family.kind == BasisKind::RamaRaoWeighted {
        PencilPath::RamaRao
    } else {
        PencilPath::Coupled
    };
    build(params, w_family, theta_family, quad_order, path)
}

/// Coupled pencil in `h1_m` / `h2_m`. `count` modes per field.
pub fn assemble_rama_rao(params: &ProblemParams, count: usize, quad_order: Option<usize>) -> Result<GalerkinPencil> {
    let family = BasisFamily::rama_rao(count);
    build(params, family, family, quad_order, PencilPath::RamaRao)
}

/// Coupled pencil in `beta_m` / `phi_m`. `count` modes per field.
pub fn assemble_legendre(params: &ProblemParams, count: usize, quad_order: Option<usize>) -> Result<GalerkinPencil> {
    let family = BasisFamily::legendre(count);
    build(params, family, family, quad_order, PencilPath::Coupled)
}

fn build(
    params: &ProblemParams,
    w_family: BasisFamily,
    theta_family: BasisFamily,
    quad_order: Option<usize>,
    path: PencilPath,
) -> Result<GalerkinPencil> {
    let wb = Basis::new(w_family, Field::Velocity)?;
    let tb = Basis::new(theta_family, Field::Temperature)?;
    let rule = domain_rule(params, wb.max_index().max(tb.max_index()), quad_order)?;
    let nodes = &rule.nodes;
    let weights = &rule.weights;

    let w = wb.sample(params.domain, nodes, 4)?;
    let t = tb.sample(params.domain, nodes, 2)?;
    let a2 = params.a2;
    let xs: Vec<f64> = nodes.iter().map(|&s| params.to_centered(s)).collect();

    let nw = wb.len();
    let nt = tb.len();
    let mut mat_a = DMatrix::zeros(nw + nt, nw + nt);
    let mut mat_b = DMatrix::zeros(nw + nt, nw + nt);

    // (D^2 - a^2)^2 W_n at the nodes
    let lw: Vec<Vec<f64>> = (0..nw)
        .map(|n| {
            (0..nodes.len())
                .map(|q| w[4][n][q] - 2.0 * a2 * w[2][n][q] + a2 * a2 * w[0][n][q])
                .collect()
        })
        .collect();
    let lt: Vec<Vec<f64>> = (0..nt)
        .map(|n| (0..nodes.len()).map(|q| t[2][n][q] - a2 * t[0][n][q]).collect())
        .collect();

    for m in 0..nw {
        for n in 0..nw {
            mat_a[(m, n)] = weighted_dot(weights, &lw[n], &w[0][m]);
        }
        for n in 0..nt {
            mat_a[(m, nw + n)] = -weighted_dot(weights, &t[0][n], &w[0][m]);
        }
    }
    for m in 0..nt {
        for n in 0..nt {
            mat_a[(nw + m, nw + n)] = weighted_dot(weights, &lt[n], &t[0][m]);
        }
        for n in 0..nw {
            let (mass, moment) = profile_moments(weights, &xs, &w[0][n], &t[0][m]);
            mat_b[(nw + m, n)] = -a2 * (mass - params.n_rate * moment);
        }
    }

    GalerkinPencil::new(
        mat_a,
        mat_b,
        PencilMeta {
            params: *params,
            family: w_family,
            theta_family: Some(theta_family),
            path,
            quad_order: rule.order(),
        },
    )
}

/// `(<f, g>, <x f, g>)` for `g = 1 - N x`. The moment is summed over mirrored
/// node pairs so that it vanishes exactly when `f g` is even.
fn profile_moments(weights: &[f64], xs: &[f64], f: &[f64], g: &[f64]) -> (f64, f64) {
    let q = weights.len();
    let mass = weighted_dot(weights, f, g);
    let moment = (0..q / 2)
        .map(|i| {
            let j = q - 1 - i;
            weights[i] * 0.5 * (xs[i] - xs[j]) * (f[i] * g[i] - f[j] * g[j])
        })
        .sum();
    (mass, moment)
}
