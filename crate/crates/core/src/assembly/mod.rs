//! Dense Galerkin pencils `A c = R B c`.
//!
//! Three assembly paths:
//!
//! * **Coupled**: `W` and `Theta` both expanded, block pencil
//!   `[[A_ww, A_wt], [0, A_tt]]`, `B = [[0, 0], [B_tw, 0]]`, with
//!   `A_ww = <(D^2-a^2)^2 W_n, W_m>`, `A_wt = -<Theta_n, W_m>`,
//!   `A_tt = <(D^2-a^2) Theta_n, Theta_m>`, `B_tw = -a^2 <g W_n, Theta_m>`.
//! * **ThetaEliminated**: Chandrasekhar `W` only; `Theta` is solved in closed
//!   form from the temperature equation and substituted into the first.
//! * **RamaRao**: coupled form with the weighted polynomial families.
//!
//! Pencils are posed in `R` directly; [`GalerkinPencil::lambda_form`]
//! rescales to the `lambda = a^2 R` convention.

mod coupled;
mod eliminated;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

pub use coupled::{assemble_coupled, assemble_legendre, assemble_rama_rao};
pub use eliminated::{assemble_theta_eliminated, theta_particular, ThetaParticular};

use crate::bases::{quadrature, BasisFamily, QuadratureRule};
use crate::error::{Error, Result};
use crate::physics::ProblemParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PencilPath {
    Coupled,
    ThetaEliminated,
    RamaRao,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PencilMeta {
    pub params: ProblemParams,
    pub family: BasisFamily,
    /// Temperature family for coupled pencils.
    pub theta_family: Option<BasisFamily>,
    pub path: PencilPath,
    pub quad_order: usize,
}

#[derive(Debug, Clone)]
pub struct GalerkinPencil {
    pub mat_a: DMatrix<f64>,
    pub mat_b: DMatrix<f64>,
    pub meta: PencilMeta,
}

impl GalerkinPencil {
    pub(crate) fn new(mat_a: DMatrix<f64>, mat_b: DMatrix<f64>, meta: PencilMeta) -> Result<Self> {
        if !mat_a.is_square() || mat_a.shape() != mat_b.shape() {
            return Err(Error::AssemblyBug(format!(
                "pencil shapes {:?} and {:?}",
                mat_a.shape(),
                mat_b.shape()
            )));
        }
        if mat_a.iter().chain(mat_b.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Numeric("pencil has non-finite entries".into()));
        }
        Ok(Self { mat_a, mat_b, meta })
    }

    pub fn order(&self) -> usize {
        self.mat_a.nrows()
    }

    /// `(A, K)` with `A c = lambda K c`, `lambda = a^2 R`.
    pub fn lambda_form(&self) -> (DMatrix<f64>, DMatrix<f64>) {
        (self.mat_a.clone(), &self.mat_b / self.meta.params.a2)
    }

    /// Largest entry-wise difference between two pencils of equal order.
    pub fn max_entry_difference(&self, other: &GalerkinPencil) -> Option<f64> {
        if self.mat_a.shape() != other.mat_a.shape() {
            return None;
        }
        let da = (&self.mat_a - &other.mat_a).amax();
        let db = (&self.mat_b - &other.mat_b).amax();
        Some(da.max(db))
    }
}

/// Quadrature on the problem domain; `order = None` picks the default for
/// the largest mode index.
pub(crate) fn domain_rule(params: &ProblemParams, max_index: usize, order: Option<usize>) -> Result<QuadratureRule> {
    let q = order.unwrap_or_else(|| quadrature::default_order(max_index));
    let (lo, hi) = params.domain.interval();
    quadrature::gauss_legendre(q, lo, hi)
}

/// `sum_q w_q f_q g_q h_q` over sampled rows.
pub(crate) fn weighted_dot(weights: &[f64], f: &[f64], g: &[f64]) -> f64 {
    weights.iter().zip(f).zip(g).map(|((w, a), b)| w * a * b).sum()
}
