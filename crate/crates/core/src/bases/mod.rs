//! Trial-function families and the quadrature used for every inner product.
//!
//! Velocity families are clamped (`W = DW = 0`), temperature families are
//! Dirichlet (`Theta = 0`). Each family lives on its own native interval;
//! assembly translates between that interval and the problem domain.

pub mod chandrasekhar;
pub mod legendre;
pub mod quadrature;
pub mod rama_rao;
pub mod sine;

use serde::{Deserialize, Serialize};

pub use chandrasekhar::{chandrasekhar_roots, eval_chandrasekhar, ChandrasekharRoots, Parity};
pub use legendre::{eval_legendre_integrated, LegendreKind};
pub use quadrature::{gauss_legendre, QuadratureRule};
pub use rama_rao::{eval_rama_rao, RamaRaoKind};
pub use sine::eval_sine_dirichlet;

use crate::error::{Error, Result};
use crate::physics::{check_in, Domain};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisKind {
    RamaRaoWeighted,
    Chandrasekhar,
    ShiftedLegendreIntegrated,
    SineDirichlet,
}

/// Which unknown a family expands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Field {
    Velocity,
    Temperature,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BasisFamily {
    pub kind: BasisKind,
    /// Even (C_n) modes for Chandrasekhar, total count otherwise.
    pub count_even: usize,
    /// Odd (S_n) modes for Chandrasekhar, 0 otherwise.
    pub count_odd: usize,
}

impl BasisFamily {
    pub fn chandrasekhar(count_even: usize, count_odd: usize) -> Self {
        Self {
            kind: BasisKind::Chandrasekhar,
            count_even,
            count_odd,
        }
    }

    pub fn rama_rao(count: usize) -> Self {
        Self::single(BasisKind::RamaRaoWeighted, count)
    }

    pub fn legendre(count: usize) -> Self {
        Self::single(BasisKind::ShiftedLegendreIntegrated, count)
    }

    pub fn sine(count: usize) -> Self {
        Self::single(BasisKind::SineDirichlet, count)
    }

    fn single(kind: BasisKind, count: usize) -> Self {
        Self {
            kind,
            count_even: count,
            count_odd: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.count_even + self.count_odd
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn native_domain(&self) -> Domain {
        match self.kind {
            BasisKind::RamaRaoWeighted | BasisKind::Chandrasekhar => Domain::Centered,
            BasisKind::ShiftedLegendreIntegrated | BasisKind::SineDirichlet => Domain::Shifted,
        }
    }

    pub fn supports(&self, field: Field) -> bool {
        match self.kind {
            BasisKind::Chandrasekhar => field == Field::Velocity,
            BasisKind::SineDirichlet => field == Field::Temperature,
            BasisKind::RamaRaoWeighted | BasisKind::ShiftedLegendreIntegrated => true,
        }
    }
}

/// A family bound to a field, with any precomputed data it needs.
#[derive(Debug, Clone)]
pub struct Basis {
    family: BasisFamily,
    field: Field,
    roots: Option<ChandrasekharRoots>,
}

impl Basis {
    pub fn new(family: BasisFamily, field: Field) -> Result<Self> {
        if family.is_empty() {
            return Err(Error::Contract(format!("{:?} family has no members", family.kind)));
        }
        if !family.supports(field) {
            let needed = match field {
                Field::Velocity => "clamped (W = DW = 0)",
                Field::Temperature => "Dirichlet (Theta = 0)",
            };
            return Err(Error::Contract(format!(
                "{:?} family does not satisfy the {needed} boundary conditions required for {:?}",
                family.kind, field
            )));
        }
        if family.kind != BasisKind::Chandrasekhar && family.count_odd != 0 {
            return Err(Error::Contract(format!(
                "{:?} family has no odd sub-family; use count_even only",
                family.kind
            )));
        }
        let roots = match family.kind {
            BasisKind::Chandrasekhar => Some(chandrasekhar_roots(family.count_even, family.count_odd)?),
            _ => None,
        };
        Ok(Self { family, field, roots })
    }

    pub fn family(&self) -> BasisFamily {
        self.family
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn roots(&self) -> Option<&ChandrasekharRoots> {
        self.roots.as_ref()
    }

    pub fn len(&self) -> usize {
        self.family.len()
    }

    pub fn is_empty(&self) -> bool {
        self.family.is_empty()
    }

    /// Highest mode ordinal, used to size the default quadrature.
    pub fn max_index(&self) -> usize {
        self.family.len()
    }

    /// Members are ordered even modes first, then odd. Returns the parity
    /// and 0-based index within the sub-family for Chandrasekhar members.
    pub fn chandrasekhar_member(&self, i: usize) -> Option<(Parity, usize)> {
        if self.family.kind != BasisKind::Chandrasekhar {
            return None;
        }
        if i < self.family.count_even {
            Some((Parity::Even, i))
        } else {
            Some((Parity::Odd, i - self.family.count_even))
        }
    }

    /// Evaluate member `i` (0-based) in its native coordinate.
    pub fn eval(&self, i: usize, native: f64, deriv: usize) -> Result<f64> {
        let max = self.max_derivative();
        if deriv > max {
            return Err(Error::UnsupportedDerivative { order: deriv, max });
        }
        if i >= self.len() {
            return Err(Error::Contract(format!(
                "member {i} out of range (family size {})",
                self.len()
            )));
        }
        let (lo, hi) = self.family.native_domain().interval();
        check_in("native coordinate", native, lo, hi)?;
        Ok(self.eval_unchecked(i, native, deriv))
    }

    pub fn max_derivative(&self) -> usize {
        match self.family.kind {
            BasisKind::SineDirichlet => 2,
            _ => 4,
        }
    }

    pub(crate) fn eval_unchecked(&self, i: usize, native: f64, deriv: usize) -> f64 {
        match self.family.kind {
            BasisKind::Chandrasekhar => {
                let roots = self.roots.as_ref().expect("Chandrasekhar basis carries its roots");
                let (parity, n) = self.chandrasekhar_member(i).unwrap();
                let k = match parity {
                    Parity::Even => roots.lambdas[n],
                    Parity::Odd => roots.mus[n],
                };
                chandrasekhar::chandrasekhar_unchecked(parity, k, native, deriv)
            }
            BasisKind::RamaRaoWeighted => {
                let kind = match self.field {
                    Field::Velocity => RamaRaoKind::H1,
                    Field::Temperature => RamaRaoKind::H2,
                };
                let k = match kind {
                    RamaRaoKind::H1 => i + 2,
                    RamaRaoKind::H2 => i + 1,
                };
                rama_rao::weighted_power(k, native, deriv)
            }
            BasisKind::ShiftedLegendreIntegrated => {
                let m = i + 1;
                let kind = match self.field {
                    Field::Velocity => LegendreKind::Beta,
                    Field::Temperature => LegendreKind::Phi,
                };
                let table = legendre::shifted_legendre_table(m + 3, native, deriv);
                legendre::from_table(kind, m, &table, deriv)
            }
            BasisKind::SineDirichlet => sine::sine_unchecked(i + 1, native, deriv),
        }
    }

    /// Sample derivatives `0..=max_deriv` of every member at `points`, given
    /// in the coordinate of `domain`. Result is indexed `[deriv][member][point]`.
    pub fn sample(&self, domain: Domain, points: &[f64], max_deriv: usize) -> Result<Vec<Vec<Vec<f64>>>> {
        if max_deriv > self.max_derivative() {
            return Err(Error::UnsupportedDerivative {
                order: max_deriv,
                max: self.max_derivative(),
            });
        }
        let shift = self.family.native_domain().lo() - domain.lo();
        let (lo, hi) = self.family.native_domain().interval();
        let natives: Vec<f64> = points.iter().map(|&s| (s + shift).clamp(lo, hi)).collect();
        if self.family.kind == BasisKind::ShiftedLegendreIntegrated {
            // One recurrence table per point serves every member.
            let n = self.len();
            let mut out = vec![vec![vec![0.0; points.len()]; n]; max_deriv + 1];
            let kind = match self.field {
                Field::Velocity => LegendreKind::Beta,
                Field::Temperature => LegendreKind::Phi,
            };
            for (p, &z) in natives.iter().enumerate() {
                let table = legendre::shifted_legendre_table(n + 4, z, max_deriv);
                for i in 0..n {
                    for (d, plane) in out.iter_mut().enumerate() {
                        plane[i][p] = legendre::from_table(kind, i + 1, &table, d);
                    }
                }
            }
            return Ok(out);
        }
        Ok((0..=max_deriv)
            .map(|d| {
                (0..self.len())
                    .map(|i| natives.iter().map(|&x| self.eval_unchecked(i, x, d)).collect())
                    .collect()
            })
            .collect())
    }
}
