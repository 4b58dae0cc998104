//! Neutral curves `a^2 -> R` at fixed heating rate and their minima.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::assembly::{
    assemble_coupled, assemble_legendre, assemble_rama_rao, assemble_theta_eliminated, GalerkinPencil,
};
use crate::bases::BasisFamily;
use crate::eigensolve::{solve_pencil, DEFAULT_TOL_IMAG};
use crate::error::{Error, Result};
use crate::oracle::{collocation_rayleigh, DEFAULT_POINTS};
use crate::physics::{Domain, ProblemParams};

pub const DEFAULT_BRACKET: (f64, f64) = (4.0, 16.0);
pub const A2_TOLERANCE: f64 = 1e-4;
/// Spacing of the grid used for the local-minimum certificate.
pub const CERTIFICATE_STEP: f64 = 0.01;
const CERTIFICATE_SLACK: f64 = 1e-8;

/// Discretisation used to evaluate `R(a^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "path", rename_all = "snake_case")]
pub enum MethodKind {
    /// Chandrasekhar `W` (even + odd modes) with sine `Theta`.
    Coupled {
        even: usize,
        odd: usize,
        theta: usize,
    },
    /// Chandrasekhar `W` with `Theta` eliminated in closed form.
    Eliminated {
        even: usize,
        odd: usize,
    },
    Legendre {
        count: usize,
    },
    RamaRao {
        count: usize,
    },
    Collocation {
        points: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Method {
    #[serde(flatten)]
    pub kind: MethodKind,
    pub quad_order: Option<usize>,
}

impl Method {
    pub const fn new(kind: MethodKind) -> Self {
        Self { kind, quad_order: None }
    }

    pub const fn chandrasekhar() -> Self {
        Self::new(MethodKind::Coupled {
            even: 6,
            odd: 6,
            theta: 12,
        })
    }

    pub const fn chandrasekhar_eliminated() -> Self {
        Self::new(MethodKind::Eliminated { even: 6, odd: 6 })
    }

    pub const fn legendre() -> Self {
        Self::new(MethodKind::Legendre { count: 8 })
    }

    pub const fn rama_rao() -> Self {
        Self::new(MethodKind::RamaRao { count: 4 })
    }

    pub const fn collocation() -> Self {
        Self::new(MethodKind::Collocation { points: DEFAULT_POINTS })
    }

    pub fn with_quad_order(mut self, order: Option<usize>) -> Self {
        self.quad_order = order;
        self
    }

    /// Same family at truncation `t`: `t + t` Chandrasekhar modes with `2t`
    /// sine modes, `t` modes otherwise, `t` points for collocation.
    pub fn with_truncation(self, t: usize) -> Self {
        let kind = match self.kind {
            MethodKind::Coupled { .. } => MethodKind::Coupled {
                even: t,
                odd: t,
                theta: 2 * t,
            },
            MethodKind::Eliminated { .. } => MethodKind::Eliminated { even: t, odd: t },
            MethodKind::Legendre { .. } => MethodKind::Legendre { count: t },
            MethodKind::RamaRao { .. } => MethodKind::RamaRao { count: t },
            MethodKind::Collocation { .. } => MethodKind::Collocation { points: t },
        };
        Self { kind, ..self }
    }

    /// Every mode count doubled.
    pub fn doubled(self) -> Self {
        let kind = match self.kind {
            MethodKind::Coupled { even, odd, theta } => MethodKind::Coupled {
                even: 2 * even,
                odd: 2 * odd,
                theta: 2 * theta,
            },
            MethodKind::Eliminated { even, odd } => MethodKind::Eliminated {
                even: 2 * even,
                odd: 2 * odd,
            },
            MethodKind::Legendre { count } => MethodKind::Legendre { count: 2 * count },
            MethodKind::RamaRao { count } => MethodKind::RamaRao { count: 2 * count },
            MethodKind::Collocation { points } => MethodKind::Collocation { points: 2 * points },
        };
        Self { kind, ..self }
    }

    /// Velocity mode count per parity for Chandrasekhar paths, mode or point
    /// count otherwise.
    pub fn truncation(&self) -> usize {
        match self.kind {
            MethodKind::Coupled { even, .. } | MethodKind::Eliminated { even, .. } => even,
            MethodKind::Legendre { count } | MethodKind::RamaRao { count } => count,
            MethodKind::Collocation { points } => points,
        }
    }

    pub fn label(&self) -> &'static str {
        match self.kind {
            MethodKind::Coupled { .. } => "chandrasekhar",
            MethodKind::Eliminated { .. } => "chandrasekhar-eliminated",
            MethodKind::Legendre { .. } => "legendre",
            MethodKind::RamaRao { .. } => "rama-rao",
            MethodKind::Collocation { .. } => "collocation",
        }
    }

    /// Truncation as printed in tables: `e+o/t` for the coupled path.
    pub fn truncation_label(&self) -> String {
        match self.kind {
            MethodKind::Coupled { even, odd, theta } => format!("{even}+{odd}/{theta}"),
            MethodKind::Eliminated { even, odd } => format!("{even}+{odd}"),
            MethodKind::Legendre { count } | MethodKind::RamaRao { count } => count.to_string(),
            MethodKind::Collocation { points } => points.to_string(),
        }
    }

    pub fn assemble(&self, params: &ProblemParams) -> Result<GalerkinPencil> {
        let q = self.quad_order;
        match self.kind {
            MethodKind::Coupled { even, odd, theta } => assemble_coupled(
                params,
                BasisFamily::chandrasekhar(even, odd),
                BasisFamily::sine(theta),
                q,
            ),
            MethodKind::Eliminated { even, odd } => {
                assemble_theta_eliminated(params, BasisFamily::chandrasekhar(even, odd), q)
            }
            MethodKind::Legendre { count } => assemble_legendre(params, count, q),
            MethodKind::RamaRao { count } => assemble_rama_rao(params, count, q),
            MethodKind::Collocation { .. } => Err(Error::Contract("collocation has no Galerkin pencil".into())),
        }
    }
}

/// Smallest positive onset Rayleigh number at one parameter point.
pub fn rayleigh_at(params: &ProblemParams, method: &Method) -> Result<f64> {
    if let MethodKind::Collocation { points } = method.kind {
        return collocation_rayleigh(params, points);
    }
    let pencil = method.assemble(params)?;
    let spectrum = solve_pencil(&pencil, DEFAULT_TOL_IMAG)?;
    Ok(spectrum.r_min.expect("solve_pencil guarantees an onset"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OmittedPoint {
    pub a2: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeutralCurve {
    pub n_rate: f64,
    pub method: Method,
    /// `(a^2, R)` with `a^2` strictly increasing.
    pub samples: Vec<(f64, f64)>,
    pub omitted: Vec<OmittedPoint>,
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Contract("a2 grid is empty".into()));
    }
    if let Some(bad) = grid.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
        return Err(Error::Domain {
            what: "a2",
            value: *bad,
            lo: 0.0,
            hi: f64::INFINITY,
        });
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Contract("a2 grid must be strictly increasing".into()));
    }
    Ok(())
}

/// `R` over a grid of `a^2`, evaluated concurrently. Points without onset
/// are omitted and listed; contract and numeric failures propagate.
pub fn neutral_curve(n_rate: f64, domain: Domain, a2_grid: &[f64], method: &Method) -> Result<NeutralCurve> {
    check_grid(a2_grid)?;
    let results: Vec<(f64, Result<f64>)> = a2_grid
        .par_iter()
        .map(|&a2| {
            let r = ProblemParams::new(a2, n_rate, domain).and_then(|p| rayleigh_at(&p, method));
            (a2, r)
        })
        .collect();
    let mut samples = Vec::new();
    let mut omitted = Vec::new();
    for (a2, r) in results {
        match r {
            Ok(r) => samples.push((a2, r)),
            Err(Error::NoOnset(reason)) => omitted.push(OmittedPoint { a2, reason }),
            Err(e) => return Err(e),
        }
    }
    if samples.is_empty() {
        return Err(Error::EmptyCurve(a2_grid.len()));
    }
    Ok(NeutralCurve {
        n_rate,
        method: *method,
        samples,
        omitted,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub n_rate: f64,
    pub a2_c: f64,
    pub r_c: f64,
    pub method: Method,
    pub bracket: (f64, f64),
    /// `(a^2, R)` at the grid points nearest `a2_c`; every `R` is at least `r_c`.
    pub certificate: Vec<(f64, f64)>,
    pub evaluations: usize,
}

/// Golden-section minimum of `a^2 -> R` on `bracket`.
pub fn critical_point(n_rate: f64, domain: Domain, bracket: (f64, f64), method: &Method) -> Result<CriticalPoint> {
    let (lo, hi) = bracket;
    if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && lo < hi) {
        return Err(Error::Contract(format!(
            "bracket [{lo}, {hi}] must satisfy 0 < lo < hi"
        )));
    }
    let mut evaluations = 0usize;
    let mut eval = |a2: f64| -> Result<f64> {
        evaluations += 1;
        rayleigh_at(&ProblemParams::new(a2, n_rate, domain)?, method)
    };
    let f_lo = eval(lo)?;
    let f_hi = eval(hi)?;

    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = eval(c)?;
    let mut fd = eval(d)?;
    while b - a > A2_TOLERANCE {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = eval(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = eval(d)?;
        }
    }
    let (a2_c, r_c) = if fc < fd { (c, fc) } else { (d, fd) };

    if a2_c - lo < 2.0 * A2_TOLERANCE || f_lo <= r_c {
        return Err(Error::BracketTooSmall { endpoint: lo });
    }
    if hi - a2_c < 2.0 * A2_TOLERANCE || f_hi <= r_c {
        return Err(Error::BracketTooSmall { endpoint: hi });
    }

    let k0 = (a2_c / CERTIFICATE_STEP).round() as i64;
    let mut certificate = Vec::with_capacity(5);
    for k in k0 - 2..=k0 + 2 {
        let g = k as f64 / CERTIFICATE_STEP.recip().round();
        if g <= lo || g >= hi {
            continue;
        }
        let r = eval(g)?;
        if r_c > r * (1.0 + CERTIFICATE_SLACK) {
            return Err(Error::Numeric(format!(
                "neutral curve not unimodal near a2 = {a2_c}: R({g}) = {r} < {r_c}"
            )));
        }
        certificate.push((g, r));
    }
    Ok(CriticalPoint {
        n_rate,
        a2_c,
        r_c,
        method: *method,
        bracket,
        certificate,
        evaluations,
    })
}

/// Critical points for several heating rates, computed concurrently and
/// returned in input order.
pub fn critical_points(
    n_rates: &[f64],
    domain: Domain,
    bracket: (f64, f64),
    method: &Method,
) -> Vec<Result<CriticalPoint>> {
    n_rates
        .par_iter()
        .map(|&n| critical_point(n, domain, bracket, method))
        .collect()
}
