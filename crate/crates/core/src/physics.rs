//! Basic conduction state and the nondimensional parameters of the
//! stability problem.
//!
//! The marginal-stability problem for a layer with uniform internal heating
//! and rigid, perfectly conducting walls reads
//!
//! ```text
//! (D^2 - a^2)^2 W = Theta
//! (D^2 - a^2) Theta = -a^2 R g(s) W,       W = DW = Theta = 0 at the walls
//! ```
//!
//! with `g(x) = 1 - N x` on the centered layer `x in [-1/2, 1/2]`, or
//! equivalently `g(z) = N1 - N z`, `N1 = 1 + N/2`, on `z in [0, 1]`.
//! The Rayleigh number is `R = Gr * Pr`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack allowed when checking that a coordinate lies in its interval.
pub(crate) const COORD_SLACK: f64 = 1e-12;

pub(crate) fn check_in(what: &'static str, value: f64, lo: f64, hi: f64) -> Result<()> {
    let slack = COORD_SLACK * (hi - lo).abs().max(1.0);
    if value.is_finite() && value >= lo - slack && value <= hi + slack {
        Ok(())
    } else {
        Err(Error::Domain { what, value, lo, hi })
    }
}

/// Rayleigh number from Grashof and Prandtl numbers, `R = Gr * Pr`.
pub fn rayleigh_number(grashof: f64, prandtl: f64) -> f64 {
    grashof * prandtl
}

/// Dimensional parameters of the conduction profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BasicState {
    /// Potential temperature at the lower wall.
    pub theta_b0: f64,
    /// Wall temperature difference `theta_b0 - theta_b1`.
    pub delta_theta: f64,
    /// Layer depth, positive.
    pub h: f64,
    /// Heating rate.
    pub eta: f64,
    /// Thermal conductivity, positive.
    pub k: f64,
}

impl BasicState {
    pub fn new(theta_b0: f64, delta_theta: f64, h: f64, eta: f64, k: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::Contract(format!("layer depth h must be positive, got {h}")));
        }
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::Contract(format!("conductivity k must be positive, got {k}")));
        }
        Ok(Self {
            theta_b0,
            delta_theta,
            h,
            eta,
            k,
        })
    }

    /// Conduction temperature at height `z in [-h/2, h/2]`.
    ///
    /// `theta_b0 - delta_theta (z + h/2)/h + eta/(2k) (z^2 - (h/2)^2)`.
    /// Written so that both wall values come out exactly.
    pub fn temperature(&self, z: f64) -> Result<f64> {
        let half = 0.5 * self.h;
        check_in("z", z, -half, half)?;
        let linear = self.delta_theta * ((z + half) / self.h);
        let quadratic = self.eta / (2.0 * self.k) * (z * z - half * half);
        Ok(self.theta_b0 - linear + quadratic)
    }
}

/// Free-standing form of [`BasicState::temperature`].
pub fn basic_temperature(state: &BasicState, z: f64) -> Result<f64> {
    state.temperature(z)
}

/// Coordinate convention for the layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    /// `x in [-1/2, 1/2]`
    Centered,
    /// `z in [0, 1]`, `z = x + 1/2`
    Shifted,
}

impl Domain {
    pub fn interval(self) -> (f64, f64) {
        match self {
            Domain::Centered => (-0.5, 0.5),
            Domain::Shifted => (0.0, 1.0),
        }
    }

    pub fn lo(self) -> f64 {
        self.interval().0
    }
}

/// One instance of the eigenvalue problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemParams {
    /// Squared horizontal wavenumber, positive.
    pub a2: f64,
    /// Heating rate N.
    pub n_rate: f64,
    pub domain: Domain,
}

impl ProblemParams {
    pub fn new(a2: f64, n_rate: f64, domain: Domain) -> Result<Self> {
        if !(a2 > 0.0 && a2.is_finite()) {
            return Err(Error::Contract(format!("a2 must be positive and finite, got {a2}")));
        }
        if !n_rate.is_finite() {
            return Err(Error::Contract(format!("N must be finite, got {n_rate}")));
        }
        Ok(Self { a2, n_rate, domain })
    }

    pub fn centered(a2: f64, n_rate: f64) -> Result<Self> {
        Self::new(a2, n_rate, Domain::Centered)
    }

    pub fn shifted(a2: f64, n_rate: f64) -> Result<Self> {
        Self::new(a2, n_rate, Domain::Shifted)
    }

    pub fn with_domain(self, domain: Domain) -> Self {
        Self { domain, ..self }
    }

    pub fn with_a2(self, a2: f64) -> Result<Self> {
        Self::new(a2, self.n_rate, self.domain)
    }

    /// `N1 = 1 + N/2`, the profile value at the lower wall.
    pub fn n1(&self) -> f64 {
        1.0 + 0.5 * self.n_rate
    }

    pub fn wavenumber(&self) -> f64 {
        self.a2.sqrt()
    }

    /// `g(s)` without the domain check; used inside quadrature loops.
    pub(crate) fn profile(&self, s: f64) -> f64 {
        match self.domain {
            Domain::Centered => 1.0 - self.n_rate * s,
            Domain::Shifted => self.n1() - self.n_rate * s,
        }
    }

    /// Map a coordinate of this problem's domain to the centered coordinate.
    pub(crate) fn to_centered(self, s: f64) -> f64 {
        s - self.domain.lo() + Domain::Centered.lo()
    }
}

/// Heat-source profile `g(s)`: `1 - N s` (centered) or `N1 - N s` (shifted).
pub fn heat_profile(params: &ProblemParams, s: f64) -> Result<f64> {
    let (lo, hi) = params.domain.interval();
    check_in("s", s, lo, hi)?;
    Ok(params.profile(s))
}
