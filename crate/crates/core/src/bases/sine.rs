//! Dirichlet sine modes `sin(m pi z)` on `[0, 1]`, temperature trial space
//! of the coupled Chandrasekhar path.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::physics::check_in;

pub fn eval_sine_dirichlet(m: usize, z: f64, deriv: usize) -> Result<f64> {
    if m == 0 {
        return Err(Error::Contract("sine mode index starts at 1".into()));
    }
    if deriv > 2 {
        return Err(Error::UnsupportedDerivative { order: deriv, max: 2 });
    }
    check_in("z", z, 0.0, 1.0)?;
    Ok(sine_unchecked(m, z, deriv))
}

pub(crate) fn sine_unchecked(m: usize, z: f64, deriv: usize) -> f64 {
    let k = m as f64 * PI;
    match deriv {
        0 => (k * z).sin(),
        1 => k * (k * z).cos(),
        _ => -k * k * (k * z).sin(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(eval_sine_dirichlet(1, 0.0, 0).unwrap(), 0.0);
        assert!(eval_sine_dirichlet(1, 1.0, 0).unwrap().abs() < 1e-15);
        assert_eq!(eval_sine_dirichlet(1, 0.5, 0).unwrap(), 1.0);
        assert_eq!(eval_sine_dirichlet(2, 0.25, 0).unwrap(), 1.0);
    }

    #[test]
    fn errors() {
        assert!(eval_sine_dirichlet(0, 0.5, 0).is_err());
        assert!(eval_sine_dirichlet(1, 0.5, 3).is_err());
        assert!(eval_sine_dirichlet(1, -0.5, 0).is_err());
    }
}
