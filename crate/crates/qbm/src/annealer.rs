//! Mapping annealer schedule parameters to dimensionless model parameters.
//!
//! A quantum annealer frozen at schedule point `s*` with transverse energy
//! `A(s*)`, problem energy `B(s*)` and inverse temperature `β` samples the
//! Boltzmann distribution of a transverse-field Ising model with
//!
//! ```text
//! Γ = β A(s*),    b_a = β B(s*) h_a,    w_ab = β B(s*) J_ab.
//! ```
//!
//! Only this dimensionless mapping is implemented; hardware interaction and
//! freeze-out dynamics are out of scope.

use crate::error::{Error, Result};
use crate::model::ModelParameters;

/// Inverse temperature plus the schedule energies and device parameters at
/// the freeze-out point.
#[derive(Debug, Clone)]
pub struct AnnealerSchedulePoint {
    /// Inverse temperature `β` (1/energy).
    pub beta: f64,
    /// Transverse energy scale `A(s*)`.
    pub a_star: f64,
    /// Problem energy scale `B(s*)`.
    pub b_star: f64,
    /// Dimensionless per-qubit biases `h_a`.
    pub h: Vec<f64>,
    /// Dimensionless couplings `(a, b, J_ab)` with 1-based `a < b`.
    pub j: Vec<(usize, usize, f64)>,
}

impl AnnealerSchedulePoint {
    fn validate(&self) -> Result<()> {
        if self.beta <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "inverse temperature must be positive, got {}",
                self.beta
            )));
        }
        if self.a_star < 0.0 || self.b_star < 0.0 {
            return Err(Error::InvalidParameter(
                "schedule energies must be non-negative".into(),
            ));
        }
        let n = self.h.len();
        for &(a, b, _) in &self.j {
            if a < 1 || b <= a || b > n {
                return Err(Error::InvalidParameter(format!(
                    "coupling pair ({a},{b}) is not 1 <= a < b <= {n}"
                )));
            }
        }
        Ok(())
    }
}

/// Converts a schedule point into model parameters by direct multiplication:
/// shared `Γ = β A*`, `b_a = β B* h_a`, `w_ab = β B* J_ab`.
pub fn annealer_parameter_map(pt: &AnnealerSchedulePoint) -> Result<ModelParameters> {
    pt.validate()?;
    let n = pt.h.len();
    let mut p = ModelParameters::fully_connected(n, 0);
    p.set_shared_gamma(pt.beta * pt.a_star)?;
    for (a, &h) in pt.h.iter().enumerate() {
        p.set_bias(a + 1, pt.beta * pt.b_star * h);
    }
    for &(a, b, j) in &pt.j {
        p.set_coupling(a, b, pt.beta * pt.b_star * j)?;
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn direct_multiplication() {
        let pt = AnnealerSchedulePoint {
            beta: 2.0,
            a_star: 0.5,
            b_star: 1.0,
            h: vec![0.3],
            j: vec![],
        };
        let p = annealer_parameter_map(&pt).unwrap();
        assert_relative_eq!(p.gamma(1), 1.0, max_relative = 1e-14);
        assert_relative_eq!(p.bias(1), 0.6, max_relative = 1e-14);
    }

    #[test]
    fn classical_limit_at_zero_transverse_energy() {
        let pt = AnnealerSchedulePoint {
            beta: 3.0,
            a_star: 0.0,
            b_star: 2.0,
            h: vec![0.1, -0.2],
            j: vec![(1, 2, 0.7)],
        };
        let p = annealer_parameter_map(&pt).unwrap();
        assert!(p.is_classical());
        assert_relative_eq!(p.coupling(1, 2), 4.2, max_relative = 1e-14);
    }

    #[test]
    fn linear_in_beta() {
        let base = AnnealerSchedulePoint {
            beta: 1.5,
            a_star: 0.4,
            b_star: 0.9,
            h: vec![0.2, 0.3],
            j: vec![(1, 2, -0.5)],
        };
        let doubled = AnnealerSchedulePoint {
            beta: 3.0,
            ..base.clone()
        };
        let p1 = annealer_parameter_map(&base).unwrap();
        let p2 = annealer_parameter_map(&doubled).unwrap();
        assert_relative_eq!(p2.gamma(1), 2.0 * p1.gamma(1), max_relative = 1e-14);
        assert_relative_eq!(p2.bias(2), 2.0 * p1.bias(2), max_relative = 1e-14);
        assert_relative_eq!(
            p2.coupling(1, 2),
            2.0 * p1.coupling(1, 2),
            max_relative = 1e-14
        );
    }

    #[test]
    fn rejects_bad_points() {
        let pt = AnnealerSchedulePoint {
            beta: 0.0,
            a_star: 0.1,
            b_star: 0.1,
            h: vec![0.0],
            j: vec![],
        };
        assert!(annealer_parameter_map(&pt).is_err());
        let pt = AnnealerSchedulePoint {
            beta: 1.0,
            a_star: 0.1,
            b_star: 0.1,
            h: vec![0.0],
            j: vec![(1, 1, 0.5)],
        };
        assert!(annealer_parameter_map(&pt).is_err());
    }
}
