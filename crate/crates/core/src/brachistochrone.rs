//! Gate complexity versus time complexity for the entangler family U_φ.
//!
//! Under a finite-energy constraint the time-optimal duration of U_φ is
//! `ω·t_φ = π·√(x(1 − x/2))` with `x = φ/π`. A protocol that needs
//! `N_gates` applications therefore takes `t_phys = N_gates · t_φ`.
//! Units have ħ = 1.

use crate::entanglement::MeasureKind;
use crate::error::{invalid, Result};
use crate::protocol::{convergence_gate_count, run_ensemble, Convergence, Level, ProtocolConfig};
use crate::qstate::TwoQubitGate;
use crate::scalar::Real;

/// Time-optimal duration of U_φ for energy scale `omega`.
pub fn optimal_gate_time<T: Real>(phi: T, omega: T) -> Result<T> {
    if !(phi >= T::zero() && phi <= T::PI()) {
        return Err(invalid!("gate angle {phi} outside [0, π]"));
    }
    if !(omega > T::zero() && omega.is_finite()) {
        return Err(invalid!("omega must be positive and finite, got {omega}"));
    }
    let x = phi / T::PI();
    let half = T::cast(0.5);
    Ok(T::PI() * (x * (T::one() - half * x)).sqrt() / omega)
}

/// `n_gates · t_φ`.
pub fn physical_time<T: Real>(n_gates: usize, phi: T, omega: T) -> Result<T> {
    Ok(T::from_count(n_gates) * optimal_gate_time(phi, omega)?)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow<T: Real> {
    pub phi: T,
    pub n_gates: Convergence,
    pub t_phi: T,
    /// Present only for converged rows.
    pub t_phys: Option<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepTable<T: Real> {
    pub rows: Vec<SweepRow<T>>,
    /// φ with the fewest gates among converged rows; ties go to the earlier
    /// grid point.
    pub argmin_gates: Option<T>,
    /// φ with the shortest physical time among converged rows.
    pub argmin_time: Option<T>,
}

impl<T: Real> SweepTable<T> {
    fn from_rows(rows: Vec<SweepRow<T>>) -> Self {
        let mut argmin_gates: Option<(usize, T)> = None;
        let mut argmin_time: Option<(T, T)> = None;
        for row in &rows {
            if let Some(n) = row.n_gates.gates() {
                if argmin_gates.is_none_or(|(best, _)| n < best) {
                    argmin_gates = Some((n, row.phi));
                }
            }
            if let Some(t) = row.t_phys {
                if argmin_time.is_none_or(|(best, _)| t < best) {
                    argmin_time = Some((t, row.phi));
                }
            }
        }
        Self {
            rows,
            argmin_gates: argmin_gates.map(|(_, phi)| phi),
            argmin_time: argmin_time.map(|(_, phi)| phi),
        }
    }

    /// The same sweep with a different energy scale; gate counts are reused.
    pub fn rescaled(&self, omega: T) -> Result<Self> {
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let t_phi = optimal_gate_time(r.phi, omega)?;
                Ok(SweepRow {
                    phi: r.phi,
                    n_gates: r.n_gates,
                    t_phi,
                    t_phys: r.n_gates.gates().map(|n| T::from_count(n) * t_phi),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_rows(rows))
    }
}

/// For each φ, run the protocol with U_φ as the fixed gate and record the
/// gate count to convergence of the global linear-entropy measure together
/// with the resulting physical time. Every grid point reuses the base
/// seed.
pub fn sweep_phi<T: Real>(
    base: &ProtocolConfig<T>,
    phi_grid: &[T],
    omega: T,
) -> Result<SweepTable<T>> {
    // Fail fast on a bad grid before any simulation runs.
    for &phi in phi_grid {
        optimal_gate_time(phi, omega)?;
    }
    let mut rows = Vec::with_capacity(phi_grid.len());
    for &phi in phi_grid {
        let mut config = base.clone();
        config.fixed_gate = TwoQubitGate::entangler(phi)?;
        config.measures = vec![MeasureKind::Linear];
        let traj = run_ensemble(&config)?;
        let series = traj
            .series(MeasureKind::Linear, Level::Global)
            .expect("linear measure was requested");
        let n_gates = convergence_gate_count(&series, config.threshold, config.confirm_window);
        let t_phi = optimal_gate_time(phi, omega)?;
        rows.push(SweepRow {
            phi,
            n_gates,
            t_phi,
            t_phys: n_gates.gates().map(|n| T::from_count(n) * t_phi),
        });
    }
    Ok(SweepTable::from_rows(rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn gate_time_values() {
        assert_eq!(optimal_gate_time(0.0, 1.0).unwrap(), 0.0);
        let t = optimal_gate_time(PI, 1.0).unwrap();
        assert!((t - PI / 2f64.sqrt()).abs() < 1e-12);
        assert!((t - 2.2214).abs() < 1e-4);
        let t = optimal_gate_time(PI / 2.0, 1.0).unwrap();
        assert!((t - PI * (3.0f64 / 8.0).sqrt()).abs() < 1e-12);
        assert!((t - 1.9238).abs() < 1e-4);
    }

    #[test]
    fn gate_time_range_errors() {
        assert!(optimal_gate_time(-0.1, 1.0).is_err());
        assert!(optimal_gate_time(PI + 1e-6, 1.0).is_err());
        assert!(optimal_gate_time(1.0, 0.0).is_err());
        assert!(optimal_gate_time(1.0, -1.0).is_err());
    }

    #[test]
    fn physical_time_values() {
        assert_eq!(physical_time(0, 1.3, 1.0).unwrap(), 0.0);
        let t = physical_time(100, PI, 1.0).unwrap();
        assert!((t - 222.14).abs() < 1e-2);
        assert!(physical_time(1000, 1e-12, 1.0).unwrap() < 1e-2);
    }

    #[test]
    fn argmins_skip_unconverged_rows() {
        let row = |phi: f64, n: Option<usize>| SweepRow {
            phi,
            n_gates: n.map_or(Convergence::NotConverged, Convergence::Converged),
            t_phi: optimal_gate_time(phi, 1.0).unwrap(),
            t_phys: n.map(|n| n as f64 * optimal_gate_time(phi, 1.0).unwrap()),
        };
        let t = SweepTable::from_rows(vec![row(0.0, None), row(1.0, Some(45)), row(1.5, Some(40)), row(2.0, Some(40))]);
        assert_eq!(t.argmin_gates, Some(1.5));
        assert_eq!(t.argmin_time, Some(1.0));
        let none = SweepTable::from_rows(vec![row(0.0, None)]);
        assert_eq!(none.argmin_gates, None);
        assert_eq!(none.argmin_time, None);
    }

    #[test]
    fn identity_row_diverges() {
        let mut base = ProtocolConfig::new(3, TwoQubitGate::<f64>::identity());
        base.realizations = 4;
        base.max_gates = 50;
        let t = sweep_phi(&base, &[0.0], 1.0).unwrap();
        assert_eq!(t.rows[0].n_gates, Convergence::NotConverged);
        assert_eq!(t.rows[0].t_phys, None);
        assert!(sweep_phi(&base, &[4.0], 1.0).is_err());
    }
}
