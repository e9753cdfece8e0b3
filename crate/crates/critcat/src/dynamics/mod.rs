//! Master-equation time evolution and logical-qubit protocols: state
//! embedding/extraction through the conserved quantities, fidelity, recovery
//! from frequency errors, X and XX gates, and validation of the adiabatic
//! elimination of the readout mode.

mod adiabatic;
mod logical;
mod protocols;

pub use adiabatic::{adiabatic_validation, AdiabaticOptions, AdiabaticReport, TwoModeMicroModel};
pub use logical::{fidelity, LogicalBasis, QubitState};
pub use protocols::{
    dominant_angular_frequency, gate_x, gate_xx, recovery_protocol, GateXOptions, GateXxOptions,
    RecoveryOutcome, XGateRun, XxGateRun,
};

use ndarray::prelude::*;
use num_complex::Complex64;
use thiserror::Error;

use crate::linalg::{krylov_expv, KrylovOptions, NumericalError};
use crate::liouv::{unvectorize, vectorize, LindbladGenerator, LiouvError};
use crate::model::ModelError;
use crate::spectral::SpectralError;

#[derive(Debug, Error)]
pub enum DynamicsError {
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Liouv(#[from] LiouvError),
    #[error(transparent)]
    Numerical(#[from] NumericalError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("tolerance {requested:.3e} not met: trace drift {trace_drift:.3e}, hermiticity drift {herm_drift:.3e}")]
    ToleranceNotMet {
        requested: f64,
        trace_drift: f64,
        herm_drift: f64,
    },
    #[error("embedding is not physical: min eigenvalue {min_eigenvalue:.3e} < -1e-6")]
    NonPhysicalEmbedding { min_eigenvalue: f64 },
    #[error("qubit state violates {what}: {value:.3e}")]
    UnphysicalQubit { what: &'static str, value: f64 },
}

/// Default evolution tolerance (trace and hermiticity drift per call).
pub const DEFAULT_EVOLVE_TOL: f64 = 1e-8;

/// Propagate ρ(t) = e^{ℒt} ρ₀ through the Krylov exponential action, checking
/// trace and hermiticity drift against `tol`.
pub fn evolve(
    gen: &LindbladGenerator,
    rho0: &Array2<Complex64>,
    t: f64,
    tol: f64,
) -> Result<Array2<Complex64>, DynamicsError> {
    let d = gen.dim();
    assert_eq!(rho0.nrows(), d, "state dimension mismatch");
    if t == 0.0 {
        return Ok(rho0.clone());
    }
    let tr0: Complex64 = (0..d).map(|i| rho0[(i, i)]).sum();
    let v = vectorize(rho0);
    let opts = KrylovOptions {
        m: 30,
        tol: (tol * 0.1).min(1e-9),
        max_steps: 5_000_000,
    };
    let w = krylov_expv(gen, &v, t, &opts)?;
    let rho = unvectorize(&w, d);
    let tr: Complex64 = (0..d).map(|i| rho[(i, i)]).sum();
    let trace_drift = (tr - tr0).norm();
    let herm_drift = {
        let dev: f64 = (0..d)
            .map(|i| {
                (i..d)
                    .map(|j| {
                        let z = rho[(i, j)] - rho[(j, i)].conj();
                        z.norm_sqr() * if i == j { 0.5 } else { 1.0 }
                    })
                    .sum::<f64>()
            })
            .sum::<f64>();
        dev.sqrt()
    };
    if trace_drift > tol || herm_drift > tol {
        return Err(DynamicsError::ToleranceNotMet {
            requested: tol,
            trace_drift,
            herm_drift,
        });
    }
    Ok(rho)
}

/// Time series of extracted qubit states plus named scalar observables.
#[derive(Debug, Clone, Default)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<QubitState>,
    pub series: std::collections::BTreeMap<String, Vec<f64>>,
}

impl Trajectory {
    pub fn push_series(&mut self, name: &str, value: f64) {
        self.series.entry(name.to_string()).or_default().push(value);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{cat_state, CatParity, FockSpace};
    use crate::liouv::single_mode_generator;
    use crate::model::{alpha_steady, EffectiveParams};

    #[test]
    fn zero_time_is_identity() {
        let p = EffectiveParams::new(0.0, Complex64::new(0.0, 2.0), 0.0, 1.0).with_cutoff(16);
        let gen = single_mode_generator(&p);
        let rho = FockSpace::new(16).unwrap().fock_ket(0).projector();
        let out = evolve(&gen, &rho, 0.0, 1e-8).unwrap();
        assert_eq!(out, rho);
    }

    #[test]
    fn vacuum_stays_vacuum_under_two_photon_loss() {
        let p = EffectiveParams::new(0.0, Complex64::new(0.0, 0.0), 0.0, 1.0).with_cutoff(12);
        let gen = single_mode_generator(&p);
        let rho = FockSpace::new(12).unwrap().fock_ket(0).projector();
        let out = evolve(&gen, &rho, 5.0, 1e-8).unwrap();
        let dev: f64 = (&out - &rho).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        assert!(dev < 1e-8);
    }

    #[test]
    fn cat_is_stationary_over_long_horizon() {
        let n = crate::fock::cutoff_stationary_even(4.0);
        let p = EffectiveParams::new(0.0, Complex64::new(0.0, 4.0), 0.0, 1.0).with_cutoff(n);
        let gen = single_mode_generator(&p);
        let alpha = alpha_steady(&p).unwrap();
        let cat = cat_state(alpha, CatParity::Even, &FockSpace::new(n).unwrap()).unwrap();
        let rho = cat.projector();
        let out = evolve(&gen, &rho, 10.0, 1e-8).unwrap();
        let dev: f64 = (&out - &rho).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        assert!(dev < 1e-7, "drift {dev:.2e}");
    }

    #[test]
    fn relaxation_reaches_even_cat_from_even_input() {
        // an even-parity initial state converges to the even cat
        let n = crate::fock::cutoff_stationary_even(3.0);
        let p = EffectiveParams::new(0.0, Complex64::new(0.0, 3.0), 0.0, 1.0).with_cutoff(n);
        let gen = single_mode_generator(&p);
        let space = FockSpace::new(n).unwrap();
        let rho0 = space.fock_ket(0).projector();
        let out = evolve(&gen, &rho0, 30.0, 1e-8).unwrap();
        let alpha = alpha_steady(&p).unwrap();
        let cat = cat_state(alpha, CatParity::Even, &space).unwrap();
        let overlap = crate::spectral::trace_inner(&cat.projector(), &out);
        assert!(overlap.re > 1.0 - 1e-6, "overlap {overlap}");
    }
}
