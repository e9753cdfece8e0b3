//! Validation of the adiabatic elimination of the readout mode: the two-mode
//! storage⊗readout model (post-RWA frame) against the effective single-mode
//! model, compared through the storage occupation.

use ndarray::prelude::*;
use ndarray::linalg::kron;
use num_complex::Complex64;

use super::{evolve, DynamicsError};
use crate::fock::FockSpace;
use crate::liouv::{single_mode_generator, LindbladGenerator};
use crate::model::EffectiveParams;

/// Storage–readout model after the rotating-wave reduction:
/// H = Δ_s n_s + Δ_r n_r − (U_s/2)â_s†²â_s² − (U_r/2)â_r†²â_r² − χ_rs n_s n_r
///     − [(g₂ â_s†² + ε_d*) â_r + h.c.],
/// with losses κ_r D[â_r] and κ_s D[â_s].
#[derive(Debug, Clone, Copy)]
pub struct TwoModeMicroModel {
    pub delta_s: f64,
    pub delta_r: f64,
    pub u_s: f64,
    pub u_r: f64,
    pub chi_rs: f64,
    pub g2: Complex64,
    pub eps_d: Complex64,
    pub kappa_r: f64,
    pub kappa_s: f64,
    pub n_s: usize,
    pub n_r: usize,
}

impl TwoModeMicroModel {
    pub fn generator(&self) -> LindbladGenerator {
        let ss = FockSpace::new(self.n_s).unwrap();
        let sr = FockSpace::new(self.n_r).unwrap();
        let eye_s = Array2::<Complex64>::eye(self.n_s);
        let eye_r = Array2::<Complex64>::eye(self.n_r);
        let a_s = kron(ss.annihilation().data(), &eye_r);
        let a_r = kron(&eye_s, sr.annihilation().data());
        let dag = |m: &Array2<Complex64>| m.t().mapv(|z| z.conj());
        let n_s = dag(&a_s).dot(&a_s);
        let n_r = dag(&a_r).dot(&a_r);
        let as2 = a_s.dot(&a_s);
        let ar2 = a_r.dot(&a_r);

        let mut h = n_s.mapv(|z| z * self.delta_s) + n_r.mapv(|z| z * self.delta_r);
        h = h - dag(&as2).dot(&as2).mapv(|z| z * (self.u_s / 2.0));
        h = h - dag(&ar2).dot(&ar2).mapv(|z| z * (self.u_r / 2.0));
        h = h - n_s.dot(&n_r).mapv(|z| z * self.chi_rs);
        let seed = dag(&as2).mapv(|z| z * self.g2) + eye_like(&a_s, self.eps_d.conj());
        let drive = seed.dot(&a_r);
        h = h - (&drive + &dag(&drive));

        let mut gen = LindbladGenerator::new(h);
        gen.add_jump(self.kappa_r, a_r);
        gen.add_jump(self.kappa_s, a_s);
        gen
    }

    /// Effective single-mode parameters from the filter relations:
    /// Γ⁻¹ = 1/2 − iΔ_r/κ_r, G = −2iΓε_d g₂/κ_r, η = 2 Re(Γ)|g₂|²/κ_r.
    pub fn effective_params(&self, cutoff: usize) -> EffectiveParams {
        let gamma = Complex64::new(1.0, 0.0) / Complex64::new(0.5, -self.delta_r / self.kappa_r);
        let g = -2.0 * Complex64::i() * gamma * self.eps_d * self.g2 / self.kappa_r;
        let eta = 2.0 * gamma.re * self.g2.norm_sqr() / self.kappa_r;
        EffectiveParams::new(self.delta_s, g, self.u_s, eta)
            .with_losses(self.kappa_s, 0.0)
            .with_cutoff(cutoff)
    }

    /// κ_r over the largest competing rate: must be large for the adiabatic
    /// reduction to hold.
    pub fn adiabaticity_ratio(&self) -> f64 {
        let m = [
            self.g2.norm(),
            self.eps_d.norm(),
            self.u_s,
            self.chi_rs,
            self.delta_s.abs(),
            self.delta_r.abs(),
            self.kappa_s,
        ]
        .into_iter()
        .fold(0.0f64, f64::max);
        if m == 0.0 {
            f64::INFINITY
        } else {
            self.kappa_r / m
        }
    }
}

fn eye_like(m: &Array2<Complex64>, scale: Complex64) -> Array2<Complex64> {
    Array2::from_diag_elem(m.nrows(), scale)
}

#[derive(Debug, Clone, Copy)]
pub struct AdiabaticOptions {
    pub t_final: f64,
    pub samples: usize,
    pub tol: f64,
}

/// Comparison of storage occupations between the two-mode and the effective
/// single-mode evolutions from vacuum.
#[derive(Debug, Clone)]
pub struct AdiabaticReport {
    pub times: Vec<f64>,
    pub n_two_mode: Vec<f64>,
    pub n_effective: Vec<f64>,
    pub steady_two_mode: f64,
    pub steady_effective: f64,
    /// |n₂ − n_eff|/max(n_eff, 1e-6) at the final time.
    pub steady_rel_dev: f64,
    /// Max of the same measure over the second half of the trajectory.
    pub late_max_rel_dev: f64,
    pub adiabaticity_ratio: f64,
}

pub fn adiabatic_validation(
    m: &TwoModeMicroModel,
    effective_cutoff: usize,
    opts: &AdiabaticOptions,
) -> Result<AdiabaticReport, DynamicsError> {
    let ratio = m.adiabaticity_ratio();
    if ratio < 10.0 {
        log::warn!(
            "adiabaticity ratio {ratio:.1} is small; the reduced model may be inaccurate"
        );
    }
    let gen2 = m.generator();
    let p_eff = m.effective_params(effective_cutoff);
    let gen1 = single_mode_generator(&p_eff);

    let d2 = m.n_s * m.n_r;
    let mut rho2 = Array2::<Complex64>::zeros((d2, d2));
    rho2[(0, 0)] = 1.0.into();
    let mut rho1 = Array2::<Complex64>::zeros((effective_cutoff, effective_cutoff));
    rho1[(0, 0)] = 1.0.into();

    // storage number operator on the joint space
    let ns_joint = {
        let ss = FockSpace::new(m.n_s).unwrap();
        kron(ss.number().data(), &Array2::<Complex64>::eye(m.n_r))
    };

    let times = crate::sweep::linspace(0.0, opts.t_final, opts.samples.max(2));
    let mut n2 = Vec::with_capacity(times.len());
    let mut n1 = Vec::with_capacity(times.len());
    let mut prev = 0.0;
    for &t in &times {
        if t > prev {
            rho2 = evolve(&gen2, &rho2, t - prev, opts.tol)?;
            rho1 = evolve(&gen1, &rho1, t - prev, opts.tol)?;
            prev = t;
        }
        let v2: f64 = (0..d2).map(|i| (ns_joint.row(i).dot(&rho2.column(i))).re).sum();
        let v1: f64 = (0..effective_cutoff).map(|i| i as f64 * rho1[(i, i)].re).sum();
        n2.push(v2);
        n1.push(v1);
    }
    let steady_two_mode = *n2.last().unwrap();
    let steady_effective = *n1.last().unwrap();
    let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1e-6);
    let steady_rel_dev = rel(steady_two_mode, steady_effective);
    let half = times.len() / 2;
    let late_max_rel_dev = (half..times.len())
        .map(|i| rel(n2[i], n1[i]))
        .fold(0.0f64, f64::max);
    Ok(AdiabaticReport {
        times,
        n_two_mode: n2,
        n_effective: n1,
        steady_two_mode,
        steady_effective,
        steady_rel_dev,
        late_max_rel_dev,
        adiabaticity_ratio: ratio,
    })
}
