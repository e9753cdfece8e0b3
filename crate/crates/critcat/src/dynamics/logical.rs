//! Logical-qubit state handling: the 2×2 matrix extracted through the
//! conserved quantities, the embedding that inverts it on the steady
//! manifold, and the qubit fidelity.

use ndarray::prelude::*;
use num_complex::Complex64;

use super::DynamicsError;
use crate::linalg::eigh_full;
use crate::liouv::Sector;
use crate::model::{alpha_steady, EffectiveParams};
use crate::spectral::{trace_inner, SpectralAnalysis};

/// 2×2 logical density matrix indexed by parity sector (+ = 0, − = 1).
#[derive(Debug, Clone, PartialEq)]
pub struct QubitState {
    pub m: Array2<Complex64>,
}

impl QubitState {
    pub fn new(m: Array2<Complex64>) -> Self {
        assert_eq!(m.shape(), [2, 2]);
        Self { m }
    }

    pub fn from_rows(r0: [Complex64; 2], r1: [Complex64; 2]) -> Self {
        Self::new(ndarray::arr2(&[r0, r1]))
    }

    /// |0_L⟩⟨0_L| (even logical codeword).
    pub fn zero_logical() -> Self {
        Self::from_rows(
            [1.0.into(), 0.0.into()],
            [0.0.into(), 0.0.into()],
        )
    }

    /// |+_L⟩⟨+_L| with |+_L⟩ = (|0_L⟩ + |1_L⟩)/√2.
    pub fn plus_logical() -> Self {
        Self::from_rows(
            [0.5.into(), 0.5.into()],
            [0.5.into(), 0.5.into()],
        )
    }

    pub fn trace(&self) -> Complex64 {
        self.m[(0, 0)] + self.m[(1, 1)]
    }

    pub fn det(&self) -> Complex64 {
        self.m[(0, 0)] * self.m[(1, 1)] - self.m[(0, 1)] * self.m[(1, 0)]
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        let d01 = (self.m[(0, 1)] - self.m[(1, 0)].conj()).norm();
        let d00 = self.m[(0, 0)].im.abs();
        let d11 = self.m[(1, 1)].im.abs();
        d01.max(d00).max(d11)
    }

    pub fn hermitized(&self) -> Self {
        let h = (&self.m + &self.m.t().mapv(|z| z.conj())).mapv(|z| z * 0.5);
        Self::new(h)
    }

    /// Eigenvalues of the Hermitian part (ascending).
    pub fn eigenvalues(&self) -> [f64; 2] {
        let h = self.hermitized();
        let a = h.m[(0, 0)].re;
        let d = h.m[(1, 1)].re;
        let b = h.m[(0, 1)];
        let mid = 0.5 * (a + d);
        let rad = (0.25 * (a - d).powi(2) + b.norm_sqr()).sqrt();
        [mid - rad, mid + rad]
    }

    /// Check the physicality bounds: Hermitian to 1e-8, trace within 1e-6 of
    /// one, eigenvalues above −1e-6.
    pub fn validate(&self) -> Result<(), DynamicsError> {
        let h = self.hermiticity_deviation();
        if h > 1e-8 {
            return Err(DynamicsError::UnphysicalQubit {
                what: "hermiticity",
                value: h,
            });
        }
        let t = self.trace().re;
        if (t - 1.0).abs() > 1e-6 {
            return Err(DynamicsError::UnphysicalQubit {
                what: "trace",
                value: t,
            });
        }
        let [lo, _] = self.eigenvalues();
        if lo < -1e-6 {
            return Err(DynamicsError::UnphysicalQubit {
                what: "positivity",
                value: lo,
            });
        }
        Ok(())
    }
}

/// Qubit fidelity F = Tr(Q₀Q_t) + 2√(det Q₀ · det Q_t); negative determinants
/// (possible at slight unphysicality) are clamped to zero with a warning.
pub fn fidelity(q0: &QubitState, qt: &QubitState) -> f64 {
    let tr = (q0.m.dot(&qt.m))
        .diag()
        .iter()
        .sum::<Complex64>()
        .re;
    let mut d0 = q0.det().re;
    let mut dt = qt.det().re;
    if d0 < 0.0 || dt < 0.0 {
        log::warn!("clamping negative determinant(s) in fidelity: {d0:.3e}, {dt:.3e}");
        d0 = d0.max(0.0);
        dt = dt.max(0.0);
    }
    tr + 2.0 * (d0 * dt).sqrt()
}

/// The λ₀ eigenoperators and conserved quantities of a bare (κ = κ_φ = 0)
/// Liouvillian, used as the logical encoding/decoding basis.
pub struct LogicalBasis {
    pub dim: usize,
    /// Stationary displacement of the underlying model.
    pub alpha: Complex64,
    rho0: [Array2<Complex64>; 4],
    j0: [Array2<Complex64>; 4],
}

impl LogicalBasis {
    /// Build the basis from the bare version of `p` (losses switched off).
    pub fn bare(p: &EffectiveParams) -> Result<Self, DynamicsError> {
        let bare = EffectiveParams {
            kappa1: 0.0,
            kappaphi: 0.0,
            ..*p
        };
        let analysis = SpectralAnalysis::from_params(&bare)?;
        let alpha = alpha_steady(&bare)?;
        Ok(Self::from_analysis(&analysis, alpha))
    }

    pub fn from_analysis(an: &SpectralAnalysis, alpha: Complex64) -> Self {
        let get = |s: Sector| an.steady(s).clone();
        let getj = |s: Sector| an.conserved(s).clone();
        Self {
            dim: an.dim,
            alpha,
            rho0: [
                get(Sector::PP),
                get(Sector::PM),
                get(Sector::MP),
                get(Sector::MM),
            ],
            j0: [
                getj(Sector::PP),
                getj(Sector::PM),
                getj(Sector::MP),
                getj(Sector::MM),
            ],
        }
    }

    pub fn rho0(&self, s: Sector) -> &Array2<Complex64> {
        &self.rho0[s.index()]
    }

    pub fn j0(&self, s: Sector) -> &Array2<Complex64> {
        &self.j0[s.index()]
    }

    /// Q_{μν} = Tr{(J₀^{μν})† ρ}.
    pub fn q_extract(&self, rho: &Array2<Complex64>) -> QubitState {
        let q = |s: Sector| trace_inner(&self.j0[s.index()], rho);
        QubitState::from_rows(
            [q(Sector::PP), q(Sector::PM)],
            [q(Sector::MP), q(Sector::MM)],
        )
    }

    /// ρ = Σ_{μν} Q_{μν} ρ₀^{μν}, Hermitian-symmetrized; rejects embeddings
    /// with eigenvalues below −1e-6.
    pub fn q_embed(&self, q: &QubitState) -> Result<Array2<Complex64>, DynamicsError> {
        let d = self.dim;
        let mut rho = Array2::<Complex64>::zeros((d, d));
        for (s, (i, j)) in [
            (Sector::PP, (0, 0)),
            (Sector::PM, (0, 1)),
            (Sector::MP, (1, 0)),
            (Sector::MM, (1, 1)),
        ] {
            rho = rho + self.rho0[s.index()].mapv(|z| z * q.m[(i, j)]);
        }
        let rho = (&rho + &rho.t().mapv(|z| z.conj())).mapv(|z| z * 0.5);
        let (evals, _) = eigh_full(&rho)?;
        let min = evals.iter().cloned().fold(f64::INFINITY, f64::min);
        if min < -1e-6 {
            return Err(DynamicsError::NonPhysicalEmbedding {
                min_eigenvalue: min,
            });
        }
        Ok(rho)
    }

    /// Re-gauged copy: ρ₀^{+−} → e^{iφ}ρ₀^{+−} with the compensating phase on
    /// J₀^{+−} (and daggered partners). Physical outputs must be invariant.
    pub fn rephased(&self, phi: f64) -> Self {
        let z = Complex64::from_polar(1.0, phi);
        let rho_pm = self.rho0[Sector::PM.index()].mapv(|w| w * z);
        let j_pm = self.j0[Sector::PM.index()].mapv(|w| w * z);
        let rho_mp = rho_pm.t().mapv(|w| w.conj());
        let j_mp = j_pm.t().mapv(|w| w.conj());
        Self {
            dim: self.dim,
            alpha: self.alpha,
            rho0: [
                self.rho0[0].clone(),
                rho_pm,
                rho_mp,
                self.rho0[3].clone(),
            ],
            j0: [self.j0[0].clone(), j_pm, j_mp, self.j0[3].clone()],
        }
    }
}
