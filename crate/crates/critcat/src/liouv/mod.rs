//! Lindblad superoperators on vectorized density matrices, their Z₂
//! parity-block decomposition, and matrix-free generators for time evolution.
//!
//! Vectorization is column-stacking throughout: vec(ρ)ₖ = ρ[m, n] with
//! k = m + n·d, so ρ ↦ AρB becomes kron(Bᵀ, A) and the commutator part of the
//! generator reads −i(I⊗H − Hᵀ⊗I). Fixing one convention matters because the
//! left/right eigenoperator pairing downstream depends on it.

mod blocks;
mod dump;
mod generator;

pub use blocks::{
    build_sector_block, parity_blocks, parity_structure, sector_positions, BlockDecomposition,
    ParityStructure, Sector,
};
pub use generator::{
    single_mode_generator, two_mode_generator, two_mode_generator_with_ceiling, GateHamiltonian,
    GateKind, LindbladGenerator, DEFAULT_TWO_MODE_DIM_CEILING,
};

use ndarray::prelude::*;
use ndarray::linalg::kron;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::fock::OperatorMatrix;
use crate::model::EffectiveParams;

#[derive(Debug, Error)]
pub enum LiouvError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("parity blocks need an even cutoff, got {0}")]
    CutoffParity(usize),
    #[error("strong Z2 symmetry broken: off-block coupling {coupling:.3e} (threshold {threshold:.3e})")]
    SymmetryBroken { coupling: f64, threshold: f64 },
    #[error("two-mode cutoff product {dim} exceeds ceiling {ceiling} (vectorized state too large)")]
    MemoryCeiling { dim: usize, ceiling: usize },
    #[error("gate hamiltonian kind not applicable: {0}")]
    WrongGateKind(&'static str),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("bad superoperator dump: {0}")]
    BadDump(String),
}

/// Flat index of ρ[m, n] under column stacking.
#[inline]
pub fn vec_index(m: usize, n: usize, dim: usize) -> usize {
    m + n * dim
}

/// Column-stack a density matrix into a vector.
pub fn vectorize(rho: &Array2<Complex64>) -> Array1<Complex64> {
    let d = rho.nrows();
    Array1::from_shape_fn(d * d, |k| rho[(k % d, k / d)])
}

/// Inverse of [`vectorize`].
pub fn unvectorize(v: &Array1<Complex64>, dim: usize) -> Array2<Complex64> {
    assert_eq!(v.len(), dim * dim);
    Array2::from_shape_fn((dim, dim), |(m, n)| v[vec_index(m, n, dim)])
}

/// Dense superoperator acting on column-stacked density matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperOperator {
    mat: Array2<Complex64>,
    dim: usize,
}

impl SuperOperator {
    pub fn new(mat: Array2<Complex64>, dim: usize) -> Self {
        assert_eq!(mat.nrows(), dim * dim);
        assert_eq!(mat.ncols(), dim * dim);
        Self { mat, dim }
    }

    pub fn zeros(dim: usize) -> Self {
        Self::new(Array2::zeros((dim * dim, dim * dim)), dim)
    }

    /// Hilbert-space dimension d (the matrix is d²×d²).
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &Array2<Complex64> {
        &self.mat
    }

    pub fn into_matrix(self) -> Array2<Complex64> {
        self.mat
    }

    pub fn apply_vec(&self, v: &Array1<Complex64>) -> Array1<Complex64> {
        self.mat.dot(v)
    }

    pub fn apply_matrix(&self, rho: &Array2<Complex64>) -> Array2<Complex64> {
        unvectorize(&self.apply_vec(&vectorize(rho)), self.dim)
    }

    pub fn add(&self, other: &Self) -> Result<Self, LiouvError> {
        if self.dim != other.dim {
            return Err(LiouvError::DimensionMismatch(self.dim, other.dim));
        }
        Ok(Self::new(&self.mat + &other.mat, self.dim))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::new(self.mat.mapv(|z| z * c), self.dim)
    }

    /// Add a Hamiltonian term −i[h, ·].
    pub fn add_hamiltonian(&self, h: &OperatorMatrix) -> Result<Self, LiouvError> {
        if h.cutoff() != self.dim {
            return Err(LiouvError::DimensionMismatch(h.cutoff(), self.dim));
        }
        self.add(&hamiltonian_super(h))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.mat.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.mat.iter().fold(0.0f64, |m, z| m.max(z.norm()))
    }

    /// Norm of vec(I)†·L relative to ‖L‖: zero for trace-preserving generators.
    pub fn trace_preservation_residual(&self) -> f64 {
        let d = self.dim;
        let mut acc: f64 = 0.0;
        for j in 0..d * d {
            let mut s = Complex64::new(0.0, 0.0);
            for m in 0..d {
                s += self.mat[(vec_index(m, m, d), j)];
            }
            acc += s.norm_sqr();
        }
        let norm = self.frobenius_norm();
        if norm == 0.0 {
            0.0
        } else {
            acc.sqrt() / norm
        }
    }

    /// Max over `trials` random Hermitian inputs of ‖ℒρ − (ℒρ)†‖/‖ℒρ‖.
    pub fn hermiticity_residual(&self, seed: u64, trials: usize) -> f64 {
        let mut worst: f64 = 0.0;
        for k in 0..trials {
            let rho = random_hermitian(self.dim, seed.wrapping_add(k as u64));
            let out = self.apply_matrix(&rho);
            let outdag = out.t().mapv(|z| z.conj());
            let dev = (&out - &outdag).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let norm = out.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm > 0.0 {
                worst = worst.max(dev / norm);
            }
        }
        worst
    }
}

/// Random Hermitian matrix with unit trace (test input generator).
pub fn random_hermitian(dim: usize, seed: u64) -> Array2<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = Array2::from_shape_fn((dim, dim), |_| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    let mut h = (&m + &m.t().mapv(|z| z.conj())).mapv(|z| z / 2.0);
    let tr: Complex64 = (0..dim).map(|i| h[(i, i)]).sum();
    // shift diagonal to unit trace so stationarity-style residuals are scaled
    let shift = (Complex64::new(1.0, 0.0) - tr) / dim as f64;
    for i in 0..dim {
        h[(i, i)] += shift;
    }
    h
}

/// Superoperator of the dissipator ρ ↦ LρL† − ½{L†L, ρ}.
pub fn dissipator(l: &OperatorMatrix) -> SuperOperator {
    let d = l.cutoff();
    let ldag_l = l.adjoint().matmul(l).into_data();
    let lconj = l.data().mapv(|z| z.conj());
    let eye = Array2::<Complex64>::eye(d);
    let mut m = kron(&lconj, l.data());
    m = m - kron(&eye, &ldag_l).mapv(|z| z * 0.5);
    m = m - kron(&ldag_l.t().to_owned(), &eye).mapv(|z| z * 0.5);
    SuperOperator::new(m, d)
}

/// Superoperator of the commutator ρ ↦ −i[h, ρ] = −i(I⊗H − Hᵀ⊗I)vec(ρ).
pub fn hamiltonian_super(h: &OperatorMatrix) -> SuperOperator {
    let d = h.cutoff();
    let eye = Array2::<Complex64>::eye(d);
    let m = (kron(&eye, h.data()) - kron(&h.data().t().to_owned(), &eye))
        .mapv(|z| z * Complex64::new(0.0, -1.0));
    SuperOperator::new(m, d)
}

/// Superoperator of ρ ↦ ΠρΠ† for the photon-number parity Π.
pub fn parity_conjugation_super(dim: usize) -> SuperOperator {
    let p = crate::fock::FockSpace::new(dim).unwrap().parity();
    let pconj = p.data().mapv(|z| z.conj());
    SuperOperator::new(kron(&pconj, p.data()), dim)
}

/// Single-mode cat-qubit Hamiltonian
/// H = Δ â†â + (G*/2)â² + (G/2)(â†)² − (U/2)(â†)²â².
pub fn single_mode_hamiltonian(p: &EffectiveParams) -> OperatorMatrix {
    let space = crate::fock::FockSpace::new(p.cutoff).expect("cutoff >= 2");
    let a = space.annihilation();
    let a2 = a.matmul(&a);
    let ad2 = a2.adjoint();
    let n = space.number();
    let g = p.g2drive;
    n.scale(p.delta.into())
        .add(&a2.scale(g.conj() / 2.0))
        .add(&ad2.scale(g / 2.0))
        .add(&ad2.matmul(&a2).scale(Complex64::new(-p.kerr / 2.0, 0.0)))
}

/// Dense single-mode Liouvillian
/// ℒρ = −i[H,ρ] + ηD[â²]ρ + κD[â]ρ + κ_φD[â†â]ρ.
///
/// Logs a truncation warning when the configured cutoff violates the guard for
/// the stationary displacement.
pub fn build_single_mode(p: &EffectiveParams) -> SuperOperator {
    if !p.cutoff_satisfies_guard() {
        log::warn!(
            "cutoff {} below truncation guard {} for expected occupation {:.2}",
            p.cutoff,
            crate::fock::cutoff_guard(p.occupation_guess()),
            p.occupation_guess()
        );
    }
    single_mode_generator(p).to_super()
}
