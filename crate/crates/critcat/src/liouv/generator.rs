//! Matrix-free Lindblad generators: apply ℒρ through d×d matrix products
//! instead of a dense d²×d² superoperator. Used for time evolution, where the
//! two-mode state would make the dense form prohibitive.

use ndarray::prelude::*;
use ndarray::linalg::kron;
use num_complex::Complex64;

use super::{LiouvError, SuperOperator};
use crate::fock::FockSpace;
use crate::model::EffectiveParams;

/// Ceiling on the joint Hilbert dimension d = N₁N₂ of a two-mode build
/// (vectorized state of d² complex numbers).
pub const DEFAULT_TWO_MODE_DIM_CEILING: usize = 256;

/// Gate Hamiltonian kinds appearing in the protocols.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateKind {
    /// Linear resonant drive F(â + â†) of one mode.
    XDrive,
    /// Photon hopping J(â₁â₂† + â₁†â₂) between two modes.
    XxHop,
}

/// A gate Hamiltonian with non-negative amplitude acting on the listed modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateHamiltonian {
    pub kind: GateKind,
    pub amplitude: f64,
    pub modes: [usize; 2],
}

impl GateHamiltonian {
    pub fn x_drive(amplitude: f64, mode: usize) -> Self {
        assert!(amplitude >= 0.0, "gate amplitude must be non-negative");
        Self {
            kind: GateKind::XDrive,
            amplitude,
            modes: [mode, mode],
        }
    }

    pub fn xx_hop(amplitude: f64) -> Self {
        assert!(amplitude >= 0.0, "gate amplitude must be non-negative");
        Self {
            kind: GateKind::XxHop,
            amplitude,
            modes: [0, 1],
        }
    }
}

struct Jump {
    rate: f64,
    op: Array2<Complex64>,
    /// Precomputed L†L.
    opdag_op: Array2<Complex64>,
}

/// Lindblad generator held in structural form: Hamiltonian plus jump list.
pub struct LindbladGenerator {
    dim: usize,
    hamiltonian: Array2<Complex64>,
    jumps: Vec<Jump>,
}

impl LindbladGenerator {
    pub fn new(hamiltonian: Array2<Complex64>) -> Self {
        let dim = hamiltonian.nrows();
        assert_eq!(hamiltonian.ncols(), dim);
        Self {
            dim,
            hamiltonian,
            jumps: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn add_jump(&mut self, rate: f64, op: Array2<Complex64>) {
        assert_eq!(op.nrows(), self.dim);
        assert_eq!(op.ncols(), self.dim);
        if rate == 0.0 {
            return;
        }
        let opdag_op = op.t().mapv(|z| z.conj()).dot(&op);
        self.jumps.push(Jump { rate, op, opdag_op });
    }

    /// Add a Hamiltonian term −i[h, ·].
    pub fn add_hamiltonian(&mut self, h: &Array2<Complex64>) {
        assert_eq!(h.nrows(), self.dim);
        self.hamiltonian = &self.hamiltonian + h;
    }

    /// ℒρ = −i[H,ρ] + Σ rate·(LρL† − ½{L†L, ρ}).
    pub fn apply(&self, rho: &Array2<Complex64>) -> Array2<Complex64> {
        let i = Complex64::i();
        let h_rho = self.hamiltonian.dot(rho);
        let rho_h = rho.dot(&self.hamiltonian);
        let mut out = (h_rho - rho_h).mapv(|z| z * (-i));
        for j in &self.jumps {
            let l_rho = j.op.dot(rho);
            let sandwich = l_rho.dot(&j.op.t().mapv(|z| z.conj()));
            let anti = j.opdag_op.dot(rho) + rho.dot(&j.opdag_op);
            out = out + (sandwich - anti.mapv(|z| z * 0.5)).mapv(|z| z * j.rate);
        }
        out
    }

    /// Densify into a [`SuperOperator`] (column-stacking convention).
    pub fn to_super(&self) -> SuperOperator {
        let d = self.dim;
        let eye = Array2::<Complex64>::eye(d);
        let i = Complex64::i();
        let mut m = (kron(&eye, &self.hamiltonian)
            - kron(&self.hamiltonian.t().to_owned(), &eye))
        .mapv(|z| z * (-i));
        for j in &self.jumps {
            let lconj = j.op.mapv(|z| z.conj());
            let mut term = kron(&lconj, &j.op);
            term = term - kron(&eye, &j.opdag_op).mapv(|z| z * 0.5);
            term = term - kron(&j.opdag_op.t().to_owned(), &eye).mapv(|z| z * 0.5);
            m = m + term.mapv(|z| z * j.rate);
        }
        SuperOperator::new(m, d)
    }
}

/// Single-mode generator for the effective cat-qubit model.
pub fn single_mode_generator(p: &EffectiveParams) -> LindbladGenerator {
    let space = FockSpace::new(p.cutoff).expect("cutoff >= 2");
    let a = space.annihilation();
    let a2 = a.matmul(&a);
    let n = space.number();
    let h = super::single_mode_hamiltonian(p);
    let mut gen = LindbladGenerator::new(h.into_data());
    gen.add_jump(p.eta2ph, a2.into_data());
    gen.add_jump(p.kappa1, a.into_data());
    gen.add_jump(p.kappaphi, n.into_data());
    gen
}

/// Two-mode generator ℒ₁⊗I + I⊗ℒ₂ − i[J(â₁â₂† + â₁†â₂), ·] with the default
/// dimension ceiling.
pub fn two_mode_generator(
    p1: &EffectiveParams,
    p2: &EffectiveParams,
    hop: &GateHamiltonian,
) -> Result<LindbladGenerator, LiouvError> {
    two_mode_generator_with_ceiling(p1, p2, hop, DEFAULT_TWO_MODE_DIM_CEILING)
}

/// Two-mode generator with an explicit ceiling on N₁N₂.
pub fn two_mode_generator_with_ceiling(
    p1: &EffectiveParams,
    p2: &EffectiveParams,
    hop: &GateHamiltonian,
    ceiling: usize,
) -> Result<LindbladGenerator, LiouvError> {
    if hop.kind != GateKind::XxHop {
        return Err(LiouvError::WrongGateKind("two-mode build needs an XX hop"));
    }
    let (n1, n2) = (p1.cutoff, p2.cutoff);
    let dim = n1 * n2;
    if dim > ceiling {
        return Err(LiouvError::MemoryCeiling { dim, ceiling });
    }
    let s1 = FockSpace::new(n1).expect("cutoff >= 2");
    let s2 = FockSpace::new(n2).expect("cutoff >= 2");
    let eye1 = Array2::<Complex64>::eye(n1);
    let eye2 = Array2::<Complex64>::eye(n2);
    let a1 = kron(s1.annihilation().data(), &eye2);
    let a2 = kron(&eye1, s2.annihilation().data());

    let h1 = super::single_mode_hamiltonian(p1).into_data();
    let h2 = super::single_mode_hamiltonian(p2).into_data();
    let a2dag = a2.t().mapv(|z| z.conj());
    let a1dag = a1.t().mapv(|z| z.conj());
    let hop_term = (a1.dot(&a2dag) + a1dag.dot(&a2)).mapv(|z| z * hop.amplitude);
    let h = kron(&h1, &eye2) + kron(&eye1, &h2) + hop_term;

    let mut gen = LindbladGenerator::new(h);
    for (p, a_full) in [(p1, &a1), (p2, &a2)] {
        gen.add_jump(p.eta2ph, a_full.dot(a_full));
        gen.add_jump(p.kappa1, a_full.clone());
        gen.add_jump(p.kappaphi, a_full.t().mapv(|z| z.conj()).dot(a_full));
    }
    Ok(gen)
}
