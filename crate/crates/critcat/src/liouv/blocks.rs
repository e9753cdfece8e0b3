//! Z₂ parity-sector decomposition of single-mode superoperators.
//!
//! Operator space splits into the four sectors B_{μν} spanned by |m⟩⟨n| with
//! μ = (−1)^m, ν = (−1)^n. With a parity-preserving Hamiltonian and jump
//! operators the Liouvillian is block diagonal over them; single-photon loss
//! couples (+,+)↔(−,−) and (+,−)↔(−,+), leaving only the coarser two-block
//! structure.

use ndarray::prelude::*;
use ndarray::linalg::kron;
use num_complex::Complex64;

use super::{vec_index, LiouvError, SuperOperator};
use crate::model::EffectiveParams;

/// Parity sector (μ, ν), ordered as the blocks appear after permutation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sector {
    /// (+, +): even row, even column.
    PP,
    /// (+, −): even row, odd column.
    PM,
    /// (−, +): odd row, even column.
    MP,
    /// (−, −): odd row, odd column.
    MM,
}

impl Sector {
    pub const ALL: [Sector; 4] = [Sector::PP, Sector::PM, Sector::MP, Sector::MM];

    pub fn index(&self) -> usize {
        match self {
            Sector::PP => 0,
            Sector::PM => 1,
            Sector::MP => 2,
            Sector::MM => 3,
        }
    }

    /// Row parity μ (+1 even, −1 odd).
    pub fn mu(&self) -> i32 {
        match self {
            Sector::PP | Sector::PM => 1,
            Sector::MP | Sector::MM => -1,
        }
    }

    /// Column parity ν.
    pub fn nu(&self) -> i32 {
        match self {
            Sector::PP | Sector::MP => 1,
            Sector::PM | Sector::MM => -1,
        }
    }

    pub fn is_diagonal(&self) -> bool {
        matches!(self, Sector::PP | Sector::MM)
    }

    pub fn label(&self) -> &'static str {
        match self {
            Sector::PP => "++",
            Sector::PM => "+-",
            Sector::MP => "-+",
            Sector::MM => "--",
        }
    }

    pub fn of(m: usize, n: usize) -> Sector {
        match (m % 2 == 0, n % 2 == 0) {
            (true, true) => Sector::PP,
            (true, false) => Sector::PM,
            (false, true) => Sector::MP,
            (false, false) => Sector::MM,
        }
    }

    /// The sector hosting the adjoints of this sector's operators.
    pub fn transpose(&self) -> Sector {
        match self {
            Sector::PM => Sector::MP,
            Sector::MP => Sector::PM,
            s => *s,
        }
    }
}

/// Basis positions (m, n) of a sector, in the permutation order used for the
/// blocks (ascending flat index m + n·d, i.e. column-major within the sector,
/// even indices first).
pub fn sector_positions(dim: usize, sector: Sector) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(dim * dim / 4);
    for n in 0..dim {
        for m in 0..dim {
            if Sector::of(m, n) == sector {
                out.push((m, n));
            }
        }
    }
    out
}

/// Four-block decomposition of a strongly symmetric superoperator.
#[derive(Debug, Clone)]
pub struct BlockDecomposition {
    pub dim: usize,
    /// Flat-index permutation grouping the four sectors in order
    /// [++, +−, −+, −−].
    pub permutation: Vec<usize>,
    pub blocks: [Array2<Complex64>; 4],
}

impl BlockDecomposition {
    pub fn block(&self, sector: Sector) -> &Array2<Complex64> {
        &self.blocks[sector.index()]
    }
}

/// Max off-block couplings of a superoperator under the parity permutation.
#[derive(Debug, Clone, Copy)]
pub struct ParityStructure {
    /// Largest |entry| outside the four diagonal blocks.
    pub four_block_coupling: f64,
    /// Largest |entry| connecting the {++,−−} group with the {+−,−+} group;
    /// stays zero even with single-photon loss (weak symmetry).
    pub weak_coupling: f64,
    /// Largest |entry| overall, for scaling thresholds.
    pub scale: f64,
}

fn sector_flat_indices(dim: usize, sector: Sector) -> Vec<usize> {
    sector_positions(dim, sector)
        .into_iter()
        .map(|(m, n)| vec_index(m, n, dim))
        .collect()
}

/// Scan the sector structure of `s` without assuming it is block diagonal.
pub fn parity_structure(s: &SuperOperator) -> Result<ParityStructure, LiouvError> {
    let d = s.dim();
    if d % 2 != 0 {
        return Err(LiouvError::CutoffParity(d));
    }
    let mat = s.matrix();
    let mut sector_of = vec![0usize; d * d];
    for (si, sec) in Sector::ALL.iter().enumerate() {
        for k in sector_flat_indices(d, *sec) {
            sector_of[k] = si;
        }
    }
    // group 0 = {PP, MM}, group 1 = {PM, MP}
    let group = |si: usize| usize::from(si == 1 || si == 2);
    let mut four = 0.0f64;
    let mut weak = 0.0f64;
    let mut scale = 0.0f64;
    for i in 0..d * d {
        for j in 0..d * d {
            let a = mat[(i, j)].norm();
            scale = scale.max(a);
            let (si, sj) = (sector_of[i], sector_of[j]);
            if si != sj {
                four = four.max(a);
                if group(si) != group(sj) {
                    weak = weak.max(a);
                }
            }
        }
    }
    Ok(ParityStructure {
        four_block_coupling: four,
        weak_coupling: weak,
        scale,
    })
}

/// Decompose into the four parity blocks, rejecting superoperators whose
/// strong symmetry is broken (off-block entries above 1e-14 of the scale).
pub fn parity_blocks(s: &SuperOperator) -> Result<BlockDecomposition, LiouvError> {
    let d = s.dim();
    let structure = parity_structure(s)?;
    let threshold = 1e-14 * structure.scale.max(f64::MIN_POSITIVE);
    if structure.four_block_coupling > threshold {
        return Err(LiouvError::SymmetryBroken {
            coupling: structure.four_block_coupling,
            threshold,
        });
    }
    let mat = s.matrix();
    let mut permutation = Vec::with_capacity(d * d);
    let mut blocks_vec = Vec::with_capacity(4);
    for sec in Sector::ALL {
        let idx = sector_flat_indices(d, sec);
        let b = Array2::from_shape_fn((idx.len(), idx.len()), |(i, j)| mat[(idx[i], idx[j])]);
        blocks_vec.push(b);
        permutation.extend_from_slice(&idx);
    }
    let blocks: [Array2<Complex64>; 4] = blocks_vec.try_into().unwrap();
    Ok(BlockDecomposition {
        dim: d,
        permutation,
        blocks,
    })
}

fn restrict(m: &Array2<Complex64>, rows: &[usize], cols: &[usize]) -> Array2<Complex64> {
    Array2::from_shape_fn((rows.len(), cols.len()), |(i, j)| m[(rows[i], cols[j])])
}

/// Build one parity block of the single-mode Liouvillian directly, without
/// materializing the full d²×d² matrix. Requires κ = 0 (strong symmetry) and
/// an even cutoff. Identical to the corresponding block of
/// [`parity_blocks`]`(`[`build_single_mode`]`(p))`.
///
/// [`build_single_mode`]: super::build_single_mode
pub fn build_sector_block(
    p: &EffectiveParams,
    sector: Sector,
) -> Result<Array2<Complex64>, LiouvError> {
    let d = p.cutoff;
    if d % 2 != 0 {
        return Err(LiouvError::CutoffParity(d));
    }
    if p.kappa1 != 0.0 {
        return Err(LiouvError::SymmetryBroken {
            coupling: p.kappa1,
            threshold: 0.0,
        });
    }
    let evens: Vec<usize> = (0..d).step_by(2).collect();
    let odds: Vec<usize> = (1..d).step_by(2).collect();
    let rows = if sector.mu() == 1 { &evens } else { &odds };
    let cols = if sector.nu() == 1 { &evens } else { &odds };

    let h = super::single_mode_hamiltonian(p).into_data();
    let space = crate::fock::FockSpace::new(d).unwrap();
    let a = space.annihilation();
    let a2 = a.matmul(&a).into_data();
    let n_op = space.number().into_data();

    let half = d / 2;
    let eye_mu = Array2::<Complex64>::eye(half);
    let eye_nu = Array2::<Complex64>::eye(half);
    let i = Complex64::i();

    // ρ ↦ AρB restricted to sector (μ,ν) is kron(Bᵀ|νν, A|μμ)
    let term = |a_op: &Array2<Complex64>, b_op: &Array2<Complex64>| -> Array2<Complex64> {
        let a_sub = restrict(a_op, rows, rows);
        let b_sub = restrict(b_op, cols, cols).t().to_owned();
        kron(&b_sub, &a_sub)
    };

    let h_mu = restrict(&h, rows, rows);
    let h_nu_t = restrict(&h, cols, cols).t().to_owned();
    let mut block = kron(&eye_nu, &h_mu).mapv(|z| z * (-i));
    block = block + kron(&h_nu_t, &eye_mu).mapv(|z| z * i);

    let mut add_dissipator = |rate: f64, l: &Array2<Complex64>| {
        if rate == 0.0 {
            return;
        }
        let ldag_l = l.t().mapv(|z| z.conj()).dot(l);
        let lconj = l.mapv(|z| z.conj());
        let jump = term(l, &lconj.t().to_owned());
        // L ρ L†: A = L, B = L† (so Bᵀ = conj(L))
        block = &block
            + &(jump.mapv(|z| z * rate)
                - term(&ldag_l, &Array2::eye(d)).mapv(|z| z * (0.5 * rate))
                - term(&Array2::eye(d), &ldag_l).mapv(|z| z * (0.5 * rate)));
    };
    add_dissipator(p.eta2ph, &a2);
    add_dissipator(p.kappaphi, &n_op);

    Ok(block)
}
