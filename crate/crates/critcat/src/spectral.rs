//! Eigendecomposition of Liouvillian parity blocks: steady states and
//! coherences, spectral gaps, conserved quantities, and noiseless-subsystem
//! diagnostics.
//!
//! Each block is solved independently with a dense non-Hermitian
//! eigendecomposition; left eigenoperators come from the adjoint problem and
//! are paired to the rights by eigenvalue proximity, then biorthonormalized
//! cluster by cluster so that Tr(J_m†ρ_n) = δ_{mn}.

use ndarray::prelude::*;
use ndarray_linalg::Inverse;
use num_complex::Complex64;
use thiserror::Error;


use crate::linalg::{eig_full, eigh_full, frobenius, NumericalError};
use crate::liouv::{
    build_sector_block, parity_blocks, sector_positions, LiouvError, Sector, SuperOperator,
};
use crate::model::EffectiveParams;
use crate::sweep;

/// Pairing tolerance between a right eigenvalue and its adjoint partner,
/// relative to the spectral scale.
const PAIRING_TOL: f64 = 1e-6;
/// Eigenvalues closer than this (relative) are biorthonormalized jointly.
const CLUSTER_TOL: f64 = 1e-9;
/// No eigenvalue may grow faster than this (relative).
const GROWTH_TOL: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error(transparent)]
    Numerical(#[from] NumericalError),
    #[error(transparent)]
    Liouv(#[from] LiouvError),
    #[error("no adjoint eigenvalue within {tolerance:.3e} of {wanted} (closest {closest}, distance {distance:.3e})")]
    PairingFailure {
        wanted: Complex64,
        closest: Complex64,
        distance: f64,
        tolerance: f64,
    },
    #[error("growing mode: Re(lambda) = {re:.3e} exceeds {threshold:.3e}")]
    GrowingMode { re: f64, threshold: f64 },
    #[error("steady state in sector {sector} has eigenvalue {min_eigenvalue:.3e} < -1e-8")]
    NonPositiveSteadyState {
        sector: &'static str,
        min_eigenvalue: f64,
    },
    #[error("steady state in sector {sector} has vanishing trace")]
    TracelessSteadyState { sector: &'static str },
    #[error("noiseless-subsystem diagnostic needs an even cutoff, got {0}")]
    CutoffParity(usize),
}

/// Eigendecomposition of one parity block. Eigenvalues are ordered by decay
/// rate (λ₀ slowest), ties broken by ascending |Im λ| then ascending Im λ.
/// Right eigenoperators are embedded into the full Hilbert space and have unit
/// Frobenius norm; left eigenoperators satisfy Tr(J_m†ρ_n) = δ_{mn}.
pub struct SpectralResult {
    pub sector: Sector,
    pub dim: usize,
    pub eigenvalues: Vec<Complex64>,
    pub right_ops: Vec<Array2<Complex64>>,
    pub left_ops: Vec<Array2<Complex64>>,
    /// Condition estimate of the worst biorthonormalization cluster; values
    /// above 1e8 indicate a near-defective pairing (logged as a warning).
    pub pairing_condition: f64,
}

impl SpectralResult {
    /// Largest |λ| in the block: the scale for relative thresholds.
    pub fn scale(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0f64, |m, z| m.max(z.norm()))
    }

    /// max |Tr(J_m†ρ_n) − δ_{mn}| over the slowest `k` pairs.
    pub fn biorthonormality_residual(&self, k: usize) -> f64 {
        let k = k.min(self.eigenvalues.len());
        let mut worst: f64 = 0.0;
        for m in 0..k {
            for n in 0..k {
                let ip = trace_inner(&self.left_ops[m], &self.right_ops[n]);
                let expect = if m == n { 1.0 } else { 0.0 };
                worst = worst.max((ip - expect).norm());
            }
        }
        worst
    }
}

/// Tr(A†B).
pub fn trace_inner(a: &Array2<Complex64>, b: &Array2<Complex64>) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

fn sort_key(z: &Complex64) -> (f64, f64, f64) {
    (-z.re, z.im.abs(), z.im)
}

/// Eigenvalues of a block only (no eigenvectors), sorted by decay rate and
/// growth-checked. Substantially cheaper than [`eigensolve_block`]; used by
/// sweeps that only need gaps.
pub fn block_eigenvalues(block: &Array2<Complex64>) -> Result<Vec<Complex64>, SpectralError> {
    use ndarray_linalg::EigVals;
    let vals = block.eigvals().map_err(NumericalError::from)?;
    let mut out: Vec<Complex64> = vals.to_vec();
    out.sort_by(|a, b| sort_key(a).partial_cmp(&sort_key(b)).unwrap());
    let scale = out.iter().fold(0.0f64, |m, z| m.max(z.norm())).max(1e-300);
    if let Some(bad) = out.iter().find(|z| z.re > GROWTH_TOL * scale) {
        return Err(SpectralError::GrowingMode {
            re: bad.re,
            threshold: GROWTH_TOL * scale,
        });
    }
    Ok(out)
}

/// Solve one block, embedding eigenvectors back into d×d operators supported
/// on the sector positions.
pub fn eigensolve_block(
    block: &Array2<Complex64>,
    dim: usize,
    sector: Sector,
) -> Result<SpectralResult, SpectralError> {
    let positions = sector_positions(dim, sector);
    assert_eq!(block.nrows(), positions.len());
    let (vals, rights) = eig_full(block)?;
    let (avals, lefts) = eig_full(&block.t().mapv(|z| z.conj()))?;

    let k = vals.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| {
        sort_key(&vals[a])
            .partial_cmp(&sort_key(&vals[b]))
            .unwrap()
    });

    let scale = vals.iter().fold(0.0f64, |m, z| m.max(z.norm())).max(1e-300);
    for &i in &order {
        if vals[i].re > GROWTH_TOL * scale {
            return Err(SpectralError::GrowingMode {
                re: vals[i].re,
                threshold: GROWTH_TOL * scale,
            });
        }
    }

    // pair each right eigenvalue with an unused adjoint eigenvalue near conj(λ)
    let tol = PAIRING_TOL * scale;
    let mut used = vec![false; k];
    let mut partner = vec![0usize; k];
    for &i in &order {
        let want = vals[i].conj();
        let mut best = usize::MAX;
        let mut best_d = f64::INFINITY;
        for (j, jused) in used.iter().enumerate() {
            if *jused {
                continue;
            }
            let d = (avals[j] - want).norm();
            if d < best_d {
                best_d = d;
                best = j;
            }
        }
        if best == usize::MAX || best_d > tol {
            return Err(SpectralError::PairingFailure {
                wanted: want,
                closest: if best == usize::MAX {
                    Complex64::new(f64::NAN, f64::NAN)
                } else {
                    avals[best]
                },
                distance: best_d,
                tolerance: tol,
            });
        }
        used[best] = true;
        partner[i] = best;
    }

    // embed into full operators, rights at unit Frobenius norm
    let embed = |col: ArrayView1<Complex64>| -> Array2<Complex64> {
        let mut m = Array2::zeros((dim, dim));
        for (idx, &(r, c)) in positions.iter().enumerate() {
            m[(r, c)] = col[idx];
        }
        m
    };
    let mut eigenvalues = Vec::with_capacity(k);
    let mut right_ops = Vec::with_capacity(k);
    let mut left_ops = Vec::with_capacity(k);
    for &i in &order {
        eigenvalues.push(vals[i]);
        let r = embed(rights.column(i));
        let nrm = frobenius(&r);
        right_ops.push(r.mapv(|z| z / nrm));
        left_ops.push(embed(lefts.column(partner[i])));
    }

    // cluster-wise biorthonormalization
    let mut cond_worst: f64 = 1.0;
    let ctol = CLUSTER_TOL * scale;
    let mut start = 0;
    while start < k {
        let mut end = start + 1;
        while end < k && (eigenvalues[end] - eigenvalues[end - 1]).norm() <= ctol {
            end += 1;
        }
        let size = end - start;
        let mut s = Array2::<Complex64>::zeros((size, size));
        for a in 0..size {
            for b in 0..size {
                s[(a, b)] = trace_inner(&left_ops[start + a], &right_ops[start + b]);
            }
        }
        let s_inv = s.inv().map_err(NumericalError::from)?;
        let cond = one_norm(&s) * one_norm(&s_inv);
        cond_worst = cond_worst.max(cond);
        let fresh: Vec<Array2<Complex64>> = (0..size)
            .map(|b| {
                let mut acc = Array2::<Complex64>::zeros((dim, dim));
                for a in 0..size {
                    // J'_b = sum_a J_a (S^-H)_{ab}
                    let w = s_inv[(b, a)].conj();
                    acc = acc + left_ops[start + a].mapv(|z| z * w);
                }
                acc
            })
            .collect();
        for (b, m) in fresh.into_iter().enumerate() {
            left_ops[start + b] = m;
        }
        start = end;
    }
    if cond_worst > 1e8 {
        log::warn!(
            "near-defective pairing in sector {}: condition {cond_worst:.3e}",
            sector.label()
        );
    }

    Ok(SpectralResult {
        sector,
        dim,
        eigenvalues,
        right_ops,
        left_ops,
        pairing_condition: cond_worst,
    })
}

fn one_norm(m: &Array2<Complex64>) -> f64 {
    (0..m.ncols())
        .map(|j| m.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0f64, f64::max)
}

/// Sector gaps: Λ_{μμ} = −Re λ₁^{μμ}, Λ_{+−} = Λ_{−+} = −Re λ₀^{+−},
/// clamped at zero for reporting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gaps {
    pub lambda_pp: f64,
    pub lambda_mm: f64,
    pub lambda_pm: f64,
}

/// Transformed corner blocks of the four λ₀ eigenoperators and their trace
/// distances.
pub struct NsDiagnostic {
    /// Blocks in sector order [++, +−, −+, −−], expressed in the eigenbases of
    /// the diagonal blocks.
    pub z_blocks: [Array2<Complex64>; 4],
    pub d_pp_mm: f64,
    pub d_pp_pm: f64,
}

/// D(A,B) = sqrt(Tr{(A−B)†(A−B)}).
pub fn trace_norm_distance(a: &Array2<Complex64>, b: &Array2<Complex64>) -> f64 {
    frobenius(&(a - b))
}

/// Full four-sector spectral analysis of a strongly symmetric Liouvillian,
/// with gauge-fixed steady states, coherences and conserved quantities.
pub struct SpectralAnalysis {
    pub dim: usize,
    sectors: [SpectralResult; 4],
    steady: [Array2<Complex64>; 4],
    conserved: [Array2<Complex64>; 4],
}

impl SpectralAnalysis {
    /// Analyze the model at `p` by building the four sector blocks directly.
    pub fn from_params(p: &EffectiveParams) -> Result<Self, SpectralError> {
        let results = sweep::map_points(&Sector::ALL, |sec| {
            let block = build_sector_block(p, *sec)?;
            eigensolve_block(&block, p.cutoff, *sec)
        });
        let mut iter = results.into_iter();
        let arr = [
            iter.next().unwrap()?,
            iter.next().unwrap()?,
            iter.next().unwrap()?,
            iter.next().unwrap()?,
        ];
        Self::from_sector_results(arr)
    }

    /// Analyze a prebuilt superoperator (must be strongly symmetric).
    pub fn from_superoperator(s: &SuperOperator) -> Result<Self, SpectralError> {
        let dec = parity_blocks(s)?;
        let results = sweep::map_points(&Sector::ALL, |sec| {
            eigensolve_block(dec.block(*sec), s.dim(), *sec)
        });
        let mut iter = results.into_iter();
        let arr = [
            iter.next().unwrap()?,
            iter.next().unwrap()?,
            iter.next().unwrap()?,
            iter.next().unwrap()?,
        ];
        Self::from_sector_results(arr)
    }

    /// Gauge fixing and normalization of the λ₀ objects: diagonal-sector
    /// steady states are Hermitian-symmetrized and trace normalized; ρ₀^{+−}
    /// is Frobenius-normalized with its largest-modulus entry made real
    /// positive; ρ₀^{−+} = (ρ₀^{+−})†. The conserved quantities are rescaled
    /// so Tr(J₀†ρ₀) = 1 in the fixed gauge.
    pub fn from_sector_results(sectors: [SpectralResult; 4]) -> Result<Self, SpectralError> {
        let dim = sectors[0].dim;
        let mut diag_steady: Vec<Array2<Complex64>> = Vec::with_capacity(2);
        let mut diag_conserved: Vec<Array2<Complex64>> = Vec::with_capacity(2);

        for sec in [Sector::PP, Sector::MM] {
            let res = &sectors[sec.index()];
            let rho = &res.right_ops[0];
            let sym = (rho + &rho.t().mapv(|z| z.conj())).mapv(|z| z * 0.5);
            let tr: Complex64 = (0..dim).map(|i| sym[(i, i)]).sum();
            if tr.norm() < 1e-10 {
                return Err(SpectralError::TracelessSteadyState {
                    sector: sec.label(),
                });
            }
            let rho_n = sym.mapv(|z| z / tr);
            let (evals, _) = eigh_full(&rho_n)?;
            let min = evals.iter().cloned().fold(f64::INFINITY, f64::min);
            if min < -1e-8 {
                return Err(SpectralError::NonPositiveSteadyState {
                    sector: sec.label(),
                    min_eigenvalue: min,
                });
            }
            let j_raw = &res.left_ops[0];
            let s = trace_inner(j_raw, &rho_n);
            let j = j_raw.mapv(|z| z / s.conj());
            diag_steady.push(rho_n);
            diag_conserved.push(j);
        }

        // coherence gauge: largest-modulus entry of the +- coherence real positive
        let pm = &sectors[Sector::PM.index()];
        let rho_pm_raw = &pm.right_ops[0];
        let mut top = Complex64::new(0.0, 0.0);
        for z in rho_pm_raw.iter() {
            if z.norm() > top.norm() {
                top = *z;
            }
        }
        let phase = if top.norm() > 0.0 {
            top / top.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        let rho_pm = rho_pm_raw.mapv(|z| z / phase);
        let j_pm_raw = &pm.left_ops[0];
        let s = trace_inner(j_pm_raw, &rho_pm);
        let j_pm = j_pm_raw.mapv(|z| z / s.conj());
        let rho_mp = rho_pm.t().mapv(|z| z.conj());
        let j_mp = j_pm.t().mapv(|z| z.conj());

        let steady = [diag_steady[0].clone(), rho_pm, rho_mp, diag_steady[1].clone()];
        let conserved = [diag_conserved[0].clone(), j_pm, j_mp, diag_conserved[1].clone()];
        Ok(Self {
            dim,
            sectors,
            steady,
            conserved,
        })
    }

    pub fn sector(&self, s: Sector) -> &SpectralResult {
        &self.sectors[s.index()]
    }

    /// Gauge-fixed λ₀ right eigenoperator of a sector (steady state for
    /// diagonal sectors, coherence otherwise).
    pub fn steady(&self, s: Sector) -> &Array2<Complex64> {
        &self.steady[s.index()]
    }

    /// Conserved quantity J₀^{μν}, normalized against [`Self::steady`].
    pub fn conserved(&self, s: Sector) -> &Array2<Complex64> {
        &self.conserved[s.index()]
    }

    pub fn gaps(&self) -> Gaps {
        let clamp = |x: f64| x.max(0.0);
        let diag = |s: Sector| -> f64 {
            let ev = &self.sectors[s.index()].eigenvalues;
            if ev.len() > 1 {
                clamp(-ev[1].re)
            } else {
                0.0
            }
        };
        Gaps {
            lambda_pp: diag(Sector::PP),
            lambda_mm: diag(Sector::MM),
            lambda_pm: clamp(-self.sectors[Sector::PM.index()].eigenvalues[0].re),
        }
    }

    /// ‖J₀^{++} + J₀^{−−} − I‖_F: trace conservation split by sector.
    pub fn conservation_residual(&self) -> f64 {
        let eye = Array2::<Complex64>::eye(self.dim);
        frobenius(&(&(&self.conserved[0] + &self.conserved[3]) - &eye))
    }

    /// ⟨â†â⟩ on the chosen diagonal sector's steady state.
    pub fn photon_number(&self, s: Sector) -> f64 {
        assert!(s.is_diagonal(), "photon number needs a diagonal sector");
        let rho = &self.steady[s.index()];
        (0..self.dim).map(|i| i as f64 * rho[(i, i)].re).sum()
    }

    /// Corner-block structure of the four λ₀ operators in the parity-ordered
    /// basis, transformed to the eigenbases of the diagonal blocks.
    pub fn ns_diagnostic(&self) -> Result<NsDiagnostic, SpectralError> {
        let d = self.dim;
        if d % 2 != 0 {
            return Err(SpectralError::CutoffParity(d));
        }
        let evens: Vec<usize> = (0..d).step_by(2).collect();
        let odds: Vec<usize> = (1..d).step_by(2).collect();
        let sub = |m: &Array2<Complex64>, rows: &[usize], cols: &[usize]| {
            Array2::from_shape_fn((rows.len(), cols.len()), |(i, j)| m[(rows[i], cols[j])])
        };
        let z_pp = sub(&self.steady[0], &evens, &evens);
        let z_pm = sub(&self.steady[1], &evens, &odds);
        let z_mp = sub(&self.steady[2], &odds, &evens);
        let z_mm = sub(&self.steady[3], &odds, &odds);

        // diagonalize the Hermitian corner blocks; order eigenvalues
        // descending, fix each eigenvector's largest component real positive
        let diagonalizer = |z: &Array2<Complex64>| -> Result<Array2<Complex64>, SpectralError> {
            let (vals, vecs) = eigh_full(z)?;
            let n = vals.len();
            let mut u = Array2::<Complex64>::zeros((n, n));
            for j in 0..n {
                let col = vecs.column(n - 1 - j);
                let mut top = Complex64::new(0.0, 0.0);
                for z in col.iter() {
                    if z.norm() > top.norm() {
                        top = *z;
                    }
                }
                let phase = if top.norm() > 0.0 {
                    top / top.norm()
                } else {
                    Complex64::new(1.0, 0.0)
                };
                for i in 0..n {
                    u[(i, j)] = col[i] / phase;
                }
            }
            Ok(u)
        };
        let u_p = diagonalizer(&z_pp)?;
        let u_m = diagonalizer(&z_mm)?;
        let dag = |m: &Array2<Complex64>| m.t().mapv(|z| z.conj());
        let t_pp = dag(&u_p).dot(&z_pp).dot(&u_p);
        let t_mm = dag(&u_m).dot(&z_mm).dot(&u_m);
        let t_pm = dag(&u_p).dot(&z_pm).dot(&u_m);
        let t_mp = dag(&u_m).dot(&z_mp).dot(&u_p);
        let d_pp_mm = trace_norm_distance(&t_pp, &t_mm);
        let d_pp_pm = trace_norm_distance(&t_pp, &t_pm);
        Ok(NsDiagnostic {
            z_blocks: [t_pp, t_pm, t_mp, t_mm],
            d_pp_mm,
            d_pp_pm,
        })
    }
}
