//! Truncated Fock-space construction of bosonic operators and cat/coherent states.

use ndarray::prelude::*;
use num_complex::Complex64;
use thiserror::Error;

/// Tail weight beyond the cutoff above which state construction is rejected.
pub const TRUNCATION_TAIL_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum FockError {
    #[error("cutoff {0} too small, need at least 2")]
    CutoffTooSmall(usize),
    #[error("cutoff {actual} below truncation guard {required} for |alpha|^2 = {nbar:.3}")]
    TruncationGuard {
        required: usize,
        actual: usize,
        nbar: f64,
    },
    #[error("truncated tail weight {tail:.3e} exceeds {TRUNCATION_TAIL_TOL:.0e}")]
    Truncation { tail: f64 },
    #[error("odd cat state is undefined at alpha = 0")]
    DegenerateCat,
    #[error("operator cutoffs differ: {0} vs {1}")]
    CutoffMismatch(usize, usize),
    #[error("matrix is not Hermitian within 1e-12 (max deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("state norm {0} deviates from 1 beyond 1e-12")]
    NotNormalized(f64),
}

/// Truncated harmonic-oscillator Hilbert space of dimension `N` (levels 0..N-1).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockSpace {
    dim: usize,
}

impl FockSpace {
    pub fn new(dim: usize) -> Result<Self, FockError> {
        if dim < 2 {
            return Err(FockError::CutoffTooSmall(dim));
        }
        Ok(Self { dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Annihilation operator: ⟨n−1|â|n⟩ = √n.
    pub fn annihilation(&self) -> OperatorMatrix {
        let mut m = Array2::zeros((self.dim, self.dim));
        for n in 1..self.dim {
            m[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
        }
        OperatorMatrix::new(m, self.dim)
    }

    /// Creation operator â†.
    pub fn creation(&self) -> OperatorMatrix {
        self.annihilation().adjoint()
    }

    /// Number operator n̂ = â†â.
    pub fn number(&self) -> OperatorMatrix {
        let mut m = Array2::zeros((self.dim, self.dim));
        for n in 0..self.dim {
            m[(n, n)] = Complex64::new(n as f64, 0.0);
        }
        OperatorMatrix::new(m, self.dim)
    }

    /// Photon-number parity Π̂ = diag((−1)ⁿ).
    pub fn parity(&self) -> OperatorMatrix {
        let mut m = Array2::zeros((self.dim, self.dim));
        for n in 0..self.dim {
            m[(n, n)] = Complex64::new(if n % 2 == 0 { 1.0 } else { -1.0 }, 0.0);
        }
        OperatorMatrix::new(m, self.dim)
    }

    pub fn identity(&self) -> OperatorMatrix {
        OperatorMatrix::new(Array2::eye(self.dim), self.dim)
    }

    /// Fock basis ket |n⟩.
    pub fn fock_ket(&self, n: usize) -> PureState {
        assert!(n < self.dim, "level {n} outside cutoff {}", self.dim);
        let mut v = Array1::zeros(self.dim);
        v[n] = Complex64::new(1.0, 0.0);
        PureState {
            amplitudes: v,
            cutoff: self.dim,
        }
    }
}

/// Minimum cutoff for representing states of mean occupation `nbar` with tail
/// weight below [`TRUNCATION_TAIL_TOL`] (Poisson tail bound).
pub fn cutoff_guard(nbar: f64) -> usize {
    let n = nbar.max(0.0);
    (4.0 * n + 5.0 * n.sqrt() + 10.0).ceil() as usize
}

/// Guard cutoff rounded up to an even dimension (parity blocks need N even).
pub fn cutoff_guard_even(nbar: f64) -> usize {
    let n = cutoff_guard(nbar);
    n + n % 2
}

/// Stricter cutoff for stationarity-grade tests, where the residual of the
/// generator applied to a truncated state must sit far below 1e-8·η. At the
/// bare guard the boundary amplitudes (~1e-11) amplified by the N² matrix
/// elements of the generator land exactly at that scale.
pub fn cutoff_stationary_even(nbar: f64) -> usize {
    let n = nbar.max(0.0);
    let c = (4.0 * n + 8.0 * n.sqrt() + 16.0).ceil() as usize;
    c + c % 2
}

/// Dense complex matrix on a truncated Fock space, tagged with its cutoff.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    data: Array2<Complex64>,
    cutoff: usize,
}

impl OperatorMatrix {
    pub fn new(data: Array2<Complex64>, cutoff: usize) -> Self {
        assert_eq!(data.nrows(), cutoff, "operator rows must match cutoff");
        assert_eq!(data.ncols(), cutoff, "operator cols must match cutoff");
        Self { data, cutoff }
    }

    /// Construct with a Hermiticity check at 1e-12 per entry.
    pub fn hermitian(data: Array2<Complex64>, cutoff: usize) -> Result<Self, FockError> {
        let mut dev: f64 = 0.0;
        for i in 0..data.nrows() {
            for j in 0..data.ncols() {
                dev = dev.max((data[(i, j)] - data[(j, i)].conj()).norm());
            }
        }
        if dev > 1e-12 {
            return Err(FockError::NotHermitian(dev));
        }
        Ok(Self::new(data, cutoff))
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn data(&self) -> &Array2<Complex64> {
        &self.data
    }

    pub fn into_data(self) -> Array2<Complex64> {
        self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::new(self.data.t().mapv(|z| z.conj()), self.cutoff)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::new(self.data.mapv(|z| z * c), self.cutoff)
    }

    fn check(&self, other: &Self) -> Result<(), FockError> {
        if self.cutoff != other.cutoff {
            return Err(FockError::CutoffMismatch(self.cutoff, other.cutoff));
        }
        Ok(())
    }

    pub fn matmul(&self, other: &Self) -> Self {
        self.check(other).expect("mixed-cutoff product rejected");
        Self::new(self.data.dot(&other.data), self.cutoff)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check(other).expect("mixed-cutoff sum rejected");
        Self::new(&self.data + &other.data, self.cutoff)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.check(other).expect("mixed-cutoff difference rejected");
        Self::new(&self.data - &other.data, self.cutoff)
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.matmul(other).sub(&other.matmul(self))
    }

    pub fn apply(&self, state: &PureState) -> Array1<Complex64> {
        assert_eq!(self.cutoff, state.cutoff, "mixed-cutoff apply rejected");
        self.data.dot(&state.amplitudes)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Unit-norm state vector on a truncated Fock space.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: Array1<Complex64>,
    cutoff: usize,
}

impl PureState {
    /// Wrap amplitudes, rejecting vectors whose norm deviates from 1 beyond 1e-12.
    pub fn new(amplitudes: Array1<Complex64>, cutoff: usize) -> Result<Self, FockError> {
        assert_eq!(amplitudes.len(), cutoff);
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(FockError::NotNormalized(norm));
        }
        Ok(Self { amplitudes, cutoff })
    }

    pub fn amplitudes(&self) -> &Array1<Complex64> {
        &self.amplitudes
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn inner(&self, other: &Self) -> Complex64 {
        assert_eq!(self.cutoff, other.cutoff, "mixed-cutoff inner product");
        self.amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Density matrix |ψ⟩⟨ψ|.
    pub fn projector(&self) -> Array2<Complex64> {
        let n = self.cutoff;
        Array2::from_shape_fn((n, n), |(i, j)| {
            self.amplitudes[i] * self.amplitudes[j].conj()
        })
    }

    /// Outer product |ψ⟩⟨φ|.
    pub fn outer(&self, other: &Self) -> Array2<Complex64> {
        assert_eq!(self.cutoff, other.cutoff, "mixed-cutoff outer product");
        let n = self.cutoff;
        Array2::from_shape_fn((n, n), |(i, j)| {
            self.amplitudes[i] * other.amplitudes[j].conj()
        })
    }

    /// ⟨ψ|M|ψ⟩.
    pub fn expectation(&self, op: &OperatorMatrix) -> Complex64 {
        let v = op.apply(self);
        self.amplitudes
            .iter()
            .zip(v.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

/// Unnormalized coherent amplitudes c_n = e^{−|α|²/2} αⁿ/√(n!), by recurrence.
fn coherent_amplitudes(alpha: Complex64, dim: usize) -> Array1<Complex64> {
    let mut c = Array1::zeros(dim);
    let mut cur = Complex64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    c[0] = cur;
    for n in 1..dim {
        cur *= alpha / (n as f64).sqrt();
        c[n] = cur;
    }
    c
}

fn guard_check(alpha: Complex64, space: &FockSpace) -> Result<(), FockError> {
    let nbar = alpha.norm_sqr();
    let required = cutoff_guard(nbar);
    if space.dim() < required {
        return Err(FockError::TruncationGuard {
            required,
            actual: space.dim(),
            nbar,
        });
    }
    Ok(())
}

/// Coherent state |α⟩, renormalized after truncation.
pub fn coherent_state(alpha: Complex64, space: &FockSpace) -> Result<PureState, FockError> {
    guard_check(alpha, space)?;
    let c = coherent_amplitudes(alpha, space.dim());
    let weight: f64 = c.iter().map(|z| z.norm_sqr()).sum();
    let tail = 1.0 - weight;
    if tail > TRUNCATION_TAIL_TOL {
        return Err(FockError::Truncation { tail });
    }
    let norm = weight.sqrt();
    Ok(PureState {
        amplitudes: c.mapv(|z| z / norm),
        cutoff: space.dim(),
    })
}

/// Parity label of a cat state (even = +, odd = −).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CatParity {
    Even,
    Odd,
}

impl CatParity {
    pub fn sign(&self) -> f64 {
        match self {
            CatParity::Even => 1.0,
            CatParity::Odd => -1.0,
        }
    }
}

/// Cat state (|α⟩ ± |−α⟩)/√(2(1 ± e^{−2|α|²})), renormalized after truncation.
///
/// The odd cat at α = 0 is rejected rather than assigned the |1⟩ limit: the
/// normalization is discontinuous there.
pub fn cat_state(
    alpha: Complex64,
    parity: CatParity,
    space: &FockSpace,
) -> Result<PureState, FockError> {
    if alpha.norm() == 0.0 && parity == CatParity::Odd {
        return Err(FockError::DegenerateCat);
    }
    guard_check(alpha, space)?;
    let c = coherent_amplitudes(alpha, space.dim());
    let keep_even = parity == CatParity::Even;
    let masked = Array1::from_shape_fn(space.dim(), |n| {
        if (n % 2 == 0) == keep_even {
            c[n] * 2.0
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    // Exact squared norm of |α⟩ ± |−α⟩ before truncation.
    let q = (-2.0 * alpha.norm_sqr()).exp();
    let full = 2.0 * (1.0 + parity.sign() * q);
    let weight: f64 = masked.iter().map(|z| z.norm_sqr()).sum();
    let tail = 1.0 - weight / full;
    if tail > TRUNCATION_TAIL_TOL {
        return Err(FockError::Truncation { tail });
    }
    let norm = weight.sqrt();
    Ok(PureState {
        amplitudes: masked.mapv(|z| z / norm),
        cutoff: space.dim(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn annihilation_small_cases() {
        let s = FockSpace::new(2).unwrap();
        let a = s.annihilation();
        assert_eq!(a.data()[(0, 1)], c(1.0, 0.0));
        assert_eq!(a.data()[(0, 0)], c(0.0, 0.0));
        assert_eq!(a.data()[(1, 0)], c(0.0, 0.0));
        assert_eq!(a.data()[(1, 1)], c(0.0, 0.0));

        let s3 = FockSpace::new(3).unwrap();
        let a3 = s3.annihilation();
        assert_abs_diff_eq!(a3.data()[(1, 2)].re, 2f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn commutator_is_identity_below_cutoff() {
        let s = FockSpace::new(12).unwrap();
        let a = s.annihilation();
        let comm = a.commutator(&a.adjoint());
        for i in 0..11 {
            for j in 0..11 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(comm.data()[(i, j)].re, expect, epsilon = 1e-14);
                assert_abs_diff_eq!(comm.data()[(i, j)].im, 0.0, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn parity_matrix_and_sign_flip() {
        let s = FockSpace::new(3).unwrap();
        let p = s.parity();
        assert_eq!(p.data()[(0, 0)], c(1.0, 0.0));
        assert_eq!(p.data()[(1, 1)], c(-1.0, 0.0));
        assert_eq!(p.data()[(2, 2)], c(1.0, 0.0));

        let s = FockSpace::new(20).unwrap();
        let p = s.parity();
        let a = s.annihilation();
        // Π̂ â Π̂ = −â and Π̂² = I
        let pap = p.matmul(&a).matmul(&p);
        let diff = pap.add(&a).frobenius_norm();
        assert!(diff < 1e-14);
        let p2 = p.matmul(&p);
        let dev = p2.sub(&s.identity()).frobenius_norm();
        assert!(dev < 1e-15);
    }

    #[test]
    fn parity_commutes_with_number() {
        let s = FockSpace::new(15).unwrap();
        let comm = s.parity().commutator(&s.number());
        assert_eq!(comm.frobenius_norm(), 0.0);
    }

    #[test]
    fn coherent_vacuum_and_eigenrelation() {
        let s = FockSpace::new(10).unwrap();
        let vac = coherent_state(c(0.0, 0.0), &s).unwrap();
        assert_abs_diff_eq!(vac.amplitudes()[0].re, 1.0, epsilon = 1e-15);

        // â|α⟩ ≈ α|α⟩ at |α|² = 4, N = 40
        let s = FockSpace::new(40).unwrap();
        let alpha = c(2.0, 0.0);
        let st = coherent_state(alpha, &s).unwrap();
        let a = s.annihilation();
        let lhs = a.apply(&st);
        let resid: f64 = lhs
            .iter()
            .zip(st.amplitudes().iter())
            .map(|(l, r)| (l - alpha * r).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(resid < 1e-8, "residual {resid}");

        // ⟨α|n̂|α⟩ = |α|²
        let n = st.expectation(&s.number());
        assert_abs_diff_eq!(n.re, 4.0, epsilon = 1e-8);
        assert_abs_diff_eq!(n.im, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn coherent_norm_is_one() {
        let s = FockSpace::new(60).unwrap();
        let st = coherent_state(c(1.5, 2.0), &s).unwrap();
        assert_abs_diff_eq!(st.norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn truncation_guard_rejects() {
        let s = FockSpace::new(10).unwrap();
        let err = coherent_state(c(2.0, 0.0), &s).unwrap_err();
        match err {
            FockError::TruncationGuard { required, .. } => assert!(required > 10),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn cat_states_parity_structure() {
        let s = FockSpace::new(44).unwrap();
        let alpha = c(2.0, 0.0);
        let plus = cat_state(alpha, CatParity::Even, &s).unwrap();
        let minus = cat_state(alpha, CatParity::Odd, &s).unwrap();

        // orthogonality and odd-weight check
        assert!(plus.inner(&minus).norm() < 1e-14);
        let odd_weight: f64 = plus
            .amplitudes()
            .iter()
            .enumerate()
            .filter(|(n, _)| n % 2 == 1)
            .map(|(_, z)| z.norm_sqr())
            .sum();
        assert!(odd_weight < 1e-12);

        // Π̂|C±⟩ = ±|C±⟩
        let p = s.parity();
        for (st, sign) in [(&plus, 1.0), (&minus, -1.0)] {
            let v = p.apply(st);
            let dev: f64 = v
                .iter()
                .zip(st.amplitudes().iter())
                .map(|(a, b)| (a - b * sign).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(dev < 1e-12);
        }
    }

    #[test]
    fn cat_limits() {
        let s = FockSpace::new(12).unwrap();
        let even0 = cat_state(c(0.0, 0.0), CatParity::Even, &s).unwrap();
        assert_abs_diff_eq!(even0.amplitudes()[0].re, 1.0, epsilon = 1e-14);
        assert!(matches!(
            cat_state(c(0.0, 0.0), CatParity::Odd, &s),
            Err(FockError::DegenerateCat)
        ));
    }

    #[test]
    fn hermitian_constructor_rejects() {
        let s = FockSpace::new(4).unwrap();
        let a = s.annihilation();
        assert!(OperatorMatrix::hermitian(a.data().clone(), 4).is_err());
        assert!(OperatorMatrix::hermitian(s.number().data().clone(), 4).is_ok());
    }

    #[test]
    #[should_panic(expected = "mixed-cutoff")]
    fn mixed_cutoff_rejected() {
        let a = FockSpace::new(4).unwrap().annihilation();
        let b = FockSpace::new(6).unwrap().annihilation();
        let _ = a.matmul(&b);
    }
}
