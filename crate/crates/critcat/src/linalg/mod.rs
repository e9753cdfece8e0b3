//! Dense and matrix-free linear algebra: eigendecomposition wrappers, a
//! scaling-and-squaring Padé matrix exponential, and an adaptive Krylov
//! propagator for the exponential action.

mod expm;
mod krylov;

pub use expm::expm;
pub use krylov::{krylov_expv, KrylovOptions};

use ndarray::prelude::*;
use ndarray_linalg::error::LinalgError;
use ndarray_linalg::{Eig, Eigh, UPLO};
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum NumericalError {
    #[error("lapack failure: {0}")]
    Lapack(#[from] LinalgError),
    #[error("krylov propagator stalled at t = {reached:.3e} of {target:.3e} (step {step:.3e})")]
    KrylovStalled { reached: f64, target: f64, step: f64 },
    #[error("requested tolerance {requested:.3e} not met, achieved {achieved:.3e}")]
    ToleranceNotMet { requested: f64, achieved: f64 },
}

extern "C" {
    fn openblas_set_num_threads(n: i32);
}

/// Pin OpenBLAS to `n` threads so data-level parallelism owns the cores.
/// Safe to call repeatedly.
pub fn configure_blas_threads(n: i32) {
    unsafe { openblas_set_num_threads(n) };
}

/// Full non-Hermitian eigendecomposition (eigenvalues, right eigenvectors as
/// columns).
pub fn eig_full(
    m: &Array2<Complex64>,
) -> Result<(Array1<Complex64>, Array2<Complex64>), NumericalError> {
    let (vals, vecs) = m.eig()?;
    Ok((vals, vecs))
}

/// Hermitian eigendecomposition (ascending real eigenvalues, eigenvectors as
/// columns).
pub fn eigh_full(
    m: &Array2<Complex64>,
) -> Result<(Array1<f64>, Array2<Complex64>), NumericalError> {
    let (vals, vecs) = m.eigh(UPLO::Lower)?;
    Ok((vals, vecs))
}

/// Linear operator interface for matrix-free propagation.
pub trait LinearMap: Sync {
    fn dim(&self) -> usize;
    fn apply_to(&self, v: ArrayView1<Complex64>) -> Array1<Complex64>;
}

impl LinearMap for Array2<Complex64> {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply_to(&self, v: ArrayView1<Complex64>) -> Array1<Complex64> {
        self.dot(&v)
    }
}

impl LinearMap for crate::liouv::SuperOperator {
    fn dim(&self) -> usize {
        SuperOperator::dim(self).pow(2)
    }

    fn apply_to(&self, v: ArrayView1<Complex64>) -> Array1<Complex64> {
        self.matrix().dot(&v)
    }
}

use crate::liouv::{LindbladGenerator, SuperOperator};

impl LinearMap for LindbladGenerator {
    fn dim(&self) -> usize {
        LindbladGenerator::dim(self).pow(2)
    }

    fn apply_to(&self, v: ArrayView1<Complex64>) -> Array1<Complex64> {
        let d = LindbladGenerator::dim(self);
        let rho = crate::liouv::unvectorize(&v.to_owned(), d);
        crate::liouv::vectorize(&self.apply(&rho))
    }
}

/// Frobenius norm of a complex matrix.
pub fn frobenius(m: &Array2<Complex64>) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Euclidean norm of a complex vector.
pub fn vec_norm(v: &Array1<Complex64>) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}
