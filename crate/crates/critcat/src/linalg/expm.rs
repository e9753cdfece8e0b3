//! Dense matrix exponential by diagonal Padé approximation with scaling and
//! squaring.

use ndarray::prelude::*;
use ndarray_linalg::Inverse;
use num_complex::Complex64;

use super::NumericalError;

// Padé-13 numerator coefficients.
const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA_13: f64 = 5.371920351148152;

fn one_norm(m: &Array2<Complex64>) -> f64 {
    let mut best: f64 = 0.0;
    for j in 0..m.ncols() {
        let s: f64 = m.column(j).iter().map(|z| z.norm()).sum();
        best = best.max(s);
    }
    best
}

/// exp(M) for a square complex matrix.
pub fn expm(m: &Array2<Complex64>) -> Result<Array2<Complex64>, NumericalError> {
    let n = m.nrows();
    assert_eq!(n, m.ncols());
    let norm = one_norm(m);
    let s = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil() as i32
    } else {
        0
    };
    let a = m.mapv(|z| z / 2f64.powi(s));

    let eye = Array2::<Complex64>::eye(n);
    let a2 = a.dot(&a);
    let a4 = a2.dot(&a2);
    let a6 = a2.dot(&a4);

    let u_inner = a6.mapv(|z| z * B13[13])
        + a4.mapv(|z| z * B13[11])
        + a2.mapv(|z| z * B13[9]);
    let u_poly = a6.dot(&u_inner)
        + a6.mapv(|z| z * B13[7])
        + a4.mapv(|z| z * B13[5])
        + a2.mapv(|z| z * B13[3])
        + eye.mapv(|z| z * B13[1]);
    let u = a.dot(&u_poly);

    let v_inner = a6.mapv(|z| z * B13[12])
        + a4.mapv(|z| z * B13[10])
        + a2.mapv(|z| z * B13[8]);
    let v = a6.dot(&v_inner)
        + a6.mapv(|z| z * B13[6])
        + a4.mapv(|z| z * B13[4])
        + a2.mapv(|z| z * B13[2])
        + eye.mapv(|z| z * B13[0]);

    // (V − U)⁻¹ (V + U)
    let denom = &v - &u;
    let numer = &v + &u;
    let mut f = denom.inv()?.dot(&numer);
    for _ in 0..s {
        f = f.dot(&f);
    }
    Ok(f)
}
