//! Seedable random matrices and states.
//!
//! Pure states are i.i.d. standard complex Gaussian vectors, normalized (Haar measure).
//! PSD matrices are `G G†` for Gaussian `G`.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::{vec_norm, Matrix};
use crate::scalar::{c, Real, C};

fn gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R) -> C<T> {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c(
        T::lit(re * std::f64::consts::FRAC_1_SQRT_2),
        T::lit(im * std::f64::consts::FRAC_1_SQRT_2),
    )
}

/// Matrix of i.i.d. standard complex Gaussian entries.
pub fn random_ginibre<T: Real, R: Rng + ?Sized>(
    rows: usize,
    cols: usize,
    rng: &mut R,
) -> Matrix<T> {
    Matrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Haar-random unit vector.
pub fn random_ket<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<C<T>> {
    let v: Vec<C<T>> = (0..n).map(|_| gaussian(rng)).collect();
    let nv = vec_norm(&v);
    v.into_iter().map(|z| z / nv).collect()
}

pub fn random_hermitian<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Matrix<T> {
    random_ginibre(n, n, rng).hermitian_part()
}

/// Unit-trace `G G†` with `G` of size n×rank.
pub fn random_psd_rank<T: Real, R: Rng + ?Sized>(n: usize, rank: usize, rng: &mut R) -> Matrix<T> {
    let g = random_ginibre(n, rank, rng);
    let m = &g * &g.adjoint();
    let tr = m.trace().re;
    m.scale(T::one() / tr)
}

/// Full-rank unit-trace PSD matrix (positive definite with probability one).
pub fn random_pd<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Matrix<T> {
    random_psd_rank(n, n, rng)
}

/// Haar-random unitary via Gram–Schmidt on a Ginibre matrix.
pub fn random_unitary<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Matrix<T> {
    let g: Matrix<T> = random_ginibre(n, n, rng);
    let mut cols: Vec<Vec<C<T>>> = Vec::with_capacity(n);
    for j in 0..n {
        let mut v = g.col(j);
        for _ in 0..2 {
            for b in &cols {
                let p = crate::linalg::inner(b, &v);
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= *bi * p;
                }
            }
        }
        let nv = vec_norm(&v);
        cols.push(v.into_iter().map(|z| z / nv).collect());
    }
    Matrix::from_columns(n, &cols)
}
