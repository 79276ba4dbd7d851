//! Singular value decompositions: plain (one-sided Jacobi) and generalized with
//! respect to a pair of positive definite metrics.

use crate::error::{Error, Result};
use crate::linalg::eig::{jacobi_rotation, metric_roots};
use crate::linalg::matrix::vec_norm;
use crate::linalg::Matrix;
use crate::scalar::{cr, Real, C};

const MAX_SWEEPS: usize = 80;

/// `[x_i, x_j] ← [x_i, x_j] U` for vectors `x_i`, `x_j` with `i < j`.
fn rotate_pair<T: Real>(vs: &mut [Vec<C<T>>], i: usize, j: usize, [u00, u01, u10, u11]: [C<T>; 4]) {
    let (head, tail) = vs.split_at_mut(j);
    for (x, y) in head[i].iter_mut().zip(tail[0].iter_mut()) {
        let (a, b) = (*x, *y);
        *x = a * u00 + b * u10;
        *y = a * u01 + b * u11;
    }
}
/// `M = left · diag(sigmas) · right†`, truncated to the numerical rank.
///
/// For the plain SVD `left` and `right` have orthonormal columns. For a GSVD with
/// metrics `(A, B)` they are `A`-unitary and `B`-unitary respectively
/// (`left† A left = I`, `right† B right = I`).
#[derive(Debug, Clone)]
pub struct GsvdResult<T: Real> {
    pub left: Matrix<T>,
    /// Nonincreasing, strictly positive.
    pub sigmas: Vec<T>,
    pub right: Matrix<T>,
    pub rank: usize,
}

impl<T: Real> GsvdResult<T> {
    pub fn reconstruct(&self) -> Matrix<T> {
        let d = Matrix::from_real_diag(&self.sigmas);
        &(&self.left * &d) * &self.right.adjoint()
    }
}

/// Full thin SVD: all `min(m, n)` singular values (descending), with `u: m×k`, `v: n×k`.
pub(crate) struct ThinSvd<T: Real> {
    pub u: Matrix<T>,
    pub s: Vec<T>,
    pub v: Matrix<T>,
}

/// One-sided Jacobi on the columns of `a` (requires rows ≥ cols).
fn one_sided_jacobi<T: Real>(a: &Matrix<T>) -> ThinSvd<T> {
    let (m, n) = (a.rows(), a.cols());
    debug_assert!(m >= n);
    let mut cols: Vec<Vec<C<T>>> = (0..n).map(|j| a.col(j)).collect();
    let mut v: Vec<Vec<C<T>>> = (0..n)
        .map(|j| {
            let mut e = vec![cr(T::zero()); n];
            e[j] = cr(T::one());
            e
        })
        .collect();
    let eps = T::epsilon();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..n {
            for j in (i + 1)..n {
                let alpha = cols[i].iter().fold(T::zero(), |s, z| s + z.norm_sqr());
                let beta = cols[j].iter().fold(T::zero(), |s, z| s + z.norm_sqr());
                let gamma = cols[i]
                    .iter()
                    .zip(&cols[j])
                    .fold(cr(T::zero()), |s, (x, y)| s + x.conj() * y);
                if gamma.norm() <= eps * (alpha * beta).sqrt() || gamma.norm() == T::zero() {
                    continue;
                }
                rotated = true;
                let [u00, u01, u10, u11] = jacobi_rotation(alpha, beta, gamma);
                rotate_pair(&mut cols, i, j, [u00, u01, u10, u11]);
                rotate_pair(&mut v, i, j, [u00, u01, u10, u11]);
            }
        }
        if !rotated {
            break;
        }
    }
    let norms: Vec<T> = cols.iter().map(|c| vec_norm(c)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| norms[y].partial_cmp(&norms[x]).unwrap());
    let s: Vec<T> = order.iter().map(|&k| norms[k]).collect();
    let smax = s.first().copied().unwrap_or_else(T::zero);
    let mut u = Matrix::zeros(m, n);
    let mut vm = Matrix::zeros(n, n);
    for (jj, &k) in order.iter().enumerate() {
        for r in 0..n {
            vm[(r, jj)] = v[k][r];
        }
        if norms[k] > T::min_positive_value() && norms[k] > eps * eps * smax {
            let inv = T::one() / norms[k];
            for r in 0..m {
                u[(r, jj)] = cols[k][r] * inv;
            }
        }
    }
    ThinSvd { u, s, v: vm }
}

pub(crate) fn thin_svd<T: Real>(a: &Matrix<T>) -> ThinSvd<T> {
    if a.rows() >= a.cols() {
        one_sided_jacobi(a)
    } else {
        let t = one_sided_jacobi(&a.adjoint());
        ThinSvd {
            u: t.v,
            s: t.s,
            v: t.u,
        }
    }
}

/// All `min(rows, cols)` singular values in nonincreasing order.
pub fn singular_values<T: Real>(m: &Matrix<T>) -> Vec<T> {
    if m.rows() == 0 || m.cols() == 0 {
        return Vec::new();
    }
    thin_svd(m).s
}

fn truncate<T: Real>(t: ThinSvd<T>, tol: T) -> GsvdResult<T> {
    let smax = t.s.first().copied().unwrap_or_else(T::zero);
    let rank =
        t.s.iter()
            .take_while(|&&x| x > tol * smax && x > T::zero())
            .count();
    GsvdResult {
        left: t.u.leading_cols(rank),
        sigmas: t.s[..rank].to_vec(),
        right: t.v.leading_cols(rank),
        rank,
    }
}

/// Singular value decomposition truncated at the default relative rank tolerance.
pub fn svd<T: Real>(m: &Matrix<T>) -> GsvdResult<T> {
    svd_tol(m, T::default_tol())
}

pub fn svd_tol<T: Real>(m: &Matrix<T>, tol: T) -> GsvdResult<T> {
    if m.rows() == 0 || m.cols() == 0 {
        return GsvdResult {
            left: Matrix::zeros(m.rows(), 0),
            sigmas: Vec::new(),
            right: Matrix::zeros(m.cols(), 0),
            rank: 0,
        };
    }
    truncate(thin_svd(m), tol)
}

/// Generalized SVD of `m` with respect to positive definite metrics `a` (rows) and `b` (cols).
///
/// Computed as the plain SVD of `A^{1/2} M B^{1/2}` followed by back-transformation of the
/// singular vectors with `A^{-1/2}` and `B^{-1/2}`.
pub fn gsvd<T: Real>(m: &Matrix<T>, a: &Matrix<T>, b: &Matrix<T>) -> Result<GsvdResult<T>> {
    gsvd_tol(m, a, b, T::default_tol())
}

pub fn gsvd_tol<T: Real>(
    m: &Matrix<T>,
    a: &Matrix<T>,
    b: &Matrix<T>,
    tol: T,
) -> Result<GsvdResult<T>> {
    if a.rows() != m.rows() || !a.is_square() {
        return Err(Error::Metric(format!(
            "row metric must be {0}x{0}, got {1}x{2}",
            m.rows(),
            a.rows(),
            a.cols()
        )));
    }
    if b.rows() != m.cols() || !b.is_square() {
        return Err(Error::Metric(format!(
            "column metric must be {0}x{0}, got {1}x{2}",
            m.cols(),
            b.rows(),
            b.cols()
        )));
    }
    let (a_half, a_inv_half) = metric_roots(a, "row metric")?;
    let (b_half, b_inv_half) = metric_roots(b, "column metric")?;
    let tilde = &(&a_half * m) * &b_half;
    let plain = svd_tol(&tilde, tol);
    Ok(GsvdResult {
        left: &a_inv_half * &plain.left,
        right: &b_inv_half * &plain.right,
        sigmas: plain.sigmas,
        rank: plain.rank,
    })
}
