//! Factorizations built on the spectral routines: thin PSD factors, orthogonal
//! complementation, numerical rank and dense inversion.

use crate::error::{Error, Result};
use crate::linalg::eig::eig_hermitian;
use crate::linalg::matrix::{inner, vec_norm};
use crate::linalg::svd::{singular_values, svd_tol};
use crate::linalg::Matrix;
use crate::scalar::{cr, Real, C};

/// Number of singular values above `tol · σ_max`. Zero for the zero matrix.
pub fn rank_tol<T: Real>(m: &Matrix<T>, tol: T) -> usize {
    let s = singular_values(m);
    let smax = match s.first() {
        Some(&x) if x > T::zero() => x,
        _ => return 0,
    };
    s.iter().filter(|&&x| x > tol * smax).count()
}

/// Thin factor `F` (N×r) with `F F† = M`, built from eigenvectors scaled by √eigenvalue.
///
/// Eigenvalues below `tol · λ_max` are clamped to zero; columns are ordered by
/// decreasing eigenvalue. Fails if `M` has an eigenvalue below `−tol·‖M‖`.
pub fn psd_factor<T: Real>(m: &Matrix<T>, tol: T) -> Result<Matrix<T>> {
    let e = eig_hermitian(m)?;
    let scale = e.max().abs().max(e.min().abs());
    if e.min() < -tol * scale {
        return Err(Error::NotPsd {
            min_eig: e.min().to_f64().unwrap_or(f64::NAN),
        });
    }
    let n = m.rows();
    let keep: Vec<usize> = (0..n)
        .rev()
        .filter(|&k| e.eigenvalues[k] > tol * e.max() && e.eigenvalues[k] > T::zero())
        .collect();
    let mut f = Matrix::zeros(n, keep.len());
    for (j, &k) in keep.iter().enumerate() {
        let s = e.eigenvalues[k].sqrt();
        for i in 0..n {
            f[(i, j)] = e.eigenvectors[(i, k)] * s;
        }
    }
    Ok(f)
}

/// Orthonormal basis (as columns) of the column space of `m` at relative tolerance `tol`.
pub fn range_basis<T: Real>(m: &Matrix<T>, tol: T) -> Matrix<T> {
    svd_tol(m, tol).left
}

/// Extends an orthonormal set of columns to an orthonormal basis of the whole space,
/// returning only the added vectors (as columns).
pub fn orthonormal_complement<T: Real>(q: &Matrix<T>) -> Matrix<T> {
    let n = q.rows();
    let mut basis: Vec<Vec<C<T>>> = (0..q.cols()).map(|j| q.col(j)).collect();
    let mut added: Vec<Vec<C<T>>> = Vec::new();
    while basis.len() < n {
        // Greedy: the canonical vector with the largest residual, lowest index on ties.
        let mut best: Option<(T, Vec<C<T>>)> = None;
        for k in 0..n {
            let mut v = vec![cr(T::zero()); n];
            v[k] = cr(T::one());
            for _ in 0..2 {
                for b in &basis {
                    let p = inner(b, &v);
                    for (vi, bi) in v.iter_mut().zip(b) {
                        *vi -= *bi * p;
                    }
                }
            }
            let nv = vec_norm(&v);
            if best.as_ref().is_none_or(|(bn, _)| nv > *bn + T::lit(1e-12)) {
                best = Some((nv, v));
            }
        }
        let (nv, v) = best.expect("n > 0");
        let v: Vec<C<T>> = v.iter().map(|z| *z / nv).collect();
        basis.push(v.clone());
        added.push(v);
    }
    Matrix::from_columns(n, &added)
}

/// Orthogonal complementation `F̄` of a full-column-rank `F` (N×r).
///
/// The first r columns are those of `F`; the remaining N−r columns are an orthonormal
/// basis of the orthogonal complement of `R(F)`. The result is invertible and satisfies
/// `F F† = F̄ (I_r ⊕ O_{N−r}) F̄†`. When r = N, `F̄ = F`.
pub fn orthogonal_complementation<T: Real>(f: &Matrix<T>, tol: T) -> Result<Matrix<T>> {
    let (n, r) = (f.rows(), f.cols());
    if r > n {
        return Err(Error::Shape(format!(
            "factor has {r} columns but only {n} rows"
        )));
    }
    if rank_tol(f, tol) != r {
        return Err(Error::RankDeficient(format!(
            "factor of width {r} has numerical rank {}",
            rank_tol(f, tol)
        )));
    }
    if r == n {
        return Ok(f.clone());
    }
    let q = range_basis(f, tol);
    let comp = orthonormal_complement(&q);
    let mut out = Matrix::zeros(n, n);
    for j in 0..r {
        out.set_col(j, &f.col(j));
    }
    for j in 0..(n - r) {
        out.set_col(r + j, &comp.col(j));
    }
    Ok(out)
}

/// `I_r ⊕ O_{n−r}`.
pub fn leading_projector<T: Real>(n: usize, r: usize) -> Matrix<T> {
    Matrix::from_fn(n, n, |i, j| {
        if i == j && i < r {
            cr(T::one())
        } else {
            cr(T::zero())
        }
    })
}

/// Inverse by LU decomposition with partial pivoting.
pub fn inverse<T: Real>(m: &Matrix<T>) -> Result<Matrix<T>> {
    if !m.is_square() {
        return Err(Error::Shape("inverse of a non-square matrix".into()));
    }
    let n = m.rows();
    let mut a = m.clone();
    let mut inv = Matrix::identity(n);
    let scale = m.max_abs();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[(i, col)].norm().partial_cmp(&a[(j, col)].norm()).unwrap())
            .unwrap();
        if a[(piv, col)].norm() <= T::epsilon() * scale * T::from_usize_lossy(n) {
            return Err(Error::RankDeficient("matrix is singular".into()));
        }
        if piv != col {
            for j in 0..n {
                let t = a[(col, j)];
                a[(col, j)] = a[(piv, j)];
                a[(piv, j)] = t;
                let t = inv[(col, j)];
                inv[(col, j)] = inv[(piv, j)];
                inv[(piv, j)] = t;
            }
        }
        let d = cr(T::one()) / a[(col, col)];
        for j in 0..n {
            a[(col, j)] *= d;
            inv[(col, j)] *= d;
        }
        for i in 0..n {
            if i == col {
                continue;
            }
            let f = a[(i, col)];
            if f.norm() == T::zero() {
                continue;
            }
            for j in 0..n {
                let acj = a[(col, j)];
                let icj = inv[(col, j)];
                a[(i, j)] -= f * acj;
                inv[(i, j)] -= f * icj;
            }
        }
    }
    Ok(inv)
}
