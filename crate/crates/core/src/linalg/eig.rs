//! Hermitian eigendecomposition by cyclic complex Jacobi rotations.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{cr, Real, C};

const MAX_SWEEPS: usize = 100;

/// Spectral decomposition `M = Σ λ_i v_i v_i†` with ascending eigenvalues.
#[derive(Debug, Clone)]
pub struct HermitianEig<T: Real> {
    pub eigenvalues: Vec<T>,
    /// Orthonormal eigenvectors as columns, in the order of `eigenvalues`.
    pub eigenvectors: Matrix<T>,
}

impl<T: Real> HermitianEig<T> {
    pub fn reconstruct(&self) -> Matrix<T> {
        self.apply(|x| x)
    }

    /// `V f(Λ) V†`.
    pub fn apply(&self, f: impl Fn(T) -> T) -> Matrix<T> {
        let n = self.eigenvalues.len();
        let v = &self.eigenvectors;
        let fl: Vec<T> = self.eigenvalues.iter().map(|&x| f(x)).collect();
        Matrix::from_fn(n, n, |i, j| {
            (0..n).fold(cr(T::zero()), |acc, k| {
                acc + v[(i, k)] * v[(j, k)].conj() * fl[k]
            })
        })
    }

    pub fn min(&self) -> T {
        self.eigenvalues.first().copied().unwrap_or_else(T::zero)
    }

    pub fn max(&self) -> T {
        self.eigenvalues.last().copied().unwrap_or_else(T::zero)
    }

    pub fn vector(&self, k: usize) -> Vec<C<T>> {
        self.eigenvectors.col(k)
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// The input must be square and Hermitian within `1e-10·‖M‖` (scaled for `f32`);
/// only its Hermitian part is diagonalized.
pub fn eig_hermitian<T: Real>(m: &Matrix<T>) -> Result<HermitianEig<T>> {
    if !m.is_square() {
        return Err(Error::Shape(format!(
            "eig_hermitian needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let scale = m.frobenius_norm();
    if m.hermiticity_defect() > T::default_tol() * scale.max(T::min_positive_value()) {
        return Err(Error::Shape("eig_hermitian input is not Hermitian".into()));
    }
    jacobi(m.hermitian_part())
}

fn off_diagonal_sq<T: Real>(a: &Matrix<T>) -> T {
    let n = a.rows();
    let mut s = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s
}

/// 2×2 unitary block `[[u00, u01], [u10, u11]]` that diagonalizes the Hermitian pair
/// `[[app, apq], [conj(apq), aqq]]` under `U† A U`.
pub(crate) fn jacobi_rotation<T: Real>(app: T, aqq: T, apq: C<T>) -> [C<T>; 4] {
    let mag = apq.norm();
    let phase = apq / mag;
    let theta = (aqq - app) / (mag + mag);
    let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
    let cs = T::one() / (t * t + T::one()).sqrt();
    let sn = t * cs;
    let ph = phase.conj();
    [cr(cs), cr(sn), -ph * sn, ph * cs]
}

fn jacobi<T: Real>(mut a: Matrix<T>) -> Result<HermitianEig<T>> {
    let n = a.rows();
    let mut v = Matrix::identity(n);
    let total = a.frobenius_norm();
    let eps = T::epsilon();
    let mut converged = n <= 1 || total == T::zero();
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        if off_diagonal_sq(&a).sqrt() <= eps * eps * total {
            converged = true;
            break;
        }
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                if mag <= eps * (app.abs() + aqq.abs()) * T::lit(1e-3) || mag == T::zero() {
                    a[(p, q)] = cr(T::zero());
                    a[(q, p)] = cr(T::zero());
                    continue;
                }
                rotated = true;
                let [u00, u01, u10, u11] = jacobi_rotation(app, aqq, apq);
                // A ← A U (columns p, q)
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * u00 + akq * u10;
                    a[(k, q)] = akp * u01 + akq * u11;
                }
                // A ← U† A (rows p, q)
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = u00.conj() * apk + u10.conj() * aqk;
                    a[(q, k)] = u01.conj() * apk + u11.conj() * aqk;
                }
                a[(p, q)] = cr(T::zero());
                a[(q, p)] = cr(T::zero());
                a[(p, p)] = cr(a[(p, p)].re);
                a[(q, q)] = cr(a[(q, q)].re);
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * u00 + vkq * u10;
                    v[(k, q)] = vkp * u01 + vkq * u11;
                }
            }
        }
        if !rotated {
            converged = true;
        }
    }
    if !converged {
        return Err(Error::NoConvergence);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).unwrap());
    let eigenvalues = order.iter().map(|&i| a[(i, i)].re).collect();
    let eigenvectors = Matrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(HermitianEig {
        eigenvalues,
        eigenvectors,
    })
}

/// Hermitian square root and inverse square root of a positive definite matrix.
pub(crate) fn metric_roots<T: Real>(a: &Matrix<T>, what: &str) -> Result<(Matrix<T>, Matrix<T>)> {
    let e = eig_hermitian(a).map_err(|err| Error::Metric(format!("{what}: {err}")))?;
    let scale = e.max().abs().max(e.min().abs());
    if e.min() <= T::lit(1e-12) * scale || scale == T::zero() {
        return Err(Error::Metric(format!(
            "{what} has minimum eigenvalue {:e}",
            e.min().to_f64().unwrap()
        )));
    }
    Ok((e.apply(|x| x.sqrt()), e.apply(|x| T::one() / x.sqrt())))
}
