//! Geometry of the PSD cone: faces, and decomposition of a state along the ray from an
//! interior point of its face to the face boundary.
//!
//! For unit-trace `ρ` and `C` with the same range, the segment `(1−μ)C + μρ` stays inside
//! the face for `μ ∈ [1, μ*]` and loses rank at `μ*`. Writing `E` for that boundary point
//! gives `ρ = (1−λ)C + λE` with `λ = 1/μ*`.

use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, Matrix};
use crate::scalar::Real;
use crate::states::{partial_trace_matrix, Factor, MixedState, PureState};
use crate::tolerance::Tolerances;

/// Smallest face of the PSD cone containing a state.
#[derive(Debug, Clone)]
pub struct FaceInfo<T: Real> {
    pub rank: usize,
    /// Orthonormal basis of the range, as columns.
    pub range_basis: Matrix<T>,
    /// Orthonormal bases of `S_1`, `S_2` when the range equals `S_1 ⊗ S_2`.
    pub product: Option<(Matrix<T>, Matrix<T>)>,
}

impl<T: Real> FaceInfo<T> {
    pub fn is_product(&self) -> bool {
        self.product.is_some()
    }

    /// Orthogonal projector onto the range.
    pub fn projector(&self) -> Matrix<T> {
        &self.range_basis * &self.range_basis.adjoint()
    }
}

/// `ρ = (1−λ)C + λE` with `E` on the boundary of the face of `ρ`.
#[derive(Debug, Clone)]
pub struct ConeDecomposition<T: Real> {
    pub interior: MixedState<T>,
    pub boundary: MixedState<T>,
    pub lambda: T,
    pub mu_star: T,
}

impl<T: Real> ConeDecomposition<T> {
    pub fn reconstruct(&self) -> Matrix<T> {
        &self.interior.matrix().scale(T::one() - self.lambda)
            + &self.boundary.matrix().scale(self.lambda)
    }
}

/// Eigenvectors with eigenvalue above `tol · λ_max`, as columns.
fn support<T: Real>(m: &Matrix<T>, tol: T) -> Result<Matrix<T>> {
    let e = eig_hermitian(&m.hermitian_part())?;
    let max = e.max();
    let keep: Vec<usize> = (0..m.rows())
        .rev()
        .filter(|&k| e.eigenvalues[k] > tol * max)
        .collect();
    Ok(Matrix::from_fn(m.rows(), keep.len(), |i, j| {
        e.eigenvectors[(i, keep[j])]
    }))
}

pub fn face_of<T: Real>(rho: &MixedState<T>, tol: &Tolerances<T>) -> Result<FaceInfo<T>> {
    let (n1, n2) = rho.dims().pair()?;
    let m = rho.matrix();
    let e = eig_hermitian(m)?;
    let scale = e.max().abs().max(e.min().abs());
    if e.min() < -tol.psd * scale {
        return Err(Error::NotPsd {
            min_eig: e.min().to_f64().unwrap_or(f64::NAN),
        });
    }
    let range_basis = support(m, tol.rank)?;
    let rank = range_basis.cols();
    let s1 = support(&partial_trace_matrix(m, n1, n2, Factor::First), tol.rank)?;
    let s2 = support(&partial_trace_matrix(m, n1, n2, Factor::Second), tol.rank)?;
    // R(ρ) ⊆ R(ρ_1) ⊗ R(ρ_2) always holds, so equal dimensions mean equal subspaces.
    let product = (s1.cols() * s2.cols() == rank).then_some((s1, s2));
    Ok(FaceInfo {
        rank,
        range_basis,
        product,
    })
}

/// Maximally mixed state on a product face: `P_1/r_1 ⊗ P_2/r_2`.
pub fn product_face_center<T: Real>(
    rho: &MixedState<T>,
    face: &FaceInfo<T>,
) -> Result<MixedState<T>> {
    let (s1, s2) = face
        .product
        .as_ref()
        .ok_or_else(|| Error::Face("state does not lie in a product face".into()))?;
    let p1 = (s1 * &s1.adjoint()).scale(T::one() / T::from_usize_lossy(s1.cols()));
    let p2 = (s2 * &s2.adjoint()).scale(T::one() / T::from_usize_lossy(s2.cols()));
    MixedState::new(rho.dims().clone(), p1.kron(&p2))
}

/// Extends the ray from `c` through `rho` to the boundary of their common face.
///
/// Returns `(μ*, E)` with `E = (1−μ*)C + μ*ρ` of unit trace and strictly lower rank.
pub fn ray_to_boundary<T: Real>(
    rho: &MixedState<T>,
    c: &MixedState<T>,
    tol: &Tolerances<T>,
) -> Result<(T, MixedState<T>)> {
    if rho.dims() != c.dims() {
        return Err(Error::Shape(
            "state and interior point have different dimensions".into(),
        ));
    }
    let v = support(rho.matrix(), tol.rank)?;
    let w = support(c.matrix(), tol.rank)?;
    if v.cols() != w.cols() {
        return Err(Error::Face(format!(
            "rank {} of the state differs from rank {} of the interior point",
            v.cols(),
            w.cols()
        )));
    }
    let n = rho.dims().total();
    let eye = Matrix::identity(n);
    let off_v = &eye - &(&v * &v.adjoint());
    let off_w = &eye - &(&w * &w.adjoint());
    let res_c = (&off_v * c.matrix()).frobenius_norm();
    let res_rho = (&off_w * rho.matrix()).frobenius_norm();
    if res_c > tol.recon || res_rho > tol.recon {
        return Err(Error::Face(format!(
            "ranges differ (projection residuals {res_c:e}, {res_rho:e})"
        )));
    }
    if (rho.matrix() - c.matrix()).frobenius_norm() <= tol.recon {
        return Err(Error::DegenerateRay);
    }
    let vh = v.adjoint();
    let rho_r = &(&vh * rho.matrix()) * &v;
    let c_r = (&(&vh * c.matrix()) * &v).hermitian_part();
    let ce = eig_hermitian(&c_r)?;
    let c_inv_half = ce.apply(|x| T::one() / x.sqrt());
    let x = (&(&c_inv_half * &rho_r) * &c_inv_half).hermitian_part();
    let x_min = eig_hermitian(&x)?.min();
    // Distinct unit-trace states on the same face always have x_min < 1.
    if x_min >= T::one() - T::epsilon() * T::lit(64.0) {
        return Err(Error::DegenerateRay);
    }
    let mu = T::one() / (T::one() - x_min);
    let e = &c.matrix().scale(T::one() - mu) + &rho.matrix().scale(mu);
    let boundary = MixedState::from_unnormalized(rho.dims().clone(), e.hermitian_part())?;
    Ok((mu, boundary))
}

pub fn decompose<T: Real>(
    rho: &MixedState<T>,
    c: &MixedState<T>,
    tol: &Tolerances<T>,
) -> Result<ConeDecomposition<T>> {
    let (mu_star, boundary) = ray_to_boundary(rho, c, tol)?;
    Ok(ConeDecomposition {
        interior: c.clone(),
        boundary,
        lambda: T::one() / mu_star,
        mu_star,
    })
}

/// Eigen-ensemble `E = Σ e_k |e_k⟩⟨e_k|` with null eigenvalues dropped and weights summing to 1.
pub fn spectral_ensemble<T: Real>(e: &MixedState<T>, tol: T) -> Result<Vec<(T, PureState<T>)>> {
    let eig = eig_hermitian(e.matrix())?;
    let max = eig.max();
    let keep: Vec<usize> = (0..eig.eigenvalues.len())
        .rev()
        .filter(|&k| eig.eigenvalues[k] > tol * max)
        .collect();
    let total = keep.iter().fold(T::zero(), |s, &k| s + eig.eigenvalues[k]);
    keep.into_iter()
        .map(|k| {
            let state = PureState::normalized(e.dims().clone(), eig.vector(k))?;
            Ok((eig.eigenvalues[k] / total, state))
        })
        .collect()
}
