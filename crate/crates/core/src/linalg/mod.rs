//! Dense complex linear algebra.

mod eig;
mod factor;
mod matrix;
mod svd;

pub use eig::{eig_hermitian, HermitianEig};
pub use factor::{
    inverse, leading_projector, orthogonal_complementation, orthonormal_complement, psd_factor,
    range_basis, rank_tol,
};
pub use matrix::{inner, kron_vec, vec_norm, Matrix};
pub use svd::{gsvd, gsvd_tol, singular_values, svd, svd_tol, GsvdResult};
