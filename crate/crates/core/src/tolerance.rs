use crate::scalar::Real;

/// Numerical thresholds threaded through every rank- or positivity-sensitive routine.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances<T: Real> {
    /// Singular values / eigenvalues below `rank · max` count as zero.
    pub rank: T,
    /// Eigenvalues down to `−psd · ‖M‖` are accepted as positive semidefinite.
    pub psd: T,
    /// Residual bound for range-equality and face-membership checks.
    pub recon: T,
}

impl<T: Real> Default for Tolerances<T> {
    fn default() -> Self {
        let base = T::default_tol();
        Self {
            rank: base,
            psd: base,
            recon: base * T::lit(100.0),
        }
    }
}
