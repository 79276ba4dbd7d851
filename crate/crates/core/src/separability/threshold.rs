//! Werner-type thresholds `λ*`, the harmonic bound `λ̄`, and the PPT boundary oracle.

use crate::error::{Error, Result};
use crate::linalg::{inverse, orthogonal_complementation, psd_factor, svd_tol, GsvdResult, Matrix};
use crate::scalar::Real;
use crate::states::{
    coefficient_matrix, ppt_min_eigenvalue, MixedState, PureState, SchmidtSpectrum,
};
use crate::tolerance::Tolerances;

/// `M_1 ⊗ M_2` written as `(F̄_1 ⊗ F̄_2)(P_{r_1} ⊗ P_{r_2})(F̄_1 ⊗ F̄_2)†`.
#[derive(Debug, Clone)]
pub(crate) struct ProductFrame<T: Real> {
    pub fbar: (Matrix<T>, Matrix<T>),
    pub fbar_inv: (Matrix<T>, Matrix<T>),
    pub ranks: (usize, usize),
}

impl<T: Real> ProductFrame<T> {
    pub fn new(m1: &Matrix<T>, m2: &Matrix<T>, tol: &Tolerances<T>) -> Result<Self> {
        for (m, name) in [(m1, "M1"), (m2, "M2")] {
            if !m.is_square() {
                return Err(Error::Shape(format!("{name} must be square")));
            }
        }
        let trace = (m1.trace() * m2.trace()).re;
        if (trace - T::one()).abs() > tol.recon {
            return Err(Error::InvalidArgument(format!(
                "tr(M1)·tr(M2) must be 1, got {}",
                trace
            )));
        }
        let f1 = psd_factor(m1, tol.psd)?;
        let f2 = psd_factor(m2, tol.psd)?;
        let ranks = (f1.cols(), f2.cols());
        let fb1 = orthogonal_complementation(&f1, tol.rank)?;
        let fb2 = orthogonal_complementation(&f2, tol.rank)?;
        let fbar_inv = (inverse(&fb1)?, inverse(&fb2)?);
        Ok(Self {
            fbar: (fb1, fb2),
            fbar_inv,
            ranks,
        })
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.fbar.0.rows(), self.fbar.1.rows())
    }

    /// Coefficient matrix of `(F̄_1 ⊗ F̄_2)^{-1} z`, i.e. `F̄_1^{-1} Z F̄_2^{-T}`, restricted to
    /// the leading `r_1 × r_2` block. Fails if `z` leaves `R(M_1) ⊗ R(M_2)`.
    pub fn pull_back(&self, z: &PureState<T>, tol: &Tolerances<T>) -> Result<Matrix<T>> {
        let (n1, n2) = z.dims().pair()?;
        if (n1, n2) != self.dims() {
            return Err(Error::Shape(format!(
                "state is {n1}x{n2} but metrics are {}x{}",
                self.dims().0,
                self.dims().1
            )));
        }
        let zm = coefficient_matrix(z)?;
        let full = &(&self.fbar_inv.0 * &zm) * &self.fbar_inv.1.transpose();
        let (r1, r2) = self.ranks;
        let block = full.block(0, 0, r1, r2);
        let total = full.frobenius_norm();
        let outside = (total * total - block.frobenius_norm().powi(2))
            .max(T::zero())
            .sqrt();
        if outside > tol.recon.max(T::default_tol()) * total.max(T::one()) {
            return Err(Error::Face(format!(
                "vector has weight {outside:e} outside R(M1)⊗R(M2)"
            )));
        }
        Ok(block)
    }
}

/// Threshold data for one vector.
#[derive(Debug, Clone)]
pub struct LambdaStar<T: Real> {
    /// Threshold on the mixing weight of `(1−λ)M_1⊗M_2 + λ|z⟩⟨z|`.
    pub lambda_star: T,
    /// `1/(1 + r_1 r_2 σ_0σ_1)`, the threshold in the transformed frame before the weight remap.
    pub frame_threshold: T,
    /// `‖(F̄_1⊗F̄_2)^{-1} z‖²`.
    pub c: T,
    pub ranks: (usize, usize),
    pub spectrum: SchmidtSpectrum<T>,
}

impl<T: Real> LambdaStar<T> {
    /// Mixing weight in the transformed frame corresponding to `lambda`.
    pub fn frame_weight(&self, lambda: T) -> T {
        let rr = T::from_usize_lossy(self.ranks.0 * self.ranks.1);
        lambda * self.c / ((T::one() - lambda) * rr + lambda * self.c)
    }
}

pub(crate) fn lambda_star_in_frame<T: Real>(
    frame: &ProductFrame<T>,
    z: &PureState<T>,
    tol: &Tolerances<T>,
) -> Result<(LambdaStar<T>, GsvdResult<T>)> {
    let block = frame.pull_back(z, tol)?;
    let c = block.frobenius_norm().powi(2);
    let svd = svd_tol(&block, tol.rank);
    let spectrum = SchmidtSpectrum::from_values(&svd.sigmas, tol.rank)?;
    let (r1, r2) = frame.ranks;
    let rr = T::from_usize_lossy(r1 * r2);
    let t = T::one() / (T::one() + rr * spectrum.sigma0() * spectrum.sigma1());
    let lambda_star = t * rr / (c * (T::one() - t) + t * rr);
    Ok((
        LambdaStar {
            lambda_star,
            frame_threshold: t,
            c,
            ranks: frame.ranks,
            spectrum,
        },
        svd,
    ))
}

/// Full threshold data for `(1−λ)M_1⊗M_2 + λ|z⟩⟨z|`; see [`lambda_star_pure`].
pub fn lambda_star_detail<T: Real>(
    z: &PureState<T>,
    m1: &Matrix<T>,
    m2: &Matrix<T>,
    tol: &Tolerances<T>,
) -> Result<LambdaStar<T>> {
    let frame = ProductFrame::new(m1, m2, tol)?;
    Ok(lambda_star_in_frame(&frame, z, tol)?.0)
}

/// Largest `λ` for which `(1−λ)M_1⊗M_2 + λ|z⟩⟨z|` is separable.
///
/// Requires `tr M_1 · tr M_2 = 1` and `z ∈ R(M_1) ⊗ R(M_2)`. For `M_i = I/N_i` this is
/// `1/(1 + N_1N_2σ_0σ_1)`; product vectors give 1.
pub fn lambda_star_pure<T: Real>(
    z: &PureState<T>,
    m1: &Matrix<T>,
    m2: &Matrix<T>,
    tol: &Tolerances<T>,
) -> Result<T> {
    Ok(lambda_star_detail(z, m1, m2, tol)?.lambda_star)
}

/// Harmonic bound `λ̄ = 1/Σ_k e_k/λ*(e_k)` for an ensemble with weights summing to 1.
pub fn lambda_bar<T: Real>(
    ensemble: &[(T, PureState<T>)],
    m1: &Matrix<T>,
    m2: &Matrix<T>,
    tol: &Tolerances<T>,
) -> Result<T> {
    if ensemble.is_empty() {
        return Err(Error::InvalidArgument("empty ensemble".into()));
    }
    let total = ensemble.iter().fold(T::zero(), |s, (w, _)| s + *w);
    if (total - T::one()).abs() > tol.recon || ensemble.iter().any(|(w, _)| *w < T::zero()) {
        return Err(Error::InvalidArgument(format!(
            "ensemble weights must be nonnegative and sum to 1, got {total}"
        )));
    }
    let frame = ProductFrame::new(m1, m2, tol)?;
    let mut inv = T::zero();
    for (w, z) in ensemble {
        inv += *w / lambda_star_in_frame(&frame, z, tol)?.0.lambda_star;
    }
    Ok(T::one() / inv)
}

const BISECTION_TOL: f64 = 1e-10;
const BISECTION_CAP: usize = 200;

/// Largest `λ ∈ [0, 1]` with `(1−λ)C + λE` PPT, by bisection to `1e-10` in `λ`.
///
/// Returns 1 when the whole segment is PPT and 0 when `C` itself is not.
pub fn ppt_boundary<T: Real>(c: &MixedState<T>, e: &MixedState<T>) -> Result<T> {
    if c.dims() != e.dims() {
        return Err(Error::Shape("C and E have different dimensions".into()));
    }
    let (n1, n2) = c.dims().pair()?;
    // Eigenvalues within this margin of zero count as nonnegative.
    let floor = -T::default_tol() * T::lit(1e-3);
    let min_at = |lambda: T| -> Result<T> {
        let m = &c.matrix().scale(T::one() - lambda) + &e.matrix().scale(lambda);
        ppt_min_eigenvalue(&m, n1, n2)
    };
    if min_at(T::one())? >= floor {
        return Ok(T::one());
    }
    if min_at(T::zero())? < floor {
        return Ok(T::zero());
    }
    let (mut lo, mut hi) = (T::zero(), T::one());
    for _ in 0..BISECTION_CAP {
        if hi - lo <= T::lit(BISECTION_TOL) {
            break;
        }
        let mid = (lo + hi) / T::lit(2.0);
        if min_at(mid)? >= floor {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_ket, random_pd, random_psd_rank};
    use crate::scalar::cr;
    use crate::states::{psi_plus, DimSpec};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tol() -> Tolerances<f64> {
        Tolerances::default()
    }

    fn half_identity() -> Matrix<f64> {
        Matrix::identity(2).scale(0.5)
    }

    fn d22() -> DimSpec {
        DimSpec::bipartite(2, 2).unwrap()
    }

    #[test]
    fn psi_plus_threshold_is_one_third() {
        let l = lambda_star_pure(&psi_plus(), &half_identity(), &half_identity(), &tol()).unwrap();
        assert!((l - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn product_vector_threshold_is_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let z = PureState::product(&[random_ket(2, &mut rng), random_ket(3, &mut rng)]).unwrap();
        let m1 = random_pd::<f64, _>(2, &mut rng);
        let m2 = random_pd::<f64, _>(3, &mut rng);
        let l = lambda_star_pure(&z, &m1, &m2, &tol()).unwrap();
        assert!((l - 1.0).abs() < 1e-10);
    }

    #[test]
    fn identity_metrics_reduce_to_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let z = PureState::normalized(DimSpec::bipartite(3, 4).unwrap(), random_ket(12, &mut rng))
            .unwrap();
        let d = lambda_star_detail(
            &z,
            &Matrix::identity(3).scale(1.0 / 3.0),
            &Matrix::identity(4).scale(0.25),
            &tol(),
        )
        .unwrap();
        assert!((d.c - 12.0).abs() < 1e-10);
        let s = &d.spectrum;
        let closed = 1.0 / (1.0 + 12.0 * s.sigma0() * s.sigma1());
        assert!((d.lambda_star - closed).abs() < 1e-12);
        assert!((d.frame_threshold - closed).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_trace_and_face() {
        let eye = Matrix::<f64>::identity(2);
        assert!(matches!(
            lambda_star_pure(&psi_plus(), &eye, &eye, &tol()),
            Err(Error::InvalidArgument(_))
        ));
        let mut p = Matrix::<f64>::zeros(2, 2);
        p[(0, 0)] = cr(1.0);
        assert!(matches!(
            lambda_star_pure(&psi_plus(), &p, &half_identity(), &tol()),
            Err(Error::Face(_))
        ));
    }

    #[test]
    fn matches_ppt_boundary_on_qubits() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..40 {
            let m1 = random_pd::<f64, _>(2, &mut rng);
            let m2 = random_pd::<f64, _>(2, &mut rng);
            let z = PureState::normalized(d22(), random_ket(4, &mut rng)).unwrap();
            let l = lambda_star_pure(&z, &m1, &m2, &tol()).unwrap();
            let c = MixedState::new(d22(), m1.kron(&m2)).unwrap();
            let b = ppt_boundary(&c, &MixedState::from_pure(&z)).unwrap();
            assert!((l - b).abs() < 1e-8, "{l} vs {b}");
        }
    }

    #[test]
    fn harmonic_bound_examples() {
        let t = tol();
        let h = half_identity();
        let zero_one = PureState::basis(d22(), &[0, 1]).unwrap();
        let bar = lambda_bar(&[(0.5, zero_one.clone()), (0.5, psi_plus())], &h, &h, &t).unwrap();
        assert!((bar - 0.5).abs() < 1e-12);
        let single = lambda_bar(&[(1.0, psi_plus())], &h, &h, &t).unwrap();
        assert!((single - 1.0 / 3.0).abs() < 1e-12);
        let prods = lambda_bar(
            &[
                (0.3, zero_one),
                (0.7, PureState::basis(d22(), &[1, 1]).unwrap()),
            ],
            &h,
            &h,
            &t,
        )
        .unwrap();
        assert!((prods - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ppt_boundary_examples() {
        let c = MixedState::<f64>::maximally_mixed(d22());
        let zero_one = MixedState::from_pure(&PureState::basis(d22(), &[0, 1]).unwrap());
        let e = MixedState::mixture(&zero_one, &MixedState::from_pure(&psi_plus()), 0.5).unwrap();
        assert!((ppt_boundary(&c, &e).unwrap() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-9);
        let w = ppt_boundary(&c, &MixedState::from_pure(&psi_plus())).unwrap();
        assert!((w - 1.0 / 3.0).abs() < 1e-9);
        assert_eq!(ppt_boundary(&c, &zero_one).unwrap(), 1.0);
    }

    #[test]
    fn rank_deficient_metrics_on_embedded_face() {
        // M_i supported on a 2-dim subspace of C^3; z inside the face.
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let m1 = random_psd_rank::<f64, _>(3, 2, &mut rng);
        let m2 = random_psd_rank::<f64, _>(3, 2, &mut rng);
        let f1 = psd_factor(&m1, 1e-10).unwrap();
        let f2 = psd_factor(&m2, 1e-10).unwrap();
        let inner = PureState::normalized(d22(), random_ket(4, &mut rng)).unwrap();
        let zm = &(&f1 * &coefficient_matrix(&inner).unwrap()) * &f2.transpose();
        let z = PureState::normalized(DimSpec::bipartite(3, 3).unwrap(), zm.into_vec()).unwrap();
        let l = lambda_star_pure(&z, &m1, &m2, &tol()).unwrap();
        let c = MixedState::new(DimSpec::bipartite(3, 3).unwrap(), m1.kron(&m2)).unwrap();
        let b = ppt_boundary(&c, &MixedState::from_pure(&z)).unwrap();
        // Two-qubit face: PPT is exact there too.
        assert!((l - b).abs() < 1e-7, "{l} vs {b}");
    }
}
