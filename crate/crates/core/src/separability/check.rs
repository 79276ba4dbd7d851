//! Decision pipeline: face, cone decomposition, spectral ensemble, thresholds, PPT.

use serde::Serialize;

use crate::cone::{decompose, face_of, product_face_center, spectral_ensemble};
use crate::error::Error;
use crate::linalg::Matrix;
use crate::scalar::Real;
use crate::separability::threshold::{lambda_bar, lambda_star_pure};
use crate::states::{is_ppt, MixedState};
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Separable,
    Entangled,
    Inconclusive,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::Separable => "separable",
            Status::Entangled => "entangled",
            Status::Inconclusive => "inconclusive",
        })
    }
}

/// Outcome of [`check`]. `criterion` names the rule that decided the status.
///
/// Separable implies `ppt`; `lambda_bar ≤ lambda_star` when both are set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict<T: Real> {
    pub status: Status,
    /// Weight of the boundary point in `ρ = (1−λ)C + λE`.
    pub lambda: T,
    pub lambda_star: Option<T>,
    pub lambda_bar: Option<T>,
    /// Number of terms in the spectral ensemble of `E`.
    pub rank_e: Option<usize>,
    pub ppt: bool,
    pub criterion: String,
}

/// Interior point and tolerances for [`check`].
#[derive(Debug, Clone, Default)]
pub struct CheckOptions<T: Real> {
    /// `C = M_1 ⊗ M_2` with `tr M_1 · tr M_2 = 1`. Defaults to the maximally mixed state of
    /// the product face of `ρ`.
    pub product: Option<(Matrix<T>, Matrix<T>)>,
    pub tol: Tolerances<T>,
}

impl<T: Real> CheckOptions<T> {
    pub fn with_product(m1: Matrix<T>, m2: Matrix<T>) -> Self {
        Self {
            product: Some((m1, m2)),
            tol: Tolerances::default(),
        }
    }
}

pub const CRITERION_WERNER: &str = "werner-threshold (K=1)";
pub const CRITERION_HARMONIC: &str = "harmonic-bound (K>1)";
pub const CRITERION_PPT: &str = "ppt";
pub const CRITERION_GAP: &str = "gap (K>1)";
pub const CRITERION_NO_FACE: &str = "no-product-face";
pub const CRITERION_INTERIOR: &str = "interior-point";

fn inconclusive<T: Real>(lambda: T, ppt: bool, reason: impl Into<String>) -> Verdict<T> {
    Verdict {
        status: Status::Inconclusive,
        lambda,
        lambda_star: None,
        lambda_bar: None,
        rank_e: None,
        ppt,
        criterion: reason.into(),
    }
}

/// Decides separability of a bipartite state where the available criteria allow it.
///
/// Writes `ρ = (1−λ)C + λE` with `C` a product interior point and expands `E` in its
/// eigenbasis. A single term is decided exactly by `λ ≤ λ*`; several terms are certified
/// separable below the harmonic bound `λ̄`, entangled when the partial transpose is not
/// positive, and inconclusive otherwise. Failures of any stage come back as inconclusive.
pub fn check<T: Real>(rho: &MixedState<T>, opts: &CheckOptions<T>) -> Verdict<T> {
    let tol = &opts.tol;
    let one = T::one();
    let (ppt, _) = match is_ppt(rho, tol.psd) {
        Ok(p) => p,
        Err(e) => return inconclusive(one, false, format!("not bipartite: {e}")),
    };
    let face = match face_of(rho, tol) {
        Ok(f) => f,
        Err(e) => return inconclusive(one, ppt, format!("face: {e}")),
    };
    let (c, m1, m2) = match &opts.product {
        Some((m1, m2)) => match MixedState::new(rho.dims().clone(), m1.kron(m2)) {
            Ok(c) => (c, m1.clone(), m2.clone()),
            Err(e) => return inconclusive(one, ppt, format!("interior point: {e}")),
        },
        None => {
            let Some((s1, s2)) = &face.product else {
                return inconclusive(one, ppt, CRITERION_NO_FACE);
            };
            let c = match product_face_center(rho, &face) {
                Ok(c) => c,
                Err(e) => return inconclusive(one, ppt, format!("interior point: {e}")),
            };
            let p1 = (s1 * &s1.adjoint()).scale(one / T::from_usize_lossy(s1.cols()));
            let p2 = (s2 * &s2.adjoint()).scale(one / T::from_usize_lossy(s2.cols()));
            (c, p1, p2)
        }
    };
    let dec = match decompose(rho, &c, tol) {
        Ok(d) => d,
        Err(Error::DegenerateRay) => {
            return Verdict {
                status: Status::Separable,
                lambda: T::zero(),
                lambda_star: None,
                lambda_bar: None,
                rank_e: Some(0),
                ppt: true,
                criterion: CRITERION_INTERIOR.into(),
            }
        }
        Err(e) => return inconclusive(one, ppt, format!("decomposition: {e}")),
    };
    let lambda = dec.lambda;
    let ens = match spectral_ensemble(&dec.boundary, tol.rank) {
        Ok(e) => e,
        Err(e) => return inconclusive(lambda, ppt, format!("spectral ensemble: {e}")),
    };
    let k = ens.len();
    let slack = tol.recon;
    let mut v = inconclusive(lambda, ppt, "");
    v.rank_e = Some(k);
    if k == 1 {
        let star = match lambda_star_pure(&ens[0].1, &m1, &m2, tol) {
            Ok(s) => s,
            Err(e) => return inconclusive(lambda, ppt, format!("threshold: {e}")),
        };
        v.lambda_star = Some(star);
        v.lambda_bar = Some(star);
        v.criterion = CRITERION_WERNER.into();
        v.status = if lambda <= star + slack {
            Status::Separable
        } else {
            Status::Entangled
        };
    } else {
        let bar = match lambda_bar(&ens, &m1, &m2, tol) {
            Ok(b) => b,
            Err(e) => return inconclusive(lambda, ppt, format!("threshold: {e}")),
        };
        v.lambda_bar = Some(bar);
        if lambda <= bar + slack {
            v.status = Status::Separable;
            v.criterion = CRITERION_HARMONIC.into();
        } else if !ppt {
            v.status = Status::Entangled;
            v.criterion = CRITERION_PPT.into();
        } else {
            v.criterion = CRITERION_GAP.into();
        }
    }
    if v.status == Status::Separable && !ppt {
        // Only reachable within numerical slack of the boundary.
        v.status = Status::Inconclusive;
        v.criterion = format!("{} disagrees with ppt at the boundary", v.criterion);
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_ket, random_pd};
    use crate::states::{psi_plus, DimSpec, PureState};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn d22() -> DimSpec {
        DimSpec::bipartite(2, 2).unwrap()
    }

    fn opts() -> CheckOptions<f64> {
        CheckOptions::default()
    }

    #[test]
    fn isotropic_verdicts() {
        let sep = check(&MixedState::werner(&psi_plus(), 0.3).unwrap(), &opts());
        assert_eq!(sep.status, Status::Separable);
        assert_eq!(sep.rank_e, Some(1));
        assert!((sep.lambda - 0.3).abs() < 1e-10);
        assert!((sep.lambda_star.unwrap() - 1.0 / 3.0).abs() < 1e-10);
        let ent = check(&MixedState::werner(&psi_plus(), 0.5).unwrap(), &opts());
        assert_eq!(ent.status, Status::Entangled);
        assert_eq!(ent.criterion, CRITERION_WERNER);
        assert!(!ent.ppt);
    }

    #[test]
    fn counterexample_lands_in_the_gap() {
        let zero_one = MixedState::from_pure(&PureState::basis(d22(), &[0, 1]).unwrap());
        let e = MixedState::mixture(&zero_one, &MixedState::from_pure(&psi_plus()), 0.5).unwrap();
        let rho = MixedState::mixture(&MixedState::maximally_mixed(d22()), &e, 0.6).unwrap();
        let v = check(&rho, &opts());
        assert_eq!(v.status, Status::Inconclusive);
        assert_eq!(v.criterion, CRITERION_GAP);
        assert!(v.ppt);
        assert!((v.lambda_bar.unwrap() - 0.5).abs() < 1e-9);
        assert!((v.lambda - 0.6).abs() < 1e-9);

        let below = MixedState::mixture(&MixedState::maximally_mixed(d22()), &e, 0.45).unwrap();
        assert_eq!(check(&below, &opts()).status, Status::Separable);
        let above = MixedState::mixture(&MixedState::maximally_mixed(d22()), &e, 0.8).unwrap();
        let v = check(&above, &opts());
        assert_eq!(
            (v.status, v.criterion.as_str()),
            (Status::Entangled, CRITERION_PPT)
        );
    }

    #[test]
    fn pure_entangled_state_has_no_product_face() {
        let v = check(&MixedState::from_pure(&psi_plus::<f64>()), &opts());
        assert_eq!(v.status, Status::Inconclusive);
        assert_eq!(v.criterion, CRITERION_NO_FACE);
        assert!(!v.ppt);
    }

    #[test]
    fn maximally_mixed_is_interior() {
        let v = check(&MixedState::<f64>::maximally_mixed(d22()), &opts());
        assert_eq!(v.status, Status::Separable);
        assert_eq!(v.criterion, CRITERION_INTERIOR);
    }

    #[test]
    fn explicit_product_agrees_with_ppt() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..30 {
            let m1 = random_pd::<f64, _>(2, &mut rng);
            let m2 = random_pd::<f64, _>(2, &mut rng);
            let z = PureState::normalized(d22(), random_ket(4, &mut rng)).unwrap();
            let lambda = rand::Rng::random_range(&mut rng, 0.05..0.95);
            let rho = MixedState::new(
                d22(),
                &m1.kron(&m2).scale(1.0 - lambda) + &z.projector().scale(lambda),
            )
            .unwrap();
            let v = check(&rho, &CheckOptions::with_product(m1, m2));
            assert_eq!(v.rank_e, Some(1));
            assert!((v.lambda - lambda).abs() < 1e-8);
            if v.status != Status::Inconclusive {
                assert_eq!(v.status == Status::Separable, v.ppt);
            }
        }
    }
}
