//! Explicit product-state decompositions of separable Werner-type states.

use crate::error::{Error, Result};
use crate::linalg::{orthonormal_complement, vec_norm, Matrix};
use crate::scalar::{cr, Real, C};
use crate::separability::roots::{roots_ensemble, RootTerm};
use crate::separability::threshold::{lambda_star_in_frame, ProductFrame};
use crate::states::{PureState, SchmidtSpectrum};
use crate::tolerance::Tolerances;

/// One weighted product term `w |a⟩⟨a| ⊗ |b⟩⟨b|` with unit `a`, `b`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductTerm<T: Real> {
    pub weight: T,
    pub a: Vec<C<T>>,
    pub b: Vec<C<T>>,
}

/// `Σ w_k |a_k⟩⟨a_k| ⊗ |b_k⟩⟨b_k|` on `C^{N_1} ⊗ C^{N_2}`; every weight is positive.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductEnsemble<T: Real> {
    pub dims: (usize, usize),
    pub terms: Vec<ProductTerm<T>>,
}

impl<T: Real> ProductEnsemble<T> {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_weight(&self) -> T {
        self.terms.iter().fold(T::zero(), |s, t| s + t.weight)
    }

    pub fn reconstruct(&self) -> Matrix<T> {
        let (n1, n2) = self.dims;
        let mut out = Matrix::zeros(n1 * n2, n1 * n2);
        for t in &self.terms {
            let v: Vec<C<T>> =
                t.a.iter()
                    .flat_map(|x| t.b.iter().map(move |y| *x * *y))
                    .collect();
            for i in 0..v.len() {
                for j in 0..v.len() {
                    out[(i, j)] += v[i] * v[j].conj() * t.weight;
                }
            }
        }
        out
    }

    /// Product kets `a ⊗ b` of each term as bipartite pure states.
    pub fn product_states(&self) -> Result<Vec<(T, PureState<T>)>> {
        self.terms
            .iter()
            .map(|t| Ok((t.weight, PureState::product(&[t.a.clone(), t.b.clone()])?)))
            .collect()
    }

    fn push(&mut self, weight: T, a: Vec<C<T>>, b: Vec<C<T>>) {
        if weight > T::zero() {
            self.terms.push(ProductTerm { weight, a, b });
        }
    }
}

fn basis<T: Real>(n: usize, i: usize) -> Vec<C<T>> {
    let mut v = vec![cr(T::zero()); n];
    v[i] = cr(T::one());
    v
}

/// Werner data at `λ* = 1/(1 + N_1N_2σ_0σ_1)`, with `λ*` factored in:
/// diagonal weights on `|ij⟩` and the roots terms.
struct WernerParts<T: Real> {
    diag: Vec<T>,
    roots: Vec<RootTerm<T>>,
}

fn werner_parts<T: Real>(
    sigma: &SchmidtSpectrum<T>,
    n1: usize,
    n2: usize,
) -> Result<WernerParts<T>> {
    let r = sigma.rank();
    if r < 2 {
        return Err(Error::InvalidArgument(
            "Werner ensemble needs Schmidt rank >= 2".into(),
        ));
    }
    if r > n1.min(n2) {
        return Err(Error::InvalidArgument(format!(
            "Schmidt rank {r} exceeds min({n1}, {n2})"
        )));
    }
    let s = sigma.sigmas();
    let top = sigma.sigma0() * sigma.sigma1();
    let lambda = T::one() / (T::one() + T::from_usize_lossy(n1 * n2) * top);
    // σ_0σ_1 I + |σ⟩⟨σ| = (roots sum) + Σ_ij d_ij |ij⟩⟨ij|, d_ij ≥ 0 since σ_0σ_1 is the
    // largest pairwise product.
    let mut diag = vec![T::zero(); n1 * n2];
    for i in 0..n1 {
        for j in 0..n2 {
            let d = if i != j && i < r && j < r {
                top - s[i] * s[j]
            } else {
                top
            };
            diag[i * n2 + j] = lambda * d.max(T::zero());
        }
    }
    let roots = roots_ensemble(sigma)?
        .into_iter()
        .map(|(w, u, v)| {
            let mut a = vec![cr(T::zero()); n1];
            let mut b = vec![cr(T::zero()); n2];
            a[..r].copy_from_slice(&u);
            b[..r].copy_from_slice(&v);
            (lambda * w, a, b)
        })
        .collect();
    Ok(WernerParts { diag, roots })
}

/// Product ensemble of `(1−λ*)I/(N_1N_2) + λ*|σ⟩⟨σ|` at `λ* = 1/(1 + N_1N_2σ_0σ_1)`,
/// where `|σ⟩ = Σ σ_i|ii⟩`.
pub fn werner_separable_ensemble<T: Real>(
    sigma: &SchmidtSpectrum<T>,
    n1: usize,
    n2: usize,
) -> Result<ProductEnsemble<T>> {
    let parts = werner_parts(sigma, n1, n2)?;
    let mut ens = ProductEnsemble {
        dims: (n1, n2),
        terms: Vec::new(),
    };
    for i in 0..n1 {
        for j in 0..n2 {
            ens.push(parts.diag[i * n2 + j], basis(n1, i), basis(n2, j));
        }
    }
    for (w, a, b) in parts.roots {
        ens.push(w, a, b);
    }
    Ok(ens)
}

/// Unitary whose leading columns are `q` (orthonormal columns).
fn complete_unitary<T: Real>(q: &Matrix<T>) -> Matrix<T> {
    let comp = orthonormal_complement(q);
    let n = q.rows();
    let mut cols: Vec<Vec<C<T>>> = (0..q.cols()).map(|j| q.col(j)).collect();
    cols.extend((0..comp.cols()).map(|j| comp.col(j)));
    Matrix::from_columns(n, &cols)
}

/// Product ensemble for `(1−λ)M_1⊗M_2 + λ|z⟩⟨z|`, refusing when `λ > λ*(z)`.
///
/// Mixes the threshold ensemble with the basis ensemble of the identity in the frame where
/// `M_1⊗M_2` becomes a projector, then maps every factor through `F̄_i`.
pub fn certify_separable<T: Real>(
    lambda: T,
    m1: &Matrix<T>,
    m2: &Matrix<T>,
    z: &PureState<T>,
    tol: &Tolerances<T>,
) -> Result<ProductEnsemble<T>> {
    if !(T::zero()..=T::one()).contains(&lambda) {
        return Err(Error::InvalidArgument(format!(
            "lambda {lambda} outside [0, 1]"
        )));
    }
    let frame = ProductFrame::new(m1, m2, tol)?;
    let (star, svd) = lambda_star_in_frame(&frame, z, tol)?;
    if lambda > star.lambda_star * (T::one() + tol.rank) {
        return Err(Error::AboveThreshold {
            lambda: lambda.to_f64().unwrap_or(f64::NAN),
            lambda_star: star.lambda_star.to_f64().unwrap_or(f64::NAN),
        });
    }
    let (r1, r2) = frame.ranks;
    let (n1, n2) = frame.dims();
    let rr = T::from_usize_lossy(r1 * r2);
    let scale = (T::one() - lambda) * rr + lambda * star.c;
    let lam_frame = (lambda * star.c / scale).min(star.frame_threshold);
    let alpha = lam_frame / star.frame_threshold;
    let r = star.spectrum.rank();

    // Frame coordinates: z' = Σ σ_i x_i ⊗ y_i with x_i = U e_i and y_i = conj(W) e_i.
    let x = complete_unitary(&svd.left.leading_cols(r));
    let y = complete_unitary(&svd.right.leading_cols(r).conj());

    let mut frame_terms: Vec<RootTerm<T>> = Vec::new();
    let mut diag = vec![(T::one() - alpha) / rr; r1 * r2];
    if r >= 2 {
        let parts = werner_parts(&star.spectrum, r1, r2)?;
        for (k, d) in parts.diag.iter().enumerate() {
            diag[k] += alpha * *d;
        }
        frame_terms.extend(parts.roots.into_iter().map(|(w, a, b)| (alpha * w, a, b)));
    } else {
        frame_terms.push((alpha, basis(r1, 0), basis(r2, 0)));
    }
    for i in 0..r1 {
        for j in 0..r2 {
            frame_terms.push((diag[i * r2 + j], basis(r1, i), basis(r2, j)));
        }
    }

    let embed = |f: &Matrix<T>, u: &Matrix<T>, v: &[C<T>], n: usize| -> Vec<C<T>> {
        let mut full = vec![cr(T::zero()); n];
        full[..v.len()].copy_from_slice(&u.matvec(v));
        f.matvec(&full)
    };
    let mut ens = ProductEnsemble {
        dims: (n1, n2),
        terms: Vec::new(),
    };
    for (w, a, b) in frame_terms {
        let fa = embed(&frame.fbar.0, &x, &a, n1);
        let fb = embed(&frame.fbar.1, &y, &b, n2);
        let (na, nb) = (vec_norm(&fa), vec_norm(&fb));
        let weight = w * scale * na * na * nb * nb;
        ens.push(
            weight,
            fa.iter().map(|v| *v / na).collect(),
            fb.iter().map(|v| *v / nb).collect(),
        );
    }
    Ok(ens)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_ket, random_pd, random_psd_rank};
    use crate::separability::roots::ensemble_root_order;
    use crate::separability::threshold::{lambda_star_pure, ppt_boundary};
    use crate::states::{psi_plus, DimSpec, MixedState};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn werner_target(sigma: &SchmidtSpectrum<f64>, n1: usize, n2: usize) -> Matrix<f64> {
        let l = 1.0 / (1.0 + (n1 * n2) as f64 * sigma.sigma0() * sigma.sigma1());
        let z = sigma.canonical_state(n1, n2).unwrap();
        MixedState::werner(&z, l).unwrap().into_matrix()
    }

    fn assert_unit_factors(e: &ProductEnsemble<f64>) {
        for t in &e.terms {
            assert!(t.weight > 0.0);
            assert!((vec_norm(&t.a) - 1.0).abs() < 1e-12);
            assert!((vec_norm(&t.b) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn isotropic_qubits_at_one_third() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let s = SchmidtSpectrum::from_values(&[h, h], 1e-12).unwrap();
        let e = werner_separable_ensemble(&s, 2, 2).unwrap();
        assert_unit_factors(&e);
        assert!((&e.reconstruct() - &werner_target(&s, 2, 2)).frobenius_norm() < 1e-12);
        assert!((e.total_weight() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn embedded_bell_pair_in_qutrits() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let s = SchmidtSpectrum::from_values(&[h, h], 1e-12).unwrap();
        let e = werner_separable_ensemble(&s, 3, 3).unwrap();
        let target = werner_target(&s, 3, 3);
        assert!((&e.reconstruct() - &target).frobenius_norm() < 1e-8);
        let c = MixedState::maximally_mixed(DimSpec::bipartite(3, 3).unwrap());
        let z = MixedState::from_pure(&s.canonical_state(3, 3).unwrap());
        assert!((ppt_boundary(&c, &z).unwrap() - 2.0 / 11.0).abs() < 1e-9);
    }

    #[test]
    fn equal_rank_three_spectrum() {
        let s = SchmidtSpectrum::from_values(&[1.0, 1.0, 1.0], 1e-12).unwrap();
        let e = werner_separable_ensemble(&s, 3, 3).unwrap();
        assert_unit_factors(&e);
        assert!((&e.reconstruct() - &werner_target(&s, 3, 3)).frobenius_norm() < 1e-8);
    }

    #[test]
    fn rank_four_needs_separating_exponents() {
        let s = SchmidtSpectrum::from_values(&[4.0, 3.0, 2.0, 1.0], 1e-12).unwrap();
        let e = werner_separable_ensemble(&s, 4, 5).unwrap();
        assert!((&e.reconstruct() - &werner_target(&s, 4, 5)).frobenius_norm() < 1e-8);
        assert!(e.len() <= 20 + ensemble_root_order(4).n0);
    }

    #[test]
    fn rejects_bad_ranks() {
        let s = SchmidtSpectrum::from_values(&[1.0, 1.0, 1.0], 1e-12).unwrap();
        assert!(werner_separable_ensemble(&s, 2, 3).is_err());
        let p = SchmidtSpectrum::from_values(&[1.0], 1e-12).unwrap();
        assert!(werner_separable_ensemble(&p, 2, 2).is_err());
    }

    fn target(lambda: f64, m1: &Matrix<f64>, m2: &Matrix<f64>, z: &PureState<f64>) -> Matrix<f64> {
        &m1.kron(m2).scale(1.0 - lambda) + &z.projector().scale(lambda)
    }

    #[test]
    fn certify_isotropic() {
        let t = Tolerances::default();
        let h = Matrix::identity(2).scale(0.5);
        for (lambda, bound) in [(0.2, 3 + 4 + 3), (1.0 / 3.0, 3 + 4 + 3), (0.0, 4)] {
            let e = certify_separable(lambda, &h, &h, &psi_plus(), &t).unwrap();
            assert_unit_factors(&e);
            assert!(e.len() <= bound, "{} terms", e.len());
            assert!(
                (&e.reconstruct() - &target(lambda, &h, &h, &psi_plus())).frobenius_norm() < 1e-8
            );
        }
    }

    #[test]
    fn certify_refuses_above_threshold() {
        let h = Matrix::<f64>::identity(2).scale(0.5);
        let r = certify_separable(0.5, &h, &h, &psi_plus(), &Tolerances::default());
        assert!(matches!(r, Err(Error::AboveThreshold { .. })));
    }

    #[test]
    fn certify_random_general_metrics() {
        let t = Tolerances::default();
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for (n1, n2) in [(2, 2), (2, 3), (3, 3)] {
            for _ in 0..5 {
                let m1 = random_pd::<f64, _>(n1, &mut rng);
                let m2 = random_pd::<f64, _>(n2, &mut rng);
                let z = PureState::normalized(
                    DimSpec::bipartite(n1, n2).unwrap(),
                    random_ket(n1 * n2, &mut rng),
                )
                .unwrap();
                let star = lambda_star_pure(&z, &m1, &m2, &t).unwrap();
                for lambda in [0.0, 0.5 * star, star] {
                    let e = certify_separable(lambda, &m1, &m2, &z, &t).unwrap();
                    assert_unit_factors(&e);
                    let res = (&e.reconstruct() - &target(lambda, &m1, &m2, &z)).frobenius_norm();
                    assert!(res < 1e-8, "({n1},{n2}) λ={lambda} residual {res}");
                }
            }
        }
    }

    #[test]
    fn certify_on_rank_deficient_face() {
        let t = Tolerances::default();
        let mut rng = ChaCha8Rng::seed_from_u64(78);
        let m1 = random_psd_rank::<f64, _>(3, 2, &mut rng);
        let m2 = Matrix::identity(2).scale(0.5);
        let f1 = crate::linalg::psd_factor(&m1, 1e-10).unwrap();
        let inner = random_ket::<f64, _>(4, &mut rng);
        let zm = &f1 * &Matrix::from_row_major(2, 2, inner).unwrap();
        let z = PureState::normalized(DimSpec::bipartite(3, 2).unwrap(), zm.into_vec()).unwrap();
        let star = lambda_star_pure(&z, &m1, &m2, &t).unwrap();
        let e = certify_separable(0.9 * star, &m1, &m2, &z, &t).unwrap();
        assert!((&e.reconstruct() - &target(0.9 * star, &m1, &m2, &z)).frobenius_norm() < 1e-8);
    }

    #[test]
    fn certify_product_vector() {
        let t = Tolerances::default();
        let mut rng = ChaCha8Rng::seed_from_u64(79);
        let z = PureState::product(&[random_ket(2, &mut rng), random_ket(2, &mut rng)]).unwrap();
        let m = random_pd::<f64, _>(2, &mut rng);
        let m = m.scale(1.0 / m.trace().re);
        let h = Matrix::identity(2).scale(0.5);
        let e = certify_separable(1.0, &m, &h, &z, &t).unwrap();
        assert!((&e.reconstruct() - &target(1.0, &m, &h, &z)).frobenius_norm() < 1e-8);
    }
}
