//! Quantum-state data model: tensor dimensions, pure and mixed states, coefficient-matrix
//! reshapes, Schmidt spectra and the partial transpose.

use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, gsvd_tol, kron_vec, singular_values, vec_norm, Matrix};
use crate::scalar::{cr, Real, C};

/// Ordered local dimensions `N_1, …, N_n` of a tensor-product space.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DimSpec {
    dims: Vec<usize>,
}

impl DimSpec {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.len() < 2 {
            return Err(Error::Shape(format!(
                "a composite system needs at least two factors, got {}",
                dims.len()
            )));
        }
        if dims.contains(&0) {
            return Err(Error::Shape("local dimensions must be at least 1".into()));
        }
        Ok(Self { dims })
    }

    pub fn bipartite(n1: usize, n2: usize) -> Result<Self> {
        Self::new(vec![n1, n2])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn parties(&self) -> usize {
        self.dims.len()
    }

    pub fn total(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_bipartite(&self) -> bool {
        self.dims.len() == 2
    }

    /// `(N_1, N_2)` for bipartite systems.
    pub fn pair(&self) -> Result<(usize, usize)> {
        if self.is_bipartite() {
            Ok((self.dims[0], self.dims[1]))
        } else {
            Err(Error::Shape(format!(
                "expected a bipartite system, got {} factors",
                self.dims.len()
            )))
        }
    }

    /// Product of the local dimensions of the listed factors.
    pub fn dim_of(&self, factors: &[usize]) -> usize {
        factors.iter().map(|&k| self.dims[k]).product()
    }
}

/// Normalized pure state on a tensor-product space.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState<T: Real> {
    dims: DimSpec,
    amps: Vec<C<T>>,
}

impl<T: Real> PureState<T> {
    /// Validates length and unit norm (within the default tolerance).
    pub fn new(dims: DimSpec, amps: Vec<C<T>>) -> Result<Self> {
        if amps.len() != dims.total() {
            return Err(Error::InvalidState(format!(
                "{} amplitudes for total dimension {}",
                amps.len(),
                dims.total()
            )));
        }
        if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidState("non-finite amplitude".into()));
        }
        let norm = vec_norm(&amps);
        if (norm - T::one()).abs() > T::default_tol() {
            return Err(Error::InvalidState(format!("norm {norm} is not 1")));
        }
        Ok(Self { dims, amps })
    }

    /// Rescales `amps` to unit norm.
    pub fn normalized(dims: DimSpec, amps: Vec<C<T>>) -> Result<Self> {
        let norm = vec_norm(&amps);
        if norm == T::zero() || !norm.is_finite() {
            return Err(Error::InvalidState("cannot normalize a zero vector".into()));
        }
        Self::new(dims, amps.into_iter().map(|z| z / norm).collect())
    }

    /// Tensor product of local kets (each normalized independently).
    pub fn product(kets: &[Vec<C<T>>]) -> Result<Self> {
        let dims = DimSpec::new(kets.iter().map(|k| k.len()).collect())?;
        let mut amps = vec![cr(T::one())];
        for k in kets {
            let n = vec_norm(k);
            let unit: Vec<C<T>> = k.iter().map(|z| *z / n).collect();
            amps = kron_vec(&amps, &unit);
        }
        Self::normalized(dims, amps)
    }

    /// Computational basis state `|i_1 … i_n⟩`.
    pub fn basis(dims: DimSpec, digits: &[usize]) -> Result<Self> {
        if digits.len() != dims.parties() || digits.iter().zip(dims.dims()).any(|(&i, &d)| i >= d) {
            return Err(Error::InvalidState("basis digits out of range".into()));
        }
        let idx = digits
            .iter()
            .zip(dims.dims())
            .fold(0, |acc, (&i, &d)| acc * d + i);
        let mut amps = vec![cr(T::zero()); dims.total()];
        amps[idx] = cr(T::one());
        Self::new(dims, amps)
    }

    pub fn dims(&self) -> &DimSpec {
        &self.dims
    }

    pub fn amplitudes(&self) -> &[C<T>] {
        &self.amps
    }

    pub fn projector(&self) -> Matrix<T> {
        Matrix::outer(&self.amps, &self.amps)
    }
}

/// Density matrix tagged with its tensor structure.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedState<T: Real> {
    dims: DimSpec,
    matrix: Matrix<T>,
}

impl<T: Real> MixedState<T> {
    /// Validates Hermiticity, unit trace and positivity within the default tolerance.
    pub fn new(dims: DimSpec, matrix: Matrix<T>) -> Result<Self> {
        let tol = T::default_tol();
        if matrix.rows() != dims.total() || !matrix.is_square() {
            return Err(Error::InvalidState(format!(
                "{}x{} matrix for total dimension {}",
                matrix.rows(),
                matrix.cols(),
                dims.total()
            )));
        }
        if !matrix.is_hermitian(tol) {
            return Err(Error::InvalidState(
                "density matrix is not Hermitian".into(),
            ));
        }
        let matrix = matrix.hermitian_part();
        let tr = matrix.trace().re;
        if (tr - T::one()).abs() > tol {
            return Err(Error::InvalidState(format!("trace {tr} is not 1")));
        }
        let e = eig_hermitian(&matrix)?;
        if e.min() < -tol {
            return Err(Error::NotPsd {
                min_eig: e.min().to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(Self { dims, matrix })
    }

    /// Divides by the trace, then validates.
    pub fn from_unnormalized(dims: DimSpec, matrix: Matrix<T>) -> Result<Self> {
        let tr = matrix.trace().re;
        if tr.is_nan() || tr <= T::zero() {
            return Err(Error::InvalidState(format!("trace {tr} is not positive")));
        }
        Self::new(dims, matrix.scale(T::one() / tr))
    }

    pub fn from_pure(z: &PureState<T>) -> Self {
        Self {
            dims: z.dims.clone(),
            matrix: z.projector(),
        }
    }

    pub fn maximally_mixed(dims: DimSpec) -> Self {
        let n = dims.total();
        Self {
            matrix: Matrix::identity(n).scale(T::one() / T::from_usize_lossy(n)),
            dims,
        }
    }

    /// `(1−λ) I/N + λ |z⟩⟨z|`.
    pub fn werner(z: &PureState<T>, lambda: T) -> Result<Self> {
        Self::mixture(
            &Self::maximally_mixed(z.dims.clone()),
            &Self::from_pure(z),
            lambda,
        )
    }

    /// `(1−λ) a + λ b` for λ ∈ [0, 1].
    pub fn mixture(a: &Self, b: &Self, lambda: T) -> Result<Self> {
        if a.dims != b.dims {
            return Err(Error::Shape(
                "mixing states with different dimensions".into(),
            ));
        }
        if !(lambda >= T::zero() && lambda <= T::one()) {
            return Err(Error::InvalidArgument(format!(
                "mixing weight {lambda} not in [0,1]"
            )));
        }
        Ok(Self {
            dims: a.dims.clone(),
            matrix: &a.matrix.scale(T::one() - lambda) + &b.matrix.scale(lambda),
        })
    }

    pub fn dims(&self) -> &DimSpec {
        &self.dims
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix<T> {
        self.matrix
    }
}

/// Nonincreasing positive (generalized) Schmidt coefficients with unit 2-norm.
#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtSpectrum<T: Real> {
    sigmas: Vec<T>,
}

impl<T: Real> SchmidtSpectrum<T> {
    /// Sorts, drops values `≤ tol · max`, and renormalizes to `Σσ² = 1`.
    pub fn from_values(values: &[T], tol: T) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite() || *v < T::zero()) {
            return Err(Error::InvalidArgument(
                "spectrum entries must be finite and >= 0".into(),
            ));
        }
        let mut v: Vec<T> = values.to_vec();
        v.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let max = v.first().copied().unwrap_or_else(T::zero);
        if max <= T::zero() {
            return Err(Error::InvalidArgument(
                "spectrum has no positive entry".into(),
            ));
        }
        v.retain(|&x| x > tol * max);
        let norm = v.iter().fold(T::zero(), |s, &x| s + x * x).sqrt();
        Ok(Self {
            sigmas: v.into_iter().map(|x| x / norm).collect(),
        })
    }

    pub fn sigmas(&self) -> &[T] {
        &self.sigmas
    }

    pub fn rank(&self) -> usize {
        self.sigmas.len()
    }

    pub fn sigma0(&self) -> T {
        self.sigmas[0]
    }

    /// Second coefficient; zero for product states.
    pub fn sigma1(&self) -> T {
        self.sigmas.get(1).copied().unwrap_or_else(T::zero)
    }

    pub fn is_product(&self) -> bool {
        self.rank() == 1
    }

    /// `|σ⟩ = Σ_i σ_i |ii⟩` embedded in `C^{n1} ⊗ C^{n2}`.
    pub fn canonical_state(&self, n1: usize, n2: usize) -> Result<PureState<T>> {
        if self.rank() > n1.min(n2) {
            return Err(Error::InvalidArgument(format!(
                "Schmidt rank {} exceeds min({n1}, {n2})",
                self.rank()
            )));
        }
        let mut amps = vec![cr(T::zero()); n1 * n2];
        for (i, &s) in self.sigmas.iter().enumerate() {
            amps[i * n2 + i] = cr(s);
        }
        PureState::new(DimSpec::bipartite(n1, n2)?, amps)
    }
}

/// `N_1 × N_2` coefficient matrix `C(z)[i1, i2] = ⟨i1 i2|z⟩`.
pub fn coefficient_matrix<T: Real>(z: &PureState<T>) -> Result<Matrix<T>> {
    let (n1, n2) = z.dims.pair()?;
    Matrix::from_row_major(n1, n2, z.amps.clone())
}

fn validate_part(n: usize, part: &[usize]) -> Result<Vec<usize>> {
    let mut p = part.to_vec();
    p.sort_unstable();
    p.dedup();
    if p.is_empty() || p.len() >= n || p.iter().any(|&k| k >= n) {
        return Err(Error::InvalidArgument(format!(
            "bipartition {part:?} must be a nonempty proper subset of 0..{n}"
        )));
    }
    Ok(p)
}

/// Splits a flat basis index into per-factor digits (first factor most significant).
pub(crate) fn digits_of(mut idx: usize, dims: &[usize]) -> Vec<usize> {
    let mut d = vec![0; dims.len()];
    for k in (0..dims.len()).rev() {
        d[k] = idx % dims[k];
        idx /= dims[k];
    }
    d
}

/// Reshapes amplitudes into a matrix with rows indexed by the factors in `part`
/// (ascending) and columns by the complement.
pub fn reshape_amplitudes<T: Real>(
    dims: &DimSpec,
    amps: &[C<T>],
    part: &[usize],
) -> Result<Matrix<T>> {
    let n = dims.parties();
    let p = validate_part(n, part)?;
    let q: Vec<usize> = (0..n).filter(|k| !p.contains(k)).collect();
    let rows = dims.dim_of(&p);
    let cols = dims.dim_of(&q);
    let mut m = Matrix::zeros(rows, cols);
    for (idx, &a) in amps.iter().enumerate() {
        let d = digits_of(idx, dims.dims());
        let r = p.iter().fold(0, |acc, &k| acc * dims.dims()[k] + d[k]);
        let c = q.iter().fold(0, |acc, &k| acc * dims.dims()[k] + d[k]);
        m[(r, c)] = a;
    }
    Ok(m)
}

pub fn bipartition_reshape<T: Real>(z: &PureState<T>, part: &[usize]) -> Result<Matrix<T>> {
    reshape_amplitudes(&z.dims, &z.amps, part)
}

/// Schmidt coefficients of `z` across the cut `part | complement`.
pub fn schmidt_coefficients<T: Real>(
    z: &PureState<T>,
    part: &[usize],
    tol: T,
) -> Result<SchmidtSpectrum<T>> {
    let m = bipartition_reshape(z, part)?;
    SchmidtSpectrum::from_values(&singular_values(&m), tol)
}

/// Generalized Schmidt coefficients of a bipartite `z` with respect to metrics `(a, b)`,
/// renormalized to unit 2-norm.
pub fn generalized_schmidt<T: Real>(
    z: &PureState<T>,
    a: &Matrix<T>,
    b: &Matrix<T>,
    tol: T,
) -> Result<SchmidtSpectrum<T>> {
    let cm = coefficient_matrix(z)?;
    let g = gsvd_tol(&cm, a, b, tol)?;
    SchmidtSpectrum::from_values(&g.sigmas, tol)
}

/// Which tensor factor a partial operation acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Factor {
    #[default]
    First,
    Second,
}

/// Partial transpose of an `(n1·n2)`-square matrix on one factor.
pub fn partial_transpose_matrix<T: Real>(
    m: &Matrix<T>,
    n1: usize,
    n2: usize,
    factor: Factor,
) -> Matrix<T> {
    let n = n1 * n2;
    assert_eq!(m.rows(), n, "partial transpose dimension mismatch");
    Matrix::from_fn(n, n, |r, c| {
        let (i, j) = (r / n2, r % n2);
        let (k, l) = (c / n2, c % n2);
        match factor {
            Factor::First => m[(k * n2 + j, i * n2 + l)],
            Factor::Second => m[(i * n2 + l, k * n2 + j)],
        }
    })
}

pub fn partial_transpose<T: Real>(rho: &MixedState<T>, factor: Factor) -> Result<Matrix<T>> {
    let (n1, n2) = rho.dims.pair()?;
    Ok(partial_transpose_matrix(&rho.matrix, n1, n2, factor))
}

/// Reduced matrix on the kept factor of a bipartite operator.
pub fn partial_trace_matrix<T: Real>(
    m: &Matrix<T>,
    n1: usize,
    n2: usize,
    keep: Factor,
) -> Matrix<T> {
    match keep {
        Factor::First => Matrix::from_fn(n1, n1, |i, k| {
            (0..n2).fold(cr(T::zero()), |acc, j| acc + m[(i * n2 + j, k * n2 + j)])
        }),
        Factor::Second => Matrix::from_fn(n2, n2, |j, l| {
            (0..n1).fold(cr(T::zero()), |acc, i| acc + m[(i * n2 + j, i * n2 + l)])
        }),
    }
}

/// Minimum eigenvalue of the partial transpose (first factor).
pub fn ppt_min_eigenvalue<T: Real>(m: &Matrix<T>, n1: usize, n2: usize) -> Result<T> {
    let pt = partial_transpose_matrix(m, n1, n2, Factor::First);
    Ok(eig_hermitian(&pt.hermitian_part())?.min())
}

/// `(min eigenvalue of ρ^{T_1} ≥ −tol, min eigenvalue)`.
pub fn is_ppt<T: Real>(rho: &MixedState<T>, tol: T) -> Result<(bool, T)> {
    let (n1, n2) = rho.dims.pair()?;
    let min = ppt_min_eigenvalue(&rho.matrix, n1, n2)?;
    Ok((min >= -tol, min))
}

/// `|Ψ⁺⟩ = (|00⟩ + |11⟩)/√2`.
pub fn psi_plus<T: Real>() -> PureState<T> {
    ghz(2, 2).expect("valid")
}

/// `|GHZ_n^{(d)}⟩ = Σ_i |i…i⟩ / √d`.
pub fn ghz<T: Real>(n: usize, d: usize) -> Result<PureState<T>> {
    let dims = DimSpec::new(vec![d; n])?;
    let total = dims.total();
    let mut amps = vec![cr(T::zero()); total];
    // |i…i⟩ has flat index i·(d^n − 1)/(d − 1)
    let stride = if d > 1 { (total - 1) / (d - 1) } else { 0 };
    for i in 0..d {
        amps[i * stride] = cr(T::one());
    }
    PureState::normalized(dims, amps)
}

/// `|W_n⟩`: uniform superposition of single excitations of n qubits.
pub fn w_state<T: Real>(n: usize) -> Result<PureState<T>> {
    let dims = DimSpec::new(vec![2; n])?;
    let mut amps = vec![cr(T::zero()); dims.total()];
    for k in 0..n {
        amps[1 << k] = cr(T::one());
    }
    PureState::normalized(dims, amps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::random_ket;
    use crate::scalar::c;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn coefficient_matrix_of_psi_plus() {
        let m = coefficient_matrix(&psi_plus::<f64>()).unwrap();
        assert!((&m - &Matrix::identity(2).scale(H)).frobenius_norm() < 1e-15);
    }

    #[test]
    fn coefficient_matrix_of_basis_state() {
        let z = PureState::<f64>::basis(DimSpec::bipartite(2, 2).unwrap(), &[0, 1]).unwrap();
        let m = coefficient_matrix(&z).unwrap();
        assert_eq!(m[(0, 1)], cr(1.0));
        assert!((m.frobenius_norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn coefficient_matrix_rejects_tripartite() {
        assert!(coefficient_matrix(&ghz::<f64>(3, 2).unwrap()).is_err());
    }

    #[test]
    fn random_coefficient_matrix_has_unit_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let z = PureState::new(
            DimSpec::bipartite(3, 4).unwrap(),
            random_ket::<f64, _>(12, &mut rng),
        )
        .unwrap();
        assert!((coefficient_matrix(&z).unwrap().frobenius_norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ghz_reshape() {
        let m = bipartition_reshape(&ghz::<f64>(3, 2).unwrap(), &[0]).unwrap();
        assert_eq!((m.rows(), m.cols()), (2, 4));
        assert!((m[(0, 0)].re - H).abs() < 1e-15);
        assert!((m[(1, 3)].re - H).abs() < 1e-15);
        assert!((m.frobenius_norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn product_reshape_is_rank_one() {
        let z = PureState::<f64>::product(&[
            vec![cr(1.0), c(0.0, 1.0)],
            vec![cr(0.3), cr(0.4), cr(0.5)],
            vec![cr(2.0), cr(-1.0)],
        ])
        .unwrap();
        let m = bipartition_reshape(&z, &[0, 1]).unwrap();
        assert_eq!(crate::linalg::rank_tol(&m, 1e-10), 1);
    }

    #[test]
    fn reshape_rejects_bad_parts() {
        let z = ghz::<f64>(3, 2).unwrap();
        assert!(bipartition_reshape(&z, &[]).is_err());
        assert!(bipartition_reshape(&z, &[0, 1, 2]).is_err());
        assert!(bipartition_reshape(&z, &[5]).is_err());
    }

    #[test]
    fn schmidt_examples() {
        let s = schmidt_coefficients(&psi_plus::<f64>(), &[0], 1e-10).unwrap();
        assert_eq!(s.rank(), 2);
        assert!((s.sigma0() - H).abs() < 1e-15 && (s.sigma1() - H).abs() < 1e-15);

        let w = schmidt_coefficients(&w_state::<f64>(3).unwrap(), &[0], 1e-10).unwrap();
        assert!((w.sigma0() - (2.0f64 / 3.0).sqrt()).abs() < 1e-14);
        assert!((w.sigma1() - (1.0f64 / 3.0).sqrt()).abs() < 1e-14);

        let p =
            PureState::<f64>::product(&[vec![cr(1.0), cr(1.0)], vec![cr(1.0), cr(-1.0)]]).unwrap();
        let s = schmidt_coefficients(&p, &[0], 1e-10).unwrap();
        assert_eq!(s.rank(), 1);
        assert!((s.sigma0() - 1.0).abs() < 1e-14);
        assert_eq!(s.sigma1(), 0.0);
    }

    #[test]
    fn generalized_schmidt_scaled_identity() {
        let two = Matrix::identity(2).scale(2.0);
        let s = generalized_schmidt(&psi_plus::<f64>(), &two, &two, 1e-10).unwrap();
        assert!((s.sigma0() - H).abs() < 1e-14 && (s.sigma1() - H).abs() < 1e-14);
    }

    #[test]
    fn partial_transpose_of_psi_plus() {
        let rho = MixedState::from_pure(&psi_plus::<f64>());
        let pt = partial_transpose(&rho, Factor::First).unwrap();
        let e = eig_hermitian(&pt).unwrap();
        let expected = [-0.5, 0.5, 0.5, 0.5];
        for (a, b) in e.eigenvalues.iter().zip(expected) {
            assert!((a - b).abs() < 1e-14);
        }
        assert!(!is_ppt(&rho, 1e-12).unwrap().0);
    }

    #[test]
    fn partial_transpose_real_product_invariant() {
        let m1 = Matrix::<f64>::from_fn(2, 2, |i, j| {
            cr(if i == j { 0.7 - 0.4 * i as f64 } else { 0.1 })
        });
        let m2 = Matrix::<f64>::from_real_diag(&[0.25, 0.75]);
        let prod = m1.kron(&m2);
        let pt = partial_transpose_matrix(&prod, 2, 2, Factor::First);
        assert!((&pt - &prod).frobenius_norm() < 1e-15);
    }

    #[test]
    fn isotropic_ppt_boundary() {
        let lambda = 1.0 / 3.0;
        let rho = MixedState::werner(&psi_plus::<f64>(), lambda).unwrap();
        let (ok, min) = is_ppt(&rho, 1e-12).unwrap();
        assert!(ok);
        assert!(min.abs() < 1e-12);
        for lambda in [0.1, 0.2, 0.6] {
            let rho = MixedState::werner(&psi_plus::<f64>(), lambda).unwrap();
            let min = is_ppt(&rho, 1e-12).unwrap().1;
            assert!((min - ((1.0 - lambda) / 4.0 - lambda / 2.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn partial_trace_of_product() {
        let a = Matrix::<f64>::from_real_diag(&[0.2, 0.8]);
        let b = Matrix::<f64>::from_real_diag(&[0.1, 0.3, 0.6]);
        let m = a.kron(&b);
        assert!((&partial_trace_matrix(&m, 2, 3, Factor::First) - &a).frobenius_norm() < 1e-15);
        assert!((&partial_trace_matrix(&m, 2, 3, Factor::Second) - &b).frobenius_norm() < 1e-15);
    }

    #[test]
    fn mixed_state_validation() {
        let dims = DimSpec::bipartite(2, 2).unwrap();
        assert!(MixedState::<f64>::new(dims.clone(), Matrix::identity(4)).is_err());
        assert!(MixedState::<f64>::new(
            dims.clone(),
            Matrix::from_real_diag(&[0.5, 0.5, 0.5, -0.5])
        )
        .is_err());
        assert!(MixedState::<f64>::new(dims, Matrix::identity(4).scale(0.25)).is_ok());
    }

    #[test]
    fn spectrum_normalizes_and_truncates() {
        let s = SchmidtSpectrum::<f64>::from_values(&[1.0, 3.0, 0.0, 2.0], 1e-10).unwrap();
        assert_eq!(s.rank(), 3);
        let n: f64 = 14f64.sqrt();
        assert!((s.sigmas()[0] - 3.0 / n).abs() < 1e-15);
        assert!(SchmidtSpectrum::<f64>::from_values(&[0.0], 1e-10).is_err());
    }
}
