//! Genuine multipartite entanglement of `(1−λ)M_1⊗…⊗M_n + λ|z⟩⟨z|` from Schmidt data
//! over every bipartition.
//!
//! The state is genuinely entangled iff `λ > 1/(1 + (∏r_i)·min_cut σ_0σ_1)`, evaluated in
//! the frame where each `M_i` becomes the projector `P_{r_i}` and mapped back through the
//! mixing-weight change of that frame.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{inverse, orthogonal_complementation, psd_factor, singular_values, Matrix};
use crate::scalar::{cr, Real, C};
use crate::states::{
    digits_of, ghz, reshape_amplitudes, w_state, DimSpec, PureState, SchmidtSpectrum,
};
use crate::tolerance::Tolerances;

pub const DEFAULT_MAX_DIM: usize = 4096;

#[derive(Debug, Clone)]
pub struct GenuineOptions<T: Real> {
    pub tol: Tolerances<T>,
    /// Upper bound on the total Hilbert-space dimension.
    pub max_dim: usize,
}

impl<T: Real> Default for GenuineOptions<T> {
    fn default() -> Self {
        Self {
            tol: Tolerances::default(),
            max_dim: DEFAULT_MAX_DIM,
        }
    }
}

/// Schmidt data of one cut `subset | complement`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CutSpectrum<T: Real> {
    /// Sorted factor indices; always contains factor 0.
    pub subset: Vec<usize>,
    pub sigma0: T,
    pub sigma1: T,
    pub product: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BipartitionScan<T: Real> {
    /// One entry per unordered cut, `2^{n−1} − 1` in total, in lexicographic subset order.
    pub cuts: Vec<CutSpectrum<T>>,
    pub min_cut: Vec<usize>,
    pub lambda_star: T,
    /// `1/(1 + (∏r_i)·min σ_0σ_1)` before the mixing-weight remap.
    pub frame_threshold: T,
    /// `‖(⊗F̄_i)^{-1} z‖²`.
    pub c: T,
    pub ranks: Vec<usize>,
}

impl<T: Real> BipartitionScan<T> {
    pub fn min_product(&self) -> T {
        self.cuts
            .iter()
            .find(|c| c.subset == self.min_cut)
            .map(|c| c.product)
            .unwrap_or_else(T::zero)
    }
}

/// Proper subsets of `0..n` containing 0, sorted lexicographically.
pub fn canonical_cuts(n: usize) -> Vec<Vec<usize>> {
    let mut cuts: Vec<Vec<usize>> = (0..(1usize << (n - 1)))
        .map(|mask| {
            let mut s = vec![0];
            s.extend((1..n).filter(|k| mask & (1 << (k - 1)) != 0));
            s
        })
        .filter(|s| s.len() < n)
        .collect();
    cuts.sort();
    cuts
}

/// Applies `op` to factor `k` of a tensor with the given dimensions.
pub(crate) fn apply_local<T: Real>(
    amps: &[C<T>],
    dims: &[usize],
    k: usize,
    op: &Matrix<T>,
) -> Vec<C<T>> {
    let dk = dims[k];
    let inner: usize = dims[k + 1..].iter().product();
    let mut out = vec![cr(T::zero()); amps.len()];
    for (idx, slot) in out.iter_mut().enumerate() {
        let digit = (idx / inner) % dk;
        let base = idx - digit * inner;
        *slot = (0..dk).fold(cr(T::zero()), |acc, l| {
            acc + op[(digit, l)] * amps[base + l * inner]
        });
    }
    out
}

fn check_size(dims: &DimSpec, max_dim: usize) -> Result<()> {
    if dims.total() > max_dim {
        return Err(Error::TooLarge {
            dim: dims.total(),
            cap: max_dim,
        });
    }
    Ok(())
}

/// Threshold scan over all bipartitions of an `n ≥ 3` party vector.
pub fn genuine_threshold<T: Real>(
    z: &PureState<T>,
    metrics: &[Matrix<T>],
    opts: &GenuineOptions<T>,
) -> Result<BipartitionScan<T>> {
    let dims = z.dims();
    let n = dims.parties();
    if n < 3 {
        return Err(Error::InvalidArgument(format!(
            "genuine thresholds need at least 3 parties, got {n}"
        )));
    }
    check_size(dims, opts.max_dim)?;
    if metrics.len() != n {
        return Err(Error::Shape(format!(
            "{} metrics for {n} parties",
            metrics.len()
        )));
    }
    let tol = &opts.tol;
    let mut trace = T::one();
    let mut ranks = Vec::with_capacity(n);
    let mut amps = z.amplitudes().to_vec();
    for (k, m) in metrics.iter().enumerate() {
        if m.rows() != dims.dims()[k] || !m.is_square() {
            return Err(Error::Shape(format!(
                "metric {k} is {}x{}, factor dimension is {}",
                m.rows(),
                m.cols(),
                dims.dims()[k]
            )));
        }
        trace *= m.trace().re;
        let f = psd_factor(m, tol.psd)?;
        ranks.push(f.cols());
        let fbar_inv = inverse(&orthogonal_complementation(&f, tol.rank)?)?;
        amps = apply_local(&amps, dims.dims(), k, &fbar_inv);
    }
    if (trace - T::one()).abs() > tol.recon {
        return Err(Error::InvalidArgument(format!(
            "product of metric traces is {trace}, expected 1"
        )));
    }
    let c = amps.iter().fold(T::zero(), |s, a| s + a.norm_sqr());
    let outside = amps
        .iter()
        .enumerate()
        .filter(|(idx, _)| {
            digits_of(*idx, dims.dims())
                .iter()
                .zip(&ranks)
                .any(|(d, r)| d >= r)
        })
        .fold(T::zero(), |s, (_, a)| s + a.norm_sqr())
        .sqrt();
    if outside > tol.recon.max(T::default_tol()) * c.sqrt().max(T::one()) {
        return Err(Error::Face(format!(
            "vector has weight {outside:e} outside the product of metric ranges"
        )));
    }

    let tie = T::default_tol() * T::lit(1e-2);
    let mut cuts = Vec::new();
    let mut best: Option<(T, Vec<usize>)> = None;
    for subset in canonical_cuts(n) {
        let m = reshape_amplitudes(dims, &amps, &subset)?;
        let s = SchmidtSpectrum::from_values(&singular_values(&m), tol.rank)?;
        let product = s.sigma0() * s.sigma1();
        if best.as_ref().is_none_or(|(p, _)| product < *p - tie) {
            best = Some((product, subset.clone()));
        }
        cuts.push(CutSpectrum {
            subset,
            sigma0: s.sigma0(),
            sigma1: s.sigma1(),
            product,
        });
    }
    let (min_product, min_cut) = best.expect("n >= 3 gives at least one cut");
    let rr = T::from_usize_lossy(ranks.iter().product());
    let t = T::one() / (T::one() + rr * min_product);
    let lambda_star = t * rr / (c * (T::one() - t) + t * rr);
    Ok(BipartitionScan {
        cuts,
        min_cut,
        lambda_star,
        frame_threshold: t,
        c,
        ranks,
    })
}

/// True iff `λ` strictly exceeds the genuine threshold; values within `tol.rank` of it count
/// as at the threshold.
pub fn check_genuine<T: Real>(
    lambda: T,
    z: &PureState<T>,
    metrics: &[Matrix<T>],
    opts: &GenuineOptions<T>,
) -> Result<bool> {
    let scan = genuine_threshold(z, metrics, opts)?;
    Ok(lambda > scan.lambda_star + opts.tol.rank)
}

/// `I/N_i` for every factor.
pub fn isotropic_metrics<T: Real>(dims: &DimSpec) -> Vec<Matrix<T>> {
    dims.dims()
        .iter()
        .map(|&d| Matrix::identity(d).scale(T::one() / T::from_usize_lossy(d)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// `W_n` on qubits.
    W,
    /// `GHZ_n^{(d)}`.
    Ghz { d: usize },
}

impl Family {
    pub fn state<T: Real>(self, n: usize) -> Result<PureState<T>> {
        self.validate(n)?;
        match self {
            Family::W => w_state(n),
            Family::Ghz { d } => ghz(n, d),
        }
    }

    pub fn local_dim(self) -> usize {
        match self {
            Family::W => 2,
            Family::Ghz { d } => d,
        }
    }

    fn validate(self, n: usize) -> Result<()> {
        if n < 3 {
            return Err(Error::InvalidArgument(format!(
                "family needs n >= 3, got {n}"
            )));
        }
        if let Family::Ghz { d } = self {
            if d < 2 {
                return Err(Error::InvalidArgument(format!("GHZ needs d >= 2, got {d}")));
            }
        }
        Ok(())
    }
}

/// Closed-form isotropic-noise threshold: `1/(1 + 2^n√(n−1)/n)` for W, `1/(1 + d^{n−1})` for GHZ.
pub fn family_threshold<T: Real>(family: Family, n: usize) -> Result<T> {
    family.validate(n)?;
    let nn = T::from_usize_lossy(n);
    let g = match family {
        Family::W => T::lit(2.0).powi(n as i32) * (nn - T::one()).sqrt() / nn,
        Family::Ghz { d } => T::from_usize_lossy(d).powi(n as i32 - 1),
    };
    Ok(T::one() / (T::one() + g))
}

/// `g(n) = d^n · min_cut σ_0σ_1` with plain Schmidt coefficients, for each `(n, state)`.
pub fn g_of_n<T: Real>(states: &[(usize, PureState<T>)], d: usize, tol: T) -> Result<Vec<T>> {
    states
        .iter()
        .map(|(n, z)| {
            if z.dims().parties() != *n {
                return Err(Error::Shape(format!(
                    "state has {} parties, expected {n}",
                    z.dims().parties()
                )));
            }
            let mut min = T::infinity();
            for subset in canonical_cuts(*n) {
                let m = reshape_amplitudes(z.dims(), z.amplitudes(), &subset)?;
                let s = SchmidtSpectrum::from_values(&singular_values(&m), tol)?;
                min = min.min(s.sigma0() * s.sigma1());
            }
            Ok(T::from_usize_lossy(d).powi(*n as i32) * min)
        })
        .collect()
}

/// Threshold scan of `G_1⊗…⊗G_n|ψ⟩` (renormalized) for invertible `G_i`.
pub fn slocc_threshold<T: Real>(
    psi: &PureState<T>,
    ops: &[Matrix<T>],
    metrics: &[Matrix<T>],
    opts: &GenuineOptions<T>,
) -> Result<BipartitionScan<T>> {
    let dims = psi.dims();
    if ops.len() != dims.parties() {
        return Err(Error::Shape(format!(
            "{} local operators for {} parties",
            ops.len(),
            dims.parties()
        )));
    }
    check_size(dims, opts.max_dim)?;
    let mut amps = psi.amplitudes().to_vec();
    for (k, g) in ops.iter().enumerate() {
        if g.rows() != dims.dims()[k] || !g.is_square() {
            return Err(Error::Shape(format!(
                "local operator {k} does not match factor dimension"
            )));
        }
        inverse(g).map_err(|_| Error::RankDeficient(format!("local operator {k} is singular")))?;
        amps = apply_local(&amps, dims.dims(), k, g);
    }
    let z = PureState::normalized(dims.clone(), amps)?;
    genuine_threshold(&z, metrics, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::kron_vec;
    use crate::random::{random_ket, random_pd, random_unitary};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn opts() -> GenuineOptions<f64> {
        GenuineOptions::default()
    }

    fn iso(z: &PureState<f64>) -> Vec<Matrix<f64>> {
        isotropic_metrics(z.dims())
    }

    #[test]
    fn cut_counts_and_order() {
        for n in 3..=6 {
            assert_eq!(canonical_cuts(n).len(), (1 << (n - 1)) - 1);
        }
        assert_eq!(canonical_cuts(3), vec![vec![0], vec![0, 1], vec![0, 2]]);
    }

    #[test]
    fn ghz3_and_w3() {
        let g = ghz::<f64>(3, 2).unwrap();
        let s = genuine_threshold(&g, &iso(&g), &opts()).unwrap();
        assert!((s.lambda_star - 0.2).abs() < 1e-12);
        assert_eq!(s.min_cut, vec![0]);
        let w = w_state::<f64>(3).unwrap();
        let s = genuine_threshold(&w, &iso(&w), &opts()).unwrap();
        let expected = 1.0 / (1.0 + 8.0 * 2f64.sqrt() / 3.0);
        assert!((s.lambda_star - expected).abs() < 1e-12);
    }

    #[test]
    fn product_vector_threshold_is_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let kets: Vec<_> = (0..3).map(|_| random_ket::<f64, _>(2, &mut rng)).collect();
        let z = PureState::product(&kets).unwrap();
        let s = genuine_threshold(&z, &iso(&z), &opts()).unwrap();
        assert!(s.cuts.iter().all(|c| c.sigma1 == 0.0));
        assert!((s.lambda_star - 1.0).abs() < 1e-12);
    }

    #[test]
    fn strict_inequality() {
        let g = ghz::<f64>(3, 2).unwrap();
        let m = iso(&g);
        assert!(check_genuine(0.25, &g, &m, &opts()).unwrap());
        assert!(!check_genuine(0.2, &g, &m, &opts()).unwrap());
        assert!(!check_genuine(0.0, &g, &m, &opts()).unwrap());
    }

    #[test]
    fn bipartite_input_rejected() {
        let z = crate::states::psi_plus::<f64>();
        assert!(genuine_threshold(&z, &iso(&z), &opts()).is_err());
    }

    #[test]
    fn families_match_scans() {
        let cases: Vec<(Family, Vec<usize>)> = vec![
            (Family::W, (3..=6).collect()),
            (Family::Ghz { d: 2 }, (3..=6).collect()),
            (Family::Ghz { d: 3 }, (3..=4).collect()),
        ];
        for (fam, ns) in cases {
            for n in ns {
                let z = fam.state::<f64>(n).unwrap();
                let scan = genuine_threshold(&z, &iso(&z), &opts()).unwrap();
                let closed: f64 = family_threshold(fam, n).unwrap();
                assert!((scan.lambda_star - closed).abs() < 1e-10, "{fam:?} n={n}");
            }
        }
        assert!(
            (family_threshold::<f64>(Family::W, 4).unwrap() - 1.0 / (1.0 + 4.0 * 3f64.sqrt()))
                .abs()
                < 1e-15
        );
        assert!(
            (family_threshold::<f64>(Family::Ghz { d: 3 }, 4).unwrap() - 1.0 / 28.0).abs() < 1e-15
        );
        assert!(family_threshold::<f64>(Family::Ghz { d: 1 }, 4).is_err());
        assert!(family_threshold::<f64>(Family::W, 2).is_err());
    }

    #[test]
    fn symmetric_states_have_equal_cuts_by_size() {
        for z in [ghz::<f64>(5, 2).unwrap(), w_state::<f64>(5).unwrap()] {
            let scan = genuine_threshold(&z, &iso(&z), &opts()).unwrap();
            for a in &scan.cuts {
                for b in &scan.cuts {
                    let (la, lb) = (
                        a.subset.len().min(5 - a.subset.len()),
                        b.subset.len().min(5 - b.subset.len()),
                    );
                    if la == lb {
                        assert!((a.product - b.product).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn g_of_n_values() {
        let ghz_states: Vec<_> = (3..=6).map(|n| (n, ghz::<f64>(n, 2).unwrap())).collect();
        let g = g_of_n(&ghz_states, 2, 1e-10).unwrap();
        for (v, e) in g.iter().zip([4.0, 8.0, 16.0, 32.0]) {
            assert!((v - e).abs() < 1e-10);
        }
        let w_states: Vec<_> = (3..=5).map(|n| (n, w_state::<f64>(n).unwrap())).collect();
        for ((n, _), v) in w_states.iter().zip(g_of_n(&w_states, 2, 1e-10).unwrap()) {
            let nn = *n as f64;
            assert!((v - 2f64.powi(*n as i32) * (nn - 1.0).sqrt() / nn).abs() < 1e-10);
        }
        let prod: Vec<_> = (3..=4)
            .map(|n| {
                (
                    n,
                    PureState::basis(DimSpec::new(vec![2; n]).unwrap(), &vec![0; n]).unwrap(),
                )
            })
            .collect();
        assert!(g_of_n(&prod, 2, 1e-10).unwrap().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn slocc_unitary_invariance_and_deformation() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = ghz::<f64>(3, 2).unwrap();
        let m = iso(&g);
        let eye: Vec<Matrix<f64>> = (0..3).map(|_| Matrix::identity(2)).collect();
        let base = genuine_threshold(&g, &m, &opts()).unwrap().lambda_star;
        assert!((slocc_threshold(&g, &eye, &m, &opts()).unwrap().lambda_star - base).abs() < 1e-12);
        let us: Vec<Matrix<f64>> = (0..3).map(|_| random_unitary(2, &mut rng)).collect();
        assert!((slocc_threshold(&g, &us, &m, &opts()).unwrap().lambda_star - 0.2).abs() < 1e-10);

        let w = w_state::<f64>(3).unwrap();
        let norm = 5f64.sqrt();
        let g1 = Matrix::from_real_diag(&[2.0 / norm, 1.0 / norm]);
        let ops = vec![g1, Matrix::identity(2), Matrix::identity(2)];
        let via = slocc_threshold(&w, &ops, &m, &opts()).unwrap().lambda_star;
        // |W'⟩ ∝ |100⟩ + 2|010⟩ + 2|001⟩, built directly.
        let e =
            |b: [usize; 3]| PureState::<f64>::basis(DimSpec::new(vec![2; 3]).unwrap(), &b).unwrap();
        let amps: Vec<C<f64>> = e([1, 0, 0])
            .amplitudes()
            .iter()
            .zip(e([0, 1, 0]).amplitudes())
            .zip(e([0, 0, 1]).amplitudes())
            .map(|((a, b), c)| *a + *b * 2.0 + *c * 2.0)
            .collect();
        let direct = PureState::normalized(DimSpec::new(vec![2; 3]).unwrap(), amps).unwrap();
        let d = genuine_threshold(&direct, &m, &opts()).unwrap().lambda_star;
        assert!((via - d).abs() < 1e-12);
        assert!(via > 1.0 / (1.0 + 8.0 * 2f64.sqrt() / 3.0));

        let mut singular = Matrix::identity(2);
        singular[(1, 1)] = cr(0.0);
        let bad = vec![singular, Matrix::identity(2), Matrix::identity(2)];
        assert!(slocc_threshold(&w, &bad, &m, &opts()).is_err());
    }

    #[test]
    fn dimension_cap() {
        let z = ghz::<f64>(13, 2).unwrap();
        let r = genuine_threshold(&z, &iso(&z), &opts());
        assert!(matches!(r, Err(Error::TooLarge { .. })));
    }

    #[test]
    fn general_metrics_reduce_to_bipartite_on_product_cuts() {
        // z = z_AB ⊗ c: the minimum cut separates C, σ_1 = 0 there, so λ* = 1.
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let ab = random_ket::<f64, _>(4, &mut rng);
        let c = random_ket::<f64, _>(2, &mut rng);
        let z =
            PureState::normalized(DimSpec::new(vec![2, 2, 2]).unwrap(), kron_vec(&ab, &c)).unwrap();
        let ms: Vec<Matrix<f64>> = (0..3)
            .map(|_| {
                let m = random_pd::<f64, _>(2, &mut rng);
                m.scale(1.0 / m.trace().re)
            })
            .collect();
        let s = genuine_threshold(&z, &ms, &opts()).unwrap();
        assert!((s.lambda_star - 1.0).abs() < 1e-10);
        assert_eq!(s.min_cut, vec![0, 1]);
    }
}
