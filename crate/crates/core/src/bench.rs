//! Seeded comparison of [`check`](crate::separability::check) against the PPT oracle on
//! random Werner-type mixtures `(1−λ)M_1⊗M_2 + λE`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::random::{random_ket, random_pd};
use crate::separability::{check, ppt_boundary, CheckOptions, Status};
use crate::states::{DimSpec, MixedState, PureState};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BenchConfig {
    pub dims: (usize, usize),
    pub instances: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct BenchCounts {
    pub separable_certified: usize,
    pub entangled_certified: usize,
    pub inconclusive: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRecord {
    pub index: usize,
    pub dims: [usize; 2],
    /// Rank of the boundary term `E` used to build the instance.
    pub k: usize,
    pub lambda: f64,
    pub lambda_star: Option<f64>,
    pub lambda_bar: Option<f64>,
    pub lambda_ppt: f64,
    pub verdict: Status,
    pub criterion: String,
    pub ppt_agrees: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub seed: u64,
    pub dims: [usize; 2],
    pub instances: usize,
    pub counts: BenchCounts,
    /// Fraction of decided instances whose verdict matches `λ ≤ λ_PPT`; `None` if none decided.
    pub ppt_agreement_rate: Option<f64>,
    /// Same rate restricted to rank-one `E`.
    pub k1_ppt_agreement_rate: Option<f64>,
    pub records: Vec<BenchRecord>,
}

impl BenchReport {
    /// Pretty JSON with a fixed field order and trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report is serializable");
        s.push('\n');
        s
    }
}

/// Mixing weights stay strictly inside (0, 1) so every instance has full-rank `ρ`.
const LAMBDA_CAP: f64 = 0.98;

pub fn run_bench(cfg: &BenchConfig) -> Result<BenchReport> {
    if cfg.instances == 0 {
        return Err(Error::InvalidArgument(
            "instances must be at least 1".into(),
        ));
    }
    let (n1, n2) = cfg.dims;
    let dims = DimSpec::bipartite(n1, n2)?;
    let n = n1 * n2;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut records = Vec::with_capacity(cfg.instances);
    let mut counts = BenchCounts::default();
    for index in 0..cfg.instances {
        let m1 = random_pd::<f64, _>(n1, &mut rng);
        let m2 = random_pd::<f64, _>(n2, &mut rng);
        let c = MixedState::new(dims.clone(), m1.kron(&m2))?;
        let k = if rng.random_bool(0.5) { 1 } else { 2 };
        let z1 = MixedState::from_pure(&PureState::normalized(
            dims.clone(),
            random_ket(n, &mut rng),
        )?);
        let e = if k == 1 {
            z1
        } else {
            let z2 = MixedState::from_pure(&PureState::normalized(
                dims.clone(),
                random_ket(n, &mut rng),
            )?);
            let p = rng.random_range(0.2..0.8);
            MixedState::mixture(&z1, &z2, p)?
        };
        let lambda_ppt = ppt_boundary(&c, &e)?;
        let lambda = (lambda_ppt * rng.random_range(0.2..1.6)).min(LAMBDA_CAP);
        let rho = MixedState::mixture(&c, &e, lambda)?;
        let v = check(&rho, &CheckOptions::with_product(m1, m2));
        let ppt_sep = lambda <= lambda_ppt;
        let ppt_agrees = match v.status {
            Status::Separable => {
                counts.separable_certified += 1;
                Some(ppt_sep)
            }
            Status::Entangled => {
                counts.entangled_certified += 1;
                Some(!ppt_sep)
            }
            Status::Inconclusive => {
                counts.inconclusive += 1;
                None
            }
        };
        records.push(BenchRecord {
            index,
            dims: [n1, n2],
            k,
            lambda,
            lambda_star: v.lambda_star,
            lambda_bar: v.lambda_bar,
            lambda_ppt,
            verdict: v.status,
            criterion: v.criterion,
            ppt_agrees,
        });
    }
    let rate = |pred: &dyn Fn(&BenchRecord) -> bool| {
        let decided: Vec<bool> = records
            .iter()
            .filter(|r| pred(r))
            .filter_map(|r| r.ppt_agrees)
            .collect();
        (!decided.is_empty())
            .then(|| decided.iter().filter(|&&a| a).count() as f64 / decided.len() as f64)
    };
    Ok(BenchReport {
        seed: cfg.seed,
        dims: [n1, n2],
        instances: cfg.instances,
        ppt_agreement_rate: rate(&|_| true),
        k1_ppt_agreement_rate: rate(&|r| r.k == 1),
        counts,
        records,
    })
}
