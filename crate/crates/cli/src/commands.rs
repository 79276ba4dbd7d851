use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use conesep::bench::{run_bench, BenchConfig};
use conesep::cone::{decompose, face_of, product_face_center, spectral_ensemble};
use conesep::linalg::rank_tol;
use conesep::multipartite::{
    genuine_threshold, isotropic_metrics, GenuineOptions, DEFAULT_MAX_DIM,
};
use conesep::random::random_pd;
use conesep::separability::{
    check, lambda_star_detail, werner_separable_ensemble, CheckOptions, Status,
};
use conesep::states::{generalized_schmidt, schmidt_coefficients};
use conesep::{CMatrix, MixedState, SchmidtSpectrum, Tolerances};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::error::{CliError, EXIT_ENTANGLED, EXIT_INCONCLUSIVE, EXIT_OK};
use crate::format::{cut_label, num, opt};
use crate::statefile::{write_text, StateFile};

#[derive(Debug, Parser)]
#[command(
    name = "conesep",
    version,
    about = "Separability analysis of finite-dimensional quantum states"
)]
pub struct Cli {
    #[command(flatten)]
    pub tol: TolArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct TolArgs {
    /// Relative cutoff below which singular values and eigenvalues count as zero.
    #[arg(long, global = true, default_value_t = Tolerances::<f64>::default().rank)]
    pub rank_tol: f64,
    /// Relative margin for accepting negative eigenvalues as zero.
    #[arg(long, global = true, default_value_t = Tolerances::<f64>::default().psd)]
    pub psd_tol: f64,
    /// Residual bound for range and reconstruction checks.
    #[arg(long, global = true, default_value_t = Tolerances::<f64>::default().recon)]
    pub recon_tol: f64,
}

impl TolArgs {
    fn tolerances(&self) -> Tolerances<f64> {
        Tolerances {
            rank: self.rank_tol,
            psd: self.psd_tol,
            recon: self.recon_tol,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Schmidt coefficients of a pure state across a cut.
    Schmidt {
        #[arg(long = "in")]
        input: PathBuf,
        /// Factors on the first side of the cut, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "0")]
        cut: Vec<usize>,
        /// Metric on the first factor (bipartite states only).
        #[arg(long, requires = "metric_b")]
        metric_a: Option<PathBuf>,
        #[arg(long, requires = "metric_a")]
        metric_b: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Separability verdict for a bipartite mixed state.
    Check {
        #[arg(long = "in")]
        input: PathBuf,
        #[command(flatten)]
        product: ProductArgs,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also print per-term thresholds of the boundary ensemble.
        #[arg(long)]
        verbose: bool,
    },
    /// Genuine multipartite entanglement threshold of (1−λ)M_1⊗…⊗M_n + λ|z⟩⟨z|.
    Genuine {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        lambda: f64,
        /// One metric file per factor, comma separated; defaults to I/N_i.
        #[arg(long, value_delimiter = ',')]
        metrics: Vec<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_MAX_DIM)]
        max_dim: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Explicit product ensemble of the Werner-type state at its threshold.
    Werner {
        /// Schmidt coefficients (normalized internally).
        #[arg(long, num_args = 1.., required = true)]
        sigma: Vec<String>,
        #[arg(long, num_args = 2, value_names = ["N1", "N2"], required = true)]
        dims: Vec<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Seeded comparison of the cone criterion against the PPT oracle.
    Bench {
        #[arg(long, num_args = 2, value_names = ["N1", "N2"], default_values_t = [2, 2])]
        dims: Vec<usize>,
        #[arg(long)]
        instances: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decomposition ρ = (1−λ)C + λE along the ray from a product interior point.
    Decompose {
        #[arg(long = "in")]
        input: PathBuf,
        #[command(flatten)]
        product: ProductArgs,
        /// Writes the boundary point E as a state file.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Search over random product interior points for a low-rank boundary point.
        #[arg(long, value_enum)]
        search: Option<Search>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Search {
    Random,
}

#[derive(Debug, Args)]
pub struct ProductArgs {
    /// Interior point C = M1 ⊗ M2 (with --m2); defaults to the maximally mixed state of the face.
    #[arg(long, requires = "m2")]
    pub m1: Option<PathBuf>,
    #[arg(long, requires = "m1")]
    pub m2: Option<PathBuf>,
}

impl ProductArgs {
    fn load(&self) -> Result<Option<(CMatrix, CMatrix)>, CliError> {
        match (&self.m1, &self.m2) {
            (Some(a), Some(b)) => Ok(Some((read_operator(a)?, read_operator(b)?))),
            _ => Ok(None),
        }
    }
}

fn read_operator(path: &Path) -> Result<CMatrix, CliError> {
    StateFile::read(path)?.to_operator()
}

/// Runs one command, writing its report to `out`; returns the process exit code.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<u8, CliError> {
    let tol = cli.tol.tolerances();
    match &cli.command {
        Command::Schmidt {
            input,
            cut,
            metric_a,
            metric_b,
            out: path,
        } => cmd_schmidt(
            input,
            cut,
            metric_a.as_deref().zip(metric_b.as_deref()),
            path.as_deref(),
            &tol,
            out,
        ),
        Command::Check {
            input,
            product,
            out: path,
            verbose,
        } => cmd_check(input, product, path.as_deref(), *verbose, &tol, out),
        Command::Genuine {
            input,
            lambda,
            metrics,
            max_dim,
            out: path,
        } => cmd_genuine(
            input,
            *lambda,
            metrics,
            *max_dim,
            path.as_deref(),
            &tol,
            out,
        ),
        Command::Werner {
            sigma,
            dims,
            out: path,
        } => cmd_werner(sigma, dims, path.as_deref(), &tol, out),
        Command::Bench {
            dims,
            instances,
            seed,
            out: path,
        } => cmd_bench(dims, *instances, *seed, path.as_deref(), out),
        Command::Decompose {
            input,
            product,
            out: path,
            search,
            trials,
            seed,
        } => cmd_decompose(
            input,
            product,
            path.as_deref(),
            *search,
            *trials,
            *seed,
            &tol,
            out,
        ),
    }
}

fn io_out(e: std::io::Error) -> CliError {
    CliError::io(Path::new("<stdout>"), e)
}

fn cmd_schmidt(
    input: &Path,
    cut: &[usize],
    metrics: Option<(&Path, &Path)>,
    path: Option<&Path>,
    tol: &Tolerances<f64>,
    out: &mut dyn Write,
) -> Result<u8, CliError> {
    let z = StateFile::read(input)?.to_pure()?;
    let spectrum: SchmidtSpectrum = match metrics {
        Some((a, b)) => {
            if z.dims().parties() != 2 || cut != [0] {
                return Err(CliError::Usage(
                    "metrics apply to bipartite states with cut 0".into(),
                ));
            }
            generalized_schmidt(&z, &read_operator(a)?, &read_operator(b)?, tol.rank)?
        }
        None => {
            schmidt_coefficients(&z, cut, tol.rank).map_err(|e| CliError::Usage(e.to_string()))?
        }
    };
    let sigmas: Vec<String> = spectrum.sigmas().iter().map(|&s| num(s)).collect();
    let flag = if spectrum.is_product() {
        "separable"
    } else {
        "entangled"
    };
    writeln!(
        out,
        "{}, rank {}, {flag}",
        sigmas.join(" "),
        spectrum.rank()
    )
    .map_err(io_out)?;
    if let Some(p) = path {
        let report = json!({
            "cut": cut,
            "sigmas": spectrum.sigmas(),
            "rank": spectrum.rank(),
            "entangled": !spectrum.is_product(),
        });
        write_text(
            p,
            &format!("{}\n", serde_json::to_string_pretty(&report).expect("json")),
        )?;
    }
    Ok(EXIT_OK)
}

/// Interior point and metrics as used by `check`.
fn interior(
    rho: &MixedState,
    product: Option<(CMatrix, CMatrix)>,
    tol: &Tolerances<f64>,
) -> Result<(MixedState, CMatrix, CMatrix), CliError> {
    match product {
        Some((m1, m2)) => Ok((MixedState::new(rho.dims().clone(), m1.kron(&m2))?, m1, m2)),
        None => {
            let face = face_of(rho, tol)?;
            let c = product_face_center(rho, &face)?;
            let (s1, s2) = face.product.expect("product face");
            let p1 = (&s1 * &s1.adjoint()).scale(1.0 / s1.cols() as f64);
            let p2 = (&s2 * &s2.adjoint()).scale(1.0 / s2.cols() as f64);
            Ok((c, p1, p2))
        }
    }
}

fn cmd_check(
    input: &Path,
    product: &ProductArgs,
    path: Option<&Path>,
    verbose: bool,
    tol: &Tolerances<f64>,
    out: &mut dyn Write,
) -> Result<u8, CliError> {
    let rho = StateFile::read(input)?.to_mixed()?;
    if !rho.dims().is_bipartite() {
        return Err(CliError::Usage(format!(
            "check needs a bipartite state, got {} factors",
            rho.dims().parties()
        )));
    }
    let pair = product.load()?;
    let opts = CheckOptions {
        product: pair.clone(),
        tol: *tol,
    };
    let v = check(&rho, &opts);
    let mut text = String::new();
    text += &format!("status: {}\n", v.status);
    text += &format!("lambda: {}\n", num(v.lambda));
    text += &format!("lambda_star: {}\n", opt(v.lambda_star));
    text += &format!("lambda_bar: {}\n", opt(v.lambda_bar));
    text += &format!(
        "rank_e: {}\n",
        v.rank_e.map_or("-".into(), |k| k.to_string())
    );
    text += &format!("ppt: {}\n", v.ppt);
    text += &format!("criterion: {}\n", v.criterion);
    out.write_all(text.as_bytes()).map_err(io_out)?;
    if verbose && v.rank_e.is_some_and(|k| k > 0) {
        let (c, m1, m2) = interior(&rho, pair, tol)?;
        let dec = decompose(&rho, &c, tol)?;
        for (k, (w, e)) in spectral_ensemble(&dec.boundary, tol.rank)?
            .iter()
            .enumerate()
        {
            let d = lambda_star_detail(e, &m1, &m2, tol)?;
            writeln!(
                out,
                "term {k}: weight {}, lambda_star {}, frame threshold {} (c = {})",
                num(*w),
                num(d.lambda_star),
                num(d.frame_threshold),
                num(d.c)
            )
            .map_err(io_out)?;
        }
    }
    if let Some(p) = path {
        write_text(
            p,
            &format!("{}\n", serde_json::to_string_pretty(&v).expect("json")),
        )?;
    }
    Ok(match v.status {
        Status::Separable => EXIT_OK,
        Status::Entangled => EXIT_ENTANGLED,
        Status::Inconclusive => EXIT_INCONCLUSIVE,
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_genuine(
    input: &Path,
    lambda: f64,
    metric_paths: &[PathBuf],
    max_dim: usize,
    path: Option<&Path>,
    tol: &Tolerances<f64>,
    out: &mut dyn Write,
) -> Result<u8, CliError> {
    let z = StateFile::read(input)?.to_pure()?;
    let n = z.dims().parties();
    if n < 3 {
        return Err(CliError::Usage(format!(
            "genuine needs at least 3 factors, got {n}"
        )));
    }
    if !(0.0..=1.0).contains(&lambda) {
        return Err(CliError::Usage(format!("lambda {lambda} outside [0, 1]")));
    }
    let metrics = if metric_paths.is_empty() {
        isotropic_metrics(z.dims())
    } else {
        metric_paths
            .iter()
            .map(|p| read_operator(p))
            .collect::<Result<Vec<_>, _>>()?
    };
    let opts = GenuineOptions { tol: *tol, max_dim };
    let scan = genuine_threshold(&z, &metrics, &opts)?;
    let genuine = lambda > scan.lambda_star + tol.rank;
    let mut text = format!(
        "{:<12} {:<12} {:<12} {}\n",
        "cut", "sigma0", "sigma1", "product"
    );
    for c in &scan.cuts {
        text += &format!(
            "{:<12} {:<12} {:<12} {}\n",
            cut_label(&c.subset, n),
            num(c.sigma0),
            num(c.sigma1),
            num(c.product)
        );
    }
    text += &format!("min cut: {}\n", cut_label(&scan.min_cut, n));
    text += &format!("lambda_star: {}\n", num(scan.lambda_star));
    if (scan.frame_threshold - scan.lambda_star).abs() > tol.recon {
        text += &format!(
            "frame threshold: {} (c = {})\n",
            num(scan.frame_threshold),
            num(scan.c)
        );
    }
    text += &format!("lambda: {}\n", num(lambda));
    text += if genuine {
        "genuinely entangled\n"
    } else {
        "not detected as genuinely entangled\n"
    };
    out.write_all(text.as_bytes()).map_err(io_out)?;
    if let Some(p) = path {
        let report = json!({ "scan": scan, "lambda": lambda, "genuine": genuine });
        write_text(
            p,
            &format!("{}\n", serde_json::to_string_pretty(&report).expect("json")),
        )?;
    }
    Ok(if genuine { EXIT_ENTANGLED } else { EXIT_OK })
}

fn parse_sigma(raw: &[String]) -> Result<Vec<f64>, CliError> {
    raw.iter()
        .flat_map(|s| s.split_whitespace())
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| CliError::Usage(format!("invalid Schmidt coefficient {t:?}")))
        })
        .collect()
}

fn cmd_werner(
    raw: &[String],
    dims: &[usize],
    path: Option<&Path>,
    tol: &Tolerances<f64>,
    out: &mut dyn Write,
) -> Result<u8, CliError> {
    let (n1, n2) = (dims[0], dims[1]);
    let values = parse_sigma(raw)?;
    let sigma = SchmidtSpectrum::from_values(&values, tol.rank)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    if sigma.rank() < 2 {
        return Err(CliError::Usage(
            "Schmidt rank 1 is a product state, separable for every lambda; the ensemble needs rank >= 2".into(),
        ));
    }
    let ens =
        werner_separable_ensemble(&sigma, n1, n2).map_err(|e| CliError::Usage(e.to_string()))?;
    let lambda_star = 1.0 / (1.0 + (n1 * n2) as f64 * sigma.sigma0() * sigma.sigma1());
    let target = MixedState::werner(&sigma.canonical_state(n1, n2)?, lambda_star)?;
    let residual = (&ens.reconstruct() - target.matrix()).frobenius_norm();
    writeln!(out, "lambda_star: {}", num(lambda_star)).map_err(io_out)?;
    writeln!(out, "terms: {}", ens.len()).map_err(io_out)?;
    writeln!(out, "residual: {residual:.3e}").map_err(io_out)?;
    if let Some(p) = path {
        let pairs = |v: &[conesep::Complex64]| v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>();
        let terms: Vec<_> = ens
            .terms
            .iter()
            .map(|t| json!({ "weight": t.weight, "a": pairs(&t.a), "b": pairs(&t.b) }))
            .collect();
        let report = json!({
            "dims": [n1, n2],
            "sigma": sigma.sigmas(),
            "lambda_star": lambda_star,
            "residual": residual,
            "terms": terms,
        });
        write_text(
            p,
            &format!("{}\n", serde_json::to_string_pretty(&report).expect("json")),
        )?;
    }
    Ok(EXIT_OK)
}

fn cmd_bench(
    dims: &[usize],
    instances: usize,
    seed: u64,
    path: Option<&Path>,
    out: &mut dyn Write,
) -> Result<u8, CliError> {
    if instances == 0 {
        return Err(CliError::Usage("--instances must be at least 1".into()));
    }
    let cfg = BenchConfig {
        dims: (dims[0], dims[1]),
        instances,
        seed,
    };
    let report = run_bench(&cfg).map_err(|e| CliError::Usage(e.to_string()))?;
    match path {
        Some(p) => {
            write_text(p, &report.to_json())?;
            let c = &report.counts;
            writeln!(
                out,
                "instances: {}\nseparable: {}\nentangled: {}\ninconclusive: {}\nppt_agreement_rate: {}\nk1_ppt_agreement_rate: {}",
                report.instances,
                c.separable_certified,
                c.entangled_certified,
                c.inconclusive,
                opt(report.ppt_agreement_rate),
                opt(report.k1_ppt_agreement_rate)
            )
            .map_err(io_out)?;
        }
        None => out.write_all(report.to_json().as_bytes()).map_err(io_out)?,
    }
    Ok(EXIT_OK)
}

#[allow(clippy::too_many_arguments)]
fn cmd_decompose(
    input: &Path,
    product: &ProductArgs,
    path: Option<&Path>,
    search: Option<Search>,
    trials: usize,
    seed: u64,
    tol: &Tolerances<f64>,
    out: &mut dyn Write,
) -> Result<u8, CliError> {
    let rho = StateFile::read(input)?.to_mixed()?;
    if !rho.dims().is_bipartite() {
        return Err(CliError::Usage("decompose needs a bipartite state".into()));
    }
    let face = face_of(&rho, tol)?;
    let Some((s1, s2)) = face.product.clone() else {
        return Err(CliError::Usage(
            "state does not lie in a product face".into(),
        ));
    };
    let (c, _, _) = interior(&rho, product.load()?, tol)?;
    let mut best = decompose(&rho, &c, tol)?;
    let rank_rho = face.rank;
    let mut best_rank = rank_tol(best.boundary.matrix(), tol.rank);
    writeln!(out, "lambda: {}", num(best.lambda)).map_err(io_out)?;
    writeln!(out, "mu_star: {}", num(best.mu_star)).map_err(io_out)?;
    writeln!(out, "rank(rho): {rank_rho}").map_err(io_out)?;
    writeln!(out, "rank(E): {best_rank}").map_err(io_out)?;
    if search == Some(Search::Random) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut best_trial = None;
        for trial in 0..trials {
            // Random positive definite operators on the factor supports.
            let a = random_pd::<f64, _>(s1.cols(), &mut rng);
            let b = random_pd::<f64, _>(s2.cols(), &mut rng);
            let m1 = &(&s1 * &a) * &s1.adjoint();
            let m2 = &(&s2 * &b) * &s2.adjoint();
            let cand = MixedState::new(rho.dims().clone(), m1.kron(&m2))?;
            let Ok(dec) = decompose(&rho, &cand, tol) else {
                continue;
            };
            let r = rank_tol(dec.boundary.matrix(), tol.rank);
            if r < best_rank {
                best_rank = r;
                best = dec;
                best_trial = Some(trial);
            }
        }
        match best_trial {
            Some(t) => writeln!(out, "search: rank(E) {best_rank} at trial {t} of {trials}"),
            None => writeln!(out, "search: no improvement over {trials} trials"),
        }
        .map_err(io_out)?;
    }
    if let Some(p) = path {
        StateFile::from_mixed(&best.boundary)
            .with_metadata("lambda", best.lambda)
            .with_metadata("rank", best_rank)
            .write(p)?;
    }
    Ok(EXIT_OK)
}
