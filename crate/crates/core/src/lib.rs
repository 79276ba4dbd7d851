//! Separability certificates for finite-dimensional quantum states via decompositions
//! along rays of the positive semidefinite cone.

pub mod bench;
pub mod cone;
pub mod error;
pub mod linalg;
pub mod multipartite;
pub mod random;
pub mod scalar;
pub mod separability;
pub mod states;
pub mod tolerance;

pub use error::{Error, Result};
pub use scalar::Real;
pub use tolerance::Tolerances;

/// Double-precision instantiations.
pub type CMatrix = linalg::Matrix<f64>;
pub type Complex64 = scalar::C<f64>;
pub type PureState = states::PureState<f64>;
pub type MixedState = states::MixedState<f64>;
pub type SchmidtSpectrum = states::SchmidtSpectrum<f64>;
pub type Verdict = separability::Verdict<f64>;
pub type ProductEnsemble = separability::ProductEnsemble<f64>;
pub type BipartitionScan = multipartite::BipartitionScan<f64>;
pub type ConeDecomposition = cone::ConeDecomposition<f64>;
