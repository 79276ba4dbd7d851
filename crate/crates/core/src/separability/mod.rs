//! Separability thresholds, certificates and the decision pipeline.

mod check;
mod ensemble;
mod roots;
mod threshold;

pub use check::{check, CheckOptions, Status, Verdict};
pub use ensemble::{certify_separable, werner_separable_ensemble, ProductEnsemble, ProductTerm};
pub use roots::{
    ensemble_exponents, ensemble_root_order, phase_exponents, root_order, root_sum, roots_ensemble,
    separates_quadruples, RootOrder, RootTerm,
};
pub use threshold::{lambda_bar, lambda_star_detail, lambda_star_pure, ppt_boundary, LambdaStar};
