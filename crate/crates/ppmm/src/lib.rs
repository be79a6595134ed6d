//! Proxy pattern-mixture sensitivity analysis for survey nonresponse.
//!
//! A survey outcome with nonrespondents leaves its nonrespondent distribution
//! unidentified. This crate implements the proxy pattern-mixture approach:
//! collapse the covariates into a single proxy (the regression prediction of
//! the outcome), assume response depends on data only through a blend
//! `(1 - phi) X* + phi Y`, and trace every quantity of interest as the
//! sensitivity parameter `phi` runs from 0 (missing at random) to 1
//! (missingness driven by the outcome alone).
//!
//! The same model has an exact re-expression as a logistic selection model
//! whose logit is quadratic in the proxy and outcome. That equivalence is the
//! backbone of the crate: the analytic coefficients in [`selection`] are
//! cross-checked against the Bayes density-ratio oracle and seeded
//! Monte-Carlo logistic fits in [`simulation`].
//!
//! Start with the runnable examples (`cargo run --example <name>`):
//!
//! - `identify_mechanism`: nonrespondent moments and validity bounds across phi
//! - `selection_coefficients`: the quadratic selection model and its limits
//! - `odds_ratio_curves`: odds-ratio-versus-phi series for the built-in designs
//! - `probability_curves`: nonresponse probability as a function of the outcome
//! - `marginal_mean_sweep`: the phi-indexed marginal mean
//! - `simulate_and_recover`: seeded simulation plus IRLS coefficient recovery
//! - `oracle_check`: the density-ratio equivalence at full precision
//! - `analyze_csv`: the end-to-end pipeline from a raw CSV
//!
//! The `ppmm` binary exposes the same operations as subcommands for scripted
//! use.

pub mod analysis;
pub mod error;
pub mod identification;
mod linalg;
pub mod mechanisms;
pub mod moments;
pub mod selection;
pub mod simulation;
pub mod sweep;
pub mod table;

pub use error::{Error, Result};
pub use identification::{
    g_factor, identify, marginal_mean, phi_validity_bound, IdentifiedModel, Phi, PhiRange,
};
pub use mechanisms::{builtin_mechanism, builtin_mechanisms, Mechanism};
pub use moments::{fit_proxy, summarize, ObservedSummary, PatternMoments, ProxyFit, VarianceMode};
pub use selection::{
    conditional_params, gamma_coefficients, lambda_coefficients, tau_coefficients,
    ConditionalParams, MarginalSelectionCoefficients, NoCovariateCoefficients,
    SelectionCoefficients,
};
pub use simulation::{
    bayes_logit_oracle, bvn_logpdf, irls_logistic, mc_recover_lambdas, simulate, LambdaRecovery,
    LogisticFit, SimulatedDataset,
};
pub use sweep::{sweep_mean, sweep_or, sweep_prob, CurvePoint, CurveSeries, PhiGrid, XFix, YLevels};
