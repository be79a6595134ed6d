//! Identification of the nonrespondent distribution under the proxy
//! pattern-mixture restriction.
//!
//! The sensitivity parameter phi in [0, 1] blends how strongly response
//! depends on the proxy versus the outcome: phi = 0 is missing at random,
//! phi = 1 makes missingness depend on the outcome alone. For a given phi the
//! nonrespondent outcome mean, variance, and proxy covariance follow from the
//! observed summary through a single multiplier
//! `g = (phi + (1 - phi) * rho) / (phi * rho + (1 - phi))`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moments::{ObservedSummary, PatternMoments};

/// Denominator tolerance below which the identifying multiplier is treated
/// as undefined.
pub const DEGENERACY_TOL: f64 = 1e-12;

/// Sensitivity parameter, validated into [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Phi(f64);

impl Phi {
    pub const ZERO: Phi = Phi(0.0);
    pub const HALF: Phi = Phi(0.5);
    pub const ONE: Phi = Phi(1.0);

    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && (0.0..=1.0).contains(&value) {
            Ok(Phi(value))
        } else {
            Err(Error::InvalidPhi { value })
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Phi {
    type Error = Error;
    fn try_from(value: f64) -> Result<Self> {
        Phi::new(value)
    }
}

impl From<Phi> for f64 {
    fn from(phi: Phi) -> f64 {
        phi.0
    }
}

impl std::fmt::Display for Phi {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

/// The identifying multiplier applied to proxy-moment differences.
///
/// Strictly increasing in phi for `rho1 < 1`, equal to 1 at phi = 0.5 for
/// every rho, and equal to 1 for every phi when the proxy is perfect
/// (`rho1 = 1`). Fails with `DegenerateProxy` when the denominator vanishes,
/// which for nonnegative rho happens only at phi = 1 with rho <= 1e-12.
pub fn g_factor(phi: Phi, rho1: f64) -> Result<f64> {
    let p = phi.value();
    let num = p + (1.0 - p) * rho1;
    let den = p * rho1 + (1.0 - p);
    if den <= DEGENERACY_TOL {
        return Err(Error::DegenerateProxy { phi: p, rho: rho1 });
    }
    Ok(num / den)
}

/// Full bivariate-normal model for both patterns at a given phi.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentifiedModel {
    pub respondent: PatternMoments,
    pub nonrespondent: PatternMoments,
    pub pi: f64,
    pub phi: Phi,
}

/// Identify the nonrespondent pattern moments at `phi`.
///
/// The nonrespondent proxy mean and variance are copied from the observed
/// summary; the outcome mean, outcome variance, and covariance follow from
/// the g multiplier. Fails with `InvalidIdentification` when the implied
/// nonrespondent outcome variance or conditional (residual) variance is not
/// positive, meaning this (phi, moments) combination is incompatible with a
/// proper bivariate normal.
pub fn identify(obs: &ObservedSummary, phi: Phi) -> Result<IdentifiedModel> {
    obs.validate()?;
    let resp = obs.respondent;
    let g = g_factor(phi, resp.rho())?;
    let sd_ratio = resp.sd_y() / resp.sd_x();
    let d_mu = obs.nonresp_mu_x - resp.mu_x;
    let d_var = obs.nonresp_var_x - resp.var_x;

    let mu_y0 = resp.mu_y + sd_ratio * g * d_mu;
    let var_y0 = resp.var_y + (resp.var_y / resp.var_x) * g * g * d_var;
    let cov0 = resp.cov_xy + sd_ratio * g * d_var;
    let resid0 = var_y0 - cov0 * cov0 / obs.nonresp_var_x;
    if var_y0 <= 0.0 || resid0 <= 0.0 {
        return Err(Error::InvalidIdentification {
            phi: phi.value(),
            var_y: var_y0,
            resid_var: resid0,
        });
    }

    Ok(IdentifiedModel {
        respondent: resp,
        nonrespondent: PatternMoments::new(obs.nonresp_mu_x, mu_y0, obs.nonresp_var_x, var_y0, cov0),
        pi: obs.pi,
        phi,
    })
}

/// Marginal outcome mean, `pi * mu_y^(1) + (1 - pi) * mu_y^(0)`.
pub fn marginal_mean(model: &IdentifiedModel) -> f64 {
    model.pi * model.respondent.mu_y + (1.0 - model.pi) * model.nonrespondent.mu_y
}

/// Closed interval of phi values on which identification succeeds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhiRange {
    pub lo: f64,
    pub hi: f64,
}

/// Largest grid prefix [0, phi_max] on which `identify` succeeds.
///
/// Scans phi = 0, step, 2*step, ..., 1 and stops before the first failure;
/// returns [0, 1] when every grid point identifies a valid model. With a
/// valid summary the phi = 0 point always succeeds, so the interval is never
/// empty.
pub fn phi_validity_bound(obs: &ObservedSummary, grid_step: f64) -> Result<PhiRange> {
    assert!(
        grid_step > 0.0 && grid_step <= 0.1,
        "grid_step must lie in (0, 0.1]"
    );
    let n = (1.0 / grid_step).round().max(1.0) as usize;
    let mut last_ok = None;
    for i in 0..=n {
        let phi = Phi::new(i as f64 / n as f64)?;
        match identify(obs, phi) {
            Ok(_) => last_ok = Some(phi.value()),
            Err(Error::InvalidIdentification { .. }) | Err(Error::DegenerateProxy { .. }) => break,
            Err(e) => return Err(e),
        }
    }
    let hi = last_ok.expect("phi = 0 identifies a valid model for a valid summary");
    Ok(PhiRange { lo: 0.0, hi })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mech7() -> ObservedSummary {
        ObservedSummary {
            respondent: PatternMoments::new(1.0, 1.0, 1.0, 1.0, 0.2),
            nonresp_mu_x: 0.8,
            nonresp_var_x: 1.0,
            pi: 0.75,
        }
    }

    #[test]
    fn g_at_zero_is_rho() {
        assert_eq!(g_factor(Phi::ZERO, 0.2).unwrap(), 0.2);
    }

    #[test]
    fn g_at_half_is_exactly_one() {
        for rho in [0.01, 0.2, 0.5, 0.8, 0.99] {
            assert_eq!(g_factor(Phi::HALF, rho).unwrap(), 1.0);
        }
    }

    #[test]
    fn g_printed_example() {
        // (phi + (1 - phi) rho) / (phi rho + (1 - phi)) = 0.92 / 0.28
        let g = g_factor(Phi::new(0.9).unwrap(), 0.2).unwrap();
        assert!((g - 0.92 / 0.28).abs() < 1e-15);
        assert!((g - 3.2857142857142857).abs() < 1e-12);
    }

    #[test]
    fn g_perfect_proxy_is_one_for_all_phi() {
        for i in 0..=10 {
            let phi = Phi::new(i as f64 / 10.0).unwrap();
            assert_eq!(g_factor(phi, 1.0).unwrap(), 1.0);
        }
    }

    #[test]
    fn g_degenerate_at_phi_one_with_zero_rho() {
        let err = g_factor(Phi::ONE, 0.0).unwrap_err();
        assert!(matches!(err, Error::DegenerateProxy { .. }));
        // fine below phi = 1
        assert!(g_factor(Phi::new(0.99).unwrap(), 0.0).is_ok());
    }

    #[test]
    fn identify_mech7_at_half() {
        let m = identify(&mech7(), Phi::HALF).unwrap();
        assert!((m.nonrespondent.mu_y - 0.8).abs() < 1e-15);
        assert!((m.nonrespondent.var_y - 1.0).abs() < 1e-15);
        assert!((m.nonrespondent.cov_xy - 0.2).abs() < 1e-15);
        assert_eq!(m.nonrespondent.mu_x, 0.8);
        assert_eq!(m.nonrespondent.var_x, 1.0);
    }

    #[test]
    fn identify_equal_proxy_moments_copies_respondent() {
        let obs = ObservedSummary {
            respondent: PatternMoments::new(1.0, 1.0, 1.0, 1.0, 0.2),
            nonresp_mu_x: 1.0,
            nonresp_var_x: 1.0,
            pi: 0.75,
        };
        for phi in [0.0, 0.3, 0.77, 1.0] {
            let m = identify(&obs, Phi::new(phi).unwrap()).unwrap();
            assert_eq!(m.nonrespondent, m.respondent);
        }
    }

    #[test]
    fn identify_rejects_negative_outcome_variance() {
        let obs = ObservedSummary {
            respondent: PatternMoments::new(1.0, 1.0, 1.0, 1.0, 0.2),
            nonresp_mu_x: 1.0,
            nonresp_var_x: 0.5,
            pi: 0.75,
        };
        let err = identify(&obs, Phi::ONE).unwrap_err();
        match err {
            Error::InvalidIdentification { var_y, .. } => {
                // g = 1/0.2 = 5, so var_y = 1 + 25 * (-0.5)
                assert!((var_y - (1.0 + 25.0 * (-0.5))).abs() < 1e-12);
            }
            other => panic!("expected InvalidIdentification, got {other:?}"),
        }
    }

    #[test]
    fn marginal_mean_is_weighted_average() {
        let m = IdentifiedModel {
            respondent: PatternMoments::new(1.0, 1.0, 1.0, 1.0, 0.2),
            nonrespondent: PatternMoments::new(0.8, 0.8, 1.0, 1.0, 0.2),
            pi: 0.75,
            phi: Phi::HALF,
        };
        assert!((marginal_mean(&m) - 0.95).abs() < 1e-15);
    }

    #[test]
    fn marginal_mean_at_phi_zero_with_equal_proxies_is_respondent_mean() {
        let obs = ObservedSummary {
            respondent: PatternMoments::new(1.0, 2.5, 1.0, 4.0, 1.0),
            nonresp_mu_x: 1.0,
            nonresp_var_x: 1.0,
            pi: 0.6,
        };
        let m = identify(&obs, Phi::ZERO).unwrap();
        assert!((marginal_mean(&m) - 2.5).abs() < 1e-14);
    }

    #[test]
    fn marginal_mean_increases_with_phi_when_nonresp_proxy_mean_is_larger() {
        let obs = ObservedSummary {
            respondent: PatternMoments::new(1.0, 1.0, 1.0, 1.0, 0.2),
            nonresp_mu_x: 1.2,
            nonresp_var_x: 1.0,
            pi: 0.75,
        };
        let means: Vec<f64> = [0.0, 0.5, 1.0]
            .iter()
            .map(|p| marginal_mean(&identify(&obs, Phi::new(*p).unwrap()).unwrap()))
            .collect();
        assert!(means[0] < means[1] && means[1] < means[2]);
        assert!((means[0] - 1.01).abs() < 1e-12);
        assert!((means[1] - 1.05).abs() < 1e-12);
        assert!((means[2] - 1.25).abs() < 1e-12);
    }

    #[test]
    fn validity_bound_full_for_equal_variances() {
        let r = phi_validity_bound(&mech7(), 0.01).unwrap();
        assert_eq!(r.lo, 0.0);
        assert_eq!(r.hi, 1.0);
    }

    #[test]
    fn validity_bound_truncates_for_shrinking_proxy_variance() {
        let obs = ObservedSummary {
            respondent: PatternMoments::new(1.0, 1.0, 1.0, 1.0, 0.2),
            nonresp_mu_x: 1.0,
            nonresp_var_x: 0.5,
            pi: 0.75,
        };
        let r = phi_validity_bound(&obs, 0.01).unwrap();
        assert!(r.hi < 1.0);
        // the conditional variance turns negative just above phi = 0.5618
        assert!((r.hi - 0.56).abs() < 1e-12);
    }

    #[test]
    fn validity_bound_clips_when_proxy_worthless_and_variances_differ() {
        // rho near zero with unequal variances: g blows up as phi -> 1
        let obs = ObservedSummary {
            respondent: PatternMoments::new(1.0, 1.0, 1.0, 1.0, 1e-4),
            nonresp_mu_x: 1.0,
            nonresp_var_x: 0.9,
            pi: 0.75,
        };
        let r = phi_validity_bound(&obs, 0.01).unwrap();
        assert!(r.hi < 1.0);
    }

    #[test]
    fn phi_rejects_out_of_range() {
        assert!(Phi::new(-0.01).is_err());
        assert!(Phi::new(1.01).is_err());
        assert!(Phi::new(f64::NAN).is_err());
    }
}
