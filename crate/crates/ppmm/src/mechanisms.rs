//! Built-in data mechanisms for sweeps and validation.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moments::{ObservedSummary, PatternMoments};

/// One row of the factorial design: respondent moments plus nonrespondent
/// proxy moments and the response rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mechanism {
    pub id: String,
    pub respondent: PatternMoments,
    pub nonresp_mu_x: f64,
    pub nonresp_var_x: f64,
    pub pi: f64,
}

impl Mechanism {
    pub fn observed_summary(&self) -> ObservedSummary {
        ObservedSummary {
            respondent: self.respondent,
            nonresp_mu_x: self.nonresp_mu_x,
            nonresp_var_x: self.nonresp_var_x,
            pi: self.pi,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.observed_summary().validate()
    }
}

/// The 18 built-in mechanisms of the 3 x 2 x 3 factorial design.
///
/// Respondent proxy and outcome each have mean and variance 1;
/// the proxy strength varies over {0.2, 0.5, 0.8}, the nonrespondent proxy
/// mean over {0.8, 1.2}, the nonrespondent proxy variance over
/// {0.9, 1.0, 1.1}; the response rate is fixed at 0.75. Ids run 1..=18 with
/// the variance blocks outermost, then the mean, then the correlation.
pub fn builtin_mechanisms() -> Vec<Mechanism> {
    let mut out = Vec::with_capacity(18);
    let mut id = 0;
    for nonresp_var_x in [0.9, 1.0, 1.1] {
        for nonresp_mu_x in [0.8, 1.2] {
            for rho in [0.2, 0.5, 0.8] {
                id += 1;
                out.push(Mechanism {
                    id: id.to_string(),
                    respondent: PatternMoments::new(1.0, 1.0, 1.0, 1.0, rho),
                    nonresp_mu_x,
                    nonresp_var_x,
                    pi: 0.75,
                });
            }
        }
    }
    out
}

/// Look up a built-in mechanism by id.
pub fn builtin_mechanism(id: &str) -> Result<Mechanism> {
    builtin_mechanisms()
        .into_iter()
        .find(|m| m.id == id)
        .ok_or_else(|| Error::UnknownMechanism { id: id.to_string() })
}

/// Load mechanisms from a JSON file holding either a single mechanism object
/// or an array of them.
pub fn load_mechanisms(path: &Path) -> Result<Vec<Mechanism>> {
    let text = std::fs::read_to_string(path)?;
    let parsed: std::result::Result<Vec<Mechanism>, _> = serde_json::from_str(&text);
    let mechanisms = match parsed {
        Ok(v) => v,
        Err(_) => vec![serde_json::from_str::<Mechanism>(&text)?],
    };
    for m in &mechanisms {
        m.validate()?;
    }
    Ok(mechanisms)
}

/// Observed summary for the PHQ-4 depression score in the U.S. Census
/// Household Pulse Survey (phase 3.1, wave 29), with the proxy built from
/// main effects of age, gender, race, ethnicity, education, and region.
///
/// Only the proxy-side moments and the response rate are published
/// (pi = 0.823, respondent proxy mean 2.75 and variance 0.96, nonrespondent
/// mean 3.04 and variance 1.02, proxy strength 0.28); the respondent outcome
/// mean and variance must be supplied by the caller. The covariance is
/// reconstructed from the 0.28 correlation.
pub fn household_pulse_phq4(mu_y: f64, var_y: f64) -> ObservedSummary {
    let cov_xy = 0.28 * (0.96_f64).sqrt() * var_y.sqrt();
    ObservedSummary {
        respondent: PatternMoments::new(2.75, mu_y, 0.96, var_y, cov_xy),
        nonresp_mu_x: 3.04,
        nonresp_var_x: 1.02,
        pi: 0.823,
    }
}

/// `household_pulse_phq4` with outcome moments implied by proxy
/// self-consistency.
///
/// A proxy built as the fitted value of a regression of the outcome on the
/// covariates satisfies cov(X, Y) = var(X) in-sample, which pins the outcome
/// moments down to mu_y = mu_x = 2.75 and var_y = var_x / rho^2 = 12.24
/// (outcome standard deviation about 3.5 on the 0-12 score scale). Use
/// `household_pulse_phq4` directly to supply different values.
pub fn household_pulse_phq4_default() -> ObservedSummary {
    household_pulse_phq4(2.75, 0.96 / (0.28 * 0.28))
}
