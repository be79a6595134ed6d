//! The logistic selection model equivalent to the identified pattern-mixture
//! model.
//!
//! Writing each pattern's bivariate normal as a marginal for X times a
//! conditional for Y given X and taking the Bayes log-odds of nonresponse
//! yields a logit that is quadratic in (x, y):
//!
//! ```text
//! logit P(R = 0 | x, y) = l0 + l1 x + l2 x^2 + l3 y + l4 xy + l5 y^2
//! ```
//!
//! The coefficients are exact functions of the two patterns' moments, so the
//! polynomial must agree with the density-ratio computation to floating-point
//! accuracy; `simulation::bayes_logit_oracle` checks exactly that.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::identification::IdentifiedModel;
use crate::moments::PatternMoments;

/// Relative tolerance below which a conditional residual variance is treated
/// as degenerate.
pub const RESIDUAL_REL_TOL: f64 = 1e-14;

/// Parameters of the conditional distribution of Y given X within a pattern:
/// `E(Y | X) = beta + alpha * X`, `V(Y | X) = resid_var`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionalParams {
    pub alpha: f64,
    pub beta: f64,
    pub resid_var: f64,
}

/// Conditional slope, intercept, and residual variance of a bivariate normal
/// pattern: `alpha = cov_xy / var_x`, `beta = mu_y - alpha * mu_x`,
/// `resid_var = var_y - cov_xy^2 / var_x`.
pub fn conditional_params(m: &PatternMoments) -> Result<ConditionalParams> {
    if m.var_x <= 0.0 || m.var_x.is_nan() {
        return Err(Error::NonPositiveVariance {
            name: "var_x",
            value: m.var_x,
        });
    }
    if m.var_y <= 0.0 || m.var_y.is_nan() {
        return Err(Error::NonPositiveVariance {
            name: "var_y",
            value: m.var_y,
        });
    }
    let alpha = m.cov_xy / m.var_x;
    let beta = m.mu_y - alpha * m.mu_x;
    let resid_var = m.var_y - m.cov_xy * m.cov_xy / m.var_x;
    if resid_var <= RESIDUAL_REL_TOL * m.var_y {
        return Err(Error::NotStrictlyPositiveResidual {
            resid_var,
            var_y: m.var_y,
        });
    }
    Ok(ConditionalParams {
        alpha,
        beta,
        resid_var,
    })
}

/// Coefficients of the quadratic logistic selection model for nonresponse.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectionCoefficients {
    pub lambda0: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda3: f64,
    pub lambda4: f64,
    pub lambda5: f64,
}

impl SelectionCoefficients {
    pub fn as_array(&self) -> [f64; 6] {
        [
            self.lambda0,
            self.lambda1,
            self.lambda2,
            self.lambda3,
            self.lambda4,
            self.lambda5,
        ]
    }

    /// Term names in polynomial order.
    pub fn term_names() -> [&'static str; 6] {
        ["intercept", "x", "x^2", "y", "xy", "y^2"]
    }

    /// `l0 + l1 x + l2 x^2 + l3 y + l4 xy + l5 y^2`.
    pub fn logit_nonresponse(&self, x: f64, y: f64) -> f64 {
        self.lambda0
            + self.lambda1 * x
            + self.lambda2 * x * x
            + self.lambda3 * y
            + self.lambda4 * x * y
            + self.lambda5 * y * y
    }

    /// Inverse logit of `logit_nonresponse`, clamped strictly inside (0, 1)
    /// so extreme logits saturate instead of returning exactly 0 or 1.
    pub fn prob_nonresponse(&self, x: f64, y: f64) -> f64 {
        sigmoid(self.logit_nonresponse(x, y)).clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON)
    }

    /// Odds ratio of nonresponse for a `delta` increase in the outcome at
    /// fixed `x`: `exp(l3 d + l4 x d + l5 (2 y d + d^2))`, identically equal
    /// to `exp(logit(x, y + d) - logit(x, y))`.
    pub fn odds_ratio_y(&self, x: f64, y: f64, delta: f64) -> f64 {
        (self.lambda3 * delta
            + self.lambda4 * x * delta
            + self.lambda5 * (2.0 * y * delta + delta * delta))
            .exp()
    }

    /// The same model with the response orientation flipped:
    /// `logit P(R = 1 | x, y)` has every coefficient negated.
    pub fn response_orientation(&self) -> SelectionCoefficients {
        SelectionCoefficients {
            lambda0: -self.lambda0,
            lambda1: -self.lambda1,
            lambda2: -self.lambda2,
            lambda3: -self.lambda3,
            lambda4: -self.lambda4,
            lambda5: -self.lambda5,
        }
    }
}

fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

/// The six selection-model coefficients for an identified model.
///
/// The intercept folds in the response odds `log((1 - pi) / pi)`, the two
/// marginal-proxy normal constants, and the two conditional normal constants.
pub fn lambda_coefficients(model: &IdentifiedModel) -> Result<SelectionCoefficients> {
    let c1 = conditional_params(&model.respondent)?;
    let c0 = conditional_params(&model.nonrespondent)?;
    let (mx1, vx1) = (model.respondent.mu_x, model.respondent.var_x);
    let (mx0, vx0) = (model.nonrespondent.mu_x, model.nonrespondent.var_x);
    let (s1, s0) = (c1.resid_var, c0.resid_var);
    let pi = model.pi;

    let lambda0 = ((1.0 - pi) / pi).ln()
        + mx1 * mx1 / (2.0 * vx1)
        - mx0 * mx0 / (2.0 * vx0)
        + 0.5 * (vx1 / vx0).ln()
        + c1.beta * c1.beta / (2.0 * s1)
        - c0.beta * c0.beta / (2.0 * s0)
        + 0.5 * (s1 / s0).ln();
    let lambda1 =
        mx0 / vx0 - mx1 / vx1 + c1.beta * c1.alpha / s1 - c0.beta * c0.alpha / s0;
    let lambda2 = 0.5 / vx1 - 0.5 / vx0 + c1.alpha * c1.alpha / (2.0 * s1)
        - c0.alpha * c0.alpha / (2.0 * s0);
    let lambda3 = c0.beta / s0 - c1.beta / s1;
    let lambda4 = c0.alpha / s0 - c1.alpha / s1;
    let lambda5 = 0.5 / s1 - 0.5 / s0;

    Ok(SelectionCoefficients {
        lambda0,
        lambda1,
        lambda2,
        lambda3,
        lambda4,
        lambda5,
    })
}

/// Coefficients of the proxy-only selection model
/// `logit P(R = 0 | x) = tau0 + tau1 x + tau2 x^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarginalSelectionCoefficients {
    pub tau0: f64,
    pub tau1: f64,
    pub tau2: f64,
}

impl MarginalSelectionCoefficients {
    pub fn logit_nonresponse(&self, x: f64) -> f64 {
        self.tau0 + self.tau1 * x + self.tau2 * x * x
    }
}

/// Proxy-only selection coefficients from the two marginal proxy
/// distributions, `(mean, variance)` per pattern.
pub fn tau_coefficients(
    pi: f64,
    resp_x: (f64, f64),
    nonresp_x: (f64, f64),
) -> MarginalSelectionCoefficients {
    let (m1, v1) = resp_x;
    let (m0, v0) = nonresp_x;
    assert!(v1 > 0.0 && v0 > 0.0, "proxy variances must be positive");
    assert!(pi > 0.0 && pi < 1.0, "pi must lie strictly inside (0, 1)");
    MarginalSelectionCoefficients {
        tau0: ((1.0 - pi) / pi).ln() + m1 * m1 / (2.0 * v1) - m0 * m0 / (2.0 * v0)
            + 0.5 * (v1 / v0).ln(),
        tau1: m0 / v0 - m1 / v1,
        tau2: 0.5 / v1 - 0.5 / v0,
    }
}

/// Coefficients of the covariate-free selection model
/// `logit P(R = 0 | y) = gamma0 + gamma1 y + gamma2 y^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoCovariateCoefficients {
    pub gamma0: f64,
    pub gamma1: f64,
    pub gamma2: f64,
}

impl NoCovariateCoefficients {
    pub fn logit_nonresponse(&self, y: f64) -> f64 {
        self.gamma0 + self.gamma1 * y + self.gamma2 * y * y
    }
}

/// Covariate-free selection coefficients from the two marginal outcome
/// distributions, `(mean, variance)` per pattern.
pub fn gamma_coefficients(
    pi: f64,
    resp_y: (f64, f64),
    nonresp_y: (f64, f64),
) -> NoCovariateCoefficients {
    let (m1, v1) = resp_y;
    let (m0, v0) = nonresp_y;
    assert!(v1 > 0.0 && v0 > 0.0, "outcome variances must be positive");
    assert!(pi > 0.0 && pi < 1.0, "pi must lie strictly inside (0, 1)");
    NoCovariateCoefficients {
        gamma0: ((1.0 - pi) / pi).ln() + m1 * m1 / (2.0 * v1) - m0 * m0 / (2.0 * v0)
            + 0.5 * (v1 / v0).ln(),
        gamma1: m0 / v0 - m1 / v1,
        gamma2: 0.5 / v1 - 0.5 / v0,
    }
}
