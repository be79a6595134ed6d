//! Bivariate pattern moments, observed-data summaries, and proxy construction.
//!
//! The observed data for a survey outcome subject to nonresponse reduce to a
//! handful of moments: the respondent mean/variance/covariance of the proxy
//! and outcome, the nonrespondent proxy mean and variance, and the response
//! rate. Everything downstream (identification, the selection model, the
//! sweeps) consumes these summaries, so estimating them well-definedly is the
//! job of this module.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

/// First and second moments of (proxy X, outcome Y) within one response
/// pattern, assumed bivariate normal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PatternMoments {
    pub mu_x: f64,
    pub mu_y: f64,
    pub var_x: f64,
    pub var_y: f64,
    pub cov_xy: f64,
}

impl PatternMoments {
    pub fn new(mu_x: f64, mu_y: f64, var_x: f64, var_y: f64, cov_xy: f64) -> Self {
        Self {
            mu_x,
            mu_y,
            var_x,
            var_y,
            cov_xy,
        }
    }

    /// Checks the invariants (positive variances, strictly positive-definite
    /// covariance matrix) and returns the moments unchanged if they hold.
    pub fn validated(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.var_x <= 0.0 || self.var_x.is_nan() {
            return Err(Error::NonPositiveVariance {
                name: "var_x",
                value: self.var_x,
            });
        }
        if self.var_y <= 0.0 || self.var_y.is_nan() {
            return Err(Error::NonPositiveVariance {
                name: "var_y",
                value: self.var_y,
            });
        }
        let cov_sq = self.cov_xy * self.cov_xy;
        let bound = self.var_x * self.var_y;
        if cov_sq >= bound {
            return Err(Error::NotPositiveDefinite { cov_sq, bound });
        }
        Ok(())
    }

    pub fn sd_x(&self) -> f64 {
        self.var_x.sqrt()
    }

    pub fn sd_y(&self) -> f64 {
        self.var_y.sqrt()
    }

    /// Correlation between proxy and outcome implied by the moments.
    pub fn rho(&self) -> f64 {
        self.cov_xy / (self.sd_x() * self.sd_y())
    }

    /// Determinant of the 2x2 covariance matrix.
    pub fn det(&self) -> f64 {
        self.var_x * self.var_y - self.cov_xy * self.cov_xy
    }
}

/// Everything the observed data identify: respondent moments, nonrespondent
/// proxy moments, and the response rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObservedSummary {
    pub respondent: PatternMoments,
    pub nonresp_mu_x: f64,
    pub nonresp_var_x: f64,
    pub pi: f64,
}

impl ObservedSummary {
    pub fn validated(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        self.respondent.validate()?;
        if self.nonresp_var_x <= 0.0 || self.nonresp_var_x.is_nan() {
            return Err(Error::NonPositiveVariance {
                name: "nonresp_var_x",
                value: self.nonresp_var_x,
            });
        }
        if self.pi <= 0.0 || self.pi >= 1.0 || self.pi.is_nan() {
            return Err(Error::InvalidResponseRate { pi: self.pi });
        }
        Ok(())
    }

    /// Mean of the proxy over the whole sample, `pi * mu_x^(1) + (1 - pi) * mu_x^(0)`.
    pub fn overall_mean_x(&self) -> f64 {
        self.pi * self.respondent.mu_x + (1.0 - self.pi) * self.nonresp_mu_x
    }
}

/// Which denominator sample variances and covariances use.
///
/// The unbiased `n - 1` form is the default; the maximum-likelihood `n` form
/// differs at O(1/n) and is exposed for callers that want likelihood-scale
/// moments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum VarianceMode {
    #[default]
    Unbiased,
    Mle,
}

impl VarianceMode {
    fn denominator(self, n: usize) -> f64 {
        match self {
            VarianceMode::Unbiased => (n - 1) as f64,
            VarianceMode::Mle => n as f64,
        }
    }
}

/// Result of regressing the outcome on the covariates among respondents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProxyFit {
    /// Intercept followed by one coefficient per design column.
    pub coefficients: Vec<f64>,
    /// Predicted outcome for every sampled unit, respondent or not.
    pub proxy_values: Vec<f64>,
    pub r_squared: f64,
    /// Correlation between proxy and outcome among respondents; equals
    /// sqrt(r_squared) up to rounding because the proxy is the fitted value.
    pub respondent_rho: f64,
}

/// Ordinary least squares of `y_respondents` on `design_respondents` (an
/// intercept is added internally), with predictions over `design_all`.
///
/// Solved by normal equations with a symmetric positive-definite
/// factorization; collinear columns surface as `RankDeficientDesign` via a
/// relative pivot tolerance of 1e-10.
pub fn fit_proxy(
    y_respondents: &[f64],
    design_respondents: &DMatrix<f64>,
    design_all: &DMatrix<f64>,
) -> Result<ProxyFit> {
    let n = design_respondents.nrows();
    let p = design_respondents.ncols();
    assert_eq!(n, y_respondents.len(), "respondent rows must match y length");
    assert_eq!(
        p,
        design_all.ncols(),
        "design matrices must share column count"
    );

    // Normal equations on the intercept-augmented design.
    let q = p + 1;
    let mut gram = DMatrix::<f64>::zeros(q, q);
    let mut rhs = DVector::<f64>::zeros(q);
    for i in 0..n {
        let yi = y_respondents[i];
        // row = (1, z_i1, ..., z_ip)
        for a in 0..q {
            let va = if a == 0 {
                1.0
            } else {
                design_respondents[(i, a - 1)]
            };
            rhs[a] += va * yi;
            for b in a..q {
                let vb = if b == 0 {
                    1.0
                } else {
                    design_respondents[(i, b - 1)]
                };
                gram[(a, b)] += va * vb;
            }
        }
    }
    for a in 0..q {
        for b in 0..a {
            gram[(a, b)] = gram[(b, a)];
        }
    }

    let factor = linalg::cholesky(&gram, linalg::PIVOT_REL_TOL)
        .map_err(|pivot| Error::RankDeficientDesign { pivot })?;
    let coef = linalg::solve_with_factor(&factor, &rhs);

    let predict = |design: &DMatrix<f64>, i: usize| -> f64 {
        let mut v = coef[0];
        for j in 0..p {
            v += coef[j + 1] * design[(i, j)];
        }
        v
    };
    let proxy_values: Vec<f64> = (0..design_all.nrows())
        .map(|i| predict(design_all, i))
        .collect();
    let fitted: Vec<f64> = (0..n).map(|i| predict(design_respondents, i)).collect();

    let y_mean = y_respondents.iter().sum::<f64>() / n as f64;
    let ss_tot: f64 = y_respondents.iter().map(|y| (y - y_mean).powi(2)).sum();
    let ss_res: f64 = y_respondents
        .iter()
        .zip(&fitted)
        .map(|(y, f)| (y - f).powi(2))
        .sum();

    let (r_squared, respondent_rho) = if ss_tot > 0.0 {
        let f_mean = fitted.iter().sum::<f64>() / n as f64;
        let sf: f64 = fitted.iter().map(|f| (f - f_mean).powi(2)).sum();
        let rho = if sf > 0.0 {
            let sxy: f64 = y_respondents
                .iter()
                .zip(&fitted)
                .map(|(y, f)| (y - y_mean) * (f - f_mean))
                .sum();
            sxy / (ss_tot.sqrt() * sf.sqrt())
        } else {
            0.0
        };
        (1.0 - ss_res / ss_tot, rho)
    } else {
        // constant outcome: no proxy strength to speak of
        (0.0, 0.0)
    };

    Ok(ProxyFit {
        coefficients: coef.iter().copied().collect(),
        proxy_values,
        r_squared,
        respondent_rho,
    })
}

/// Sample moments of (proxy, outcome) by response pattern.
///
/// Units with `Some(y)` are respondents; units with `None` are
/// nonrespondents. Returns the summary without validating the moment
/// invariants, since degenerate inputs (for example, constant proxy within a
/// pattern) still have well-defined sample moments; downstream consumers
/// validate.
pub fn summarize(
    proxy: &[f64],
    y: &[Option<f64>],
    mode: VarianceMode,
) -> Result<ObservedSummary> {
    assert_eq!(proxy.len(), y.len(), "proxy and outcome must align");
    let n = proxy.len();

    let mut resp: Vec<(f64, f64)> = Vec::new();
    let mut nonresp_x: Vec<f64> = Vec::new();
    for i in 0..n {
        match y[i] {
            Some(yi) => resp.push((proxy[i], yi)),
            None => nonresp_x.push(proxy[i]),
        }
    }
    if resp.len() < 2 {
        return Err(Error::InsufficientPattern {
            pattern: "respondent",
            count: resp.len(),
        });
    }
    if nonresp_x.len() < 2 {
        return Err(Error::InsufficientPattern {
            pattern: "nonrespondent",
            count: nonresp_x.len(),
        });
    }

    let r = resp.len();
    let mx = resp.iter().map(|(x, _)| x).sum::<f64>() / r as f64;
    let my = resp.iter().map(|(_, y)| y).sum::<f64>() / r as f64;
    let denom = mode.denominator(r);
    let mut vx = 0.0;
    let mut vy = 0.0;
    let mut cxy = 0.0;
    for (x, yv) in &resp {
        vx += (x - mx) * (x - mx);
        vy += (yv - my) * (yv - my);
        cxy += (x - mx) * (yv - my);
    }
    vx /= denom;
    vy /= denom;
    cxy /= denom;

    let m = nonresp_x.len();
    let mx0 = nonresp_x.iter().sum::<f64>() / m as f64;
    let vx0 = nonresp_x.iter().map(|x| (x - mx0).powi(2)).sum::<f64>() / mode.denominator(m);

    Ok(ObservedSummary {
        respondent: PatternMoments::new(mx, my, vx, vy, cxy),
        nonresp_mu_x: mx0,
        nonresp_var_x: vx0,
        pi: r as f64 / n as f64,
    })
}
