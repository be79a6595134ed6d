//! Ground truths for validating the closed-form selection model: exact
//! bivariate normal densities, the Bayes density-ratio oracle, a seeded
//! pattern-mixture simulator, and an IRLS logistic fitter for Monte-Carlo
//! recovery of the selection coefficients.

use std::io::Write;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::identification::IdentifiedModel;
use crate::linalg;
use crate::moments::PatternMoments;
use crate::selection::{lambda_coefficients, SelectionCoefficients};

const LN_2PI: f64 = 1.8378770664093453;

/// Exact log-density of the bivariate normal with the given pattern moments.
pub fn bvn_logpdf(m: &PatternMoments, x: f64, y: f64) -> Result<f64> {
    let det = m.det();
    if m.var_x <= 0.0 || m.var_x.is_nan() || det <= 0.0 || det.is_nan() {
        return Err(Error::NotStrictlyPositiveDefinite { det });
    }
    let dx = x - m.mu_x;
    let dy = y - m.mu_y;
    let quad = (m.var_y * dx * dx - 2.0 * m.cov_xy * dx * dy + m.var_x * dy * dy) / det;
    Ok(-LN_2PI - 0.5 * det.ln() - 0.5 * quad)
}

/// Bayes-rule log-odds of nonresponse from the two pattern densities:
/// `log((1 - pi) f0(x, y)) - log(pi f1(x, y))`.
///
/// This is the independent ground truth the analytic selection coefficients
/// are checked against.
pub fn bayes_logit_oracle(model: &IdentifiedModel, x: f64, y: f64) -> Result<f64> {
    let f0 = bvn_logpdf(&model.nonrespondent, x, y)?;
    let f1 = bvn_logpdf(&model.respondent, x, y)?;
    Ok(((1.0 - model.pi) / model.pi).ln() + f0 - f1)
}

/// A draw from the joint model: response indicators and the (x, y) pairs for
/// every unit, respondents and nonrespondents alike.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulatedDataset {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// 1 = respondent, 0 = nonrespondent.
    pub r: Vec<u8>,
    pub seed: u64,
    pub mechanism_id: String,
}

impl SimulatedDataset {
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Write the dataset as CSV with columns `x,y,r`. With `mask_missing`
    /// the outcome cell is left empty for nonrespondents, which makes the
    /// file directly consumable by the analysis pipeline.
    pub fn write_csv<W: Write>(&self, mut w: W, mask_missing: bool) -> Result<()> {
        writeln!(w, "x,y,r")?;
        for i in 0..self.len() {
            if mask_missing && self.r[i] == 0 {
                writeln!(w, "{},,{}", self.x[i], self.r[i])?;
            } else {
                writeln!(w, "{},{},{}", self.x[i], self.y[i], self.r[i])?;
            }
        }
        Ok(())
    }
}

/// Draw `n` units from the identified model: `R ~ Bernoulli(pi)` picks the
/// pattern, then (X, Y) comes from that pattern's bivariate normal via the
/// Cholesky factor of its 2x2 covariance.
///
/// The generator is ChaCha12 seeded with `seed_from_u64`, and normal variates
/// come from the ziggurat sampler, so a fixed seed reproduces the dataset
/// bit for bit.
pub fn simulate(model: &IdentifiedModel, n: usize, seed: u64, label: &str) -> SimulatedDataset {
    assert!(n >= 1, "need at least one unit");
    struct PatternSampler {
        mu_x: f64,
        mu_y: f64,
        sd_x: f64,
        c10: f64,
        c11: f64,
    }
    let sampler = |m: &PatternMoments| {
        let sd_x = m.sd_x();
        PatternSampler {
            mu_x: m.mu_x,
            mu_y: m.mu_y,
            sd_x,
            c10: m.cov_xy / sd_x,
            c11: (m.var_y - m.cov_xy * m.cov_xy / m.var_x).sqrt(),
        }
    };
    let pat = [sampler(&model.nonrespondent), sampler(&model.respondent)];

    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut x = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    let mut r = Vec::with_capacity(n);
    for _ in 0..n {
        let respondent = rng.random_bool(model.pi);
        let p = &pat[respondent as usize];
        let z1: f64 = rng.sample(StandardNormal);
        let z2: f64 = rng.sample(StandardNormal);
        x.push(p.mu_x + p.sd_x * z1);
        y.push(p.mu_y + p.c10 * z1 + p.c11 * z2);
        r.push(respondent as u8);
    }
    SimulatedDataset {
        x,
        y,
        r,
        seed,
        mechanism_id: label.to_string(),
    }
}

/// Options for the IRLS logistic fitter.
#[derive(Debug, Clone, Copy)]
pub struct IrlsOptions {
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for IrlsOptions {
    fn default() -> Self {
        Self {
            max_iter: 50,
            tol: 1e-10,
        }
    }
}

/// Maximum-likelihood logistic fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticFit {
    pub coefficients: Vec<f64>,
    pub standard_errors: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
    pub deviance: f64,
    /// Deviance after each accepted iteration; non-increasing by
    /// construction (step halving).
    pub deviance_trace: Vec<f64>,
    /// True when a singular weighted normal matrix forced a 1e-8 ridge.
    pub ridge_used: bool,
}

const SEPARATION_NORM: f64 = 1e3;

/// Logistic regression by iteratively reweighted least squares.
///
/// Converges when the largest absolute score falls below `tol` or the
/// relative deviance change does. Each Newton step is halved until the
/// deviance does not increase. Coefficient norms above 1e3 are treated as
/// separation; non-convergence within `max_iter` is reported through the
/// `converged` flag rather than an error.
pub fn irls_logistic(
    features: &DMatrix<f64>,
    response: &[bool],
    opts: &IrlsOptions,
) -> Result<LogisticFit> {
    let n = features.nrows();
    let p = features.ncols();
    assert_eq!(n, response.len(), "features and response must align");
    let n_pos = response.iter().filter(|r| **r).count();
    if n_pos == 0 || n_pos == n {
        // constant response: the MLE does not exist
        return Err(Error::Separation {
            norm: 0.0,
            iteration: 0,
        });
    }

    // rank check on the raw feature matrix
    let gram = cross_products(features, None);
    linalg::cholesky(&gram, linalg::PIVOT_REL_TOL)
        .map_err(|pivot| Error::RankDeficient { pivot })?;

    let mut beta = DVector::<f64>::zeros(p);
    let mut eta = DVector::<f64>::zeros(n);
    let mut deviance = deviance_of(&eta, response);
    let mut trace = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    let mut ridge_used = false;

    for iter in 1..=opts.max_iter {
        iterations = iter;
        // score and weighted normal matrix at the current beta
        let mu: Vec<f64> = eta.iter().map(|e| sigmoid(*e)).collect();
        let mut score = DVector::<f64>::zeros(p);
        let mut info = DMatrix::<f64>::zeros(p, p);
        for i in 0..n {
            let yi = response[i] as u8 as f64;
            let resid = yi - mu[i];
            let w = (mu[i] * (1.0 - mu[i])).max(1e-10);
            for a in 0..p {
                let fa = features[(i, a)];
                score[a] += fa * resid;
                for b in a..p {
                    info[(a, b)] += w * fa * features[(i, b)];
                }
            }
        }
        for a in 0..p {
            for b in 0..a {
                info[(a, b)] = info[(b, a)];
            }
        }

        if score.amax() < opts.tol {
            converged = true;
            iterations = iter - 1;
            break;
        }

        let factor = match linalg::cholesky(&info, linalg::PIVOT_REL_TOL) {
            Ok(f) => f,
            Err(_) => {
                // ridge fallback for near-degenerate weighted systems
                ridge_used = true;
                let mut ridged = info.clone();
                for j in 0..p {
                    ridged[(j, j)] += 1e-8;
                }
                linalg::cholesky(&ridged, 0.0).map_err(|pivot| Error::RankDeficient { pivot })?
            }
        };
        let delta = linalg::solve_with_factor(&factor, &score);

        // step halving keeps the deviance non-increasing
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..30 {
            let candidate = &beta + &delta * step;
            let eta_c = features * &candidate;
            let dev_c = deviance_of(&eta_c, response);
            if dev_c <= deviance {
                accepted = Some((candidate, eta_c, dev_c));
                break;
            }
            step *= 0.5;
        }
        let Some((beta_new, eta_new, dev_new)) = accepted else {
            // no improving step: already at the numerical optimum
            converged = true;
            break;
        };

        let rel_change = (deviance - dev_new).abs() / deviance.max(f64::MIN_POSITIVE);
        beta = beta_new;
        eta = eta_new;
        deviance = dev_new;
        trace.push(deviance);

        let norm = beta.norm();
        if norm > SEPARATION_NORM {
            return Err(Error::Separation {
                norm,
                iteration: iter,
            });
        }
        if rel_change < opts.tol {
            converged = true;
            break;
        }
    }

    // standard errors from the inverse observed information at the final beta
    let mu: Vec<f64> = eta.iter().map(|e| sigmoid(*e)).collect();
    let weights: Vec<f64> = mu.iter().map(|m| (m * (1.0 - m)).max(1e-10)).collect();
    let info = cross_products(features, Some(&weights));
    let factor = match linalg::cholesky(&info, linalg::PIVOT_REL_TOL) {
        Ok(f) => f,
        Err(_) => {
            ridge_used = true;
            let mut ridged = info.clone();
            for j in 0..p {
                ridged[(j, j)] += 1e-8;
            }
            linalg::cholesky(&ridged, 0.0).map_err(|pivot| Error::RankDeficient { pivot })?
        }
    };
    let cov = linalg::inverse_with_factor(&factor);
    let standard_errors: Vec<f64> = (0..p).map(|j| cov[(j, j)].sqrt()).collect();

    Ok(LogisticFit {
        coefficients: beta.iter().copied().collect(),
        standard_errors,
        converged,
        iterations,
        deviance,
        deviance_trace: trace,
        ridge_used,
    })
}

fn cross_products(features: &DMatrix<f64>, weights: Option<&[f64]>) -> DMatrix<f64> {
    let n = features.nrows();
    let p = features.ncols();
    let mut gram = DMatrix::<f64>::zeros(p, p);
    for i in 0..n {
        let w = weights.map_or(1.0, |w| w[i]);
        for a in 0..p {
            let fa = w * features[(i, a)];
            for b in a..p {
                gram[(a, b)] += fa * features[(i, b)];
            }
        }
    }
    for a in 0..p {
        for b in 0..a {
            gram[(a, b)] = gram[(b, a)];
        }
    }
    gram
}

fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

/// `-2 log L`, summed stably via softplus.
fn deviance_of(eta: &DVector<f64>, response: &[bool]) -> f64 {
    let mut d = 0.0;
    for (e, r) in eta.iter().zip(response) {
        let softplus = if *e > 30.0 {
            e + (-e).exp()
        } else if *e < -30.0 {
            e.exp()
        } else {
            e.exp().ln_1p()
        };
        d += softplus - if *r { *e } else { 0.0 };
    }
    2.0 * d
}

/// One coefficient of a Monte-Carlo recovery report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefComparison {
    pub name: String,
    pub analytic: f64,
    pub estimate: f64,
    pub se: f64,
    pub z: f64,
}

/// Monte-Carlo recovery of the selection coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaRecovery {
    pub fit: LogisticFit,
    pub comparisons: Vec<CoefComparison>,
    pub max_abs_z: f64,
}

/// Simulate `n` units from the model, regress the nonresponse indicator on
/// the quadratic features (1, x, x^2, y, xy, y^2), and compare the fitted
/// coefficients against the analytic selection coefficients.
pub fn mc_recover_lambdas(model: &IdentifiedModel, n: usize, seed: u64) -> Result<LambdaRecovery> {
    assert!(n >= 10_000, "recovery needs at least 1e4 units");
    let analytic = lambda_coefficients(model)?;
    let sim = simulate(model, n, seed, "mc");
    let fit = recover_from_dataset(&sim, &analytic)?;
    Ok(fit)
}

/// The regression-and-compare half of `mc_recover_lambdas`, reusable for
/// externally produced datasets.
pub fn recover_from_dataset(
    sim: &SimulatedDataset,
    analytic: &SelectionCoefficients,
) -> Result<LambdaRecovery> {
    let n = sim.len();
    let features = DMatrix::from_fn(n, 6, |i, j| {
        let (x, y) = (sim.x[i], sim.y[i]);
        match j {
            0 => 1.0,
            1 => x,
            2 => x * x,
            3 => y,
            4 => x * y,
            _ => y * y,
        }
    });
    // event is nonresponse
    let response: Vec<bool> = sim.r.iter().map(|r| *r == 0).collect();
    let fit = irls_logistic(&features, &response, &IrlsOptions::default())?;

    let truth = analytic.as_array();
    let names = SelectionCoefficients::term_names();
    let mut comparisons = Vec::with_capacity(6);
    let mut max_abs_z = 0.0_f64;
    for j in 0..6 {
        let z = (fit.coefficients[j] - truth[j]) / fit.standard_errors[j];
        max_abs_z = max_abs_z.max(z.abs());
        comparisons.push(CoefComparison {
            name: names[j].to_string(),
            analytic: truth[j],
            estimate: fit.coefficients[j],
            se: fit.standard_errors[j],
            z,
        });
    }
    Ok(LambdaRecovery {
        fit,
        comparisons,
        max_abs_z,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::identification::{identify, Phi};
    use crate::moments::ObservedSummary;

    fn mech(nonresp_mu_x: f64, nonresp_var_x: f64) -> ObservedSummary {
        ObservedSummary {
            respondent: PatternMoments::new(1.0, 1.0, 1.0, 1.0, 0.2),
            nonresp_mu_x,
            nonresp_var_x,
            pi: 0.75,
        }
    }

    #[test]
    fn standard_bvn_at_origin() {
        let m = PatternMoments::new(0.0, 0.0, 1.0, 1.0, 0.0);
        let v = bvn_logpdf(&m, 0.0, 0.0).unwrap();
        assert!((v - (-LN_2PI)).abs() < 1e-15);
    }

    #[test]
    fn bvn_symmetric_under_zero_correlation() {
        let m = PatternMoments::new(2.0, -1.0, 1.5, 0.5, 0.0);
        for (dx, dy) in [(0.3, 0.7), (1.1, -0.4)] {
            let a = bvn_logpdf(&m, 2.0 + dx, -1.0 + dy).unwrap();
            let b = bvn_logpdf(&m, 2.0 - dx, -1.0 - dy).unwrap();
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn bvn_rejects_degenerate_covariance() {
        let m = PatternMoments::new(0.0, 0.0, 1.0, 1.0, 1.0);
        assert!(matches!(
            bvn_logpdf(&m, 0.0, 0.0),
            Err(Error::NotStrictlyPositiveDefinite { .. })
        ));
    }

    #[test]
    fn bvn_integrates_to_one_by_trapezoid() {
        // 2d trapezoid over +-8 sd at sd/4 steps; the integrand decays fast
        // enough that this is far tighter than the 1e-6 requirement
        let m = PatternMoments::new(1.0, 1.0, 1.0, 1.0, 0.8);
        let steps = 64usize;
        let (sx, sy) = (m.sd_x(), m.sd_y());
        let (hx, hy) = (16.0 * sx / steps as f64, 16.0 * sy / steps as f64);
        let mut total = 0.0;
        for i in 0..=steps {
            let wx = if i == 0 || i == steps { 0.5 } else { 1.0 };
            let x = m.mu_x - 8.0 * sx + i as f64 * hx;
            for j in 0..=steps {
                let wy = if j == 0 || j == steps { 0.5 } else { 1.0 };
                let y = m.mu_y - 8.0 * sy + j as f64 * hy;
                total += wx * wy * bvn_logpdf(&m, x, y).unwrap().exp();
            }
        }
        total *= hx * hy;
        assert!((total - 1.0).abs() < 1e-6, "integral = {total}");
    }

    #[test]
    fn oracle_constant_when_patterns_coincide() {
        let model = identify(&mech(1.0, 1.0), Phi::new(0.3).unwrap()).unwrap();
        let expect = (0.25f64 / 0.75).ln();
        for (x, y) in [(0.0, 0.0), (1.0, 2.0), (-3.0, 0.5)] {
            assert!((bayes_logit_oracle(&model, x, y).unwrap() - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn oracle_matches_lambda_polynomial_at_unit_point() {
        let model = identify(&mech(0.8, 1.0), Phi::HALF).unwrap();
        let v = bayes_logit_oracle(&model, 1.0, 1.0).unwrap();
        assert!((v - (-1.131945622001443)).abs() < 1e-12);
        let c = lambda_coefficients(&model).unwrap();
        assert!((v - c.logit_nonresponse(1.0, 1.0)).abs() < 1e-12);
    }

    #[test]
    fn oracle_matches_lambda_polynomial_on_a_grid() {
        for (mx0, vx0) in [(0.8, 0.9), (1.2, 1.1), (0.8, 1.0)] {
            let model = identify(&mech(mx0, vx0), Phi::new(0.8).unwrap()).unwrap();
            let c = lambda_coefficients(&model).unwrap();
            let mut worst = 0.0_f64;
            for i in 0..31 {
                for j in 0..31 {
                    let x = 1.0 + (i as f64 / 30.0 - 0.5) * 8.0;
                    let y = 1.0 + (j as f64 / 30.0 - 0.5) * 8.0;
                    let diff =
                        (bayes_logit_oracle(&model, x, y).unwrap() - c.logit_nonresponse(x, y)).abs();
                    worst = worst.max(diff);
                }
            }
            assert!(worst < 1e-10, "max |oracle - polynomial| = {worst:.3e}");
        }
    }

    #[test]
    fn simulate_is_deterministic_per_seed() {
        let model = identify(&mech(0.8, 1.0), Phi::HALF).unwrap();
        let a = simulate(&model, 500, 42, "m7");
        let b = simulate(&model, 500, 42, "m7");
        assert_eq!(a, b);
        let c = simulate(&model, 500, 43, "m7");
        assert_ne!(a.x, c.x);
    }

    #[test]
    fn simulate_single_unit() {
        let model = identify(&mech(0.8, 1.0), Phi::HALF).unwrap();
        let d = simulate(&model, 1, 7, "m7");
        assert_eq!(d.len(), 1);
        assert!(d.r[0] == 0 || d.r[0] == 1);
    }

    #[test]
    fn simulate_within_pattern_moments_converge() {
        // every within-pattern sample moment lands within five standard
        // errors of its model value at n = 1e6 (seeded, deterministic)
        let model = identify(&mech(0.8, 1.1), Phi::new(0.6).unwrap()).unwrap();
        let n = 1_000_000;
        let d = simulate(&model, n, 1234, "m");

        let check_pattern = |want: &PatternMoments, flag: u8| {
            let pairs: Vec<(f64, f64)> = d
                .x
                .iter()
                .zip(&d.y)
                .zip(&d.r)
                .filter(|(_, r)| **r == flag)
                .map(|((x, y), _)| (*x, *y))
                .collect();
            let m = pairs.len() as f64;
            let mx = pairs.iter().map(|(x, _)| x).sum::<f64>() / m;
            let my = pairs.iter().map(|(_, y)| y).sum::<f64>() / m;
            let mut vx = 0.0;
            let mut vy = 0.0;
            let mut cxy = 0.0;
            for (x, y) in &pairs {
                vx += (x - mx) * (x - mx);
                vy += (y - my) * (y - my);
                cxy += (x - mx) * (y - my);
            }
            vx /= m - 1.0;
            vy /= m - 1.0;
            cxy /= m - 1.0;

            let se_cov = ((want.var_x * want.var_y + want.cov_xy * want.cov_xy) / m).sqrt();
            let checks = [
                (mx, want.mu_x, want.sd_x() / m.sqrt(), "mu_x"),
                (my, want.mu_y, want.sd_y() / m.sqrt(), "mu_y"),
                (vx, want.var_x, want.var_x * (2.0 / m).sqrt(), "var_x"),
                (vy, want.var_y, want.var_y * (2.0 / m).sqrt(), "var_y"),
                (cxy, want.cov_xy, se_cov, "cov_xy"),
            ];
            for (got, truth, se, name) in checks {
                assert!(
                    (got - truth).abs() < 5.0 * se,
                    "pattern {flag} {name}: {got} vs {truth} (se {se:.2e})"
                );
            }
        };
        check_pattern(&model.respondent, 1);
        check_pattern(&model.nonrespondent, 0);

        let share = d.r.iter().filter(|r| **r == 1).count() as f64 / n as f64;
        assert!((share - 0.75).abs() < 5.0 * (0.75f64 * 0.25 / n as f64).sqrt());
    }

    #[test]
    fn irls_intercept_only_matches_logit_of_mean() {
        let n = 1000;
        let response: Vec<bool> = (0..n).map(|i| i % 5 == 0).collect();
        let features = DMatrix::from_element(n, 1, 1.0);
        let fit = irls_logistic(&features, &response, &IrlsOptions::default()).unwrap();
        assert!(fit.converged);
        let p = 0.2_f64;
        assert!((fit.coefficients[0] - (p / (1.0 - p)).ln()).abs() < 1e-8);
    }

    #[test]
    fn irls_recovers_known_coefficients() {
        // y ~ Bernoulli(sigmoid(0.5 - 1.2 z1 + 0.7 z2)), n = 1e5
        let mut rng = ChaCha12Rng::seed_from_u64(99);
        let n = 100_000;
        let mut features = DMatrix::<f64>::zeros(n, 3);
        let mut response = Vec::with_capacity(n);
        for i in 0..n {
            let z1: f64 = rng.sample(StandardNormal);
            let z2: f64 = rng.sample(StandardNormal);
            features[(i, 0)] = 1.0;
            features[(i, 1)] = z1;
            features[(i, 2)] = z2;
            let eta = 0.5 - 1.2 * z1 + 0.7 * z2;
            response.push(rng.random_bool(sigmoid(eta)));
        }
        let fit = irls_logistic(&features, &response, &IrlsOptions::default()).unwrap();
        assert!(fit.converged);
        for (j, truth) in [0.5, -1.2, 0.7].iter().enumerate() {
            let z = (fit.coefficients[j] - truth) / fit.standard_errors[j];
            assert!(z.abs() < 4.0, "coef {j}: z = {z}");
        }
    }

    #[test]
    fn irls_deviance_never_increases() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let n = 2000;
        let mut features = DMatrix::<f64>::zeros(n, 2);
        let mut response = Vec::with_capacity(n);
        for i in 0..n {
            let z: f64 = rng.sample(StandardNormal);
            features[(i, 0)] = 1.0;
            features[(i, 1)] = z;
            response.push(rng.random_bool(sigmoid(2.0 * z)));
        }
        let fit = irls_logistic(&features, &response, &IrlsOptions::default()).unwrap();
        for w in fit.deviance_trace.windows(2) {
            assert!(w[1] <= w[0] + 1e-12, "deviance increased: {w:?}");
        }
    }

    #[test]
    fn irls_detects_separation() {
        // separable with tiny feature scale, so the coefficient norm must
        // blow past the 1e3 detection threshold
        let xs = [-0.002, -0.001, 0.001, 0.002];
        let features = DMatrix::from_fn(4, 2, |i, j| if j == 0 { 1.0 } else { xs[i] });
        let response = vec![false, false, true, true];
        let err = irls_logistic(&features, &response, &IrlsOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Separation { .. }));
    }

    #[test]
    fn irls_rejects_duplicate_features() {
        let features = DMatrix::from_fn(10, 2, |i, _| i as f64);
        let response: Vec<bool> = (0..10).map(|i| i % 2 == 0).collect();
        let err = irls_logistic(&features, &response, &IrlsOptions::default()).unwrap_err();
        assert!(matches!(err, Error::RankDeficient { .. }));
    }

    #[test]
    fn mc_recovery_covers_the_analytic_lambdas() {
        let model = identify(&mech(1.2, 1.0), Phi::HALF).unwrap();
        let rec = mc_recover_lambdas(&model, 200_000, 31).unwrap();
        assert!(rec.fit.converged);
        assert!(rec.max_abs_z < 4.0, "max |z| = {}", rec.max_abs_z);
    }

    #[test]
    fn mc_recovery_mar_outcome_terms_are_null() {
        let model = identify(&mech(1.2, 1.0), Phi::ZERO).unwrap();
        let rec = mc_recover_lambdas(&model, 100_000, 77).unwrap();
        for row in &rec.comparisons[3..] {
            assert!(
                (row.estimate / row.se).abs() < 4.0,
                "{}: fitted {} (se {})",
                row.name,
                row.estimate,
                row.se
            );
        }
    }

    #[test]
    fn mc_recovery_equal_variance_quadratic_terms_are_null() {
        let model = identify(&mech(0.8, 1.0), Phi::new(0.6).unwrap()).unwrap();
        let rec = mc_recover_lambdas(&model, 100_000, 13).unwrap();
        for idx in [2, 4, 5] {
            let row = &rec.comparisons[idx];
            assert!(
                (row.estimate / row.se).abs() < 4.0,
                "{}: fitted {} (se {})",
                row.name,
                row.estimate,
                row.se
            );
        }
    }
}
