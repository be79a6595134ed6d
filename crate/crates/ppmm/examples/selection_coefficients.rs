//! The logistic selection model equivalent to an identified pattern-mixture
//! model, including its two collapse regimes.
//!
//! ```bash
//! cargo run --example selection_coefficients
//! ```

use ppmm::selection::{conditional_params, gamma_coefficients, tau_coefficients};
use ppmm::{builtin_mechanism, identify, lambda_coefficients, Phi, SelectionCoefficients};

fn print_lambdas(tag: &str, c: &SelectionCoefficients) {
    let names = SelectionCoefficients::term_names();
    print!("{tag:<28}");
    for (name, v) in names.iter().zip(c.as_array()) {
        print!(" {name}={v:+.4}");
    }
    println!();
}

fn main() -> ppmm::Result<()> {
    // equal proxy variances: the logit is linear in x and y
    let mech7 = builtin_mechanism("7")?.observed_summary();
    let model = identify(&mech7, Phi::HALF)?;
    let c = lambda_coefficients(&model)?;
    print_lambdas("mechanism 7, phi = 0.5:", &c);
    println!(
        "  conditional respondent:    {:?}",
        conditional_params(&model.respondent)?
    );
    println!(
        "  conditional nonrespondent: {:?}",
        conditional_params(&model.nonrespondent)?
    );
    println!(
        "  logit at (x, y) = (1, 1): {:.6}  (probability {:.4})",
        c.logit_nonresponse(1.0, 1.0),
        c.prob_nonresponse(1.0, 1.0)
    );
    println!(
        "  odds ratio per unit outcome, any (x, y): {:.4}\n",
        c.odds_ratio_y(0.0, 0.0, 1.0)
    );

    // missing at random: every outcome term vanishes
    let mar = lambda_coefficients(&identify(&mech7, Phi::ZERO)?)?;
    print_lambdas("mechanism 7, phi = 0 (MAR):", &mar);

    // unequal variances keep the quadratic and interaction terms alive
    let mech16 = builtin_mechanism("16")?.observed_summary();
    let c16 = lambda_coefficients(&identify(&mech16, Phi::new(0.9)?)?)?;
    print_lambdas("mechanism 16, phi = 0.9:", &c16);
    let x = mech16.overall_mean_x();
    for y in [0.0, 1.0, 2.0] {
        println!(
            "  OR for +1 outcome at (x = {x:.2}, y = {y}): {:.4}",
            c16.odds_ratio_y(x, y, 1.0)
        );
    }

    // the marginal (proxy-only) and covariate-free reductions
    let model16 = identify(&mech16, Phi::new(0.9)?)?;
    let tau = tau_coefficients(
        model16.pi,
        (model16.respondent.mu_x, model16.respondent.var_x),
        (model16.nonrespondent.mu_x, model16.nonrespondent.var_x),
    );
    let gamma = gamma_coefficients(
        model16.pi,
        (model16.respondent.mu_y, model16.respondent.var_y),
        (model16.nonrespondent.mu_y, model16.nonrespondent.var_y),
    );
    println!("\nproxy-only logit:     {:.4} {:+.4} x {:+.4} x^2", tau.tau0, tau.tau1, tau.tau2);
    println!(
        "covariate-free logit: {:.4} {:+.4} y {:+.4} y^2",
        gamma.gamma0, gamma.gamma1, gamma.gamma2
    );
    Ok(())
}
