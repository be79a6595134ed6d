//! Identify the nonrespondent distribution across the sensitivity range.
//!
//! ```bash
//! cargo run --example identify_mechanism
//! ```

use ppmm::{
    builtin_mechanism, g_factor, identify, marginal_mean, phi_validity_bound, ObservedSummary,
    PatternMoments, Phi,
};

fn main() -> ppmm::Result<()> {
    let mech = builtin_mechanism("10")?;
    let obs = mech.observed_summary();
    println!(
        "mechanism {}: respondent proxy N({}, {}), outcome N({}, {}), rho = {}, pi = {}",
        mech.id,
        obs.respondent.mu_x,
        obs.respondent.var_x,
        obs.respondent.mu_y,
        obs.respondent.var_y,
        obs.respondent.rho(),
        obs.pi
    );
    println!(
        "nonrespondent proxy N({}, {})\n",
        obs.nonresp_mu_x, obs.nonresp_var_x
    );

    println!("phi      g       mu_y0    var_y0   cov_xy0  marginal mean");
    for phi in [0.0, 0.25, 0.5, 0.75, 0.9, 1.0] {
        let phi = Phi::new(phi)?;
        let g = g_factor(phi, obs.respondent.rho())?;
        let model = identify(&obs, phi)?;
        let m = model.nonrespondent;
        println!(
            "{:<8} {:<7.4} {:<8.4} {:<8.4} {:<8.4} {:.4}",
            phi.value(),
            g,
            m.mu_y,
            m.var_y,
            m.cov_xy,
            marginal_mean(&model)
        );
    }

    // a summary that cannot support the whole phi range: the nonrespondent
    // proxy variance is half the respondent one, so the implied outcome
    // variance eventually turns negative
    let shrink = ObservedSummary {
        respondent: PatternMoments::new(1.0, 1.0, 1.0, 1.0, 0.2),
        nonresp_mu_x: 1.0,
        nonresp_var_x: 0.5,
        pi: 0.75,
    };
    let bound = phi_validity_bound(&shrink, 0.01)?;
    println!(
        "\nshrinking-variance summary identifies only on [{}, {}]",
        bound.lo, bound.hi
    );
    match identify(&shrink, Phi::ONE) {
        Err(e) => println!("at phi = 1: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
