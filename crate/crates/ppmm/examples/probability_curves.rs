//! Nonresponse probability as a function of the outcome, for a survey-style
//! summary: the PHQ-4 depression score in the Household Pulse Survey.
//!
//! Only the proxy-side moments of that survey are published; the respondent
//! outcome moments here come from proxy self-consistency (see
//! `mechanisms::household_pulse_phq4_default`). Pass different outcome
//! moments through `household_pulse_phq4(mu_y, var_y)` to see how the
//! curves move.
//!
//! ```bash
//! cargo run --example probability_curves
//! ```

use ppmm::mechanisms::household_pulse_phq4_default;
use ppmm::sweep::{default_phi_levels, XFix};
use ppmm::{sweep_prob, Phi};

fn main() -> ppmm::Result<()> {
    let obs = household_pulse_phq4_default();
    println!(
        "summary: pi = {}, proxy N({}, {}) vs N({}, {}), rho = {:.2}, outcome sd = {:.2}\n",
        obs.pi,
        obs.respondent.mu_x,
        obs.respondent.var_x,
        obs.nonresp_mu_x,
        obs.nonresp_var_x,
        obs.respondent.rho(),
        obs.respondent.sd_y()
    );

    // score scale runs 0..=12
    let y_grid: Vec<f64> = (0..=12).map(|v| v as f64).collect();
    let series = sweep_prob(
        &obs,
        None,
        &default_phi_levels(),
        &y_grid,
        XFix::OverallMean,
    )?;

    print!("score ");
    for s in &series {
        print!("  phi={:<4}", s.metadata.phi.unwrap());
    }
    println!();
    for (i, y) in y_grid.iter().enumerate() {
        print!("{y:<6}");
        for s in &series {
            print!("  {:<8.4}", s.points[i].value.unwrap());
        }
        println!();
    }

    println!("\nthe phi = 0 column is flat: under missing-at-random the outcome");
    println!("cannot move the response probability. Larger phi values steepen the");
    println!("curve; at phi = 1 the implied probabilities at the top of the scale");
    println!("are extreme enough to argue for a tighter bound on phi.");

    // how extreme? compare the phi = 0.75 and phi = 1 tails
    for phi in [0.75, 1.0] {
        let s = sweep_prob(&obs, None, &[Phi::new(phi)?], &[12.0], XFix::OverallMean)?;
        println!(
            "p(missing | score = 12) at phi = {phi}: {:.3}",
            s[0].points[0].value.unwrap()
        );
    }
    Ok(())
}
