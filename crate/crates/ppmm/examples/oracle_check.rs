//! The central identity: the quadratic selection polynomial equals the Bayes
//! density-ratio logit everywhere, for every identifiable (mechanism, phi).
//!
//! ```bash
//! cargo run --example oracle_check
//! ```

use ppmm::analysis::{validate, ValidateOptions};
use ppmm::{bayes_logit_oracle, builtin_mechanisms, identify, lambda_coefficients, Phi, PhiGrid};

fn main() -> ppmm::Result<()> {
    // a single point, both routes spelled out
    let mech = &builtin_mechanisms()[6];
    let model = identify(&mech.observed_summary(), Phi::HALF)?;
    let coeffs = lambda_coefficients(&model)?;
    let (x, y) = (1.0, 1.0);
    let poly = coeffs.logit_nonresponse(x, y);
    let oracle = bayes_logit_oracle(&model, x, y)?;
    println!("mechanism {}, phi = 0.5, (x, y) = ({x}, {y}):", mech.id);
    println!("  polynomial logit:    {poly:.15}");
    println!("  density-ratio logit: {oracle:.15}");
    println!("  |difference| = {:.3e}\n", (poly - oracle).abs());

    // the full scan: every mechanism, the whole phi grid, a 31 x 31 grid of
    // evaluation points spanning four respondent SDs
    let opts = ValidateOptions {
        phi_grid: PhiGrid::default(),
        mc_n: 0,
        ..ValidateOptions::default()
    };
    let report = validate(&builtin_mechanisms(), &opts);
    println!("mechanism  max |diff|   points    excluded phi values");
    for m in &report.oracle.per_mechanism {
        let excluded = if m.excluded_phis.is_empty() {
            "none".to_string()
        } else {
            format!(
                "{} (from {:.2})",
                m.excluded_phis.len(),
                m.excluded_phis.first().unwrap()
            )
        };
        println!(
            "{:<10} {:<12.3e} {:<9} {}",
            m.mechanism_id, m.max_abs_diff, m.points_checked, excluded
        );
    }
    println!(
        "\noverall max |analytic - oracle| = {:.3e} (threshold {:.0e}) -> {}",
        report.oracle.max_abs_diff,
        report.oracle.threshold,
        if report.oracle.passed { "PASS" } else { "FAIL" }
    );
    Ok(())
}
