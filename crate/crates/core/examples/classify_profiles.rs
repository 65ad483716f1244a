//! Classify every catalog metric into the power or logarithmic branch from
//! its radial profile alone, and compare with the expected branch.
//!
//! The logarithmic branch only pins `w` down up to a bounded factor
//! `e^{O(1)}`, so a logarithmic result asserts consistency with the branch,
//! not an exact profile.
//!
//! Run with `cargo run --example classify_profiles`.

use special_kahler::catalog::all_entries;
use special_kahler::singularity::{classify, dyadic_radii, profile_from_metric, Branch};

fn describe(branch: Branch) -> String {
    match branch {
        Branch::Power { beta, c } => format!("power beta = {beta:.4}, C = {c:.4}"),
        Branch::Logarithmic { n_plus_1 } => format!("logarithmic n+1 = {n_plus_1}"),
    }
}

fn main() -> special_kahler::Result<()> {
    let radii = dyadic_radii(0.25, 1e-7);
    for m in all_entries() {
        let profile = profile_from_metric(&m, &radii)?;
        let spread = profile
            .w_spread
            .iter()
            .fold(1.0_f64, |acc, &s| acc.max(s));
        let c = classify(&profile, m.h_spec.xi0_order())?;
        let agrees = match (c.branch, m.expected_classification) {
            (Branch::Power { beta, c: cv }, Branch::Power { beta: eb, c: ec }) => {
                (beta - eb).abs() <= 0.02 && (cv / ec - 1.0).abs() <= 0.05
            }
            (Branch::Logarithmic { n_plus_1 }, Branch::Logarithmic { n_plus_1: e }) => {
                n_plus_1 == e
            }
            _ => false,
        };
        println!(
            "{:<18} {:<34} fit dev {:.1e}, angular spread {:.3}  [{}]",
            m.name,
            describe(c.branch),
            c.fit_quality,
            spread,
            if agrees { "matches expectation" } else { "MISMATCH" }
        );
    }
    Ok(())
}
