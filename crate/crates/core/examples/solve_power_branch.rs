//! Solve the Kazdan-Warner equation on a deep annulus with power-branch
//! boundary data `u = -beta log r`, then recover beta from the computed
//! conformal factor.
//!
//! This reproduces the power half of the singularity dichotomy: for `h = x`
//! the cubic form has order `n = 0`, so any `beta < 1` is admissible and the
//! solution satisfies `w = e^{-u} ~ C r^beta` near the puncture.
//!
//! Run with `cargo run --release --example solve_power_branch`.

use special_kahler::catalog::{HarmonicKind, HarmonicSpec};
use special_kahler::singularity::{classify, dyadic_radii, extract_profile, Branch};
use special_kahler::solver::solve_with_exponent;
use special_kahler::AnnulusGrid;

fn main() -> special_kahler::Result<()> {
    let spec = HarmonicSpec::exact(HarmonicKind::CoordinateX);
    let grid = AnnulusGrid::new(1e-5, 0.1, 256, 8)?;

    for beta in [-1.0, 0.0, 0.5] {
        // Near r = 1e-5 the Cartesian residual hits a rounding floor around
        // 1e-2 (the e^{-2t} factor amplifies second-difference noise), so the
        // tolerance sits just above it.
        let sol = solve_with_exponent(&spec, beta, grid, 2e-2, 40)?;
        println!(
            "beta = {beta:5}: {} Newton iterations, residual {:.2e}",
            sol.newton_iterations, sol.residual_norm
        );

        let w = sol.u.map(|v| (-v).exp());
        let profile = extract_profile(&w, &dyadic_radii(0.05, 2e-5))?;
        let c = classify(&profile, Some(0))?;
        match c.branch {
            Branch::Power { beta: b, c: cv } => println!(
                "             recovered w ~ {cv:.4} * r^{b:.4} (target exponent {beta})"
            ),
            other => println!("             unexpected branch {other:?}"),
        }
    }

    // The theorem's constraint beta < n+1 is enforced up front.
    match solve_with_exponent(&spec, 1.0, grid, 1e-2, 40) {
        Err(e) => println!("beta = 1 rejected as expected: {e}"),
        Ok(_) => println!("beta = 1 unexpectedly accepted"),
    }
    Ok(())
}
