//! Exploratory: push the solver toward the logarithmic branch.
//!
//! The Dirichlet data `u = -beta log r` selects the power branch for any
//! admissible `beta < n+1`. The logarithmic branch `w = -r^{n+1} log r
//! e^{O(1)}` is the borderline case; it cannot be requested through a power
//! exponent, but one can impose its exact trace `u = -log(-r log r)` on the
//! boundary circles and watch the interior follow the logarithmic profile.
//!
//! This is an experiment, not a verified capability: the classifier is run on
//! the result and its fit deviation is reported.
//!
//! Run with `cargo run --release --example log_branch_experiment`.

use special_kahler::catalog::{sample_dh, HarmonicKind, HarmonicSpec};
use special_kahler::ops;
use special_kahler::singularity::{classify, dyadic_radii, extract_profile, Branch};
use special_kahler::solver::{solve, KwProblem};
use special_kahler::{AnnulusGrid, ScalarField};

fn main() -> special_kahler::Result<()> {
    let spec = HarmonicSpec::exact(HarmonicKind::CoordinateX); // n = 0
    let grid = AnnulusGrid::new(1e-4, 0.1, 256, 8)?;
    let rho = ops::norm_sq(&sample_dh(&spec, &grid));

    // Exact logarithmic-branch trace on both circles.
    let trace = |r: f64| -(-r * r.ln()).ln();
    let bc_inner = vec![trace(grid.r_in()); grid.n_angular()];
    let bc_outer = vec![trace(grid.r_out()); grid.n_angular()];
    let problem = KwProblem::new(grid, rho, bc_inner, bc_outer)?;
    let sol = solve(&problem, 1e-3, 40)?;
    println!(
        "solved in {} Newton iterations, residual {:.2e}",
        sol.newton_iterations, sol.residual_norm
    );

    // Compare against the closed form u* = -log(-r log r).
    let exact = ScalarField::from_fn(grid, |x, y| trace((x * x + y * y).sqrt()));
    let mut max_err = 0.0_f64;
    for (i, j) in grid.nodes() {
        max_err = max_err.max((sol.u.at(i, j) - exact.at(i, j)).abs());
    }
    println!("max |u - u*| = {max_err:.2e} against the exact logarithmic solution");

    let w = sol.u.map(|v| (-v).exp());
    let profile = extract_profile(&w, &dyadic_radii(0.05, 2.0 * grid.r_in()))?;
    match classify(&profile, Some(0))? {
        c @ special_kahler::singularity::Classification {
            branch: Branch::Logarithmic { n_plus_1 },
            ..
        } => println!(
            "classified logarithmic with n+1 = {n_plus_1}, fit deviation {:.2e}",
            c.fit_quality
        ),
        c => println!("classified as {:?} (fit deviation {:.2e})", c.branch, c.fit_quality),
    }
    Ok(())
}
