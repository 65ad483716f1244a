//! Verify the structural identities of the special Kähler connection on the
//! exact catalog metrics: flatness, symmetry, the eta-system, and the exact
//! pointwise identity 16|Xi_0|^2 = |dh + a*phi|^2.
//!
//! Run with `cargo run --release --example verify_identities`.

use special_kahler::catalog::{all_entries, sample_dh, sample_xi0};
use special_kahler::ops;
use special_kahler::verify::{
    build_connection, check_eta_system, flatness_report, symmetry_residual, FullConnection,
};

fn main() -> special_kahler::Result<()> {
    for m in all_entries() {
        println!("== {}", m.name);
        let grid = m.default_grid(128)?;

        // The algebraic identity holds for every spec, model-only or not.
        let xi_sq = sample_xi0(&m.h_spec, &grid).norm_sq();
        let rho = ops::norm_sq(&sample_dh(&m.h_spec, &grid));
        let mut worst = 0.0_f64;
        for (i, j) in grid.nodes() {
            let (a, b) = (16.0 * xi_sq.at(i, j), rho.at(i, j));
            worst = worst.max((a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE));
        }
        println!("   16|Xi_0|^2 = |dh + a phi|^2 to relative {worst:.2e}");

        // PDE-level checks only make sense for exact solutions.
        match check_eta_system(&m, &grid) {
            Ok(eta) => {
                let u = m.sample_u(&grid);
                let conn = build_connection(&m.h_spec, &u);
                let flat = flatness_report(&conn);
                let sym = symmetry_residual(&FullConnection::from(&conn));
                println!(
                    "   flatness residuals  d w11 {:.2e}, d*w11 {:.2e}, d w22 {:.2e}, d*w22 {:.2e}",
                    flat.d_om11, flat.d_star_om11, flat.d_om22, flat.d_star_om22
                );
                println!("   symmetry residual   {sym:.2e}");
                println!(
                    "   eta system          closed {:.2e}, codifferential {:.2e}, KW {:.2e}",
                    eta.closedness, eta.codifferential, eta.kw
                );
            }
            Err(e) => println!("   pde checks skipped: {e}"),
        }
        println!();
    }
    Ok(())
}
