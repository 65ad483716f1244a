//! The conical family: constant-curvature check and the curvature sandwich.
//!
//! For each cone parameter alpha the metric `w = r^alpha (1 - r^{2(1-alpha)})
//! / (1 - alpha)` pairs with `h = 2x`; the associated metric `e^{2u}|dz|^2`
//! has constant Gaussian curvature -4, and the sandwich constants of
//! `-c1 |z|^{2n} <= K~ <= -c2 |z|^{2n}` collapse to c1 = c2 because the cubic
//! form has a single term.
//!
//! Run with `cargo run --release --example conical_curvature`.

use special_kahler::catalog::conical_metric;
use special_kahler::verify::{curvature4, curvature_sandwich, MetricSign};
use special_kahler::AnnulusGrid;

fn main() -> special_kahler::Result<()> {
    for alpha in [0.25, 0.5, 0.75] {
        let m = conical_metric(alpha)?;
        let grid = AnnulusGrid::new(0.1, 0.35, 256, 16)?;
        let k = curvature4(&m.sample_u(&grid), MetricSign::Exponent2u);
        let (mut kmin, mut kmax) = (f64::INFINITY, f64::NEG_INFINITY);
        for i in 2..grid.n_radial() - 2 {
            for j in 0..grid.n_angular() {
                kmin = kmin.min(k.at(i, j));
                kmax = kmax.max(k.at(i, j));
            }
        }
        let n = m.h_spec.xi0_order().unwrap();
        let (c1, c2) = curvature_sandwich(&m.h_spec, n, &grid)?;
        println!(
            "alpha = {alpha}: curvature in [{kmin:.6}, {kmax:.6}] (target -4), \
             order n = {n}, sandwich c1 = {c1:.4}, c2 = {c2:.4}"
        );
        println!(
            "             admissible exponents beta < {}; alpha = {alpha} qualifies",
            n + 1
        );
    }
    Ok(())
}
