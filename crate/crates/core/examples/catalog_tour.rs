//! Tour of the closed-form catalog: every entry, its harmonic data, its
//! expected singularity branch, and a few exact values.
//!
//! Run with `cargo run --example catalog_tour`.

use special_kahler::catalog::{all_entries, sample_xi0};
use special_kahler::singularity::Branch;

fn main() {
    for m in all_entries() {
        println!("== {}", m.name);
        println!("   domain          r in [{}, {}]", m.domain.0, m.domain.1);
        println!(
            "   status          {}",
            if m.exact {
                "exact solution"
            } else {
                "model-only asymptotic profile"
            }
        );
        match m.expected_classification {
            Branch::Power { beta, c } => {
                println!("   expected branch power: w ~ {c} * r^{beta}")
            }
            Branch::Logarithmic { n_plus_1 } => {
                println!("   expected branch logarithmic: w ~ -r^{n_plus_1} log r")
            }
        }
        match m.h_spec.xi0_order() {
            Some(n) => println!("   cubic form      order n = {n} (admissible beta < {})", n + 1),
            None => println!("   cubic form      vanishes identically (flat)"),
        }

        // A few exact values along the positive real axis.
        let radii = [m.domain.0, (m.domain.0 * m.domain.1).sqrt(), m.domain.1];
        let values: Vec<String> = radii
            .iter()
            .map(|&r| format!("w({r:.3}) = {:.6}", m.w_at(r, 0.0)))
            .collect();
        println!("   samples         {}", values.join(", "));

        // Magnitude of the cubic-form coefficient at mid-radius.
        let grid = m.default_grid(16).unwrap();
        let xi = sample_xi0(&m.h_spec, &grid);
        let nsq = xi.norm_sq();
        let mid = grid.n_radial() / 2;
        println!(
            "   |Xi_0| at r = {:.3} is {:.6}",
            grid.r(mid),
            nsq.at(mid, 0).sqrt()
        );
        println!();
    }
}
