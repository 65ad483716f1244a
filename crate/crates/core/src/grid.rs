//! Log-polar tensor grid on an annulus around the puncture.
//!
//! Radial nodes are uniform in `t = log r`, so radial power laws become linear
//! in the radial coordinate and refinement concentrates nodes near `r = 0`.
//! Angular nodes are uniform in `theta` with period `2*pi` and no duplicated
//! seam node.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Minimum node count per direction.
pub const MIN_NODES: usize = 8;

/// Tensor grid on the annulus `{ r_in <= |z| <= r_out }`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnulusGrid {
    r_in: f64,
    r_out: f64,
    n_radial: usize,
    n_angular: usize,
}

impl AnnulusGrid {
    pub fn new(r_in: f64, r_out: f64, n_radial: usize, n_angular: usize) -> Result<Self> {
        if !(r_in > 0.0 && r_in < r_out && r_out.is_finite()) {
            return Err(Error::InvalidRadii { r_in, r_out });
        }
        let got = n_radial.min(n_angular);
        if got < MIN_NODES {
            return Err(Error::GridTooSmall {
                min: MIN_NODES,
                got,
            });
        }
        Ok(Self {
            r_in,
            r_out,
            n_radial,
            n_angular,
        })
    }

    pub fn r_in(&self) -> f64 {
        self.r_in
    }

    pub fn r_out(&self) -> f64 {
        self.r_out
    }

    pub fn n_radial(&self) -> usize {
        self.n_radial
    }

    pub fn n_angular(&self) -> usize {
        self.n_angular
    }

    pub fn len(&self) -> usize {
        self.n_radial * self.n_angular
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Radial step in `t = log r`.
    pub fn dt(&self) -> f64 {
        (self.r_out.ln() - self.r_in.ln()) / (self.n_radial as f64 - 1.0)
    }

    /// Angular step.
    pub fn dtheta(&self) -> f64 {
        std::f64::consts::TAU / self.n_angular as f64
    }

    /// Log-radius of radial row `i`.
    pub fn t(&self, i: usize) -> f64 {
        self.r_in.ln() + i as f64 * self.dt()
    }

    /// Radius of radial row `i`.
    pub fn r(&self, i: usize) -> f64 {
        self.t(i).exp()
    }

    /// Angle of angular column `j`.
    pub fn theta(&self, j: usize) -> f64 {
        j as f64 * self.dtheta()
    }

    /// Cartesian coordinates of node `(i, j)`.
    pub fn xy(&self, i: usize, j: usize) -> (f64, f64) {
        let r = self.r(i);
        let th = self.theta(j);
        (r * th.cos(), r * th.sin())
    }

    /// Flat node index, radial-major.
    pub fn idx(&self, i: usize, j: usize) -> usize {
        i * self.n_angular + j
    }

    /// Iterate over all `(i, j)` node indices.
    pub fn nodes(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let na = self.n_angular;
        (0..self.n_radial).flat_map(move |i| (0..na).map(move |j| (i, j)))
    }

    /// A grid with the same radii and both directions refined by `factor`.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        Self::new(
            self.r_in,
            self.r_out,
            self.n_radial * factor,
            self.n_angular * factor,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn construction_validates_radii_and_size() {
        assert!(AnnulusGrid::new(0.1, 1.0, 16, 16).is_ok());
        assert!(matches!(
            AnnulusGrid::new(-0.1, 1.0, 16, 16),
            Err(Error::InvalidRadii { .. })
        ));
        assert!(matches!(
            AnnulusGrid::new(1.0, 0.1, 16, 16),
            Err(Error::InvalidRadii { .. })
        ));
        assert!(matches!(
            AnnulusGrid::new(0.1, 1.0, 4, 16),
            Err(Error::GridTooSmall { .. })
        ));
    }

    #[test]
    fn nodes_are_uniform_in_log_r_and_theta() {
        let g = AnnulusGrid::new(0.05, 0.9, 12, 10).unwrap();
        assert_relative_eq!(g.r(0), 0.05, max_relative = 1e-14);
        assert_relative_eq!(g.r(11), 0.9, max_relative = 1e-14);
        let dt = g.t(1) - g.t(0);
        for i in 1..12 {
            assert_relative_eq!(g.t(i) - g.t(i - 1), dt, max_relative = 1e-12);
        }
        assert_relative_eq!(g.theta(5), 5.0 * std::f64::consts::TAU / 10.0);
    }
}
