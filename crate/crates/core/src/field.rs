//! Node-collocated scalar fields, 1-forms and complex fields on an annulus grid.
//!
//! All fields are immutable after construction; operations elsewhere take
//! references and return fresh values.

use crate::error::{Error, Result};
use crate::grid::AnnulusGrid;

/// Real-valued function sampled at the grid nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: AnnulusGrid,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: AnnulusGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: AnnulusGrid) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    /// Sample `f(x, y)` at every node.
    pub fn from_fn(grid: AnnulusGrid, mut f: impl FnMut(f64, f64) -> f64) -> Self {
        let values = grid
            .nodes()
            .map(|(i, j)| {
                let (x, y) = grid.xy(i, j);
                f(x, y)
            })
            .collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> &AnnulusGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.idx(i, j)]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> ScalarField {
        ScalarField {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip(&self, other: &ScalarField, f: impl Fn(f64, f64) -> f64) -> Result<ScalarField> {
        same_grid(&self.grid, &other.grid)?;
        Ok(ScalarField {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    /// L-infinity norm over the interior, skipping `margin` radial rows on each
    /// side. Boundary rows carry one-sided (or invalid) stencil values and are
    /// excluded from residual norms.
    pub fn interior_linf(&self, margin: usize) -> f64 {
        let n_r = self.grid.n_radial();
        let n_a = self.grid.n_angular();
        let mut max = 0.0_f64;
        for i in margin..n_r.saturating_sub(margin) {
            for j in 0..n_a {
                max = max.max(self.values[self.grid.idx(i, j)].abs());
            }
        }
        max
    }
}

/// 1-form `p dx + q dy` sampled at the grid nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct OneForm {
    grid: AnnulusGrid,
    p: Vec<f64>,
    q: Vec<f64>,
}

impl OneForm {
    pub fn new(grid: AnnulusGrid, p: Vec<f64>, q: Vec<f64>) -> Result<Self> {
        if p.len() != grid.len() || q.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: p.len().max(q.len()),
            });
        }
        Ok(Self { grid, p, q })
    }

    /// Sample `(p, q)(x, y)` at every node.
    pub fn from_fn(grid: AnnulusGrid, mut f: impl FnMut(f64, f64) -> (f64, f64)) -> Self {
        let mut p = Vec::with_capacity(grid.len());
        let mut q = Vec::with_capacity(grid.len());
        for (i, j) in grid.nodes() {
            let (x, y) = grid.xy(i, j);
            let (pv, qv) = f(x, y);
            p.push(pv);
            q.push(qv);
        }
        Self { grid, p, q }
    }

    pub fn grid(&self) -> &AnnulusGrid {
        &self.grid
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }

    pub fn p_at(&self, i: usize, j: usize) -> f64 {
        self.p[self.grid.idx(i, j)]
    }

    pub fn q_at(&self, i: usize, j: usize) -> f64 {
        self.q[self.grid.idx(i, j)]
    }

    /// Componentwise linear combination `a*self + b*other`.
    pub fn axpy(&self, a: f64, other: &OneForm, b: f64) -> Result<OneForm> {
        same_grid(&self.grid, &other.grid)?;
        Ok(OneForm {
            grid: self.grid,
            p: self
                .p
                .iter()
                .zip(&other.p)
                .map(|(&x, &y)| a * x + b * y)
                .collect(),
            q: self
                .q
                .iter()
                .zip(&other.q)
                .map(|(&x, &y)| a * x + b * y)
                .collect(),
        })
    }

    /// Multiply both components by a scalar field pointwise.
    pub fn scaled_by(&self, s: &ScalarField) -> Result<OneForm> {
        same_grid(&self.grid, s.grid())?;
        Ok(OneForm {
            grid: self.grid,
            p: self
                .p
                .iter()
                .zip(s.values())
                .map(|(&x, &s)| x * s)
                .collect(),
            q: self
                .q
                .iter()
                .zip(s.values())
                .map(|(&x, &s)| x * s)
                .collect(),
        })
    }

    pub fn scale(&self, a: f64) -> OneForm {
        OneForm {
            grid: self.grid,
            p: self.p.iter().map(|&x| a * x).collect(),
            q: self.q.iter().map(|&x| a * x).collect(),
        }
    }
}

/// Complex-valued function sampled at the grid nodes (houses the cubic-form
/// coefficient).
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    grid: AnnulusGrid,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl ComplexField {
    pub fn new(grid: AnnulusGrid, re: Vec<f64>, im: Vec<f64>) -> Result<Self> {
        if re.len() != grid.len() || im.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: re.len().max(im.len()),
            });
        }
        Ok(Self { grid, re, im })
    }

    pub fn from_fn(grid: AnnulusGrid, mut f: impl FnMut(f64, f64) -> (f64, f64)) -> Self {
        let mut re = Vec::with_capacity(grid.len());
        let mut im = Vec::with_capacity(grid.len());
        for (i, j) in grid.nodes() {
            let (x, y) = grid.xy(i, j);
            let (a, b) = f(x, y);
            re.push(a);
            im.push(b);
        }
        Self { grid, re, im }
    }

    pub fn grid(&self) -> &AnnulusGrid {
        &self.grid
    }

    pub fn re(&self) -> &[f64] {
        &self.re
    }

    pub fn im(&self) -> &[f64] {
        &self.im
    }

    /// Pointwise squared modulus.
    pub fn norm_sq(&self) -> ScalarField {
        ScalarField {
            grid: self.grid,
            values: self
                .re
                .iter()
                .zip(&self.im)
                .map(|(&a, &b)| a * a + b * b)
                .collect(),
        }
    }
}

pub(crate) fn same_grid(a: &AnnulusGrid, b: &AnnulusGrid) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::GridMismatch)
    }
}
