//! Numerical laboratory for two-dimensional affine special Kähler metrics.
//!
//! A special Kähler metric `g = e^{-u} |dz|^2` on the punctured disc is
//! governed by a harmonic function `h`, a real coefficient `a` of the
//! cohomology generator `phi`, and the Kazdan-Warner equation
//! `Delta u = |dh + a*phi|^2 e^{2u}`. This crate provides
//!
//! - [`grid`], [`field`], [`ops`]: log-polar annulus grids, scalar/1-form
//!   fields, and second-order discrete exterior calculus;
//! - [`catalog`]: closed-form metrics (Poincaré family, logarithmic and
//!   conical singularities, Picard-type local models) with exact harmonic
//!   data;
//! - [`solver`]: a damped-Newton solver for the Kazdan-Warner equation with
//!   Dirichlet data, including power-branch boundary traces `-beta log r`;
//! - [`verify`]: assembly of the flat special Kähler connection and numerical
//!   verification of its structural identities (flatness, symmetry, the
//!   eta-system, the cubic-form identity, curvature bounds);
//! - [`singularity`]: radial profile extraction and classification of
//!   isolated singularities into the power branch `w = |z|^beta (C + o(1))`
//!   or the logarithmic branch `w = -|z|^{n+1} log|z| e^{O(1)}`;
//! - [`convergence`]: dyadic refinement studies and order fitting;
//! - [`io`] and [`cli`]: CSV/JSON field serialization and the command-line
//!   experiment surface.
//!
//! See the crate examples for runnable tours of each capability.

pub mod catalog;
pub mod cli;
pub mod convergence;
pub mod error;
pub mod field;
pub mod grid;
pub mod io;
pub mod ops;
pub mod singularity;
pub mod solver;
pub mod verify;

pub use error::{Error, Result};
pub use field::{ComplexField, OneForm, ScalarField};
pub use grid::AnnulusGrid;
