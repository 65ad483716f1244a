//! Assembly of the special Kähler connection and numerical verification of
//! its structural identities.
//!
//! Given a solution `(h, u, a)` of the Kazdan-Warner equation, the flat
//! symplectic connection is
//!
//! ```text
//! om11 =  (e^u / 2)(dh + a*phi) - du/2
//! om22 = -(e^u / 2)(dh + a*phi) - du/2
//! ```
//!
//! with `om12 = -*om11` and `om21 = *om22` implied. `dh + a*phi` enters
//! symbolically while `du` is finite differences, so every residual isolates
//! the discretization error in `u`.
//!
//! Residual norms are interior-only L-infinity with a two-row margin: the
//! boundary rows carry one-sided first-derivative stencils and the residuals
//! differentiate those values once more.

use crate::catalog::{sample_dh, sample_h, sample_xi0, ClosedFormMetric, HarmonicSpec};
use crate::error::{Error, Result};
use crate::field::{ComplexField, OneForm, ScalarField};
use crate::grid::AnnulusGrid;
use crate::ops;

/// Interior margin (radial rows skipped per side) for residual norms.
pub const RESIDUAL_MARGIN: usize = 2;

/// Ratio `c2/c1` below which a declared cubic-form order is considered
/// misdeclared by [`curvature_sandwich`].
pub const SANDWICH_RATIO_THRESHOLD: f64 = 1e-4;

/// The diagonal entries of the connection matrix; the off-diagonal entries
/// are `om12 = -*om11`, `om21 = *om22`.
#[derive(Debug, Clone)]
pub struct ConnectionForms {
    pub om11: OneForm,
    pub om22: OneForm,
}

/// All four entries, for validating externally supplied connections.
#[derive(Debug, Clone)]
pub struct FullConnection {
    pub om11: OneForm,
    pub om12: OneForm,
    pub om21: OneForm,
    pub om22: OneForm,
}

impl From<&ConnectionForms> for FullConnection {
    fn from(c: &ConnectionForms) -> Self {
        FullConnection {
            om11: c.om11.clone(),
            om12: ops::hodge_star(&c.om11).scale(-1.0),
            om21: ops::hodge_star(&c.om22),
            om22: c.om22.clone(),
        }
    }
}

/// Build the connection from symbolic `dh + a*phi` and discrete `du`.
pub fn build_connection(h_spec: &HarmonicSpec, u: &ScalarField) -> ConnectionForms {
    let grid = *u.grid();
    let dh = sample_dh(h_spec, &grid);
    let du = ops::gradient(u);
    let eu = u.map(f64::exp);
    let half_eu_dh = dh.scaled_by(&eu).expect("same grid").scale(0.5);
    let om11 = half_eu_dh.axpy(1.0, &du, -0.5).expect("same grid");
    let om22 = half_eu_dh.axpy(-1.0, &du, -0.5).expect("same grid");
    ConnectionForms { om11, om22 }
}

/// Per-equation interior residuals of the flatness system.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct FlatnessReport {
    /// `d om11 - om11 ^ om22`
    pub d_om11: f64,
    /// `d *om11 + *om11 ^ om22 + |om11|^2`
    pub d_star_om11: f64,
    /// `d om22 - om22 ^ om11`
    pub d_om22: f64,
    /// `d *om22 + *om22 ^ om11 + |om22|^2`
    pub d_star_om22: f64,
}

impl FlatnessReport {
    pub fn max(&self) -> f64 {
        self.d_om11
            .max(self.d_star_om11)
            .max(self.d_om22)
            .max(self.d_star_om22)
    }
}

pub fn flatness_report(conn: &ConnectionForms) -> FlatnessReport {
    let pair = |a: &OneForm, b: &OneForm| -> (f64, f64) {
        let da = ops::exterior_derivative(a);
        let wedge_ab = ops::wedge(a, b).expect("same grid");
        let r1 = da
            .zip(&wedge_ab, |x, y| x - y)
            .expect("same grid")
            .interior_linf(RESIDUAL_MARGIN);
        let star_a = ops::hodge_star(a);
        let d_star = ops::exterior_derivative(&star_a);
        let wedge_star = ops::wedge(&star_a, b).expect("same grid");
        let nsq = ops::norm_sq(a);
        let mut r2 = d_star
            .zip(&wedge_star, |x, y| x + y)
            .expect("same grid")
            .zip(&nsq, |x, y| x + y)
            .expect("same grid");
        r2 = r2.map(f64::abs);
        (r1, r2.interior_linf(RESIDUAL_MARGIN))
    };
    let (d_om11, d_star_om11) = pair(&conn.om11, &conn.om22);
    let (d_om22, d_star_om22) = pair(&conn.om22, &conn.om11);
    FlatnessReport {
        d_om11,
        d_star_om11,
        d_om22,
        d_star_om22,
    }
}

/// Max interior residual over the four flatness equations.
pub fn flatness_residual(conn: &ConnectionForms) -> f64 {
    flatness_report(conn).max()
}

/// Residual of the two scalar symmetry equations for `(X, Y) = (d/dx, d/dy)`.
/// Zero by construction for connections built by [`build_connection`]; exists
/// to validate externally supplied connections.
pub fn symmetry_residual(conn: &FullConnection) -> f64 {
    let n = conn.om11.grid().len();
    let mut max = 0.0_f64;
    for k in 0..n {
        let e1 = (conn.om11.p()[k] - conn.om22.p()[k]) + (conn.om12.q()[k] + conn.om21.q()[k]);
        let e2 = (conn.om12.p()[k] + conn.om21.p()[k]) - (conn.om11.q()[k] - conn.om22.q()[k]);
        max = max.max(e1.abs()).max(e2.abs());
    }
    max
}

/// Interior residuals of the `(u, eta)` system and the two-function form of
/// the Kazdan-Warner equation.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct EtaReport {
    /// `d eta = 0`
    pub closedness: f64,
    /// `*d*eta - 2*(*eta ^ du) + 2 e^u |eta|^2`
    pub codifferential: f64,
    /// `Delta u - |2 eta + e^{-u} du|^2 e^{2u}`
    pub kw_eta: f64,
    /// `Delta u - |dh + a*phi|^2 e^{2u}` (exact right-hand side)
    pub kw: f64,
    /// `Delta h` (harmonicity of the sampled h)
    pub harmonic: f64,
}

impl EtaReport {
    pub fn max(&self) -> f64 {
        self.closedness
            .max(self.codifferential)
            .max(self.kw_eta)
            .max(self.kw)
            .max(self.harmonic)
    }
}

/// Compute `eta = (dh + a*phi)/2 - e^{-u} du / 2` and the residuals of the
/// full first-order system.
pub fn eta_system_residuals(h_spec: &HarmonicSpec, u: &ScalarField) -> EtaReport {
    let grid = *u.grid();
    let dh = sample_dh(h_spec, &grid);
    let du = ops::gradient(u);
    let em_u = u.map(|v| (-v).exp());
    let e_u = u.map(f64::exp);
    let em_u_du = du.scaled_by(&em_u).expect("same grid");
    let eta = dh.axpy(0.5, &em_u_du, -0.5).expect("same grid");

    let closedness = ops::exterior_derivative(&eta)
        .map(f64::abs)
        .interior_linf(RESIDUAL_MARGIN);

    let star_eta = ops::hodge_star(&eta);
    let d_star_eta = ops::exterior_derivative(&star_eta);
    let star_wedge = ops::wedge(&star_eta, &du).expect("same grid");
    let eta_sq = ops::norm_sq(&eta);
    let codifferential = d_star_eta
        .zip(&star_wedge, |a, b| a - 2.0 * b)
        .expect("same grid")
        .zip(&eta_sq.zip(&e_u, |n, e| n * e).expect("same grid"), |a, b| {
            a + 2.0 * b
        })
        .expect("same grid")
        .map(f64::abs)
        .interior_linf(RESIDUAL_MARGIN);

    let lap_u = ops::laplacian(u);
    let two_eta_plus = eta.axpy(2.0, &em_u_du, 1.0).expect("same grid");
    let lhs_sq = ops::norm_sq(&two_eta_plus);
    let e2u = u.map(|v| (2.0 * v).exp());
    let kw_eta = lap_u
        .zip(&lhs_sq.zip(&e2u, |n, e| n * e).expect("same grid"), |a, b| {
            a - b
        })
        .expect("same grid")
        .map(f64::abs)
        .interior_linf(RESIDUAL_MARGIN);

    let rho = ops::norm_sq(&dh);
    let kw = lap_u
        .zip(&rho.zip(&e2u, |n, e| n * e).expect("same grid"), |a, b| a - b)
        .expect("same grid")
        .map(f64::abs)
        .interior_linf(RESIDUAL_MARGIN);

    let harmonic = ops::laplacian(&sample_h(h_spec, &grid))
        .map(f64::abs)
        .interior_linf(RESIDUAL_MARGIN);

    EtaReport {
        closedness,
        codifferential,
        kw_eta,
        kw,
        harmonic,
    }
}

/// Residuals of the eta-system for a catalog metric sampled on `grid`.
/// Model-only entries are refused: their `w` is an asymptotic profile, not a
/// solution.
pub fn check_eta_system(metric: &ClosedFormMetric, grid: &AnnulusGrid) -> Result<EtaReport> {
    if !metric.exact {
        return Err(Error::ModelOnly(metric.name.clone()));
    }
    Ok(eta_system_residuals(&metric.h_spec, &metric.sample_u(grid)))
}

/// The cubic-form coefficient with its symbolic order estimate.
#[derive(Debug, Clone)]
pub struct CubicFormField {
    pub xi0: ComplexField,
    /// Order of the leading term at the origin; `None` when `Xi_0` vanishes
    /// identically.
    pub order_estimate: Option<i32>,
}

/// Exact `Xi_0 = (a/(2z) - i dh/dz)/2` per node.
pub fn cubic_form(h_spec: &HarmonicSpec, grid: &AnnulusGrid) -> CubicFormField {
    CubicFormField {
        xi0: sample_xi0(h_spec, grid),
        order_estimate: h_spec.xi0_order(),
    }
}

/// Which conformal normalization a curvature refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricSign {
    /// `g~ = e^{2u} |dz|^2`: `K = -e^{-2u} Delta u`.
    Exponent2u,
    /// `g = e^{-u} |dz|^2`: `K = (e^u / 2) Delta u`.
    ExponentMinusU,
}

/// Gaussian curvature of the conformal metric; boundary rows are invalid
/// (NaN), inherited from the Laplacian stencil.
pub fn curvature(u: &ScalarField, sign: MetricSign) -> ScalarField {
    curvature_from_laplacian(u, ops::laplacian(u), sign)
}

/// [`curvature`] with the fourth-order Laplacian stencil; two invalid (NaN)
/// radial rows at each boundary.
pub fn curvature4(u: &ScalarField, sign: MetricSign) -> ScalarField {
    curvature_from_laplacian(u, ops::laplacian4(u), sign)
}

fn curvature_from_laplacian(u: &ScalarField, lap: ScalarField, sign: MetricSign) -> ScalarField {
    match sign {
        MetricSign::Exponent2u => lap
            .zip(&u.map(|v| (-2.0 * v).exp()), |l, e| -e * l)
            .expect("same grid"),
        MetricSign::ExponentMinusU => lap
            .zip(&u.map(f64::exp), |l, e| 0.5 * e * l)
            .expect("same grid"),
    }
}

/// Empirical constants of the curvature sandwich
/// `-c1 |z|^{2n} <= K~ <= -c2 |z|^{2n}` with `K~ = -16 |Xi_0|^2`:
/// returns `(c1, c2) = (max, min)` of `16 |Xi_0|^2 |z|^{-2n}` over the grid.
///
/// A vanishing `c2` (relative to `c1`) signals a misdeclared order `n`.
pub fn curvature_sandwich(h_spec: &HarmonicSpec, n: i32, grid: &AnnulusGrid) -> Result<(f64, f64)> {
    let xi0 = sample_xi0(h_spec, grid);
    let mut c1 = f64::NEG_INFINITY;
    let mut c2 = f64::INFINITY;
    let nsq = xi0.norm_sq();
    for (i, j) in grid.nodes() {
        let r = grid.r(i);
        let v = 16.0 * nsq.at(i, j) * r.powi(-2 * n);
        c1 = c1.max(v);
        c2 = c2.min(v);
    }
    // `<=` plus the NaN guard matches the rejected set of `!(c2 > bound)`.
    let bound = SANDWICH_RATIO_THRESHOLD * c1;
    if c2.is_nan() || bound.is_nan() || c2 <= bound {
        return Err(Error::MisdeclaredOrder {
            n,
            ratio: c2 / c1,
            threshold: SANDWICH_RATIO_THRESHOLD,
        });
    }
    Ok((c1, c2))
}
