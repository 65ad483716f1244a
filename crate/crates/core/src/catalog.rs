//! Closed-form special Kähler metrics and harmonic data.
//!
//! Each entry pairs a conformal factor `w` (so the metric is `g = w |dz|^2`,
//! `u = -log w`) with the harmonic function `h` driving the Kazdan-Warner
//! equation `Delta u = |dh + a*phi|^2 e^{2u}`. Harmonic data is evaluated
//! symbolically; sampled fields are exact at the nodes.
//!
//! The Poincaré-derived entries use `h = c*x` where `-c^2` is the constant
//! Gaussian curvature of the source metric `e^{2u}|dz|^2`: the three classic
//! Poincaré incarnations have curvature `-1` (c = 1), the conical family has
//! curvature `-4` (c = 2, measured numerically by `verify::curvature`).
//!
//! The half-plane entry is translated by `+2i` so that the unit annulus
//! sampling window sits inside the upper half-plane; translation leaves every
//! structural identity intact and `h = x` unchanged.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{ComplexField, OneForm, ScalarField};
use crate::grid::AnnulusGrid;
use crate::singularity::Branch;

/// Vertical offset applied to the half-plane entry.
pub const HALF_PLANE_OFFSET: f64 = 2.0;

/// Symbolic harmonic functions on the punctured disc.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HarmonicKind {
    /// `h = Re z^{n+1}` for `n != -1`.
    Monomial(i32),
    /// `h = log |z|` (the `n = -1` case).
    LogAbs,
    /// `h = x`.
    CoordinateX,
    /// `h = c`.
    Constant(f64),
    /// Weighted sum of other kinds.
    LinearCombination(Vec<(f64, HarmonicKind)>),
}

impl HarmonicKind {
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        match self {
            HarmonicKind::Monomial(n) => Complex64::new(x, y).powi(n + 1).re,
            HarmonicKind::LogAbs => 0.5 * (x * x + y * y).ln(),
            HarmonicKind::CoordinateX => x,
            HarmonicKind::Constant(c) => *c,
            HarmonicKind::LinearCombination(terms) => {
                terms.iter().map(|(w, k)| w * k.eval(x, y)).sum()
            }
        }
    }

    /// Exact Cartesian gradient of `h`.
    pub fn eval_dh(&self, x: f64, y: f64) -> (f64, f64) {
        match self {
            // For h = Re f(z): dh = (Re f', -Im f').
            HarmonicKind::Monomial(n) => {
                let f = (*n + 1) as f64 * Complex64::new(x, y).powi(*n);
                (f.re, -f.im)
            }
            HarmonicKind::LogAbs => {
                let r2 = x * x + y * y;
                (x / r2, y / r2)
            }
            HarmonicKind::CoordinateX => (1.0, 0.0),
            HarmonicKind::Constant(_) => (0.0, 0.0),
            HarmonicKind::LinearCombination(terms) => terms.iter().fold((0.0, 0.0), |acc, (w, k)| {
                let (p, q) = k.eval_dh(x, y);
                (acc.0 + w * p, acc.1 + w * q)
            }),
        }
    }

    /// Exact Wirtinger derivative `dh/dz`.
    pub fn eval_dh_dz(&self, x: f64, y: f64) -> Complex64 {
        match self {
            HarmonicKind::Monomial(n) => {
                0.5 * (*n + 1) as f64 * Complex64::new(x, y).powi(*n)
            }
            HarmonicKind::LogAbs => 0.5 / Complex64::new(x, y),
            HarmonicKind::CoordinateX => Complex64::new(0.5, 0.0),
            HarmonicKind::Constant(_) => Complex64::new(0.0, 0.0),
            HarmonicKind::LinearCombination(terms) => terms
                .iter()
                .map(|(w, k)| w * k.eval_dh_dz(x, y))
                .sum(),
        }
    }

    /// Leading order of `dh/dz` at the origin, `None` when it vanishes
    /// identically.
    fn dh_dz_order(&self) -> Option<i32> {
        match self {
            HarmonicKind::Monomial(n) => Some(*n),
            HarmonicKind::LogAbs => Some(-1),
            HarmonicKind::CoordinateX => Some(0),
            HarmonicKind::Constant(_) => None,
            HarmonicKind::LinearCombination(terms) => terms
                .iter()
                .filter(|(w, _)| *w != 0.0)
                .filter_map(|(_, k)| k.dh_dz_order())
                .min(),
        }
    }
}

/// The pair `(h, a)` driving `Delta u = |dh + a*phi|^2 e^{2u}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarmonicSpec {
    pub kind: HarmonicKind,
    /// Coefficient of the harmonic generator `phi` of `H^1` of the punctured
    /// disc.
    pub a: f64,
}

impl HarmonicSpec {
    pub fn new(kind: HarmonicKind, a: f64) -> Self {
        Self { kind, a }
    }

    pub fn exact(kind: HarmonicKind) -> Self {
        Self { kind, a: 0.0 }
    }

    /// Order of the cubic-form coefficient `Xi_0 = (a/(2z) - i dh/dz)/2` at
    /// the origin; `None` when `Xi_0` vanishes identically (flat case).
    ///
    /// The `a/(2z)` term has order -1 and cannot cancel the `i dh/dz` term at
    /// the same order: one contribution is real along a ray where the other is
    /// imaginary.
    pub fn xi0_order(&self) -> Option<i32> {
        let h_ord = self.kind.dh_dz_order();
        if self.a != 0.0 {
            Some(h_ord.map_or(-1, |o| o.min(-1)))
        } else {
            h_ord
        }
    }
}

/// The harmonic 1-form `phi = (y dx - x dy)/(x^2+y^2)` generating the first
/// cohomology of the punctured disc, sampled exactly.
pub fn phi(grid: &AnnulusGrid) -> OneForm {
    OneForm::from_fn(*grid, |x, y| {
        let r2 = x * x + y * y;
        (y / r2, -x / r2)
    })
}

/// Exact samples of `h` on the grid.
pub fn sample_h(spec: &HarmonicSpec, grid: &AnnulusGrid) -> ScalarField {
    ScalarField::from_fn(*grid, |x, y| spec.kind.eval(x, y))
}

/// Exact samples of `dh + a*phi` (symbolic derivative, not finite
/// differences).
pub fn sample_dh(spec: &HarmonicSpec, grid: &AnnulusGrid) -> OneForm {
    let a = spec.a;
    OneForm::from_fn(*grid, |x, y| {
        let (mut p, mut q) = spec.kind.eval_dh(x, y);
        if a != 0.0 {
            let r2 = x * x + y * y;
            p += a * y / r2;
            q -= a * x / r2;
        }
        (p, q)
    })
}

/// Exact samples of the cubic-form coefficient `Xi_0 = (a/(2z) - i dh/dz)/2`.
pub fn sample_xi0(spec: &HarmonicSpec, grid: &AnnulusGrid) -> ComplexField {
    let a = spec.a;
    ComplexField::from_fn(*grid, |x, y| {
        let z = Complex64::new(x, y);
        let v = 0.5 * (0.5 * a / z - Complex64::i() * spec.kind.eval_dh_dz(x, y));
        (v.re, v.im)
    })
}

/// Exact value of `Xi_0` at one point.
pub fn xi0_at(spec: &HarmonicSpec, x: f64, y: f64) -> Complex64 {
    let z = Complex64::new(x, y);
    0.5 * (0.5 * spec.a / z - Complex64::i() * spec.kind.eval_dh_dz(x, y))
}

/// Analytic form of a catalog conformal factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricForm {
    /// `w = Im z + offset` (upper half-plane Poincaré, translated).
    HalfPlane { offset: f64 },
    /// `w = (1 - |z|^2)/2` (unit disc Poincaré).
    Disc,
    /// `w = -|z| log |z|` (punctured disc Poincaré).
    PuncturedDisc,
    /// `w = -log |z|` (logarithmic singularity).
    LogMetric,
    /// `w = |z|^alpha (1 - |z|^{2(1-alpha)}) / (1 - alpha)` (conical
    /// singularity).
    Conical { alpha: f64 },
    /// Leading-order local model `w = c |z|^alpha` near a Picard-type conical
    /// point; not an exact solution.
    PicardLocal { alpha: f64, c: f64 },
}

impl MetricForm {
    pub fn w(&self, x: f64, y: f64) -> f64 {
        let r = (x * x + y * y).sqrt();
        match self {
            MetricForm::HalfPlane { offset } => y + offset,
            MetricForm::Disc => 0.5 * (1.0 - r * r),
            MetricForm::PuncturedDisc => -r * r.ln(),
            MetricForm::LogMetric => -r.ln(),
            MetricForm::Conical { alpha } => {
                r.powf(*alpha) * (1.0 - r.powf(2.0 * (1.0 - alpha))) / (1.0 - alpha)
            }
            MetricForm::PicardLocal { alpha, c } => c * r.powf(*alpha),
        }
    }
}

/// A catalog metric: exact evaluators plus the harmonic data that places it in
/// the Kazdan-Warner verification pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormMetric {
    pub name: String,
    pub form: MetricForm,
    pub h_spec: HarmonicSpec,
    /// Annulus `(r_min, r_max)` on which residual and curvature checks are
    /// well-conditioned (w > 0 with margin).
    pub domain: (f64, f64),
    pub expected_classification: Branch,
    /// `false` marks asymptotic local models on which PDE residual checks are
    /// refused.
    pub exact: bool,
}

impl ClosedFormMetric {
    pub fn w_at(&self, x: f64, y: f64) -> f64 {
        self.form.w(x, y)
    }

    pub fn u_at(&self, x: f64, y: f64) -> f64 {
        -self.form.w(x, y).ln()
    }

    pub fn sample_w(&self, grid: &AnnulusGrid) -> ScalarField {
        ScalarField::from_fn(*grid, |x, y| self.w_at(x, y))
    }

    pub fn sample_u(&self, grid: &AnnulusGrid) -> ScalarField {
        ScalarField::from_fn(*grid, |x, y| self.u_at(x, y))
    }

    /// Default grid for this entry at a given per-direction resolution.
    pub fn default_grid(&self, n: usize) -> Result<AnnulusGrid> {
        AnnulusGrid::new(self.domain.0, self.domain.1, n, n)
    }
}

/// Poincaré-derived entries from the three classic incarnations.
pub fn poincare_family(name: &str) -> Result<ClosedFormMetric> {
    match name {
        "half_plane" => Ok(ClosedFormMetric {
            name: "half_plane".into(),
            form: MetricForm::HalfPlane {
                offset: HALF_PLANE_OFFSET,
            },
            h_spec: HarmonicSpec::exact(HarmonicKind::CoordinateX),
            domain: (0.05, 0.9),
            expected_classification: Branch::Power {
                beta: 0.0,
                c: HALF_PLANE_OFFSET,
            },
            exact: true,
        }),
        "disc" => Ok(ClosedFormMetric {
            name: "disc".into(),
            form: MetricForm::Disc,
            h_spec: HarmonicSpec::exact(HarmonicKind::CoordinateX),
            domain: (0.05, 0.5),
            expected_classification: Branch::Power { beta: 0.0, c: 0.5 },
            exact: true,
        }),
        "punctured_disc" => Ok(ClosedFormMetric {
            name: "punctured_disc".into(),
            form: MetricForm::PuncturedDisc,
            h_spec: HarmonicSpec::exact(HarmonicKind::CoordinateX),
            domain: (0.05, 0.45),
            expected_classification: Branch::Logarithmic { n_plus_1: 1 },
            exact: true,
        }),
        other => Err(Error::UnknownMetric(other.to_string())),
    }
}

/// `w = -log |z|` with `h = -log |z|`: the pair `(h, -log h)` for the
/// positive harmonic function `h = -log |z|`.
pub fn log_metric() -> ClosedFormMetric {
    ClosedFormMetric {
        name: "log_metric".into(),
        form: MetricForm::LogMetric,
        h_spec: HarmonicSpec::exact(HarmonicKind::LinearCombination(vec![(
            -1.0,
            HarmonicKind::LogAbs,
        )])),
        domain: (0.05, 0.45),
        expected_classification: Branch::Logarithmic { n_plus_1: 0 },
        exact: true,
    }
}

/// Conical special Kähler metric from the constant-curvature cone metric.
///
/// The source metric `e^{2u}|dz|^2` has Gaussian curvature `-4`, so `h = 2x`
/// makes `(h, u)` an exact Kazdan-Warner pair.
pub fn conical_metric(alpha: f64) -> Result<ClosedFormMetric> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::AlphaOutOfRange(alpha));
    }
    Ok(ClosedFormMetric {
        name: format!("conical({alpha})"),
        form: MetricForm::Conical { alpha },
        h_spec: HarmonicSpec::exact(HarmonicKind::LinearCombination(vec![(
            2.0,
            HarmonicKind::CoordinateX,
        )])),
        domain: (0.05, 0.5),
        expected_classification: Branch::Power {
            beta: alpha,
            c: 1.0 / (1.0 - alpha),
        },
        exact: true,
    })
}

/// Leading-order local model of a Picard-type conical point, `w = c|z|^alpha`.
/// Model-only: there is no exact global solution behind it, so the residual
/// pipeline refuses it.
pub fn picard_local_model(alpha: f64) -> Result<ClosedFormMetric> {
    picard_local_model_scaled(alpha, 1.0)
}

pub fn picard_local_model_scaled(alpha: f64, c: f64) -> Result<ClosedFormMetric> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::AlphaOutOfRange(alpha));
    }
    Ok(ClosedFormMetric {
        name: format!("picard_local({alpha})"),
        form: MetricForm::PicardLocal { alpha, c },
        h_spec: HarmonicSpec::exact(HarmonicKind::CoordinateX),
        domain: (0.01, 0.5),
        expected_classification: Branch::Power { beta: alpha, c },
        exact: false,
    })
}

/// Every catalog entry at default parameters, for listings and data-driven
/// tests.
pub fn all_entries() -> Vec<ClosedFormMetric> {
    vec![
        poincare_family("half_plane").unwrap(),
        poincare_family("disc").unwrap(),
        poincare_family("punctured_disc").unwrap(),
        log_metric(),
        conical_metric(0.5).unwrap(),
        picard_local_model(0.5).unwrap(),
    ]
}

/// Look up an entry by name; `conical(a)` and `picard_local(a)` accept a
/// parameter.
pub fn by_name(name: &str) -> Result<ClosedFormMetric> {
    if let Some(alpha) = parse_param(name, "conical") {
        return conical_metric(alpha?);
    }
    if let Some(alpha) = parse_param(name, "picard_local") {
        return picard_local_model(alpha?);
    }
    match name {
        "log_metric" => Ok(log_metric()),
        "half_plane" | "disc" | "punctured_disc" => poincare_family(name),
        other => Err(Error::UnknownMetric(other.to_string())),
    }
}

fn parse_param(name: &str, prefix: &str) -> Option<Result<f64>> {
    let rest = name.strip_prefix(prefix)?;
    if rest.is_empty() {
        return Some(Ok(0.5));
    }
    let inner = rest.strip_prefix('(')?.strip_suffix(')')?;
    Some(
        inner
            .parse::<f64>()
            .map_err(|_| Error::UnknownMetric(name.to_string())),
    )
}
