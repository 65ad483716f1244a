//! Radial profiles near the puncture and the two-branch classification of
//! isolated singularities.
//!
//! The conformal factor `w` of a special Kähler metric with an isolated
//! singularity satisfies either `w = |z|^beta (C + o(1))` with `beta < n+1`
//! (power branch) or `w = -|z|^{n+1} log|z| e^{O(1)}` (logarithmic branch),
//! where `n` is the order of the cubic form at the puncture. The classifier
//! fits `log w` against both models over the innermost third of the available
//! decades of `-log r` and selects by maximum deviation, tie-breaking toward
//! the logarithmic branch at the borderline `beta ~ n+1`.
//!
//! The logarithmic branch constrains `w` only up to a bounded factor
//! `e^{O(1)}`, so a logarithmic classification asserts consistency with the
//! branch, not an exact profile; reports carry that caveat.

use serde::{Deserialize, Serialize};

use crate::catalog::ClosedFormMetric;
use crate::error::{Error, Result};
use crate::field::{ComplexField, ScalarField};

/// Default tolerance band around `beta = n+1` inside which a power fit is
/// rejected in favor of the logarithmic branch.
pub const DEFAULT_TOL_BETA: f64 = 0.05;

/// Max log-space deviation above which both fits are reported inconclusive.
pub const INCONCLUSIVE_THRESHOLD: f64 = 0.75;

/// Fraction of the available decades of `-log r` used for fitting (innermost
/// window).
pub const WINDOW_FRACTION: f64 = 1.0 / 3.0;

/// Angular samples used when profiling a closed-form metric.
const PROFILE_ANGULAR_SAMPLES: usize = 64;

/// Max allowed distance of the fitted order slope from an integer in
/// [`estimate_order`].
pub const ORDER_SLOPE_TOL: f64 = 0.2;

/// Caveat attached to logarithmic classifications in report output.
pub const LOG_BRANCH_CAVEAT: &str = "logarithmic branch constrains w only up to a bounded factor; \
     classification asserts consistency with the branch, not an exact profile";

/// Angularly averaged radial profile of a conformal factor.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    /// Strictly decreasing radii (sampling toward the puncture).
    pub radii: Vec<f64>,
    /// Geometric mean of `w` over the angle at each radius.
    pub w_values: Vec<f64>,
    /// Max/min ratio of `w` over the angle at each radius.
    pub w_spread: Vec<f64>,
}

impl RadialProfile {
    pub fn new(radii: Vec<f64>, w_values: Vec<f64>, w_spread: Vec<f64>) -> Result<Self> {
        if radii.len() != w_values.len()
            || radii.len() != w_spread.len()
            || radii.windows(2).any(|p| p[1] >= p[0])
            || radii.iter().any(|&r| r.is_nan() || r <= 0.0)
            || w_values.iter().any(|&w| w.is_nan() || w <= 0.0)
        {
            return Err(Error::InvalidProfile);
        }
        Ok(Self {
            radii,
            w_values,
            w_spread,
        })
    }

    /// Multiply all values by a positive constant (or pointwise factors).
    pub fn scaled(&self, c: f64) -> RadialProfile {
        RadialProfile {
            radii: self.radii.clone(),
            w_values: self.w_values.iter().map(|&w| c * w).collect(),
            w_spread: self.w_spread.clone(),
        }
    }
}

/// The Theorem-level dichotomy for an isolated singularity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// `w = |z|^beta (C + o(1))`.
    Power { beta: f64, c: f64 },
    /// `w = -|z|^{n+1} log|z| e^{O(1)}`.
    Logarithmic { n_plus_1: i32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub branch: Branch,
    /// Max absolute deviation of the fitted model in log-log space over the
    /// fitting window.
    pub fit_quality: f64,
}

/// Dyadic radii from `r_start` down toward `r_stop`.
pub fn dyadic_radii(r_start: f64, r_stop: f64) -> Vec<f64> {
    let mut radii = Vec::new();
    let mut r = r_start;
    while r >= r_stop {
        radii.push(r);
        r *= 0.5;
    }
    radii
}

/// Profile a sampled field by linear interpolation of `log w` in `t = log r`
/// between grid rows.
pub fn extract_profile(w: &ScalarField, radii: &[f64]) -> Result<RadialProfile> {
    let grid = w.grid();
    let (t0, t1) = (grid.t(0), grid.t(grid.n_radial() - 1));
    let dt = grid.dt();
    let mut w_values = Vec::with_capacity(radii.len());
    let mut w_spread = Vec::with_capacity(radii.len());
    for &r in radii {
        let t = r.ln();
        if t < t0 - 1e-12 || t > t1 + 1e-12 {
            return Err(Error::RadiusOutOfRange(r));
        }
        let pos = ((t - t0) / dt).clamp(0.0, (grid.n_radial() - 1) as f64);
        let i0 = (pos.floor() as usize).min(grid.n_radial() - 2);
        let frac = pos - i0 as f64;
        let mut sum = 0.0;
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for j in 0..grid.n_angular() {
            let (a, b) = (w.at(i0, j), w.at(i0 + 1, j));
            if !(a > 0.0 && b > 0.0) {
                return Err(Error::InvalidProfile);
            }
            let lw = (1.0 - frac) * a.ln() + frac * b.ln();
            sum += lw;
            min = min.min(lw);
            max = max.max(lw);
        }
        w_values.push((sum / grid.n_angular() as f64).exp());
        w_spread.push((max - min).exp());
    }
    RadialProfile::new(radii.to_vec(), w_values, w_spread)
}

/// Profile a catalog metric by exact evaluation (no grid bound on radii).
pub fn profile_from_metric(metric: &ClosedFormMetric, radii: &[f64]) -> Result<RadialProfile> {
    let mut w_values = Vec::with_capacity(radii.len());
    let mut w_spread = Vec::with_capacity(radii.len());
    for &r in radii {
        let mut sum = 0.0;
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for j in 0..PROFILE_ANGULAR_SAMPLES {
            let th = std::f64::consts::TAU * j as f64 / PROFILE_ANGULAR_SAMPLES as f64;
            let w = metric.w_at(r * th.cos(), r * th.sin());
            if w.is_nan() || w <= 0.0 {
                return Err(Error::InvalidProfile);
            }
            let lw = w.ln();
            sum += lw;
            min = min.min(lw);
            max = max.max(lw);
        }
        w_values.push((sum / PROFILE_ANGULAR_SAMPLES as f64).exp());
        w_spread.push((max - min).exp());
    }
    RadialProfile::new(radii.to_vec(), w_values, w_spread)
}

/// Indices of the fitting window: the innermost `WINDOW_FRACTION` of the
/// available decades of `-log r` (at least 3 points).
fn fit_window(radii: &[f64]) -> std::ops::Range<usize> {
    let xi: Vec<f64> = radii.iter().map(|&r| -r.ln()).collect();
    // radii strictly decreasing => xi strictly increasing
    let last = xi.len() - 1;
    if xi[0] <= 0.0 {
        // radii >= 1 present: fall back to the innermost third of the points
        return (radii.len() - (radii.len() / 3).max(3).min(radii.len()))..radii.len();
    }
    let (l0, l1) = (xi[0].ln(), xi[last].ln());
    let cut = l1 - (l1 - l0) * WINDOW_FRACTION;
    let start = xi.partition_point(|&v| v.ln() < cut);
    let start = start.min(radii.len().saturating_sub(3));
    start..radii.len()
}

fn least_squares_line(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let sx: f64 = x.iter().sum();
    let sy: f64 = y.iter().sum();
    let sxx: f64 = x.iter().map(|&v| v * v).sum();
    let sxy: f64 = x.iter().zip(y).map(|(&a, &b)| a * b).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let intercept = (sy - slope * sx) / n;
    (slope, intercept)
}

/// Classify a profile with the default `tol_beta`.
pub fn classify(profile: &RadialProfile, n: Option<i32>) -> Result<Classification> {
    classify_with(profile, n, DEFAULT_TOL_BETA)
}

/// Classify a profile into the power or logarithmic branch.
///
/// When `n` is supplied the logarithmic exponent is fixed to `n+1` and a
/// power fit with `beta >= n+1 - tol_beta` is rejected (the borderline case
/// is logarithmic by the dichotomy).
pub fn classify_with(
    profile: &RadialProfile,
    n: Option<i32>,
    tol_beta: f64,
) -> Result<Classification> {
    if profile.radii.len() < 3 {
        return Err(Error::InvalidProfile);
    }
    let window = fit_window(&profile.radii);
    let x: Vec<f64> = profile.radii[window.clone()]
        .iter()
        .map(|&r| r.ln())
        .collect();
    let s: Vec<f64> = profile.w_values[window].iter().map(|&w| w.ln()).collect();

    // Power model: s = beta x + log C, least squares.
    let (beta, log_c) = least_squares_line(&x, &s);
    let power_dev = x
        .iter()
        .zip(&s)
        .map(|(&xv, &sv)| (sv - beta * xv - log_c).abs())
        .fold(0.0_f64, f64::max);

    // Logarithmic model: s = m x + log(-x) + const, m = n+1. The constant is
    // the minimax (midrange) choice so a bounded factor in [1/2, 2]
    // contributes at most log 2 of deviation.
    let log_fit = |m: f64| -> Option<(f64, f64)> {
        if x.iter().any(|&xv| xv >= 0.0) {
            return None; // log(-x) undefined at r >= 1
        }
        let delta: Vec<f64> = x
            .iter()
            .zip(&s)
            .map(|(&xv, &sv)| sv - m * xv - (-xv).ln())
            .collect();
        let (dmin, dmax) = delta
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &d| {
                (lo.min(d), hi.max(d))
            });
        Some(((dmin + dmax) / 2.0, (dmax - dmin) / 2.0))
    };

    let (m_int, log_dev) = match n {
        Some(n) => {
            let m = (n + 1) as f64;
            match log_fit(m) {
                Some((_c, dev)) => (n + 1, dev),
                None => (n + 1, f64::INFINITY),
            }
        }
        None => {
            // Fit the slope of s - log(-x), then round to the nearest integer.
            if x.iter().all(|&xv| xv < 0.0) {
                let y: Vec<f64> = x
                    .iter()
                    .zip(&s)
                    .map(|(&xv, &sv)| sv - (-xv).ln())
                    .collect();
                let (m_hat, _) = least_squares_line(&x, &y);
                let m_int = m_hat.round() as i32;
                match log_fit(m_int as f64) {
                    Some((_c, dev)) => (m_int, dev),
                    None => (0, f64::INFINITY),
                }
            } else {
                (0, f64::INFINITY)
            }
        }
    };

    // Reject the power branch at the borderline when the order is known.
    let power_admissible = match n {
        Some(n) => beta < (n + 1) as f64 - tol_beta,
        None => true,
    };

    let classification = if power_admissible && power_dev <= log_dev {
        Classification {
            branch: Branch::Power {
                beta,
                c: log_c.exp(),
            },
            fit_quality: power_dev,
        }
    } else {
        Classification {
            branch: Branch::Logarithmic { n_plus_1: m_int },
            fit_quality: log_dev,
        }
    };

    if classification.fit_quality > INCONCLUSIVE_THRESHOLD {
        return Err(Error::Inconclusive {
            power_dev,
            log_dev,
            threshold: INCONCLUSIVE_THRESHOLD,
        });
    }
    Ok(classification)
}

/// Estimate the order of the cubic form from sampled `|Xi_0|`: the slope of
/// `log max_theta |Xi_0|` against `log r` over the innermost decade, rounded
/// to the nearest integer. Consistency is checked through the curvature
/// sandwich with the rounded order.
pub fn estimate_order(xi0: &ComplexField) -> Result<i32> {
    let grid = xi0.grid();
    let nsq = xi0.norm_sq();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let r_cut = grid.r_in() * 10.0;
    for i in 0..grid.n_radial() {
        let r = grid.r(i);
        if r > r_cut && i >= 3 {
            break;
        }
        let max_sq = (0..grid.n_angular())
            .map(|j| nsq.at(i, j))
            .fold(0.0_f64, f64::max);
        if max_sq.is_nan() || max_sq <= 0.0 {
            return Err(Error::NoOrder);
        }
        xs.push(r.ln());
        ys.push(0.5 * max_sq.ln());
    }
    let (slope, _) = least_squares_line(&xs, &ys);
    let rounded = slope.round();
    if (slope - rounded).abs() > ORDER_SLOPE_TOL {
        return Err(Error::NonIntegerOrder {
            slope,
            tol: ORDER_SLOPE_TOL,
        });
    }
    let n = rounded as i32;

    // Sandwich consistency: 16|Xi_0|^2 |z|^{-2n} must stay bounded away from
    // zero relative to its max.
    let mut c1 = f64::NEG_INFINITY;
    let mut c2 = f64::INFINITY;
    for (i, j) in grid.nodes() {
        let v = 16.0 * nsq.at(i, j) * grid.r(i).powi(-2 * n);
        c1 = c1.max(v);
        c2 = c2.min(v);
    }
    // `<=` plus the NaN guard matches the rejected set of `!(c2 > bound)`.
    let bound = crate::verify::SANDWICH_RATIO_THRESHOLD * c1;
    if c2.is_nan() || bound.is_nan() || c2 <= bound {
        return Err(Error::MisdeclaredOrder {
            n,
            ratio: c2 / c1,
            threshold: crate::verify::SANDWICH_RATIO_THRESHOLD,
        });
    }
    Ok(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{self, sample_xi0, HarmonicKind, HarmonicSpec};
    use crate::grid::AnnulusGrid;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn synthetic_profile(radii: Vec<f64>, mut w: impl FnMut(f64) -> f64) -> RadialProfile {
        let w_values = radii.iter().map(|&r| w(r)).collect();
        let spread = vec![1.0; radii.len()];
        RadialProfile::new(radii, w_values, spread).unwrap()
    }

    #[test]
    fn extract_profile_of_power_law_field() {
        let g = AnnulusGrid::new(1e-3, 0.5, 64, 16).unwrap();
        let w = ScalarField::from_fn(g, |x, y| (x * x + y * y).powf(0.25));
        let radii = dyadic_radii(0.25, 2e-3);
        let p = extract_profile(&w, &radii).unwrap();
        for (k, &r) in p.radii.iter().enumerate() {
            assert_relative_eq!(p.w_values[k], r.sqrt(), max_relative = 1e-6);
            assert_relative_eq!(p.w_spread[k], 1.0, max_relative = 1e-12);
        }
        assert!(matches!(
            extract_profile(&w, &[0.9]),
            Err(Error::RadiusOutOfRange(_))
        ));
    }

    #[test]
    fn profile_of_punctured_disc_is_exact() {
        let m = catalog::poincare_family("punctured_disc").unwrap();
        let radii = dyadic_radii(0.25, 1e-4);
        let p = profile_from_metric(&m, &radii).unwrap();
        for (k, &r) in p.radii.iter().enumerate() {
            assert_relative_eq!(p.w_values[k], -r * r.ln(), max_relative = 1e-12);
        }
    }

    #[test]
    fn classify_pure_models_exactly() {
        let radii = dyadic_radii(0.1, 1e-12);
        // -r log r with n = 0: logarithmic, n+1 = 1
        let p = synthetic_profile(radii.clone(), |r| -r * r.ln());
        let c = classify(&p, Some(0)).unwrap();
        assert_eq!(c.branch, Branch::Logarithmic { n_plus_1: 1 });
        assert!(c.fit_quality <= 1e-8);
        // -log r with n = -1: logarithmic, n+1 = 0
        let p = synthetic_profile(radii.clone(), |r| -r.ln());
        let c = classify(&p, Some(-1)).unwrap();
        assert_eq!(c.branch, Branch::Logarithmic { n_plus_1: 0 });
        assert!(c.fit_quality <= 1e-8);
        // pure power law classifies with tiny deviation
        let p = synthetic_profile(radii, |r| 3.0 * r.powf(0.5));
        let c = classify(&p, None).unwrap();
        match c.branch {
            Branch::Power { beta, c: cc } => {
                assert_relative_eq!(beta, 0.5, epsilon = 1e-10);
                assert_relative_eq!(cc, 3.0, max_relative = 1e-9);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(c.fit_quality <= 1e-8);
    }

    #[test]
    fn classify_power_with_correction_term() {
        // r^0.5 (1 - r): beta = 0.5 +- 0.02, C = 1 +- 0.05
        let radii = dyadic_radii(0.25, 1e-8);
        let p = synthetic_profile(radii, |r| r.sqrt() * (1.0 - r));
        let c = classify(&p, None).unwrap();
        match c.branch {
            Branch::Power { beta, c: cc } => {
                assert!((beta - 0.5).abs() <= 0.02, "beta = {beta}");
                assert!((cc - 1.0).abs() <= 0.05, "C = {cc}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn classify_without_supplied_order_recovers_log_branch() {
        let radii = dyadic_radii(0.1, 1e-40);
        let p = synthetic_profile(radii, |r| -r * r * r.ln());
        let c = classify(&p, None).unwrap();
        assert_eq!(c.branch, Branch::Logarithmic { n_plus_1: 2 });
    }

    #[test]
    fn beta_constraint_enforced_when_order_supplied() {
        // A power law with beta = n+1 must not classify as power when n is
        // supplied: borderline goes to the logarithmic branch or errors.
        let radii = dyadic_radii(0.1, 1e-12);
        let p = synthetic_profile(radii, |r| r); // beta = 1
        match classify(&p, Some(0)) {
            Ok(c) => match c.branch {
                Branch::Power { beta, .. } => {
                    assert!(beta < 1.0, "power branch with beta = {beta} >= n+1")
                }
                Branch::Logarithmic { .. } => {}
            },
            Err(Error::Inconclusive { .. }) => {}
            Err(e) => panic!("unexpected error {e}"),
        }
    }

    #[test]
    fn inconclusive_on_junk_profiles() {
        // Oscillating garbage fits neither model.
        let radii = dyadic_radii(0.1, 1e-12);
        let mut k = 0;
        let p = synthetic_profile(radii, |r| {
            k += 1;
            r.powf(if k % 2 == 0 { 3.0 } else { -2.0 })
        });
        assert!(matches!(
            classify(&p, None),
            Err(Error::Inconclusive { .. })
        ));
    }

    #[test]
    fn estimate_order_from_symbolic_specs() {
        let g = AnnulusGrid::new(1e-4, 0.5, 64, 32).unwrap();
        for (spec, expected) in [
            (HarmonicSpec::exact(HarmonicKind::CoordinateX), 0),
            (HarmonicSpec::exact(HarmonicKind::LogAbs), -1),
            (HarmonicSpec::new(HarmonicKind::Constant(0.0), 1.0), -1),
            (HarmonicSpec::exact(HarmonicKind::Monomial(2)), 2),
        ] {
            let xi = sample_xi0(&spec, &g);
            assert_eq!(estimate_order(&xi).unwrap(), expected, "spec {spec:?}");
        }
    }

    #[test]
    fn estimate_order_rejects_non_integer_slopes() {
        // |Xi_0| ~ r^{1/2} is outside the holomorphic-order hypothesis.
        let g = AnnulusGrid::new(1e-4, 0.5, 64, 8).unwrap();
        let xi = ComplexField::from_fn(g, |x, y| {
            ((x * x + y * y).powf(0.25), 0.0)
        });
        assert!(matches!(
            estimate_order(&xi),
            Err(Error::NonIntegerOrder { .. })
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn classifier_is_scale_equivariant(scale in 0.01f64..100.0) {
            let radii = dyadic_radii(0.1, 1e-12);
            let p = synthetic_profile(radii.clone(), |r| 2.0 * r.powf(0.3));
            let c0 = classify(&p, None).unwrap();
            let c1 = classify(&p.scaled(scale), None).unwrap();
            match (c0.branch, c1.branch) {
                (Branch::Power { beta: b0, c: v0 }, Branch::Power { beta: b1, c: v1 }) => {
                    prop_assert!((b0 - b1).abs() < 1e-9);
                    prop_assert!((v1 / v0 - scale).abs() < 1e-6 * scale);
                }
                other => prop_assert!(false, "unexpected {other:?}"),
            }

            let p = synthetic_profile(radii, |r| -r * r.ln());
            let c0 = classify(&p, Some(0)).unwrap();
            let c1 = classify(&p.scaled(scale), Some(0)).unwrap();
            prop_assert_eq!(c0.branch, c1.branch);
        }

        #[test]
        fn bounded_factor_never_flips_log_to_power(seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            // Profile spanning ~3 decades of -log r (0.7 up to ~600, inside
            // f64 range), the e^{O(1)} factor drawn adversarially from
            // [1/2, 2].
            let radii: Vec<f64> = (0..40)
                .map(|k| (-(0.7_f64) * 1.19_f64.powi(k)).exp())
                .collect();
            let w_values: Vec<f64> = radii
                .iter()
                .map(|&r| {
                    let factor = if rng.gen_bool(0.5) { 0.5 } else { 2.0 };
                    -r * r.ln() * factor
                })
                .collect();
            let spread = vec![1.0; radii.len()];
            let p = RadialProfile::new(radii, w_values, spread).unwrap();
            let c = classify(&p, Some(0)).unwrap();
            prop_assert_eq!(c.branch, Branch::Logarithmic { n_plus_1: 1 });
        }
    }
}
