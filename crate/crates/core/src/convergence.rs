//! Dyadic refinement studies and convergence-order fitting.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One refinement level of a convergence study.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RefinementLevel {
    /// Radial resolution at this level.
    pub n_radial: usize,
    /// Angular resolution at this level.
    pub n_angular: usize,
    /// Measured error (max norm unless stated otherwise by the caller).
    pub error: f64,
}

/// Result of a refinement sweep: the per-level errors and the fitted order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceStudy {
    pub levels: Vec<RefinementLevel>,
    /// Least-squares slope of `log error` against `log h`.
    pub fitted_order: f64,
}

/// Least-squares slope of `log error` against `log h` for mesh widths `h`.
///
/// Non-finite or non-positive errors (e.g. exactly resolved cases) are
/// rejected; at least two levels are required.
pub fn fitted_order(h: &[f64], errors: &[f64]) -> Result<f64> {
    if h.len() != errors.len() {
        return Err(Error::LengthMismatch {
            expected: h.len(),
            got: errors.len(),
        });
    }
    if h.len() < 2
        || h.iter().any(|&v| v.is_nan() || v <= 0.0)
        || errors.iter().any(|&e| !e.is_finite() || e <= 0.0)
    {
        return Err(Error::InvalidConfig(
            "order fit needs >= 2 levels with positive finite errors".into(),
        ));
    }
    let x: Vec<f64> = h.iter().map(|&v| v.ln()).collect();
    let y: Vec<f64> = errors.iter().map(|&e| e.ln()).collect();
    let n = x.len() as f64;
    let sx: f64 = x.iter().sum();
    let sy: f64 = y.iter().sum();
    let sxx: f64 = x.iter().map(|&v| v * v).sum();
    let sxy: f64 = x.iter().zip(&y).map(|(&a, &b)| a * b).sum();
    Ok((n * sxy - sx * sy) / (n * sxx - sx * sx))
}

/// Run a dyadic refinement sweep: resolutions `(base_radial * 2^k,
/// base_angular * 2^k)` for `k = 0..levels`, errors supplied by `measure`.
pub fn refinement_sweep(
    base_radial: usize,
    base_angular: usize,
    levels: usize,
    mut measure: impl FnMut(usize, usize) -> Result<f64>,
) -> Result<ConvergenceStudy> {
    if levels < 2 {
        return Err(Error::InvalidConfig(
            "refinement sweep needs >= 2 levels".into(),
        ));
    }
    let mut out = Vec::with_capacity(levels);
    let mut hs = Vec::with_capacity(levels);
    let mut errs = Vec::with_capacity(levels);
    for k in 0..levels {
        let factor = 1usize << k;
        let (nr, na) = (base_radial * factor, base_angular * factor);
        let error = measure(nr, na)?;
        out.push(RefinementLevel {
            n_radial: nr,
            n_angular: na,
            error,
        });
        hs.push(1.0 / nr as f64);
        errs.push(error);
    }
    let order = fitted_order(&hs, &errs)?;
    Ok(ConvergenceStudy {
        levels: out,
        fitted_order: order,
    })
}
