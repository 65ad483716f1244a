//! Damped-Newton solver for the Kazdan-Warner equation
//! `Delta u = rho e^{2u}` on the annulus with Dirichlet data.
//!
//! The discrete equation lives in log-polar coordinates,
//! `u_tt + u_thth = e^{2t} rho e^{2u}`, with the residual reported in the
//! Cartesian normalization `Delta u - rho e^{2u}`. The Newton correction
//! solves `Delta v - 2 rho e^{2u} v = -(Delta u - rho e^{2u})` with steps
//! halved until the residual norm decreases; since `rho >= 0` the nonlinearity
//! is monotone and the damped iteration is globally convergent.
//!
//! Linear solves use matrix-free Jacobi-preconditioned conjugate gradients on
//! the symmetric positive definite operator `-(d_tt + d_thth) + 2 e^{2t} rho
//! e^{2u}` restricted to interior nodes; the inner tolerance is `1e-2` times
//! the outer residual target.

use crate::catalog::{sample_dh, HarmonicSpec};
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::grid::AnnulusGrid;
use crate::ops;

/// Ratio of inner (linear) solve tolerance to the outer residual target.
const INNER_TOL_FACTOR: f64 = 1e-2;
/// Hard cap on CG iterations per Newton step.
const CG_MAX_ITER: usize = 50_000;
/// Smallest damping factor tried before accepting a non-decreasing step.
const MIN_DAMPING: f64 = 1.0 / 1024.0;

/// Dirichlet problem `Delta u = rho e^{2u}` on an annulus grid.
#[derive(Debug, Clone)]
pub struct KwProblem {
    pub grid: AnnulusGrid,
    /// The factor `|dh + a*phi|^2`; must be nonnegative.
    pub rho: ScalarField,
    /// Dirichlet trace at `r = r_in`, one value per angular node.
    pub bc_inner: Vec<f64>,
    /// Dirichlet trace at `r = r_out`, one value per angular node.
    pub bc_outer: Vec<f64>,
    /// Starting iterate; default is the per-column linear-in-t extension of
    /// the boundary data, which keeps `e^{2u}` bounded on the first iterate.
    pub initial_guess: Option<ScalarField>,
}

impl KwProblem {
    pub fn new(
        grid: AnnulusGrid,
        rho: ScalarField,
        bc_inner: Vec<f64>,
        bc_outer: Vec<f64>,
    ) -> Result<Self> {
        if rho.grid() != &grid {
            return Err(Error::GridMismatch);
        }
        if bc_inner.len() != grid.n_angular() || bc_outer.len() != grid.n_angular() {
            return Err(Error::LengthMismatch {
                expected: grid.n_angular(),
                got: bc_inner.len().min(bc_outer.len()),
            });
        }
        if let Some((index, &value)) = rho
            .values()
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v < 0.0)
        {
            return Err(Error::NegativeRho { index, value });
        }
        for &v in bc_inner.iter().chain(&bc_outer) {
            if !v.is_finite() {
                return Err(Error::InvalidConfig(
                    "boundary data must be finite".to_string(),
                ));
            }
        }
        Ok(Self {
            grid,
            rho,
            bc_inner,
            bc_outer,
            initial_guess: None,
        })
    }

    fn initial_iterate(&self) -> ScalarField {
        if let Some(g) = &self.initial_guess {
            return g.clone();
        }
        let grid = self.grid;
        let (t0, t1) = (grid.t(0), grid.t(grid.n_radial() - 1));
        let mut values = vec![0.0; grid.len()];
        for (i, j) in grid.nodes() {
            let s = (grid.t(i) - t0) / (t1 - t0);
            values[grid.idx(i, j)] = (1.0 - s) * self.bc_inner[j] + s * self.bc_outer[j];
        }
        ScalarField::new(grid, values).expect("length matches grid")
    }
}

/// Converged (or best-effort) solution of a [`KwProblem`].
#[derive(Debug, Clone)]
pub struct KwSolution {
    pub u: ScalarField,
    /// Interior L-infinity norm of `Delta u - rho e^{2u}`.
    pub residual_norm: f64,
    pub newton_iterations: usize,
    pub converged: bool,
}

struct Workspace<'a> {
    grid: AnnulusGrid,
    rho: &'a [f64],
    /// `e^{2t}` per radial row.
    e2t: Vec<f64>,
    dt2: f64,
    dth2: f64,
}

impl<'a> Workspace<'a> {
    fn new(grid: AnnulusGrid, rho: &'a ScalarField) -> Self {
        let e2t = (0..grid.n_radial()).map(|i| (2.0 * grid.t(i)).exp()).collect();
        Self {
            grid,
            rho: rho.values(),
            e2t,
            dt2: grid.dt() * grid.dt(),
            dth2: grid.dtheta() * grid.dtheta(),
        }
    }

    /// Cartesian residual `Delta u - rho e^{2u}` at interior nodes; zero on
    /// boundary rows (Dirichlet data is matched exactly there).
    fn residual(&self, u: &[f64], out: &mut [f64]) {
        let g = &self.grid;
        let (nr, na) = (g.n_radial(), g.n_angular());
        out[..na].fill(0.0);
        out[(nr - 1) * na..].fill(0.0);
        for i in 1..nr - 1 {
            let inv_e2t = 1.0 / self.e2t[i];
            for j in 0..na {
                let k = g.idx(i, j);
                let jp = g.idx(i, (j + 1) % na);
                let jm = g.idx(i, (j + na - 1) % na);
                let lap = inv_e2t
                    * ((u[k + na] - 2.0 * u[k] + u[k - na]) / self.dt2
                        + (u[jp] - 2.0 * u[k] + u[jm]) / self.dth2);
                out[k] = lap - self.rho[k] * (2.0 * u[k]).exp();
            }
        }
    }

    fn residual_norm(&self, u: &[f64], scratch: &mut [f64]) -> f64 {
        self.residual(u, scratch);
        scratch.iter().fold(0.0_f64, |m, &v| m.max(v.abs()))
    }

    /// Apply `A v = -(v_tt + v_thth) + 2 e^{2t} rho e^{2u} v` on interior
    /// nodes, with `v = 0` on boundary rows.
    fn apply(&self, coeff: &[f64], v: &[f64], out: &mut [f64]) {
        let g = &self.grid;
        let (nr, na) = (g.n_radial(), g.n_angular());
        out[..na].fill(0.0);
        out[(nr - 1) * na..].fill(0.0);
        for i in 1..nr - 1 {
            for j in 0..na {
                let k = g.idx(i, j);
                let jp = g.idx(i, (j + 1) % na);
                let jm = g.idx(i, (j + na - 1) % na);
                let vtt = (v[k + na] - 2.0 * v[k] + v[k - na]) / self.dt2;
                let vthth = (v[jp] - 2.0 * v[k] + v[jm]) / self.dth2;
                out[k] = -(vtt + vthth) + coeff[k] * v[k];
            }
        }
    }
}

/// Solve a Kazdan-Warner problem with damped Newton iterations.
///
/// Returns `converged = false` with the best iterate when `max_iter` Newton
/// steps do not reach the tolerance.
pub fn solve(problem: &KwProblem, tol: f64, max_iter: usize) -> Result<KwSolution> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidConfig("tol must be positive".to_string()));
    }
    let grid = problem.grid;
    let (nr, na) = (grid.n_radial(), grid.n_angular());
    let ws = Workspace::new(grid, &problem.rho);

    let mut u = problem.initial_iterate().values().to_vec();
    // Enforce the Dirichlet trace exactly.
    for j in 0..na {
        u[grid.idx(0, j)] = problem.bc_inner[j];
        u[grid.idx(nr - 1, j)] = problem.bc_outer[j];
    }

    let n = grid.len();
    let mut res = vec![0.0; n];
    let mut scratch = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    let mut coeff = vec![0.0; n];
    let mut step = vec![0.0; n];

    let mut res_norm = ws.residual_norm(&u, &mut res);
    let inner_tol = INNER_TOL_FACTOR * tol;
    let mut iterations = 0;

    while res_norm > tol && iterations < max_iter {
        // Scaled right-hand side and Jacobian coefficient.
        for i in 1..nr - 1 {
            for j in 0..na {
                let k = grid.idx(i, j);
                rhs[k] = ws.e2t[i] * res[k];
                coeff[k] = 2.0 * ws.e2t[i] * ws.rho[k] * (2.0 * u[k]).exp();
            }
        }
        cg_solve(&ws, &coeff, &rhs, inner_tol, &mut step, &mut scratch);

        // Damping: halve until the residual norm decreases.
        let mut s = 1.0;
        let mut accepted = false;
        let mut trial = u.clone();
        while s >= MIN_DAMPING {
            for k in 0..n {
                trial[k] = u[k] + s * step[k];
            }
            let trial_norm = ws.residual_norm(&trial, &mut scratch);
            if trial_norm < res_norm {
                u.copy_from_slice(&trial);
                res_norm = trial_norm;
                accepted = true;
                break;
            }
            s *= 0.5;
        }
        iterations += 1;
        if !accepted {
            break; // stagnation at rounding level
        }
        ws.residual(&u, &mut res);
    }

    Ok(KwSolution {
        u: ScalarField::new(grid, u).expect("length matches grid"),
        residual_norm: res_norm,
        newton_iterations: iterations,
        converged: res_norm <= tol,
    })
}

/// Jacobi-preconditioned conjugate gradients for the Newton correction.
/// Stops when the unscaled residual (the Cartesian normalization) drops below
/// `inner_tol` in L-infinity.
fn cg_solve(
    ws: &Workspace,
    coeff: &[f64],
    rhs: &[f64],
    inner_tol: f64,
    x: &mut [f64],
    ap: &mut [f64],
) {
    let g = &ws.grid;
    let (nr, na) = (g.n_radial(), g.n_angular());
    let n = rhs.len();
    x.fill(0.0);

    let diag: Vec<f64> = (0..n)
        .map(|k| 2.0 / ws.dt2 + 2.0 / ws.dth2 + coeff[k])
        .collect();

    let mut r = rhs.to_vec();
    for j in 0..na {
        r[g.idx(0, j)] = 0.0;
        r[g.idx(nr - 1, j)] = 0.0;
    }
    let mut z: Vec<f64> = r.iter().zip(&diag).map(|(&r, &d)| r / d).collect();
    let mut p = z.clone();
    let mut rz: f64 = r.iter().zip(&z).map(|(&a, &b)| a * b).sum();

    let unscaled_linf = |r: &[f64]| -> f64 {
        let mut m = 0.0_f64;
        for i in 1..nr - 1 {
            let inv = 1.0 / ws.e2t[i];
            for j in 0..na {
                m = m.max((r[g.idx(i, j)] * inv).abs());
            }
        }
        m
    };

    if unscaled_linf(&r) <= inner_tol {
        return;
    }

    for _ in 0..CG_MAX_ITER {
        ws.apply(coeff, &p, ap);
        let pap: f64 = p.iter().zip(ap.iter()).map(|(&a, &b)| a * b).sum();
        if pap <= 0.0 {
            break;
        }
        let alpha = rz / pap;
        for k in 0..n {
            x[k] += alpha * p[k];
            r[k] -= alpha * ap[k];
        }
        if unscaled_linf(&r) <= inner_tol {
            break;
        }
        for k in 0..n {
            z[k] = r[k] / diag[k];
        }
        let rz_new: f64 = r.iter().zip(&z).map(|(&a, &b)| a * b).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for k in 0..n {
            p[k] = z[k] + beta * p[k];
        }
    }
}

/// Solve for the power branch: Dirichlet data `u = -beta log r` on both
/// boundary circles (the constant is absorbed), with `rho = |dh + a*phi|^2`
/// sampled symbolically.
///
/// Rejects `beta >= n+1` where `n` is the order of the cubic form determined
/// from `h_spec`.
pub fn solve_with_exponent(
    h_spec: &HarmonicSpec,
    beta: f64,
    grid: AnnulusGrid,
    tol: f64,
    max_iter: usize,
) -> Result<KwSolution> {
    let n = h_spec.xi0_order().ok_or(Error::NoOrder)?;
    let n_plus_1 = n + 1;
    if beta >= n_plus_1 as f64 {
        return Err(Error::BetaConstraint { beta, n_plus_1 });
    }
    let rho = ops::norm_sq(&sample_dh(h_spec, &grid));
    let bc_inner = vec![-beta * grid.t(0); grid.n_angular()];
    let bc_outer = vec![-beta * grid.t(grid.n_radial() - 1); grid.n_angular()];
    let problem = KwProblem::new(grid, rho, bc_inner, bc_outer)?;
    solve(&problem, tol, max_iter)
}
