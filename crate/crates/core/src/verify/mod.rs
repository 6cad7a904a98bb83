//! Independent numeric checks: integrate the second-order equation and the
//! reduced first-order equation separately, compare, and evaluate the
//! class residual along the reduced trajectory.

pub mod generator;
pub mod integrator;

pub use generator::{generate_case, GeneratedCase};
pub use integrator::{integrate, integrate_with_stops, DenseSolution, StepControl, StepStats, BLOW_UP};

use serde::{Deserialize, Serialize};

use crate::classes::{residual_expr, second_derivative_expr, ClassDescriptor, InitialCondition};
use crate::error::{EvalError, IntegrateError};
use crate::reduction::{reduce, ReducedODE};

pub const GRID_POINTS: usize = 101;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub grid: Vec<f64>,
    pub y: Vec<f64>,
    pub yp: Vec<f64>,
    pub stats: StepStats,
}

/// The `GRID_POINTS` equispaced abscissae of `[x0, x1]`.
pub fn grid(x0: f64, x1: f64) -> Vec<f64> {
    let n = GRID_POINTS - 1;
    (0..=n).map(|i| x0 + (x1 - x0) * i as f64 / n as f64).collect()
}

/// `(y, y')` of the class equation by adaptive Runge–Kutta.
pub fn integrate_second_order(
    d: &ClassDescriptor,
    ic: &InitialCondition,
    x1: f64,
    tol: f64,
) -> Result<Trajectory, IntegrateError> {
    integrate_second_order_with(d, ic, x1, &StepControl::new(tol))
}

/// [`integrate_second_order`] under explicit step control.
pub fn integrate_second_order_with(
    d: &ClassDescriptor,
    ic: &InitialCondition,
    x1: f64,
    ctl: &StepControl,
) -> Result<Trajectory, IntegrateError> {
    let q = second_derivative_expr(d, ic).map_err(|e| IntegrateError::Degenerate(e.to_string()))?;
    let f = |x: f64, s: &[f64; 2]| Ok([s[1], q.eval(&[("x", x), ("y", s[0]), ("p", s[1])])?]);
    let grid = grid(ic.x0, x1);
    let sol = integrate_with_stops(f, ic.x0, [ic.y0, ic.yp0], x1, ctl, &grid)?;
    let (y, yp) = grid.iter().map(|&x| sol.at(x)).map(|s| (s[0], s[1])).unzip();
    Ok(Trajectory { grid, y, yp, stats: sol.stats })
}

/// `y` of the reduced equation; `yp` is the reduced right-hand side on the grid.
pub fn integrate_first_order(r: &ReducedODE, x1: f64, tol: f64) -> Result<Trajectory, IntegrateError> {
    let ic = r.anchor;
    let f = |x: f64, s: &[f64; 1]| Ok([r.rhs_at(x, s[0])?]);
    let grid = grid(ic.x0, x1);
    let sol = integrate_with_stops(f, ic.x0, [ic.y0], x1, &StepControl::new(tol), &grid)?;
    let y: Vec<f64> = grid.iter().map(|&x| sol.at(x)[0]).collect();
    let yp = grid
        .iter()
        .zip(&y)
        .map(|(&x, &v)| r.rhs_at(x, v).map_err(|source| IntegrateError::Rhs { at: x, source }))
        .collect::<Result<_, _>>()?;
    Ok(Trajectory { grid, y, yp, stats: sol.stats })
}

/// Class residual at each `(x, y)` with `y' = rhs` and `y''` its total
/// derivative.
pub fn residual_along(d: &ClassDescriptor, r: &ReducedODE, xs: &[f64], ys: &[f64]) -> Result<Vec<f64>, EvalError> {
    let res = residual_expr(d, &r.anchor).map_err(|e| EvalError::domain(e.to_string(), "descriptor"))?;
    let ypp = r.rhs.total_derivative("x", "y", &r.rhs);
    let combined = res.substitute_all(&[("p", r.rhs.clone()), ("q", ypp)]).simplify();
    xs.iter()
        .zip(ys)
        .map(|(&x, &y)| {
            combined.eval(&[("x", x), ("y", y)]).map_err(|e| match e {
                EvalError::Domain { what, expr } => EvalError::Domain { what: format!("at x = {x}: {what}"), expr },
                other => other,
            })
        })
        .collect()
}

/// Sup over the grid of [`residual_along`].
pub fn residual_on_grid(d: &ClassDescriptor, r: &ReducedODE, traj: &Trajectory) -> Result<f64, EvalError> {
    Ok(residual_along(d, r, &traj.grid, &traj.y)?.into_iter().fold(0.0, |m, v| m.max(v.abs())))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub integrator_tol: f64,
    pub residual_tol: f64,
    pub deviation_tol: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { integrator_tol: 1e-10, residual_tol: 1e-6, deviation_tol: 1e-6 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub residual_sup: Option<f64>,
    pub trajectory_dev: Option<f64>,
    pub interval: (f64, f64),
    pub verdict: Verdict,
    pub diagnostics: Vec<String>,
    pub direct_stats: Option<StepStats>,
    pub reduced_stats: Option<StepStats>,
}

/// Everything [`compare`] computed, for callers that want the trajectories.
#[derive(Debug, Clone)]
pub struct Comparison {
    pub report: VerificationReport,
    pub reduced: Option<ReducedODE>,
    pub direct: Option<Trajectory>,
    pub reduced_traj: Option<Trajectory>,
}

/// Run both routes and the residual; failures of one route become
/// diagnostics without stopping the other.
pub fn run_comparison(d: &ClassDescriptor, ic: &InitialCondition, x1: f64, opts: &VerifyOptions) -> Comparison {
    let mut diagnostics = Vec::new();
    let direct = integrate_second_order(d, ic, x1, opts.integrator_tol)
        .map_err(|e| diagnostics.push(format!("direct route: {e}")))
        .ok();
    let reduced = reduce(d, ic).map_err(|e| diagnostics.push(format!("reduction: {e}"))).ok();
    let reduced_traj = reduced.as_ref().and_then(|r| {
        integrate_first_order(r, x1, opts.integrator_tol)
            .map_err(|e| diagnostics.push(format!("reduced route: {e}")))
            .ok()
    });
    let residual_sup = match (&reduced, &reduced_traj) {
        (Some(r), Some(t)) => residual_on_grid(d, r, t)
            .map_err(|e| diagnostics.push(format!("residual: {e}")))
            .ok(),
        _ => None,
    };
    let trajectory_dev = match (&direct, &reduced_traj) {
        (Some(a), Some(b)) => Some(a.y.iter().zip(&b.y).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max)),
        _ => None,
    };
    if let Some(r) = residual_sup.filter(|r| !(*r <= opts.residual_tol)) {
        diagnostics.push(format!("residual {r:e} exceeds {:e}", opts.residual_tol));
    }
    if let Some(t) = trajectory_dev.filter(|t| !(*t <= opts.deviation_tol)) {
        diagnostics.push(format!("trajectory deviation {t:e} exceeds {:e}", opts.deviation_tol));
    }
    let pass = matches!(residual_sup, Some(r) if r <= opts.residual_tol)
        && matches!(trajectory_dev, Some(t) if t <= opts.deviation_tol);
    let report = VerificationReport {
        residual_sup,
        trajectory_dev,
        interval: (ic.x0, x1),
        verdict: if pass { Verdict::Pass } else { Verdict::Fail },
        diagnostics,
        direct_stats: direct.as_ref().map(|t| t.stats),
        reduced_stats: reduced_traj.as_ref().map(|t| t.stats),
    };
    Comparison { report, reduced, direct, reduced_traj }
}

pub fn compare(d: &ClassDescriptor, ic: &InitialCondition, x1: f64, opts: &VerifyOptions) -> VerificationReport {
    run_comparison(d, ic, x1, opts).report
}
