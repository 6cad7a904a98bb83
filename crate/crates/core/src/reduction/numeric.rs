use std::sync::{Arc, Mutex};

use crate::error::EvalError;
use crate::expr::{Expr, OpaqueFn};
use crate::verify::integrator::{integrate, DenseSolution, StepControl};

const TOL: f64 = 1e-12;
/// Step cap keeping the cubic Hermite interpolation error near `TOL`.
const MAX_STEP: f64 = 5e-3;
/// Extra distance integrated past a query, so nearby queries interpolate.
const LOOKAHEAD: f64 = 0.05;
/// Far more than a tame extension needs at `MAX_STEP`.
const MAX_STEPS: usize = 100_000;

/// Solution of `dep' = rhs(indep, dep)` through `(t0, k0)`, extended on
/// demand away from the anchor on either side and interpolated between
/// accepted steps, so repeated queries see one smooth function.
#[derive(Debug)]
pub struct OdeSolution {
    label: String,
    rhs: Expr,
    indep: String,
    dep: String,
    t0: f64,
    k0: f64,
    /// Solutions covering `[t0, ..)` and `(.., t0]`.
    sides: Mutex<[Option<DenseSolution<1>>; 2]>,
    /// Per side, where extension broke down and why; queries beyond fail
    /// at once instead of re-integrating.
    walls: Mutex<[Option<(f64, EvalError)>; 2]>,
}

impl OdeSolution {
    pub fn new(label: &str, rhs: Expr, indep: &str, dep: &str, t0: f64, k0: f64) -> Arc<Self> {
        Arc::new(OdeSolution {
            label: label.to_string(),
            rhs,
            indep: indep.to_string(),
            dep: dep.to_string(),
            t0,
            k0,
            sides: Mutex::new([None, None]),
            walls: Mutex::new([None, None]),
        })
    }

    pub fn rhs(&self) -> &Expr {
        &self.rhs
    }

    pub fn anchor(&self) -> (f64, f64) {
        (self.t0, self.k0)
    }

    fn solve(&self, from: f64, k: f64, to: f64) -> Result<DenseSolution<1>, (f64, EvalError)> {
        let (iv, dv) = (self.indep.as_str(), self.dep.as_str());
        let f = |s: f64, k: &[f64; 1]| Ok([self.rhs.eval(&[(iv, s), (dv, k[0])])?]);
        let ctl = StepControl { max_step: MAX_STEP, max_steps: MAX_STEPS, ..StepControl::new(TOL) };
        integrate(f, from, [k], to, &ctl).map_err(|e| {
            let at = e.location().unwrap_or(to);
            (at, EvalError::Integration(format!("{} at {to}: {e}", self.label)))
        })
    }

    pub fn value(&self, t: f64) -> Result<f64, EvalError> {
        if t == self.t0 {
            return Ok(self.k0);
        }
        let side = usize::from(t < self.t0);
        let dir = if side == 0 { 1.0 } else { -1.0 };
        let mut walls = self.walls.lock().expect("ode cache poisoned");
        if let Some((at, err)) = &walls[side] {
            if (t - at) * dir >= 0.0 {
                return Err(err.clone());
            }
        }
        let mut sides = self.sides.lock().expect("ode cache poisoned");
        let (end, k_end) = match &sides[side] {
            Some(sol) => sol.end(),
            None => (self.t0, [self.k0]),
        };
        if (t - end) * dir > 0.0 {
            // past the covered range: extend, with lookahead short of any known wall
            let mut ahead = t + dir * LOOKAHEAD.max(0.25 * (t - end).abs());
            if let Some((at, _)) = &walls[side] {
                if (ahead - at) * dir >= 0.0 {
                    ahead = t;
                }
            }
            let piece = match self.solve(end, k_end[0], ahead) {
                Ok(p) => p,
                Err((at, err)) => {
                    let near = (at - t) * dir > 0.0;
                    walls[side] = Some((at, err.clone()));
                    if !near {
                        return Err(err);
                    }
                    self.solve(end, k_end[0], t).map_err(|(at, err)| {
                        walls[side] = Some((at, err.clone()));
                        err
                    })?
                }
            };
            match &mut sides[side] {
                Some(sol) => {
                    sol.xs.extend_from_slice(&piece.xs[1..]);
                    sol.ys.extend_from_slice(&piece.ys[1..]);
                    sol.fs.extend_from_slice(&piece.fs[1..]);
                }
                slot @ None => *slot = Some(piece),
            }
        }
        Ok(sides[side].as_ref().expect("side populated above").at(t)[0])
    }
}

impl OpaqueFn for OdeSolution {
    fn label(&self) -> String {
        self.label.clone()
    }

    fn eval(&self, t: f64) -> Result<f64, EvalError> {
        self.value(t)
    }

    fn derivative(&self, arg: &Expr, this: &Expr) -> Expr {
        self.rhs
            .substitute_all(&[(self.indep.as_str(), arg.clone()), (self.dep.as_str(), this.clone())])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse, var};

    #[test]
    fn logistic_against_closed_form() {
        // K' = K (1 - K), K(0) = 0.2
        let rhs = parse("y*(1 - y)", &["x", "y"]).unwrap();
        let sol = OdeSolution::new("K", rhs, "x", "y", 0.0, 0.2);
        let exact = |t: f64| 1.0 / (1.0 + 4.0 * (-t).exp());
        for t in [0.5, 2.0, 1.0, -1.5, 0.0, 1.7] {
            let got = sol.value(t).unwrap();
            assert!((got - exact(t)).abs() < 1e-11, "t={t}: {got} vs {}", exact(t));
        }
    }

    #[test]
    fn derivative_refers_to_itself() {
        let rhs = parse("x + y", &["x", "y"]).unwrap();
        let sol = OdeSolution::new("K", rhs, "x", "y", 0.0, 1.0);
        let e = Expr::opaque(sol, var("t"));
        let d = e.differentiate("t");
        // K = 2e^t - t - 1, K' = 2e^t - 1
        let got = d.eval(&[("t", 0.8)]).unwrap();
        assert!((got - (2.0 * 0.8f64.exp() - 1.0)).abs() < 1e-10);
    }

    #[test]
    fn singularity_surfaces_as_eval_error() {
        let rhs = parse("y^2", &["x", "y"]).unwrap();
        let sol = OdeSolution::new("K", rhs, "x", "y", 0.0, 1.0);
        assert!(sol.value(0.9).is_ok());
        assert!(matches!(sol.value(1.5), Err(EvalError::Integration(_))));
        // remembered: the second query does not re-integrate, and queries
        // short of the pole still work
        assert!(sol.value(2.0).is_err());
        let exact = |t: f64| 1.0 / (1.0 - t);
        assert!((sol.value(0.95).unwrap() - exact(0.95)).abs() < 1e-8);
    }
}
