use serde::{Deserialize, Serialize};

use crate::error::{EvalError, SolveError};
use crate::expr::{num, var, Expr};

use super::forms::FirstOrderForm;

/// `K' = f((a y + b K + c)/(α y + β K + γ))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioCoefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl RatioCoefficients {
    pub fn delta(&self) -> f64 {
        self.a * self.beta - self.b * self.alpha
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HomogeneousCase {
    /// `Δ ≠ 0`: shift both variables to the intersection point.
    Shifted,
    /// `Δ = 0, b ≠ 0`: `v = a y + b K + c`.
    Numerator,
    /// `Δ = 0, β ≠ 0`: `v = α y + β K + γ`.
    Denominator,
}

/// The separable equation `y' = rhs(x, y)` produced by one of the three
/// cases, with maps between the original `(y, K)` and the new `(x, y)`.
#[derive(Debug, Clone)]
pub struct HomogeneousReduction {
    pub case: HomogeneousCase,
    pub coefficients: RatioCoefficients,
    pub form: FirstOrderForm,
    pub rhs: Expr,
    /// `(y_s, K_s)` for the shifted case, zero otherwise.
    pub shift: (f64, f64),
}

const DELTA_TOL: f64 = 1e-12;

pub fn homogeneous_case(r: &RatioCoefficients) -> Option<HomogeneousCase> {
    if r.delta().abs() > DELTA_TOL {
        Some(HomogeneousCase::Shifted)
    } else if r.b != 0.0 {
        Some(HomogeneousCase::Numerator)
    } else if r.beta != 0.0 {
        Some(HomogeneousCase::Denominator)
    } else {
        None
    }
}

/// Reduce `K' = f(ratio)` (`f` an expression in `r`) in the requested case.
pub fn homogeneous_reduce(
    f: &Expr,
    coeffs: RatioCoefficients,
    case: HomogeneousCase,
) -> Result<HomogeneousReduction, SolveError> {
    let RatioCoefficients { a, b, c, alpha, beta, gamma } = coeffs;
    let delta = coeffs.delta();
    let mismatch = |why: &str| Err(SolveError::CaseMismatch(format!("{case:?}: {why}")));
    let fr = |arg: Expr| f.substitute("r", &arg);
    let (x, y) = (var("x"), var("y"));
    let (rhs, form, shift) = match case {
        HomogeneousCase::Shifted => {
            if delta.abs() <= DELTA_TOL {
                return mismatch("Δ = 0");
            }
            let ys = (b * gamma - c * beta) / delta;
            let ks = (c * alpha - a * gamma) / delta;
            // u w' = f̃(w) − w, f̃(w) = f((a + b w)/(α + β w))
            let ft = fr((num(a) + y.clone() * b) / (num(alpha) + y.clone() * beta));
            let yp = (ft - y.clone()).simplify();
            let xp = (num(1.0) / x).simplify();
            ((xp.clone() * yp.clone()).simplify(), FirstOrderForm::Separable { x: xp, y: yp }, (ys, ks))
        }
        HomogeneousCase::Numerator => {
            if delta.abs() > DELTA_TOL || b == 0.0 {
                return mismatch("needs Δ = 0 and b ≠ 0");
            }
            let yp = (num(a) + fr(y.clone() * b / (y.clone() * beta + (b * gamma - c * beta))) * b).simplify();
            (yp.clone(), FirstOrderForm::Separable { x: num(1.0), y: yp }, (0.0, 0.0))
        }
        HomogeneousCase::Denominator => {
            if delta.abs() > DELTA_TOL || beta == 0.0 {
                return mismatch("needs Δ = 0 and β ≠ 0");
            }
            let yp = (num(alpha) + fr((y.clone() * b + (c * beta - b * gamma)) / (y.clone() * beta)) * beta)
                .simplify();
            (yp.clone(), FirstOrderForm::Separable { x: num(1.0), y: yp }, (0.0, 0.0))
        }
    };
    Ok(HomogeneousReduction { case, coefficients: coeffs, form, rhs, shift })
}

impl HomogeneousReduction {
    /// `(y, K)` to the separable equation's `(x, y)`.
    pub fn forward(&self, y: f64, k: f64) -> Result<(f64, f64), EvalError> {
        let r = &self.coefficients;
        Ok(match self.case {
            HomogeneousCase::Shifted => {
                let u = y - self.shift.0;
                if u == 0.0 {
                    return Err(EvalError::domain("division by zero", "w = (K - K_s)/(y - y_s)"));
                }
                (u, (k - self.shift.1) / u)
            }
            HomogeneousCase::Numerator => (y, r.a * y + r.b * k + r.c),
            HomogeneousCase::Denominator => (y, r.alpha * y + r.beta * k + r.gamma),
        })
    }

    pub fn inverse(&self, t: f64, v: f64) -> (f64, f64) {
        let r = &self.coefficients;
        match self.case {
            HomogeneousCase::Shifted => (t + self.shift.0, t * v + self.shift.1),
            HomogeneousCase::Numerator => (t, (v - r.a * t - r.c) / r.b),
            HomogeneousCase::Denominator => (t, (v - r.alpha * t - r.gamma) / r.beta),
        }
    }

    /// `f` applied to the original ratio, in `(x, y)` = `(y, K)`.
    pub fn original_rhs(f: &Expr, r: &RatioCoefficients) -> Expr {
        let (x, y) = (var("x"), var("y"));
        let ratio = (x.clone() * r.a + y.clone() * r.b + r.c) / (x * r.alpha + y * r.beta + r.gamma);
        f.substitute("r", &ratio).simplify()
    }
}
