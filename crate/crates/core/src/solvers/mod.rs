//! Classification and closed-form solution of `y' = rhs(x, y)`.
//!
//! Every solver works in the canonical names `x` (independent) and `y`
//! (dependent); callers rename before and after.

mod abel;
mod elementary;
mod elliptic;
mod forms;
mod homogeneous;

pub use abel::{
    abel2_cubic_to_canonical, abel2_quadratic_to_canonical, cubic_invariant_range, cubic_invariant_root,
    CanonicalChain, CanonicalKind, RoundTrip, StepMap, Substitution,
};
pub use elementary::{
    invert_simple, solve_bernoulli, solve_bernoulli_on, solve_linear, solve_riccati_with_particular,
    solve_separable,
};
pub use elliptic::{elliptic_recognize, solve_elliptic, EllipticPayload, JacobiForm};
pub use forms::{classify_first_order, classify_near, matching_forms, FirstOrderForm, FormTag, ProbeRegion};
pub use homogeneous::{
    homogeneous_case, homogeneous_reduce, HomogeneousCase, HomogeneousReduction, RatioCoefficients,
};

use serde::{Deserialize, Serialize};

use crate::error::SolveError;
use crate::expr::{num, var, Expr};

/// Initial point of a first-order problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Anchor {
    pub x0: f64,
    pub y0: f64,
}

impl Anchor {
    pub fn new(x0: f64, y0: f64) -> Self {
        Anchor { x0, y0 }
    }
}

/// Twenty abscissae around `x0`, ten on each side.
pub(crate) fn probe_abscissae(x0: f64) -> impl Iterator<Item = f64> {
    let h = 0.1 * x0.abs().max(1.0);
    (1..=10).flat_map(move |k| {
        let d = h * k as f64 / 10.0;
        [x0 - d, x0 + d]
    })
}

/// Largest relative ODE residual `|y' − rhs(x, y)| / (1 + |y'|)` of a
/// candidate solution over the probes, also requiring `y(x0) = y0`.
pub fn check_residual(rhs: &Expr, sol: &Expr, ic: Anchor, tol: f64) -> Result<f64, SolveError> {
    let start = sol.eval(&[("x", ic.x0)])?;
    if (start - ic.y0).abs() > 1e-10 * (1.0 + ic.y0.abs()) {
        return Err(SolveError::ResidualCheck((start - ic.y0).abs()));
    }
    let d = sol.differentiate("x").simplify();
    let mut worst: f64 = 0.0;
    let mut used = 0;
    for x in probe_abscissae(ic.x0) {
        let Ok(y) = sol.eval(&[("x", x)]) else { continue };
        let (Ok(dy), Ok(f)) = (d.eval(&[("x", x)]), rhs.eval(&[("x", x), ("y", y)])) else { continue };
        if !(dy.is_finite() && f.is_finite()) {
            continue;
        }
        worst = worst.max((dy - f).abs() / (1.0 + dy.abs()));
        used += 1;
    }
    if used < 10 {
        return Err(SolveError::BlowUp("closed form undefined near the anchor".into()));
    }
    if worst > tol {
        return Err(SolveError::ResidualCheck(worst));
    }
    Ok(worst)
}

/// A verified explicit solution and the route that produced it.
#[derive(Debug, Clone)]
pub struct ClosedForm {
    pub expr: Expr,
    pub form: FormTag,
}

/// Try the explicit routes in tie-break order; the first whose output
/// passes the residual check wins. A particular solution, when supplied,
/// unlocks the Riccati route.
pub fn solve_closed_form(rhs: &Expr, ic: Anchor, particular: Option<&Expr>) -> Option<ClosedForm> {
    let region = ProbeRegion::around(ic.x0, ic.y0);
    for form in matching_forms(rhs, region) {
        let attempt = match &form {
            FirstOrderForm::Separable { x, y } => {
                solve_separable(x, y, ic).ok().and_then(|s| s.explicit())
            }
            FirstOrderForm::Linear { p, q } => solve_linear(p, q, ic).ok(),
            FirstOrderForm::Bernoulli { n, p, q } => solve_bernoulli(p, q, *n, ic).ok(),
            FirstOrderForm::Riccati { f, g, h } => {
                particular.and_then(|yp| solve_riccati_with_particular(f, g, h, yp, ic).ok())
            }
            FirstOrderForm::Homogeneous { ratio } => homogeneous_route(ratio, ic),
            FirstOrderForm::EllipticIntegral(p) => solve_elliptic(p, ic).ok(),
            _ => None,
        };
        if let Some(expr) = attempt {
            if check_residual(rhs, &expr, ic, 1e-9).is_ok() {
                return Some(ClosedForm { expr, form: form.tag() });
            }
        }
    }
    None
}

/// `y = x w`, `x w' = ratio(w) − w`.
fn homogeneous_route(ratio: &Expr, ic: Anchor) -> Option<Expr> {
    if ic.x0 == 0.0 {
        return None;
    }
    let w0 = ic.y0 / ic.x0;
    let y_part = (ratio.substitute("w", &var("y")) - var("y")).simplify();
    if y_part.eval(&[("y", w0)]).ok()? == 0.0 {
        return Some((var("x") * w0).simplify());
    }
    let s = solve_separable(&(num(1.0) / var("x")), &y_part, Anchor::new(ic.x0, w0)).ok()?;
    Some((var("x") * s.explicit()?).simplify())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn px(s: &str) -> Expr {
        parse(s, &["x", "y"]).unwrap()
    }

    #[test]
    fn routes_in_order() {
        let cases = [
            ("2*x*y", Anchor::new(0.0, 1.0), FormTag::Separable),
            ("x*y + 1", Anchor::new(0.0, 1.0), FormTag::Linear),
            // separable too, but ∫dy/(y + y³) does not invert in elementary steps
            ("y + y^3", Anchor::new(0.0, 1.0), FormTag::Bernoulli(3)),
            ("(y/x)^2 + 2*(y/x)", Anchor::new(1.0, 0.5), FormTag::Bernoulli(2)),
        ];
        for (rhs, ic, tag) in cases {
            let cf = solve_closed_form(&px(rhs), ic, None).unwrap_or_else(|| panic!("{rhs}"));
            assert_eq!(cf.form, tag, "{rhs}");
        }
    }

    #[test]
    fn riccati_needs_particular() {
        let rhs = px("-2/x^2 + y^2 + 0*x*y");
        let ic = Anchor::new(1.0, 0.5);
        assert!(solve_closed_form(&rhs, ic, None).is_none());
        let cf = solve_closed_form(&rhs, ic, Some(&px("1/x"))).unwrap();
        assert_eq!(cf.form, FormTag::Riccati);
    }

    #[test]
    fn residual_check_rejects_wrong_candidates() {
        let rhs = px("y");
        assert!(check_residual(&rhs, &px("exp(x)"), Anchor::new(0.0, 1.0), 1e-9).is_ok());
        assert!(matches!(
            check_residual(&rhs, &px("1 + x"), Anchor::new(0.0, 1.0), 1e-9),
            Err(SolveError::ResidualCheck(_))
        ));
    }
}
