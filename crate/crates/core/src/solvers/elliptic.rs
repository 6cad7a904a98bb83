use serde::{Deserialize, Serialize};

use crate::error::SolveError;
use crate::expr::{antiderive, num, var, Expr, Func, JacobiKind};
use crate::special::elliptic_f;

use super::forms::{poly_coefficients, ProbeRegion};
use super::{check_residual, Anchor};

/// `dep' = h1(indep) · r(dep)` where `r` involves `√P(dep)`, `deg P ∈ {3, 4}`.
#[derive(Debug, Clone)]
pub struct EllipticPayload {
    pub indep: String,
    pub dep: String,
    pub h1: Expr,
    pub r: Expr,
    /// Coefficients of `P`, constant term first.
    pub p: Vec<f64>,
    /// Present when `r = gain · √((1 − v²)(1 − k² v²))`, i.e. the equation
    /// inverts to `sn`.
    pub jacobi: Option<JacobiForm>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JacobiForm {
    pub modulus: f64,
    pub gain: f64,
}

impl EllipticPayload {
    pub fn degree(&self) -> usize {
        self.p.len() - 1
    }
}

fn sqrt_arguments(e: &Expr, out: &mut Vec<Expr>) {
    match e {
        Expr::Func(Func::Sqrt, a) => {
            out.push((**a).clone());
            sqrt_arguments(a, out);
        }
        Expr::Pow(a, b) if b.as_num() == Some(0.5) || b.as_num() == Some(-0.5) => {
            out.push((**a).clone());
            sqrt_arguments(a, out);
        }
        Expr::Neg(a) | Expr::Func(_, a) | Expr::Jacobi(_, _, a) | Expr::Opaque(_, a) => {
            sqrt_arguments(a, out)
        }
        Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Pow(a, b) => {
            sqrt_arguments(a, out);
            sqrt_arguments(b, out);
        }
        Expr::Num(_) | Expr::Var(_) => {}
    }
}

/// Recognition over explicit probe points (`(indep, dep)` pairs).
pub(crate) fn recognize_in(
    e: &Expr,
    indep: &str,
    dep: &str,
    pts: &[(f64, f64)],
) -> Option<EllipticPayload> {
    let mut args = Vec::new();
    sqrt_arguments(e, &mut args);
    let (poly, p) = args.into_iter().find_map(|a| {
        if !a.depends_on(dep) || a.free_vars().iter().any(|v| v != dep) {
            return None;
        }
        let cs = poly_coefficients(&a, dep, indep, 4, pts)?;
        let vals: Option<Vec<f64>> = cs.iter().map(|c| c.as_num()).collect();
        let mut vals = vals?;
        while vals.len() > 1 && vals.last() == Some(&0.0) {
            vals.pop();
        }
        matches!(vals.len() - 1, 3 | 4).then_some((a, vals))
    })?;

    // separability h1(indep) · r(dep), anchored at the probe of largest |e|
    let at = |t: f64, v: f64| e.eval(&[(indep, t), (dep, v)]);
    let (ts, vs, es) = pts
        .iter()
        .filter_map(|&(t, v)| at(t, v).ok().filter(|x| x.is_finite()).map(|x| (t, v, x)))
        .max_by(|a, b| a.2.abs().total_cmp(&b.2.abs()))?;
    if es == 0.0 {
        return None;
    }
    for &(t, v) in pts {
        let (Ok(a), Ok(b), Ok(c)) = (at(t, v), at(t, vs), at(ts, v)) else { continue };
        if (a * es - b * c).abs() > 1e-9 * (a * es).abs().max((b * c).abs()) {
            return None;
        }
    }
    let h1 = (e.substitute(dep, &num(vs)) / es).simplify();
    let r = e.substitute(indep, &num(ts)).simplify();

    let jacobi = jacobi_form(&r, &poly, &p, dep, pts);
    Some(EllipticPayload {
        indep: indep.to_string(),
        dep: dep.to_string(),
        h1,
        r,
        p,
        jacobi,
    })
}

fn jacobi_form(r: &Expr, poly: &Expr, p: &[f64], dep: &str, pts: &[(f64, f64)]) -> Option<JacobiForm> {
    if p.len() != 5 || p[0] <= 0.0 {
        return None;
    }
    let q: Vec<f64> = p.iter().map(|c| c / p[0]).collect();
    let k2 = q[4];
    let tol = 1e-10;
    if q[1].abs() > tol || q[3].abs() > tol || !(0.0..=1.0 + tol).contains(&k2) {
        return None;
    }
    if (q[2] + 1.0 + k2).abs() > tol * (1.0 + k2) {
        return None;
    }
    // r must be a constant multiple of √P
    let mut ratio = None;
    for &(_, v) in pts {
        let (Ok(rv), Ok(pv)) = (r.eval(&[(dep, v)]), poly.eval(&[(dep, v)])) else { continue };
        if pv <= 0.0 {
            continue;
        }
        let c = rv / pv.sqrt();
        match ratio {
            None => ratio = Some(c),
            Some(c0) if (c - c0).abs() <= 1e-10 * c0.abs() => {}
            Some(_) => return None,
        }
    }
    let gain = ratio? * p[0].sqrt();
    Some(JacobiForm { modulus: k2.clamp(0.0, 1.0).sqrt(), gain })
}

/// Detect `F(u, v) = h1(u) · R(v, √P(v))` with `deg P ∈ {3, 4}`.
pub fn elliptic_recognize(f2: &Expr) -> Option<EllipticPayload> {
    let region = ProbeRegion { x: (0.3, 1.3), y: (-0.8, 0.8) };
    let renamed = f2.substitute_all(&[("u", var("x")), ("v", var("y"))]);
    let pts = region.points(&renamed, 24);
    recognize_in(f2, "u", "v", &pts)
}

/// `y = sn(∫ gain·h1 + F(asin y0, k), k)` for a payload in Jacobi form.
/// Valid up to the first turning point, where `sn` reaches ±1.
pub fn solve_elliptic(payload: &EllipticPayload, ic: Anchor) -> Result<Expr, SolveError> {
    let j = payload
        .jacobi
        .ok_or_else(|| SolveError::Precondition(format!("no Jacobi inversion for deg P = {}", payload.degree())))?;
    if ic.y0.abs() > 1.0 {
        return Err(SolveError::Precondition(format!("|K0| = {} exceeds 1", ic.y0.abs())));
    }
    let h = (payload.h1.clone() * j.gain).substitute(&payload.indep, &var("x")).simplify();
    let big_h = antiderive(&h, "x", ic.x0);
    let shift = elliptic_f(ic.y0.asin(), j.modulus)?;
    let sol = Expr::jacobi(JacobiKind::Sn, j.modulus, big_h.as_expr() + shift).simplify();
    let rhs = (h * payload.r.substitute(&payload.dep, &var("y"))).simplify();
    check_residual(&rhs, &sol, ic, 1e-9)?;
    Ok(sol)
}
