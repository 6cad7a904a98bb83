use crate::error::SolveError;
use crate::expr::{antiderive, num, var, Expr, Func};
use crate::reduction::ImplicitSolution;

use super::{check_residual, probe_abscissae, Anchor};

fn is_zero(e: &Expr) -> bool {
    e.simplify().is_num(0.0)
}

/// `∫ dy/Y = ∫ X dx + B`, anchored at the initial point.
pub fn solve_separable(x_part: &Expr, y_part: &Expr, ic: Anchor) -> Result<ImplicitSolution, SolveError> {
    let y0_val = y_part.eval(&[("y", ic.y0)])?;
    if y0_val == 0.0 || !y0_val.is_finite() {
        return Err(SolveError::VanishingFactor(format!("Y({}) = {y0_val}", ic.y0)));
    }
    let left = antiderive(&(num(1.0) / y_part.clone()).simplify(), "y", ic.y0);
    let right = antiderive(x_part, "x", ic.x0);
    Ok(ImplicitSolution::from_antiderivatives(&left, &right, ic))
}

/// Integrating-factor solution of `y' = p y + q`.
pub fn solve_linear(p: &Expr, q: &Expr, ic: Anchor) -> Result<Expr, SolveError> {
    let sol = linear_unchecked(p, q, ic);
    let rhs = (p.clone() * var("y") + q.clone()).simplify();
    check_residual(&rhs, &sol, ic, 1e-9)?;
    Ok(sol)
}

fn linear_unchecked(p: &Expr, q: &Expr, ic: Anchor) -> Expr {
    let big_p = if is_zero(p) { num(0.0) } else { antiderive(&p.simplify(), "x", ic.x0).as_expr() };
    let forced = if is_zero(q) {
        num(0.0)
    } else {
        let integrand = (q.clone() * (-big_p.clone()).exp()).simplify();
        antiderive(&integrand, "x", ic.x0).as_expr()
    };
    (big_p.exp() * (num(ic.y0) + forced)).simplify()
}

fn bernoulli_parts(p: &Expr, q: &Expr, n: i32, ic: Anchor) -> Result<(Expr, Expr), SolveError> {
    if n == 0 || n == 1 {
        return Err(SolveError::Precondition(format!("Bernoulli exponent n = {n}")));
    }
    if ic.y0 == 0.0 {
        return Err(SolveError::Precondition("Bernoulli route needs y0 ≠ 0".into()));
    }
    let e = 1 - n;
    let w0 = ic.y0.powi(e);
    let s = e as f64;
    let w = linear_unchecked(&(p.clone() * s), &(q.clone() * s), Anchor { x0: ic.x0, y0: w0 });
    let r = 1.0 / s;
    let y = if ic.y0 > 0.0 {
        w.clone().powf(r)
    } else if w0 > 0.0 {
        -w.clone().powf(r)
    } else {
        -(-w.clone()).powf(r)
    };
    Ok((y.simplify(), w))
}

/// `y' = p y + q y^n` through `w = y^{1−n}`, on the branch holding `y0`.
pub fn solve_bernoulli(p: &Expr, q: &Expr, n: i32, ic: Anchor) -> Result<Expr, SolveError> {
    if is_zero(q) {
        return solve_linear(p, &num(0.0), ic);
    }
    let (y, _) = bernoulli_parts(p, q, n, ic)?;
    let rhs = (p.clone() * var("y") + q.clone() * var("y").powf(n as f64)).simplify();
    check_residual(&rhs, &y, ic, 1e-9)?;
    Ok(y)
}

/// As [`solve_bernoulli`], failing with the location where `w = y^{1−n}`
/// reaches zero (y blows up) before `end`.
pub fn solve_bernoulli_on(p: &Expr, q: &Expr, n: i32, ic: Anchor, end: f64) -> Result<Expr, SolveError> {
    let y = solve_bernoulli(p, q, n, ic)?;
    if is_zero(q) {
        return Ok(y);
    }
    let (_, w) = bernoulli_parts(p, q, n, ic)?;
    let w0 = w.eval(&[("x", ic.x0)])?;
    let samples = 400;
    let mut prev = ic.x0;
    for i in 1..=samples {
        let x = ic.x0 + (end - ic.x0) * i as f64 / samples as f64;
        let wv = match w.eval(&[("x", x)]) {
            Ok(v) => v,
            Err(_) => return Err(SolveError::BlowUp(format!("w undefined near x = {x}"))),
        };
        if wv == 0.0 || wv.signum() != w0.signum() {
            let at = crate::special::find_root(|t| w.eval(&[("x", t)]), prev, x, 1e-14)?;
            return Err(SolveError::BlowUp(format!("w = y^(1-n) vanishes at x = {at}")));
        }
        prev = x;
    }
    Ok(y)
}

/// `y = y_p + Φ/(C − ∫ f Φ)`, `Φ = exp ∫(2 f y_p + g)`, from a known
/// particular solution `y_p`.
pub fn solve_riccati_with_particular(
    f: &Expr,
    g: &Expr,
    h: &Expr,
    y_part: &Expr,
    ic: Anchor,
) -> Result<Expr, SolveError> {
    let rhs = (f.clone() * var("y").powf(2.0) + g.clone() * var("y") + h.clone()).simplify();
    let yp_rhs = rhs.substitute("y", y_part);
    let dyp = y_part.differentiate("x").simplify();
    let mut worst: f64 = 0.0;
    let mut used = 0;
    for x in probe_abscissae(ic.x0) {
        let (Ok(a), Ok(b)) = (dyp.eval(&[("x", x)]), yp_rhs.eval(&[("x", x)])) else { continue };
        worst = worst.max((a - b).abs() / (1.0 + a.abs()));
        used += 1;
    }
    if used < 10 || worst > 1e-8 {
        return Err(SolveError::BadParticular(if used < 10 { f64::NAN } else { worst }));
    }
    let yp0 = y_part.eval(&[("x", ic.x0)])?;
    let gap = ic.y0 - yp0;
    if gap.abs() <= 1e-14 * (1.0 + ic.y0.abs()) {
        return Ok(y_part.clone());
    }
    let phi = antiderive(&(f.clone() * y_part.clone() * 2.0 + g.clone()).simplify(), "x", ic.x0)
        .as_expr()
        .exp()
        .simplify();
    let acc = antiderive(&(f.clone() * phi.clone()).simplify(), "x", ic.x0).as_expr();
    let sol = (y_part.clone() + phi / (num(1.0 / gap) - acc)).simplify();
    check_residual(&rhs, &sol, ic, 1e-9)?;
    Ok(sol)
}

/// Solve `f(v) = target` for `v` when `f` is built from invertible
/// elementary steps in `v` (one occurrence of `v`).
pub fn invert_simple(f: &Expr, v: &str, target: Expr) -> Option<Expr> {
    let has = |e: &Expr| e.depends_on(v);
    match f {
        Expr::Var(n) if &**n == v => Some(target),
        Expr::Neg(a) => invert_simple(a, v, -target),
        Expr::Add(a, b) if !has(b) => invert_simple(a, v, target - (**b).clone()),
        Expr::Add(a, b) if !has(a) => invert_simple(b, v, target - (**a).clone()),
        Expr::Sub(a, b) if !has(b) => invert_simple(a, v, target + (**b).clone()),
        Expr::Sub(a, b) if !has(a) => invert_simple(b, v, (**a).clone() - target),
        Expr::Mul(a, b) if !has(b) => invert_simple(a, v, target / (**b).clone()),
        Expr::Mul(a, b) if !has(a) => invert_simple(b, v, target / (**a).clone()),
        Expr::Div(a, b) if !has(b) => invert_simple(a, v, target * (**b).clone()),
        Expr::Div(a, b) if !has(a) => invert_simple(b, v, (**a).clone() / target),
        Expr::Pow(a, b) if !has(b) => invert_simple(a, v, target.pow(num(1.0) / (**b).clone())),
        Expr::Func(func, a) => {
            let inner = match func {
                Func::Exp => target.ln(),
                Func::Ln => target.exp(),
                Func::Sqrt => target.powf(2.0),
                Func::Cbrt => target.powf(3.0),
                Func::Atan => Expr::func(Func::Tan, target),
                _ => return None,
            };
            invert_simple(a, v, inner)
        }
        _ => None,
    }
}
