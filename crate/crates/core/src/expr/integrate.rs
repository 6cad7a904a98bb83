//! Antiderivatives: a finite symbolic rule table with a numeric fallback.
//!
//! The rule table covers linear combinations of `c·t^n·e^(k t)` (with
//! `n = -1` giving a logarithm and integer `n >= 0` handled by repeated
//! parts when `k != 0`), `sin`/`cos` of linear arguments, and integrands
//! of the form `c·D'(t)/D(t)`. Anything else is integrated numerically on
//! demand.

use std::sync::{Arc, Mutex};

use super::simplify::{add, div, func, mul, neg, pow, sub};
use super::{var, Expr, Func, JacobiKind, OpaqueFn};
use crate::error::EvalError;
use crate::special::quad_adaptive;

/// Absolute tolerance of numeric-mode antiderivatives.
pub const QUAD_TOL: f64 = 1e-12;
const MAX_TERMS: usize = 64;
const CACHE_CAP: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Piece {
    /// `c · t^n · e^(k t)`
    Mono { c: f64, n: f64, k: f64 },
    /// `c · sin(k t + d)` or `c · cos(k t + d)`
    Trig { c: f64, sin: bool, k: f64, d: f64 },
}

fn scale(pieces: &mut [Piece], s: f64) {
    for p in pieces {
        match p {
            Piece::Mono { c, .. } | Piece::Trig { c, .. } => *c *= s,
        }
    }
}

fn product(a: &[Piece], b: &[Piece]) -> Option<Vec<Piece>> {
    if a.len() * b.len() > MAX_TERMS {
        return None;
    }
    let mut out = Vec::with_capacity(a.len() * b.len());
    for p in a {
        for q in b {
            out.push(match (*p, *q) {
                (Piece::Mono { c: c1, n: n1, k: k1 }, Piece::Mono { c: c2, n: n2, k: k2 }) => {
                    Piece::Mono { c: c1 * c2, n: n1 + n2, k: k1 + k2 }
                }
                (Piece::Trig { c, sin, k, d }, Piece::Mono { c: s, n, k: r })
                | (Piece::Mono { c: s, n, k: r }, Piece::Trig { c, sin, k, d })
                    if n == 0.0 && r == 0.0 =>
                {
                    Piece::Trig { c: c * s, sin, k, d }
                }
                _ => return None,
            });
        }
    }
    Some(out)
}

/// `arg = alpha·ln t + k·t + d`
fn exp_argument(e: &Expr, v: &str) -> Option<(f64, f64, f64)> {
    match e {
        Expr::Num(c) => Some((0.0, 0.0, *c)),
        Expr::Var(n) if &**n == v => Some((0.0, 1.0, 0.0)),
        Expr::Neg(a) => exp_argument(a, v).map(|(p, q, r)| (-p, -q, -r)),
        Expr::Add(a, b) | Expr::Sub(a, b) => {
            let (p1, q1, r1) = exp_argument(a, v)?;
            let (p2, q2, r2) = exp_argument(b, v)?;
            let s = if matches!(e, Expr::Add(..)) { 1.0 } else { -1.0 };
            Some((p1 + s * p2, q1 + s * q2, r1 + s * r2))
        }
        Expr::Mul(a, b) => {
            if let Some(c) = a.is_constant().then(|| a.eval(&[]).ok()).flatten() {
                exp_argument(b, v).map(|(p, q, r)| (c * p, c * q, c * r))
            } else if let Some(c) = b.is_constant().then(|| b.eval(&[]).ok()).flatten() {
                exp_argument(a, v).map(|(p, q, r)| (c * p, c * q, c * r))
            } else {
                None
            }
        }
        Expr::Div(a, b) => {
            let c = b.is_constant().then(|| b.eval(&[]).ok()).flatten()?;
            exp_argument(a, v).map(|(p, q, r)| (p / c, q / c, r / c))
        }
        Expr::Func(Func::Ln, a) => {
            let inner = pieces(a, v)?;
            match inner.as_slice() {
                [Piece::Mono { c, n, k }] if *k == 0.0 && *c > 0.0 => Some((*n, 0.0, c.ln())),
                _ => None,
            }
        }
        _ if e.is_constant() => e.eval(&[]).ok().map(|c| (0.0, 0.0, c)),
        _ => None,
    }
}

fn pieces(e: &Expr, v: &str) -> Option<Vec<Piece>> {
    if !e.depends_on(v) {
        let c = e.eval(&[]).ok()?;
        return Some(vec![Piece::Mono { c, n: 0.0, k: 0.0 }]);
    }
    match e {
        Expr::Var(_) => Some(vec![Piece::Mono { c: 1.0, n: 1.0, k: 0.0 }]),
        Expr::Neg(a) => {
            let mut p = pieces(a, v)?;
            scale(&mut p, -1.0);
            Some(p)
        }
        Expr::Add(a, b) | Expr::Sub(a, b) => {
            let mut p = pieces(a, v)?;
            let mut q = pieces(b, v)?;
            if matches!(e, Expr::Sub(..)) {
                scale(&mut q, -1.0);
            }
            p.append(&mut q);
            (p.len() <= MAX_TERMS).then_some(p)
        }
        Expr::Mul(a, b) => product(&pieces(a, v)?, &pieces(b, v)?),
        Expr::Div(a, b) => {
            let den = pieces(b, v)?;
            match den.as_slice() {
                [Piece::Mono { c, n, k }] if *c != 0.0 => {
                    product(&pieces(a, v)?, &[Piece::Mono { c: 1.0 / c, n: -n, k: -k }])
                }
                _ => None,
            }
        }
        Expr::Pow(a, b) => {
            if let Some(p) = b.is_constant().then(|| b.eval(&[]).ok()).flatten() {
                let base = pieces(a, v)?;
                if let [Piece::Mono { c, n, k }] = base.as_slice() {
                    if *c > 0.0 || (p.fract() == 0.0 && *c != 0.0) {
                        return Some(vec![Piece::Mono { c: c.powf(p), n: n * p, k: k * p }]);
                    }
                }
                if p.fract() == 0.0 && (1.0..=6.0).contains(&p) {
                    let mut acc = base.clone();
                    for _ in 1..(p as usize) {
                        acc = product(&acc, &base)?;
                    }
                    return Some(acc);
                }
                return None;
            }
            // c^(linear) = exp(ln c · linear)
            let c = a.is_constant().then(|| a.eval(&[]).ok()).flatten()?;
            if c <= 0.0 {
                return None;
            }
            let (alpha, k, d) = exp_argument(b, v)?;
            let l = c.ln();
            Some(vec![Piece::Mono { c: (l * d).exp(), n: l * alpha, k: l * k }])
        }
        Expr::Func(Func::Exp, a) => {
            let (alpha, k, d) = exp_argument(a, v)?;
            Some(vec![Piece::Mono { c: d.exp(), n: alpha, k }])
        }
        Expr::Func(f @ (Func::Sin | Func::Cos), a) => {
            let (alpha, k, d) = exp_argument(a, v)?;
            (alpha == 0.0).then_some(vec![Piece::Trig { c: 1.0, sin: *f == Func::Sin, k, d }])
        }
        Expr::Func(Func::Sqrt, a) => match pieces(a, v)?.as_slice() {
            [Piece::Mono { c, n, k }] if *c > 0.0 => {
                Some(vec![Piece::Mono { c: c.sqrt(), n: n / 2.0, k: k / 2.0 }])
            }
            _ => None,
        },
        _ => None,
    }
}

fn monomial(t: &Expr, c: f64, n: f64, k: f64) -> Expr {
    let mut e = Expr::Num(c);
    if n != 0.0 {
        e = mul(e, pow(t.clone(), Expr::Num(n)));
    }
    if k != 0.0 {
        e = mul(e, func(Func::Exp, mul(Expr::Num(k), t.clone())));
    }
    e
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

fn integrate_piece(p: Piece, t: &Expr, log_sign: f64) -> Option<Expr> {
    Some(match p {
        Piece::Mono { c, n, k } if k == 0.0 => {
            if n == -1.0 {
                let arg = if log_sign < 0.0 { neg(t.clone()) } else { t.clone() };
                mul(Expr::Num(c), func(Func::Ln, arg))
            } else {
                monomial(t, c / (n + 1.0), n + 1.0, 0.0)
            }
        }
        Piece::Mono { c, n, k } => {
            if n == 0.0 {
                return Some(monomial(t, c / k, 0.0, k));
            }
            if n.fract() != 0.0 || !(1.0..=8.0).contains(&n) {
                return None;
            }
            // ∫ t^n e^(kt) = e^(kt) Σ_j (-1)^j n!/(n-j)! t^(n-j) / k^(j+1)
            let n = n as u32;
            let mut poly = Expr::Num(0.0);
            for j in 0..=n {
                let coef = (-1f64).powi(j as i32) * factorial(n) / factorial(n - j)
                    / k.powi(j as i32 + 1);
                poly = add(poly, monomial(t, c * coef, f64::from(n - j), 0.0));
            }
            mul(poly, func(Func::Exp, mul(Expr::Num(k), t.clone())))
        }
        Piece::Trig { c, sin, k, d } => {
            let arg = add(mul(Expr::Num(k), t.clone()), Expr::Num(d));
            if k == 0.0 {
                let v = if sin { d.sin() } else { d.cos() };
                return Some(mul(Expr::Num(c * v), t.clone()));
            }
            if sin {
                mul(Expr::Num(-c / k), func(Func::Cos, arg))
            } else {
                mul(Expr::Num(c / k), func(Func::Sin, arg))
            }
        }
    })
}

fn probe_points(hint: f64) -> [f64; 4] {
    let s = hint.abs().max(1.0);
    [hint + 0.137 * s, hint + 0.291 * s, hint - 0.113 * s, hint + 0.419 * s]
}

/// `N/D` with `N = c·D'`: integrates to `c·ln|D|`.
fn log_derivative(e: &Expr, v: &str, hint: f64) -> Option<Expr> {
    let (scale_c, num, den) = match e {
        Expr::Div(n, d) => (1.0, (**n).clone(), (**d).clone()),
        Expr::Mul(c, rest) if c.is_constant() => match &**rest {
            Expr::Div(n, d) => (c.eval(&[]).ok()?, (**n).clone(), (**d).clone()),
            _ => return None,
        },
        _ => return None,
    };
    let dden = den.differentiate(v).simplify();
    let mut ratio = None;
    let mut seen = 0;
    for t in probe_points(hint) {
        let (Ok(nv), Ok(dv)) = (num.eval_at(v, t), dden.eval_at(v, t)) else {
            continue;
        };
        if dv == 0.0 {
            return None;
        }
        let r = nv / dv;
        match ratio {
            None => ratio = Some(r),
            Some(r0) if (r - r0).abs() <= 1e-12 * r0.abs().max(1.0) => {}
            Some(_) => return None,
        }
        seen += 1;
    }
    let r = ratio.filter(|_| seen >= 3)?;
    let sign = den.eval_at(v, hint).ok()?.signum();
    let arg = if sign < 0.0 { neg(den) } else { den };
    Some(mul(Expr::Num(scale_c * r), func(Func::Ln, arg)))
}

/// Symbolic antiderivative of `e` in `v` by the rule table, without an
/// additive constant. `hint` is a point of the intended domain; it picks
/// the branch of logarithms (`ln t` versus `ln(-t)`).
pub fn integrate_closed_form(e: &Expr, v: &str, hint: f64) -> Option<Expr> {
    let e = e.simplify();
    let t = var(v);
    match &e {
        Expr::Add(a, b) => {
            return Some(add(
                integrate_closed_form(a, v, hint)?,
                integrate_closed_form(b, v, hint)?,
            ))
        }
        Expr::Sub(a, b) => {
            return Some(sub(
                integrate_closed_form(a, v, hint)?,
                integrate_closed_form(b, v, hint)?,
            ))
        }
        Expr::Neg(a) => return integrate_closed_form(a, v, hint).map(neg),
        Expr::Mul(c, rest) if !c.depends_on(v) => {
            let c = c.eval(&[]).ok()?;
            return integrate_closed_form(rest, v, hint).map(|r| mul(Expr::Num(c), r));
        }
        Expr::Div(rest, c) if !c.depends_on(v) => {
            let c = c.eval(&[]).ok().filter(|c| *c != 0.0)?;
            return integrate_closed_form(rest, v, hint).map(|r| mul(Expr::Num(1.0 / c), r));
        }
        // ∫ sn(a t + b, k) = ln(dn − k cn) / (k a)
        Expr::Jacobi(JacobiKind::Sn, k, arg) if *k > 0.0 => {
            let a = arg.differentiate(v).simplify().as_num().filter(|a| *a != 0.0)?;
            let dn = Expr::jacobi(JacobiKind::Dn, *k, (**arg).clone());
            let cn = Expr::jacobi(JacobiKind::Cn, *k, (**arg).clone());
            return Some(div(func(Func::Ln, sub(dn, mul(Expr::Num(*k), cn))), Expr::Num(k * a)));
        }
        _ => {}
    }
    if let Some(ps) = pieces(&e, v) {
        let mut acc = Expr::Num(0.0);
        for p in ps {
            acc = add(acc, integrate_piece(p, &t, hint.signum())?);
        }
        return Some(acc.simplify());
    }
    log_derivative(&e, v, hint)
}

/// A definite integral `t ↦ ∫_{base}^{t} integrand(s) ds`.
///
/// Holds a closed form when the rule table succeeds (and agrees with
/// quadrature near the base point); otherwise values come from adaptive
/// quadrature, chained from the nearest previously computed abscissa.
#[derive(Debug)]
pub struct Antiderivative {
    integrand: Expr,
    var: String,
    base_point: f64,
    closed_form: Option<Expr>,
    closed_at_base: f64,
    cache: Mutex<Vec<(f64, f64)>>,
}

impl Antiderivative {
    pub fn integrand(&self) -> &Expr {
        &self.integrand
    }

    pub fn var(&self) -> &str {
        &self.var
    }

    pub fn base_point(&self) -> f64 {
        self.base_point
    }

    /// Closed form without additive constant, when the rule table applied.
    pub fn closed_form(&self) -> Option<&Expr> {
        self.closed_form.as_ref()
    }

    pub fn is_closed(&self) -> bool {
        self.closed_form.is_some()
    }

    /// `∫_{base}^{t} integrand`. Numeric-mode failures (a singularity on the
    /// path) surface here.
    pub fn value(&self, t: f64) -> Result<f64, EvalError> {
        if let Some(cf) = &self.closed_form {
            return Ok(cf.eval_at(&self.var, t)? - self.closed_at_base);
        }
        if t == self.base_point {
            return Ok(0.0);
        }
        let start = {
            let cache = self.cache.lock().expect("antiderivative cache poisoned");
            nearest_on_path(&cache, self.base_point, t)
        };
        let (t0, v0) = start.unwrap_or((self.base_point, 0.0));
        let f = |s: f64| self.integrand.eval_at(&self.var, s);
        let inc = quad_adaptive(f, t0, t, QUAD_TOL).map_err(|e| EvalError::Quadrature(e.to_string()))?;
        let v = v0 + inc;
        let mut cache = self.cache.lock().expect("antiderivative cache poisoned");
        if cache.len() >= CACHE_CAP {
            cache.clear();
        }
        let at = cache.partition_point(|(s, _)| *s < t);
        if cache.get(at).map(|(s, _)| *s) != Some(t) {
            cache.insert(at, (t, v));
        }
        Ok(v)
    }

    /// The antiderivative applied to `arg`, as an expression: the closed
    /// form (shifted to vanish at the base) when available, otherwise an
    /// opaque node.
    pub fn apply(self: &Arc<Self>, arg: Expr) -> Expr {
        match &self.closed_form {
            Some(cf) => {
                let shifted = sub(cf.substitute(&self.var, &arg), Expr::Num(self.closed_at_base));
                shifted.simplify()
            }
            None => Expr::opaque(self.clone(), arg),
        }
    }

    /// Same as [`apply`](Self::apply) at the integration variable itself.
    pub fn as_expr(self: &Arc<Self>) -> Expr {
        self.apply(var(&self.var))
    }
}

/// Cached node closest to `t` lying between `base` and `t`.
fn nearest_on_path(cache: &[(f64, f64)], base: f64, t: f64) -> Option<(f64, f64)> {
    if cache.is_empty() {
        return None;
    }
    let (lo, hi) = if base <= t { (base, t) } else { (t, base) };
    let at = cache.partition_point(|(s, _)| *s < t);
    let candidates = [at.checked_sub(1), Some(at)];
    candidates
        .into_iter()
        .flatten()
        .filter_map(|i| cache.get(i).copied())
        .filter(|(s, _)| *s >= lo && *s <= hi)
        .min_by(|a, b| (a.0 - t).abs().total_cmp(&(b.0 - t).abs()))
}

impl OpaqueFn for Antiderivative {
    fn label(&self) -> String {
        format!("int[{} d{} from {}]", self.integrand, self.var, self.base_point)
    }

    fn eval(&self, t: f64) -> Result<f64, EvalError> {
        self.value(t)
    }

    fn derivative(&self, arg: &Expr, _this: &Expr) -> Expr {
        self.integrand.substitute(&self.var, arg)
    }
}

fn closed_form_agrees(cf: &Expr, integrand: &Expr, v: &str, base: f64) -> bool {
    let Ok(c0) = cf.eval_at(v, base) else {
        return false;
    };
    let mut checked = 0;
    for t in probe_points(base).into_iter().take(2) {
        let Ok(ct) = cf.eval_at(v, t) else { continue };
        let Ok(q) = quad_adaptive(|s| integrand.eval_at(v, s), base, t, QUAD_TOL) else {
            continue;
        };
        let closed = ct - c0;
        if (closed - q).abs() > 1e-10 * closed.abs().max(1.0) {
            return false;
        }
        checked += 1;
    }
    // nothing checkable near the base: accept the rule table's answer
    checked > 0 || cf.eval_at(v, base).is_ok()
}

/// Build `t ↦ ∫_{base}^{t} e(s) ds`. Never fails: integrands outside the
/// rule table are integrated numerically when evaluated.
pub fn antiderive(e: &Expr, v: &str, base_point: f64) -> Arc<Antiderivative> {
    let integrand = e.simplify();
    let closed_form = integrate_closed_form(&integrand, v, base_point)
        .filter(|cf| closed_form_agrees(cf, &integrand, v, base_point));
    let closed_at_base = closed_form
        .as_ref()
        .and_then(|cf| cf.eval_at(v, base_point).ok())
        .unwrap_or(0.0);
    Arc::new(Antiderivative {
        integrand,
        var: v.to_string(),
        base_point,
        closed_form,
        closed_at_base,
        cache: Mutex::new(Vec::new()),
    })
}
