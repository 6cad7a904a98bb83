//! Conservative simplification: identities, constant folding, and a few
//! value-preserving rewrites. No factoring, no trigonometric identities.
//!
//! The `add`/`mul`/... constructors apply one layer of rewrites assuming
//! their operands are already simplified; [`Expr::simplify`] rebuilds a tree
//! bottom-up through them until nothing changes.

use std::sync::Arc;

use super::eval::pow_real;
use super::{Expr, Func};

fn fold(v: f64) -> Option<Expr> {
    v.is_finite().then_some(Expr::Num(v))
}

fn num_exponent_pair(e: &Expr) -> (Expr, Option<f64>) {
    match e {
        Expr::Pow(b, p) => match p.as_num() {
            Some(n) => ((**b).clone(), Some(n)),
            None => (e.clone(), Some(1.0)),
        },
        other => (other.clone(), Some(1.0)),
    }
}

pub(crate) fn add(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Expr::Num(x), Expr::Num(y)) => {
            if let Some(e) = fold(x + y) {
                return e;
            }
        }
        (Expr::Num(x), _) if *x == 0.0 => return b,
        (_, Expr::Num(y)) if *y == 0.0 => return a,
        (_, Expr::Num(y)) if *y < 0.0 => return Expr::Sub(Arc::new(a), Arc::new(Expr::Num(-y))),
        (_, Expr::Neg(inner)) => return sub(a, (**inner).clone()),
        (Expr::Neg(inner), _) => return sub(b, (**inner).clone()),
        _ if a == b => return mul(Expr::Num(2.0), a),
        _ => {}
    }
    Expr::Add(Arc::new(a), Arc::new(b))
}

pub(crate) fn sub(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Expr::Num(x), Expr::Num(y)) => {
            if let Some(e) = fold(x - y) {
                return e;
            }
        }
        (_, Expr::Num(y)) if *y == 0.0 => return a,
        (Expr::Num(x), _) if *x == 0.0 => return neg(b),
        (_, Expr::Num(y)) if *y < 0.0 => return Expr::Add(Arc::new(a), Arc::new(Expr::Num(-y))),
        (_, Expr::Neg(inner)) => return add(a, (**inner).clone()),
        _ if a == b => return Expr::Num(0.0),
        _ => {}
    }
    Expr::Sub(Arc::new(a), Arc::new(b))
}

pub(crate) fn neg(a: Expr) -> Expr {
    match &a {
        Expr::Num(x) => Expr::Num(-x),
        Expr::Neg(inner) => (**inner).clone(),
        Expr::Sub(x, y) => Expr::Sub(y.clone(), x.clone()),
        Expr::Mul(c, x) if c.as_num().is_some() => {
            mul(Expr::Num(-c.as_num().unwrap()), (**x).clone())
        }
        _ => Expr::Neg(Arc::new(a)),
    }
}

pub(crate) fn mul(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Expr::Num(x), Expr::Num(y)) => {
            if let Some(e) = fold(x * y) {
                return e;
            }
        }
        (Expr::Num(x), _) | (_, Expr::Num(x)) if *x == 0.0 => return Expr::Num(0.0),
        (Expr::Num(x), _) if *x == 1.0 => return b,
        (_, Expr::Num(y)) if *y == 1.0 => return a,
        (Expr::Num(x), _) if *x == -1.0 => return neg(b),
        (_, Expr::Num(y)) if *y == -1.0 => return neg(a),
        (_, Expr::Num(_)) if !matches!(a, Expr::Num(_)) => return mul(b, a),
        (Expr::Num(x), Expr::Mul(c, rest)) if c.as_num().is_some() => {
            return mul(Expr::Num(x * c.as_num().unwrap()), (**rest).clone())
        }
        (Expr::Neg(x), _) => return neg(mul((**x).clone(), b)),
        (_, Expr::Neg(y)) => return neg(mul(a, (**y).clone())),
        (Expr::Div(one, den), _) if one.is_num(1.0) => return div(b, (**den).clone()),
        (_, Expr::Div(one, den)) if one.is_num(1.0) => return div(a, (**den).clone()),
        (_, Expr::Div(n, den)) if **den == a => return (**n).clone(),
        (Expr::Div(n, den), _) if **den == b => return (**n).clone(),
        _ => {}
    }
    let (ba, pa) = num_exponent_pair(&a);
    let (bb, pb) = num_exponent_pair(&b);
    if ba == bb {
        if let (Some(p), Some(q)) = (pa, pb) {
            return pow(ba, Expr::Num(p + q));
        }
    }
    Expr::Mul(Arc::new(a), Arc::new(b))
}

pub(crate) fn div(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Expr::Num(x), Expr::Num(y)) if *y != 0.0 => {
            if let Some(e) = fold(x / y) {
                return e;
            }
        }
        (Expr::Num(x), _) if *x == 0.0 => return Expr::Num(0.0),
        (_, Expr::Num(y)) if *y == 1.0 => return a,
        (_, Expr::Num(y)) if *y == -1.0 => return neg(a),
        (Expr::Neg(x), _) => return neg(div((**x).clone(), b)),
        _ if a == b => return Expr::Num(1.0),
        // a / u^(−n) = a u^n
        (_, Expr::Pow(u, p)) if p.as_num().is_some_and(|p| p < 0.0) => {
            return mul(a.clone(), pow((**u).clone(), Expr::Num(-p.as_num().unwrap())));
        }
        // (a / c1) / c2 = a / (c1 c2)
        (Expr::Div(x, c1), Expr::Num(c2)) if c1.as_num().is_some() => {
            return div((**x).clone(), Expr::Num(c1.as_num().unwrap() * c2));
        }
        (_, Expr::Div(n, d)) => return div(mul(a.clone(), (**d).clone()), (**n).clone()),
        _ => {}
    }
    let (ba, pa) = num_exponent_pair(&a);
    let (bb, pb) = num_exponent_pair(&b);
    if ba == bb && !matches!(ba, Expr::Num(_)) {
        if let (Some(p), Some(q)) = (pa, pb) {
            return pow(ba, Expr::Num(p - q));
        }
    }
    // cancel a factor of a product against the denominator
    if let Expr::Mul(l, r) = &a {
        for (f, rest) in [(l, r), (r, l)] {
            let (bf, pf) = num_exponent_pair(f);
            if bf == bb && !matches!(bf, Expr::Num(_)) {
                if let (Some(p), Some(q)) = (pf, pb) {
                    return mul(pow(bf, Expr::Num(p - q)), (**rest).clone());
                }
            }
        }
    }
    Expr::Div(Arc::new(a), Arc::new(b))
}

pub(crate) fn pow(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Expr::Num(x), Expr::Num(y)) => {
            if let Some(v) = pow_real(*x, *y) {
                if let Some(e) = fold(v) {
                    return e;
                }
            }
        }
        (_, Expr::Num(y)) if *y == 1.0 => return a,
        (_, Expr::Num(y)) if *y == 0.0 => return Expr::Num(1.0),
        (Expr::Num(x), _) if *x == 1.0 => return Expr::Num(1.0),
        (Expr::Pow(base, p), Expr::Num(q)) if q.fract() == 0.0 => {
            if let Some(p) = p.as_num() {
                return pow((**base).clone(), Expr::Num(p * q));
            }
        }
        _ => {}
    }
    Expr::Pow(Arc::new(a), Arc::new(b))
}

pub(crate) fn func(f: Func, a: Expr) -> Expr {
    if let Expr::Num(_) = a {
        let node = Expr::Func(f, Arc::new(a.clone()));
        if let Ok(v) = node.eval(&[]) {
            return Expr::Num(v);
        }
        return node;
    }
    match (f, &a) {
        (Func::Exp, Expr::Func(Func::Ln, u)) => return (**u).clone(),
        (Func::Ln, Expr::Func(Func::Exp, u)) => return (**u).clone(),
        (Func::Exp, Expr::Mul(c, l)) if c.as_num().is_some() => {
            if let Expr::Func(Func::Ln, u) = &**l {
                return pow((**u).clone(), (**c).clone());
            }
        }
        (Func::Exp, Expr::Neg(l)) => {
            if let Expr::Func(Func::Ln, u) = &**l {
                return pow((**u).clone(), Expr::Num(-1.0));
            }
        }
        // split off terms that leave no exponential behind
        (Func::Exp, Expr::Add(p, q) | Expr::Sub(p, q)) => {
            let (ep, eq) = (func(Func::Exp, (**p).clone()), func(Func::Exp, (**q).clone()));
            let bare = |e: &Expr| !matches!(e, Expr::Func(Func::Exp, _));
            if bare(&ep) || bare(&eq) {
                return match a {
                    Expr::Add(..) => mul(ep, eq),
                    _ => div(ep, eq),
                };
            }
        }
        _ => {}
    }
    Expr::Func(f, Arc::new(a))
}

impl Expr {
    fn simplify_once(&self) -> Expr {
        let s = |e: &Arc<Expr>| e.simplify_once();
        match self {
            Expr::Num(_) | Expr::Var(_) => self.clone(),
            Expr::Neg(a) => neg(s(a)),
            Expr::Add(a, b) => add(s(a), s(b)),
            Expr::Sub(a, b) => sub(s(a), s(b)),
            Expr::Mul(a, b) => mul(s(a), s(b)),
            Expr::Div(a, b) => div(s(a), s(b)),
            Expr::Pow(a, b) => pow(s(a), s(b)),
            Expr::Func(f, a) => func(*f, s(a)),
            Expr::Jacobi(kind, k, a) => {
                let inner = s(a);
                let node = Expr::Jacobi(*kind, *k, Arc::new(inner));
                if let Expr::Jacobi(_, _, arg) = &node {
                    if arg.as_num().is_some() {
                        if let Ok(v) = node.eval(&[]) {
                            return Expr::Num(v);
                        }
                    }
                }
                node
            }
            Expr::Opaque(o, a) => Expr::Opaque(o.clone(), Arc::new(s(a))),
        }
    }

    fn local_fixpoint(&self) -> Expr {
        let mut cur = self.simplify_once();
        for _ in 0..16 {
            let next = cur.simplify_once();
            if next == cur {
                break;
            }
            cur = next;
        }
        cur
    }

    /// Conservative simplification, iterated to a fixpoint.
    pub fn simplify(&self) -> Expr {
        let mut cur = self.local_fixpoint();
        for _ in 0..4 {
            let next = collect(&cur).local_fixpoint();
            if next == cur {
                break;
            }
            cur = next;
        }
        cur
    }
}

/// Flatten the additive cluster rooted at `e` into `terms` (with numeric
/// coefficients) and `constant`.
fn linear_terms(e: &Expr, scale: f64, terms: &mut Vec<(Expr, f64)>, constant: &mut f64) {
    match e {
        Expr::Num(v) => *constant += scale * v,
        Expr::Add(a, b) => {
            linear_terms(a, scale, terms, constant);
            linear_terms(b, scale, terms, constant);
        }
        Expr::Sub(a, b) => {
            linear_terms(a, scale, terms, constant);
            linear_terms(b, -scale, terms, constant);
        }
        Expr::Neg(a) => linear_terms(a, -scale, terms, constant),
        Expr::Mul(c, a) if c.as_num().is_some() => linear_terms(a, scale * c.as_num().unwrap(), terms, constant),
        Expr::Div(a, c) if c.as_num().is_some_and(|c| c != 0.0) => {
            linear_terms(a, scale / c.as_num().unwrap(), terms, constant)
        }
        other => {
            let other = collect(other);
            match terms.iter_mut().find(|(t, _)| *t == other) {
                Some((_, c)) => *c += scale,
                None => terms.push((other, scale)),
            }
        }
    }
}

/// Merge like terms of every sum: `2 f + g − f` becomes `f + g`.
fn collect(e: &Expr) -> Expr {
    let a = |x: &Arc<Expr>| collect(x);
    match e {
        Expr::Num(_) | Expr::Var(_) => e.clone(),
        Expr::Add(..) | Expr::Sub(..) | Expr::Neg(_) => {
            let mut terms = Vec::new();
            let mut constant = 0.0;
            linear_terms(e, 1.0, &mut terms, &mut constant);
            let mut out: Option<Expr> = None;
            for (t, c) in terms {
                if c == 0.0 {
                    continue;
                }
                let term = mul(Expr::Num(c), t);
                out = Some(match out {
                    None => term,
                    Some(acc) => add(acc, term),
                });
            }
            match out {
                None => Expr::Num(constant),
                Some(acc) => add(acc, Expr::Num(constant)),
            }
        }
        Expr::Mul(x, y) => mul(a(x), a(y)),
        Expr::Div(x, y) => div(a(x), a(y)),
        Expr::Pow(x, y) => pow(a(x), a(y)),
        Expr::Func(f, x) => func(*f, a(x)),
        Expr::Jacobi(kind, k, x) => Expr::Jacobi(*kind, *k, Arc::new(a(x))),
        Expr::Opaque(o, x) => Expr::Opaque(o.clone(), Arc::new(a(x))),
    }
}
