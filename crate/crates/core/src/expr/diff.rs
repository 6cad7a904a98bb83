use super::simplify::{add, div, mul, neg, pow, sub};
use super::{Expr, Func, JacobiKind};

impl Expr {
    /// Exact symbolic derivative with respect to `var`. Total on the tree:
    /// opaque nodes contribute their own symbolic derivative.
    pub fn differentiate(&self, v: &str) -> Expr {
        if !self.depends_on(v) {
            return Expr::Num(0.0);
        }
        match self {
            Expr::Num(_) => Expr::Num(0.0),
            Expr::Var(n) => Expr::Num(if &**n == v { 1.0 } else { 0.0 }),
            Expr::Neg(a) => neg(a.differentiate(v)),
            Expr::Add(a, b) => add(a.differentiate(v), b.differentiate(v)),
            Expr::Sub(a, b) => sub(a.differentiate(v), b.differentiate(v)),
            Expr::Mul(a, b) => {
                let a = (**a).clone();
                let b = (**b).clone();
                add(
                    mul(a.differentiate(v), b.clone()),
                    mul(a, b.differentiate(v)),
                )
            }
            Expr::Div(a, b) => {
                let a = (**a).clone();
                let b = (**b).clone();
                if !b.depends_on(v) {
                    return div(a.differentiate(v), b);
                }
                div(
                    sub(
                        mul(a.differentiate(v), b.clone()),
                        mul(a, b.differentiate(v)),
                    ),
                    pow(b, Expr::Num(2.0)),
                )
            }
            Expr::Pow(a, b) => {
                let base = (**a).clone();
                let ex = (**b).clone();
                if !ex.depends_on(v) {
                    // d(u^c) = c u^(c-1) u'
                    let lowered = match ex.as_num() {
                        Some(c) => pow(base.clone(), Expr::Num(c - 1.0)),
                        None => pow(base.clone(), sub(ex.clone(), Expr::Num(1.0))),
                    };
                    return mul(mul(ex, lowered), base.differentiate(v));
                }
                if !base.depends_on(v) {
                    return mul(
                        mul(self.clone(), base.clone().ln()),
                        ex.differentiate(v),
                    );
                }
                mul(
                    self.clone(),
                    add(
                        mul(ex.differentiate(v), base.clone().ln()),
                        div(mul(ex, base.differentiate(v)), base),
                    ),
                )
            }
            Expr::Func(f, a) => {
                let u = (**a).clone();
                let du = u.differentiate(v);
                let outer = match f {
                    Func::Exp => self.clone(),
                    Func::Ln => div(Expr::Num(1.0), u),
                    Func::Sin => Expr::func(Func::Cos, u),
                    Func::Cos => neg(Expr::func(Func::Sin, u)),
                    Func::Tan => add(Expr::Num(1.0), pow(self.clone(), Expr::Num(2.0))),
                    Func::Atan => div(Expr::Num(1.0), add(Expr::Num(1.0), pow(u, Expr::Num(2.0)))),
                    Func::Sqrt => div(Expr::Num(0.5), self.clone()),
                    Func::Cbrt => div(
                        Expr::Num(1.0),
                        mul(Expr::Num(3.0), pow(self.clone(), Expr::Num(2.0))),
                    ),
                };
                mul(outer, du)
            }
            Expr::Jacobi(kind, k, a) => {
                let u = (**a).clone();
                let sn = Expr::jacobi(JacobiKind::Sn, *k, u.clone());
                let cn = Expr::jacobi(JacobiKind::Cn, *k, u.clone());
                let dn = Expr::jacobi(JacobiKind::Dn, *k, u.clone());
                let outer = match kind {
                    JacobiKind::Sn => mul(cn, dn),
                    JacobiKind::Cn => neg(mul(sn, dn)),
                    JacobiKind::Dn => mul(Expr::Num(-k * k), mul(sn, cn)),
                };
                mul(outer, u.differentiate(v))
            }
            Expr::Opaque(f, a) => {
                let outer = f.0.derivative(a, self);
                mul(outer, a.differentiate(v))
            }
        }
    }

    /// Total derivative along a first-order flow `dy/dx = slope`:
    /// `d/dx = ∂x + slope·∂y`.
    pub fn total_derivative(&self, x: &str, y: &str, slope: &Expr) -> Expr {
        add(
            self.differentiate(x),
            mul(slope.clone(), self.differentiate(y)),
        )
    }
}

#[cfg(test)]
mod tests {
    use crate::expr::{num, parse, var};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
    }

    #[test]
    fn textbook_derivatives() {
        let d = parse("y^3", &["y"]).unwrap().differentiate("y").simplify();
        assert_eq!(d, num(3.0) * var("y").powf(2.0));
        let d = parse("exp(-2*x)", &["x"]).unwrap().differentiate("x");
        for x in [-1.0, 0.0, 0.7] {
            let want = -2.0 * (-2.0 * x as f64).exp();
            assert!(close(d.eval(&[("x", x)]).unwrap(), want, 1e-14));
        }
    }

    #[test]
    fn quotient_rule_against_central_difference() {
        let e = parse(
            "(0.5 - 1.2*y + 0.3*y^2 + 2*y^3)/(1.5 + 0.7*y)",
            &["y"],
        )
        .unwrap();
        let d = e.differentiate("y");
        let h = 1e-6;
        for i in 0..10 {
            let y = -0.9 + 0.31 * i as f64;
            let fd = (e.eval(&[("y", y + h)]).unwrap() - e.eval(&[("y", y - h)]).unwrap()) / (2.0 * h);
            let exact = d.eval(&[("y", y)]).unwrap();
            assert!(close(exact, fd, 1e-7), "y={y}: {exact} vs {fd}");
        }
    }

    #[test]
    fn jacobi_and_special_functions() {
        let e = parse("sn(2*x, 0.5) + atan(x) + cbrt(x) + tan(x)", &["x"]).unwrap();
        let d = e.differentiate("x");
        let h = 1e-6;
        for x in [0.3, 0.8, 1.1] {
            let fd = (e.eval(&[("x", x + h)]).unwrap() - e.eval(&[("x", x - h)]).unwrap()) / (2.0 * h);
            assert!(close(d.eval(&[("x", x)]).unwrap(), fd, 1e-7));
        }
    }

    #[test]
    fn total_derivative_along_flow() {
        // y' = y  =>  d/dx (x*y) = y + x*y
        let e = parse("x*y", &["x", "y"]).unwrap();
        let d = e.total_derivative("x", "y", &var("y"));
        let got = d.eval(&[("x", 2.0), ("y", 3.0)]).unwrap();
        assert_eq!(got, 3.0 + 6.0);
    }
}
