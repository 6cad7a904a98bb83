//! Order reduction: from a class descriptor and an initial condition to the
//! first-order equation `y' = rhs(x, y)`.

mod implicit;
mod numeric;

pub use implicit::ImplicitSolution;
pub use numeric::OdeSolution;

use std::sync::Arc;

use crate::classes::{validate, validate_ic, ClassDescriptor, ClassTag, InitialCondition};
use crate::error::{EvalError, ReduceError};
use crate::expr::{antiderive, num, var, Antiderivative, Expr};
use crate::solvers::{solve_closed_form, Anchor, FormTag};

/// How `K` is carried.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KRoute {
    /// A quadrature of a given function (classes I/II).
    Quadrature,
    /// Closed-form solution of the K-equation found by the named route.
    Closed(FormTag),
    /// Numeric solution of the K-equation.
    Numeric,
}

#[derive(Debug, Clone)]
pub struct KFunction {
    /// Variable `K` depends on.
    pub var: &'static str,
    pub expr: Expr,
    /// For classes III/IV, `K' = equation(t, K)` with `t`, `K` named `x`, `y`.
    pub equation: Option<Expr>,
    pub route: KRoute,
    /// `K` at the anchor (zero for classes I/II by normalization).
    pub k0: f64,
}

#[derive(Debug, Clone)]
pub struct ReducedODE {
    pub tag: ClassTag,
    pub m: u32,
    /// Right-hand side of the reduced equation, in `(x, y)`.
    pub rhs: Expr,
    /// `Ia = ∫ a` in the factor variable.
    pub factor: Arc<Antiderivative>,
    /// `H` for classes I/II.
    pub h: Option<Arc<Antiderivative>>,
    pub k: KFunction,
    /// Additive constant for classes I/II; `K0` for classes III/IV.
    pub a_const: f64,
    /// `sign(yp0)`; the sign itself travels inside `K`.
    pub branch: f64,
    pub anchor: InitialCondition,
}

impl ReducedODE {
    pub fn rhs_at(&self, x: f64, y: f64) -> Result<f64, EvalError> {
        self.rhs.eval(&[("x", x), ("y", y)])
    }

    /// Integrating factor `E = exp(Ia)` as an expression.
    pub fn factor_expr(&self) -> Expr {
        self.factor.as_expr().exp().simplify()
    }
}

fn check_tag(d: &ClassDescriptor, want: ClassTag) -> Result<(), ReduceError> {
    if d.tag != want {
        return Err(ReduceError::WrongClass { expected: want.to_string(), got: d.tag.to_string() });
    }
    Ok(())
}

fn factor_at(d: &ClassDescriptor, ic: &InitialCondition) -> Result<(Arc<Antiderivative>, Expr, f64), ReduceError> {
    let ia = d.factor_exponent(ic);
    let e = ia.as_expr().exp().simplify();
    let t0 = match d.tag.factor_var() {
        "x" => ic.x0,
        _ => ic.y0,
    };
    let e0 = e.eval(&[(d.tag.factor_var(), t0)]).map_err(ReduceError::Factor)?;
    if !e0.is_finite() || e0 == 0.0 {
        return Err(ReduceError::Factor(EvalError::domain("non-finite factor", &e)));
    }
    Ok((ia, e, e0))
}

fn anchored(r: ReducedODE) -> Result<ReducedODE, ReduceError> {
    let ic = r.anchor;
    let got = r.rhs_at(ic.x0, ic.y0).map_err(ReduceError::Quadrature)?;
    if (got - ic.yp0).abs() > 1e-10 * ic.yp0.abs().max(1e-300) && (got - ic.yp0).abs() > 1e-14 {
        return Err(ReduceError::Quadrature(EvalError::Quadrature(format!(
            "reduced rhs at the anchor is {got}, expected {}",
            ic.yp0
        ))));
    }
    Ok(r)
}

fn prepare(d: &ClassDescriptor, ic: &InitialCondition, want: ClassTag) -> Result<(), ReduceError> {
    check_tag(d, want)?;
    validate(d)?;
    validate_ic(d, ic)?;
    Ok(())
}

/// `y' = (H(x) + K(y) + A)/E(x)` with `H' = F E`, `K' = G`.
pub fn reduce_class1(d: &ClassDescriptor, ic: &InitialCondition) -> Result<ReducedODE, ReduceError> {
    prepare(d, ic, ClassTag::I)?;
    let (ia, e, e0) = factor_at(d, ic)?;
    let f = d.f.clone().unwrap_or_else(|| num(0.0));
    let g = d.g.clone().unwrap_or_else(|| num(0.0));
    let h = antiderive(&(f * e.clone()).simplify(), "x", ic.x0);
    let k = antiderive(&g, "y", ic.y0);
    let a_const = ic.yp0 * e0;
    let rhs = ((h.as_expr() + k.as_expr() + a_const) / e).simplify();
    anchored(ReducedODE {
        tag: ClassTag::I,
        m: 0,
        rhs,
        factor: ia,
        h: Some(h),
        k: KFunction { var: "y", expr: k.as_expr(), equation: None, route: KRoute::Quadrature, k0: 0.0 },
        a_const,
        branch: ic.yp0.signum(),
        anchor: *ic,
    })
}

/// `y' = (H(x) + K(y) + A)/E(y)` with `H' = F`, `K' = G E`.
pub fn reduce_class2(d: &ClassDescriptor, ic: &InitialCondition) -> Result<ReducedODE, ReduceError> {
    prepare(d, ic, ClassTag::II)?;
    let (ia, e, e0) = factor_at(d, ic)?;
    let f = d.f.clone().unwrap_or_else(|| num(0.0));
    let g = d.g.clone().unwrap_or_else(|| num(0.0));
    let h = antiderive(&f, "x", ic.x0);
    let k = antiderive(&(g * e.clone()).simplify(), "y", ic.y0);
    let a_const = ic.yp0 * e0;
    let rhs = ((h.as_expr() + k.as_expr() + a_const) / e).simplify();
    anchored(ReducedODE {
        tag: ClassTag::II,
        m: 0,
        rhs,
        factor: ia,
        h: Some(h),
        k: KFunction { var: "y", expr: k.as_expr(), equation: None, route: KRoute::Quadrature, k0: 0.0 },
        a_const,
        branch: ic.yp0.signum(),
        anchor: *ic,
    })
}

/// Solve `K' = equation(t, K)` from `(t0, k0)`, closed form first.
/// `equation` uses `x`, `y` for `t`, `K`; the result is in `kvar`.
fn solve_k(
    equation: Expr,
    t0: f64,
    k0: f64,
    kvar: &'static str,
    particular: Option<Expr>,
) -> Result<KFunction, ReduceError> {
    match equation.eval(&[("x", t0), ("y", k0)]) {
        Ok(v) if v.is_finite() => {}
        Ok(v) => return Err(ReduceError::SingularK(format!("K' = {v} at K0 = {k0}"))),
        Err(e) => return Err(ReduceError::SingularK(e.to_string())),
    }
    let to_k = |e: &Expr| if kvar == "x" { e.clone() } else { e.substitute("x", &var(kvar)) };
    let closed = solve_closed_form(&equation, Anchor::new(t0, k0), particular.as_ref());
    let (expr, route) = match closed {
        Some(cf) => (to_k(&cf.expr), KRoute::Closed(cf.form)),
        None => {
            let sol = OdeSolution::new("K", equation.clone(), "x", "y", t0, k0);
            (Expr::opaque(sol, var(kvar)), KRoute::Numeric)
        }
    };
    Ok(KFunction { var: kvar, expr, equation: Some(equation), route, k0 })
}

fn f2_in_canonical(d: &ClassDescriptor) -> Expr {
    d.f2.clone()
        .unwrap_or_else(|| num(0.0))
        .substitute_all(&[("u", var("x")), ("v", var("y"))])
}

/// `y' = K(y)/E(x)` with `K^{m+1} K_y = F2(y, K)`, `K(y0) = yp0 E(x0)`.
pub fn reduce_class3(d: &ClassDescriptor, ic: &InitialCondition) -> Result<ReducedODE, ReduceError> {
    prepare(d, ic, ClassTag::III)?;
    let (ia, e, e0) = factor_at(d, ic)?;
    let k0 = ic.yp0 * e0;
    let equation = (f2_in_canonical(d) / var("y").powf(f64::from(d.m + 1))).simplify();
    let particular = d.particular_k.as_ref().map(|p| p.substitute("y", &var("x")));
    let k = solve_k(equation, ic.y0, k0, "y", particular)?;
    let rhs = (k.expr.clone() / e).simplify();
    anchored(ReducedODE {
        tag: ClassTag::III,
        m: d.m,
        rhs,
        factor: ia,
        h: None,
        k,
        a_const: k0,
        branch: ic.yp0.signum(),
        anchor: *ic,
    })
}

/// `y' = K(x)/E(y)` with `K^m K_x = F2(x, K)`, `K(x0) = yp0 E(y0)`.
pub fn reduce_class4(d: &ClassDescriptor, ic: &InitialCondition) -> Result<ReducedODE, ReduceError> {
    prepare(d, ic, ClassTag::IV)?;
    let (ia, e, e0) = factor_at(d, ic)?;
    let k0 = ic.yp0 * e0;
    let equation = if d.m == 0 {
        f2_in_canonical(d).simplify()
    } else {
        (f2_in_canonical(d) / var("y").powf(f64::from(d.m))).simplify()
    };
    let k = solve_k(equation, ic.x0, k0, "x", d.particular_k.clone())?;
    let rhs = (k.expr.clone() / e).simplify();
    anchored(ReducedODE {
        tag: ClassTag::IV,
        m: d.m,
        rhs,
        factor: ia,
        h: None,
        k,
        a_const: k0,
        branch: ic.yp0.signum(),
        anchor: *ic,
    })
}

/// Dispatch on the descriptor's class.
pub fn reduce(d: &ClassDescriptor, ic: &InitialCondition) -> Result<ReducedODE, ReduceError> {
    match d.tag {
        ClassTag::I => reduce_class1(d, ic),
        ClassTag::II => reduce_class2(d, ic),
        ClassTag::III => reduce_class3(d, ic),
        ClassTag::IV => reduce_class4(d, ic),
    }
}

/// `∫ dy/K = ∫ e^{−Ia} dx + B` (class III) or `∫ E dy = ∫ K dx + B`
/// (class IV), with `B` fixed at the anchor.
pub fn implicit_solution(r: &ReducedODE) -> Result<ImplicitSolution, ReduceError> {
    let ic = r.anchor;
    let anchor = Anchor::new(ic.x0, ic.y0);
    let (left, right) = match r.tag {
        ClassTag::III => {
            if r.k.k0 == 0.0 {
                return Err(ReduceError::Implicit("K vanishes at the anchor".into()));
            }
            let left = antiderive(&(num(1.0) / r.k.expr.clone()).simplify(), "y", ic.y0);
            let right = antiderive(&(-r.factor.as_expr()).exp().simplify(), "x", ic.x0);
            (left, right)
        }
        ClassTag::IV => {
            let left = antiderive(&r.factor_expr(), "y", ic.y0);
            let right = antiderive(&r.k.expr, "x", ic.x0);
            (left, right)
        }
        other => {
            return Err(ReduceError::Implicit(format!("class {other} has no K-quadrature relation")))
        }
    };
    let s = ImplicitSolution::from_antiderivatives(&left, &right, anchor);
    if !s.b.is_finite() {
        return Err(ReduceError::Implicit(format!("relation not finite at the anchor: {s}")));
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn px(s: &str) -> Expr {
        parse(s, &["x"]).unwrap()
    }
    fn py(s: &str) -> Expr {
        parse(s, &["y"]).unwrap()
    }
    fn puv(s: &str) -> Expr {
        parse(s, &["u", "v"]).unwrap()
    }

    #[test]
    fn trivial_first_class() {
        let d = ClassDescriptor::class1(px("0"), px("0"), py("0"));
        let r = reduce_class1(&d, &InitialCondition::new(0.0, 1.0, 3.0)).unwrap();
        assert!((r.rhs_at(0.4, 9.0).unwrap() - 3.0).abs() < 1e-15);
    }

    #[test]
    fn trivial_second_and_fourth_class() {
        let d = ClassDescriptor::class2(py("0"), px("0"), py("0"));
        let r = reduce_class2(&d, &InitialCondition::new(0.0, 2.0, 5.0)).unwrap();
        assert!((r.rhs_at(1.0, -3.0).unwrap() - 5.0).abs() < 1e-15);
        let d = ClassDescriptor::class4(0, py("0"), puv("0"));
        let r = reduce_class4(&d, &InitialCondition::new(0.0, 0.0, 2.0)).unwrap();
        assert!((r.rhs_at(0.7, 0.2).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn separable_abel_from_first_class() {
        // G = d/dy (1 + 2y - y^2 + 0.5y^3), a = F = 0
        let d = ClassDescriptor::class1(px("0"), px("0"), py("2 - 2*y + 1.5*y^2"));
        let ic = InitialCondition::new(0.0, 0.5, 0.25);
        let r = reduce_class1(&d, &ic).unwrap();
        let cubic = |y: f64| 1.0 + 2.0 * y - y * y + 0.5 * y.powi(3);
        for y in [-0.3, 0.5, 1.2] {
            let want = 0.25 + cubic(y) - cubic(0.5);
            assert!((r.rhs_at(0.9, y).unwrap() - want).abs() < 1e-12);
        }
    }

    #[test]
    fn wrong_class_rejected() {
        let d = ClassDescriptor::class2(py("0"), px("0"), py("0"));
        assert!(matches!(
            reduce_class1(&d, &InitialCondition::new(0.0, 1.0, 1.0)),
            Err(ReduceError::WrongClass { .. })
        ));
    }

    #[test]
    fn homogeneous_k_equation_closed() {
        // K' = (K/y)^2 + 2K/y; K = y^2/(A - y)
        let d = ClassDescriptor::class3(0, px("1/x"), puv("v*((v/u)^2 + 2*(v/u))")).with_factor_base(1.0);
        let ic = InitialCondition::new(1.0, 0.3, 0.3 * 0.3 / (1.0 - 0.3));
        let r = reduce_class3(&d, &ic).unwrap();
        assert!(matches!(r.k.route, KRoute::Closed(_)), "{:?}", r.k.route);
        for y in [0.2, 0.5, 0.8] {
            let want = y * y / (1.0 - y);
            assert!((r.k.expr.eval(&[("y", y)]).unwrap() - want).abs() < 1e-10 * want.abs().max(1.0));
        }
        let s = implicit_solution(&r).unwrap();
        // −A/y − ln y = ln x + B, A = 1
        let b = -1.0 / 0.3 - 0.3f64.ln();
        for (x, y) in [(1.2, 0.33), (1.5, 0.4)] {
            let paper = -1.0 / y - f64::ln(y) - f64::ln(x) - b;
            assert!((s.mismatch(x, y).unwrap() - paper).abs() < 1e-9);
        }
    }

    #[test]
    fn numeric_k_when_no_route() {
        let d = ClassDescriptor::class4(0, py("0"), puv("sin(u*v) + 1"));
        let ic = InitialCondition::new(0.0, 0.0, 0.5);
        let r = reduce_class4(&d, &ic).unwrap();
        assert_eq!(r.k.route, KRoute::Numeric);
        let dk = r.k.expr.differentiate("x");
        let (x, k) = (0.4, r.k.expr.eval(&[("x", 0.4)]).unwrap());
        assert!((dk.eval(&[("x", x)]).unwrap() - ((x * k).sin() + 1.0)).abs() < 1e-10);
    }

    #[test]
    fn singular_k_equation() {
        let d = ClassDescriptor::class4(0, py("0"), puv("1/v"));
        assert!(matches!(
            reduce_class4(&d, &InitialCondition::new(0.0, 0.0, 0.0)),
            Err(ReduceError::SingularK(_))
        ));
    }
}
