use std::collections::HashMap;

use super::{Expr, Func};
use crate::error::EvalError;
use crate::special::jacobi;

/// Variable bindings as a short slice of `(name, value)` pairs.
pub type Bindings<'a> = [(&'a str, f64)];

fn finite(v: f64, e: &Expr) -> Result<f64, EvalError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(EvalError::domain("non-finite result", e))
    }
}

impl Expr {
    /// Evaluate with the given bindings. Domain violations (logarithm of a
    /// nonpositive number, division by zero, even root of a negative number,
    /// overflow) are reported together with the offending subexpression.
    pub fn eval(&self, vars: &Bindings) -> Result<f64, EvalError> {
        match self {
            Expr::Num(v) => Ok(*v),
            Expr::Var(n) => vars
                .iter()
                .find(|(k, _)| *k == &**n)
                .map(|(_, v)| *v)
                .ok_or_else(|| EvalError::Unbound(n.to_string())),
            Expr::Neg(a) => Ok(-a.eval(vars)?),
            Expr::Add(a, b) => finite(a.eval(vars)? + b.eval(vars)?, self),
            Expr::Sub(a, b) => finite(a.eval(vars)? - b.eval(vars)?, self),
            Expr::Mul(a, b) => finite(a.eval(vars)? * b.eval(vars)?, self),
            Expr::Div(a, b) => {
                let num = a.eval(vars)?;
                let den = b.eval(vars)?;
                if den == 0.0 {
                    return Err(EvalError::domain("division by zero", self));
                }
                finite(num / den, self)
            }
            Expr::Pow(a, b) => {
                let base = a.eval(vars)?;
                let ex = b.eval(vars)?;
                finite(pow_real(base, ex).ok_or_else(|| {
                    EvalError::domain(format!("{base}^{ex} is not real"), self)
                })?, self)
            }
            Expr::Func(f, a) => {
                let u = a.eval(vars)?;
                let v = match f {
                    Func::Exp => u.exp(),
                    Func::Ln => {
                        if u <= 0.0 {
                            return Err(EvalError::domain(format!("ln of {u}"), self));
                        }
                        u.ln()
                    }
                    Func::Sin => u.sin(),
                    Func::Cos => u.cos(),
                    Func::Tan => u.tan(),
                    Func::Atan => u.atan(),
                    Func::Sqrt => {
                        if u < 0.0 {
                            return Err(EvalError::domain(format!("sqrt of {u}"), self));
                        }
                        u.sqrt()
                    }
                    Func::Cbrt => u.cbrt(),
                };
                finite(v, self)
            }
            Expr::Jacobi(kind, k, a) => {
                let u = a.eval(vars)?;
                let t = jacobi(u, *k).map_err(|e| EvalError::domain(e.to_string(), self))?;
                Ok(match kind {
                    super::JacobiKind::Sn => t.sn,
                    super::JacobiKind::Cn => t.cn,
                    super::JacobiKind::Dn => t.dn,
                })
            }
            Expr::Opaque(f, a) => {
                let u = a.eval(vars)?;
                finite(f.0.eval(u)?, self)
            }
        }
    }

    /// Evaluate with bindings held in a map.
    pub fn eval_map(&self, vars: &HashMap<String, f64>) -> Result<f64, EvalError> {
        let slice: Vec<(&str, f64)> = vars.iter().map(|(k, v)| (k.as_str(), *v)).collect();
        self.eval(&slice)
    }

    /// Evaluate an expression of a single variable.
    pub fn eval_at(&self, name: &str, t: f64) -> Result<f64, EvalError> {
        self.eval(&[(name, t)])
    }
}

/// Real power; `None` when the result is not real (negative base with a
/// non-integer exponent, zero to a negative power).
pub(crate) fn pow_real(base: f64, ex: f64) -> Option<f64> {
    if ex.fract() == 0.0 && ex.abs() < 1e9 {
        if base == 0.0 && ex < 0.0 {
            return None;
        }
        return Some(base.powi(ex as i32));
    }
    if base < 0.0 {
        return None;
    }
    if base == 0.0 && ex < 0.0 {
        return None;
    }
    Some(base.powf(ex))
}

#[cfg(test)]
mod tests {
    use crate::expr::parse;

    #[test]
    fn simple_values() {
        let e = parse("x^2+1", &["x"]).unwrap();
        assert_eq!(e.eval(&[("x", 2.0)]).unwrap(), 5.0);
        assert_eq!(parse("exp(0)", &[]).unwrap().eval(&[]).unwrap(), 1.0);
    }

    #[test]
    fn domain_errors_name_the_subexpression() {
        let e = parse("1 + ln(x)", &["x"]).unwrap();
        let err = e.eval(&[("x", -1.0)]).unwrap_err();
        match err {
            crate::error::EvalError::Domain { expr, .. } => assert_eq!(expr, "ln(x)"),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse("1/x", &["x"]).unwrap().eval(&[("x", 0.0)]).is_err());
        assert!(parse("sqrt(x)", &["x"]).unwrap().eval(&[("x", -1.0)]).is_err());
        assert!(parse("x^0.5", &["x"]).unwrap().eval(&[("x", -1.0)]).is_err());
        assert_eq!(parse("x^3", &["x"]).unwrap().eval(&[("x", -2.0)]).unwrap(), -8.0);
        assert!(parse("x", &["x"]).unwrap().eval(&[]).is_err());
    }
}
