use std::fmt;

use super::Expr;

fn level(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) => 1,
        Expr::Mul(..) | Expr::Div(..) => 2,
        Expr::Neg(..) => 3,
        Expr::Pow(..) => 4,
        _ => 5,
    }
}

fn child(f: &mut fmt::Formatter<'_>, e: &Expr, paren: bool) -> fmt::Result {
    if paren {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => {
                if v.is_sign_negative() {
                    write!(f, "({v})")
                } else {
                    write!(f, "{v}")
                }
            }
            Expr::Var(n) => f.write_str(n),
            Expr::Neg(a) => {
                f.write_str("-")?;
                child(f, a, level(a) < 3)
            }
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                child(f, a, false)?;
                f.write_str(if matches!(self, Expr::Add(..)) { " + " } else { " - " })?;
                child(f, b, level(b) <= 1)
            }
            Expr::Mul(a, b) | Expr::Div(a, b) => {
                child(f, a, level(a) < 2)?;
                f.write_str(if matches!(self, Expr::Mul(..)) { "*" } else { "/" })?;
                child(f, b, level(b) <= 2)
            }
            Expr::Pow(a, b) => {
                child(f, a, level(a) < 5)?;
                f.write_str("^")?;
                child(f, b, level(b) < 3)
            }
            Expr::Func(g, a) => write!(f, "{}({a})", g.name()),
            Expr::Jacobi(kind, k, a) => write!(f, "{}({a}, {k})", kind.name()),
            Expr::Opaque(o, a) => write!(f, "{}({a})", o.0.label()),
        }
    }
}
