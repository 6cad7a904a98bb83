//! Expression trees over a handful of named real variables.
//!
//! Every component function of a class descriptor (`a`, `F`, `G`, `F2`) and
//! every reduced right-hand side is an [`Expr`]. Trees are immutable and
//! share subtrees through `Arc`, so cloning is cheap and values can be sent
//! across threads.
//!
//! Besides the usual arithmetic and elementary functions, a tree may hold
//! [`Opaque`](Expr::Opaque) nodes: univariate functions known only
//! numerically (a quadrature without a closed form, the numeric solution of
//! an auxiliary first-order equation) whose derivative is nevertheless known
//! symbolically. This keeps differentiation total even when integration is
//! not.

mod diff;
mod eval;
mod integrate;
mod parse;
mod print;
mod simplify;

pub use eval::Bindings;
pub use integrate::{antiderive, integrate_closed_form, Antiderivative};
pub use parse::parse;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::error::EvalError;

/// Elementary functions of one argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Exp,
    Ln,
    Sin,
    Cos,
    Tan,
    Atan,
    Sqrt,
    Cbrt,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Atan => "atan",
            Func::Sqrt => "sqrt",
            Func::Cbrt => "cbrt",
        }
    }

    pub(crate) fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "exp" => Func::Exp,
            "ln" | "log" => Func::Ln,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "atan" | "arctan" => Func::Atan,
            "sqrt" => Func::Sqrt,
            "cbrt" => Func::Cbrt,
            _ => return None,
        })
    }
}

/// The three Jacobi elliptic functions, parameterized by modulus `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum JacobiKind {
    Sn,
    Cn,
    Dn,
}

impl JacobiKind {
    pub fn name(self) -> &'static str {
        match self {
            JacobiKind::Sn => "sn",
            JacobiKind::Cn => "cn",
            JacobiKind::Dn => "dn",
        }
    }
}

/// A univariate function known numerically, with a symbolic derivative.
pub trait OpaqueFn: Send + Sync + fmt::Debug {
    /// Short label used when printing, e.g. `K` or `I[1/x]`.
    fn label(&self) -> String;

    fn eval(&self, t: f64) -> Result<f64, EvalError>;

    /// Derivative with respect to the argument, evaluated at `arg`.
    /// `this` is the node `f(arg)` itself, for functions defined through an
    /// ODE whose right-hand side mentions the solution.
    fn derivative(&self, arg: &Expr, this: &Expr) -> Expr;
}

/// Shared handle to an [`OpaqueFn`]; equality is identity.
#[derive(Clone)]
pub struct OpaqueRef(pub Arc<dyn OpaqueFn>);

impl PartialEq for OpaqueRef {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }
}

impl fmt::Debug for OpaqueRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Opaque({})", self.0.label())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(Arc<str>),
    Neg(Arc<Expr>),
    Add(Arc<Expr>, Arc<Expr>),
    Sub(Arc<Expr>, Arc<Expr>),
    Mul(Arc<Expr>, Arc<Expr>),
    Div(Arc<Expr>, Arc<Expr>),
    Pow(Arc<Expr>, Arc<Expr>),
    Func(Func, Arc<Expr>),
    /// `sn(arg, k)` and friends; the modulus is a fixed constant.
    Jacobi(JacobiKind, f64, Arc<Expr>),
    Opaque(OpaqueRef, Arc<Expr>),
}

pub fn num(v: f64) -> Expr {
    Expr::Num(v)
}

pub fn var(name: &str) -> Expr {
    Expr::Var(Arc::from(name))
}

impl Expr {
    pub fn pow(self, exponent: Expr) -> Expr {
        Expr::Pow(Arc::new(self), Arc::new(exponent))
    }

    pub fn powf(self, exponent: f64) -> Expr {
        self.pow(Expr::Num(exponent))
    }

    pub fn func(f: Func, arg: Expr) -> Expr {
        Expr::Func(f, Arc::new(arg))
    }

    pub fn exp(self) -> Expr {
        Expr::func(Func::Exp, self)
    }

    pub fn ln(self) -> Expr {
        Expr::func(Func::Ln, self)
    }

    pub fn sqrt(self) -> Expr {
        Expr::func(Func::Sqrt, self)
    }

    pub fn jacobi(kind: JacobiKind, k: f64, arg: Expr) -> Expr {
        Expr::Jacobi(kind, k, Arc::new(arg))
    }

    pub fn opaque(f: Arc<dyn OpaqueFn>, arg: Expr) -> Expr {
        Expr::Opaque(OpaqueRef(f), Arc::new(arg))
    }

    pub fn as_num(&self) -> Option<f64> {
        match self {
            Expr::Num(v) => Some(*v),
            _ => None,
        }
    }

    pub fn is_num(&self, v: f64) -> bool {
        matches!(self, Expr::Num(w) if *w == v)
    }

    /// Names of the free variables, sorted.
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Num(_) => {}
            Expr::Var(n) => {
                out.insert(n.to_string());
            }
            Expr::Neg(a) | Expr::Func(_, a) | Expr::Jacobi(_, _, a) | Expr::Opaque(_, a) => {
                a.collect_vars(out)
            }
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Pow(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    pub fn depends_on(&self, name: &str) -> bool {
        match self {
            Expr::Num(_) => false,
            Expr::Var(n) => &**n == name,
            Expr::Neg(a) | Expr::Func(_, a) | Expr::Jacobi(_, _, a) | Expr::Opaque(_, a) => {
                a.depends_on(name)
            }
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Pow(a, b) => {
                a.depends_on(name) || b.depends_on(name)
            }
        }
    }

    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Num(_) => true,
            Expr::Var(_) => false,
            Expr::Neg(a) | Expr::Func(_, a) | Expr::Jacobi(_, _, a) | Expr::Opaque(_, a) => {
                a.is_constant()
            }
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Pow(a, b) => {
                a.is_constant() && b.is_constant()
            }
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            Expr::Num(_) | Expr::Var(_) => 1,
            Expr::Neg(a) | Expr::Func(_, a) | Expr::Jacobi(_, _, a) | Expr::Opaque(_, a) => {
                1 + a.node_count()
            }
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Pow(a, b) => {
                1 + a.node_count() + b.node_count()
            }
        }
    }

    pub fn contains_opaque(&self) -> bool {
        match self {
            Expr::Num(_) | Expr::Var(_) => false,
            Expr::Opaque(..) => true,
            Expr::Neg(a) | Expr::Func(_, a) | Expr::Jacobi(_, _, a) => a.contains_opaque(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Pow(a, b) => {
                a.contains_opaque() || b.contains_opaque()
            }
        }
    }

    /// Replace every occurrence of variable `name` by `with`.
    pub fn substitute(&self, name: &str, with: &Expr) -> Expr {
        self.substitute_all(&[(name, with.clone())])
    }

    /// Simultaneous substitution: `[("x", y), ("y", x)]` swaps the two.
    pub fn substitute_all(&self, subs: &[(&str, Expr)]) -> Expr {
        self.map_vars(&|n| {
            subs.iter()
                .find(|(s, _)| *s == n)
                .map(|(_, e)| e.clone())
        })
    }

    fn map_vars(&self, f: &dyn Fn(&str) -> Option<Expr>) -> Expr {
        let un = |a: &Arc<Expr>| Arc::new(a.map_vars(f));
        match self {
            Expr::Num(_) => self.clone(),
            Expr::Var(n) => f(n).unwrap_or_else(|| self.clone()),
            Expr::Neg(a) => Expr::Neg(un(a)),
            Expr::Add(a, b) => Expr::Add(un(a), un(b)),
            Expr::Sub(a, b) => Expr::Sub(un(a), un(b)),
            Expr::Mul(a, b) => Expr::Mul(un(a), un(b)),
            Expr::Div(a, b) => Expr::Div(un(a), un(b)),
            Expr::Pow(a, b) => Expr::Pow(un(a), un(b)),
            Expr::Func(g, a) => Expr::Func(*g, un(a)),
            Expr::Jacobi(kind, k, a) => Expr::Jacobi(*kind, *k, un(a)),
            Expr::Opaque(o, a) => Expr::Opaque(o.clone(), un(a)),
        }
    }

    /// Replace the listed variables by numeric constants.
    pub fn with_fixed(&self, fixed: &[(&str, f64)]) -> Expr {
        let subs: Vec<(&str, Expr)> = fixed.iter().map(|(n, v)| (*n, Expr::Num(*v))).collect();
        self.substitute_all(&subs)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $variant:ident) => {
        impl std::ops::$trait for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                Expr::$variant(Arc::new(self), Arc::new(rhs))
            }
        }
        impl std::ops::$trait<f64> for Expr {
            type Output = Expr;
            fn $method(self, rhs: f64) -> Expr {
                Expr::$variant(Arc::new(self), Arc::new(Expr::Num(rhs)))
            }
        }
        impl std::ops::$trait<Expr> for f64 {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                Expr::$variant(Arc::new(Expr::Num(self)), Arc::new(rhs))
            }
        }
        impl std::ops::$trait<&Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                Expr::$variant(Arc::new(self.clone()), Arc::new(rhs.clone()))
            }
        }
    };
}

binop!(Add, add, Add);
binop!(Sub, sub, Sub);
binop!(Mul, mul, Mul);
binop!(Div, div, Div);

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::Neg(Arc::new(self))
    }
}
