use std::fmt;
use std::sync::Arc;

use crate::error::{EvalError, NumericError};
use crate::expr::{num, Antiderivative, Expr};
use crate::solvers::{invert_simple, Anchor};
use crate::special::find_root;

/// The relation `left(y) = right(x) + B`.
#[derive(Debug, Clone)]
pub struct ImplicitSolution {
    pub left: Expr,
    pub right: Expr,
    pub b: f64,
    pub anchor: Anchor,
}

fn constant_free(a: &Arc<Antiderivative>) -> Expr {
    a.closed_form().cloned().unwrap_or_else(|| a.as_expr())
}

impl ImplicitSolution {
    /// Build from the two quadratures, preferring constant-free closed
    /// forms; `B` is fixed so the relation holds at the anchor.
    pub fn from_antiderivatives(left: &Arc<Antiderivative>, right: &Arc<Antiderivative>, anchor: Anchor) -> Self {
        Self::anchored(constant_free(left), constant_free(right), anchor)
    }

    pub fn anchored(left: Expr, right: Expr, anchor: Anchor) -> Self {
        let l = left.eval(&[("y", anchor.y0)]).unwrap_or(f64::NAN);
        let r = right.eval(&[("x", anchor.x0)]).unwrap_or(f64::NAN);
        ImplicitSolution { left, right, b: l - r, anchor }
    }

    /// `left(y) − right(x) − B`
    pub fn mismatch(&self, x: f64, y: f64) -> Result<f64, EvalError> {
        Ok(self.left.eval(&[("y", y)])? - self.right.eval(&[("x", x)])? - self.b)
    }

    /// `y` on `[lo, hi]` satisfying the relation at `x`.
    pub fn solve_for(&self, x: f64, lo: f64, hi: f64) -> Result<f64, NumericError> {
        find_root(|y| self.mismatch(x, y), lo, hi, 1e-13)
    }

    /// `dy/dx = right'(x)/left'(y)` from implicit differentiation.
    pub fn slope(&self, x: f64, y: f64) -> Result<f64, EvalError> {
        let r = self.right.differentiate("x").eval(&[("x", x)])?;
        let l = self.left.differentiate("y").eval(&[("y", y)])?;
        Ok(r / l)
    }

    /// Explicit `y(x)` when `left` inverts in elementary steps on the
    /// anchor's branch.
    pub fn explicit(&self) -> Option<Expr> {
        let target = self.right.clone() + num(self.b);
        let y = invert_simple(&self.left, "y", target)?.simplify();
        let at = y.eval(&[("x", self.anchor.x0)]).ok()?;
        ((at - self.anchor.y0).abs() <= 1e-9 * (1.0 + self.anchor.y0.abs())).then_some(y)
    }
}

impl fmt::Display for ImplicitSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {} + B, B = {}", self.left, self.right, self.b)
    }
}
