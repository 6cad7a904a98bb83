use crate::error::{EvalError, NumericError};

/// Maximum bisection depth before a subinterval is declared singular.
pub const MAX_DEPTH: u32 = 60;
/// Bisections always taken before the error estimate is trusted; at
/// shallow depth the two Simpson rules can agree by accident.
const MIN_DEPTH: u32 = 3;

struct Ctx<'f, F> {
    f: &'f F,
}

impl<F> Ctx<'_, F>
where
    F: Fn(f64) -> Result<f64, EvalError>,
{
    fn eval(&self, t: f64) -> Result<f64, NumericError> {
        (self.f)(t).map_err(|source| NumericError::Integrand { at: t, source })
    }

    #[allow(clippy::too_many_arguments)]
    fn refine(
        &self,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> Result<f64, NumericError> {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = self.eval(lm)?;
        let frm = self.eval(rm)?;
        let h = b - a;
        let left = h / 12.0 * (fa + 4.0 * flm + fm);
        let right = h / 12.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        let floor = 64.0 * f64::EPSILON * (left.abs() + right.abs());
        if (depth >= MIN_DEPTH && delta.abs() <= 15.0 * tol.max(floor)) || m <= a || m >= b {
            return Ok(left + right + delta / 15.0);
        }
        if depth >= MAX_DEPTH {
            return Err(NumericError::DepthCap { lo: a, hi: b });
        }
        let l = self.refine(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1)?;
        let r = self.refine(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1)?;
        Ok(l + r)
    }
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` with absolute
/// tolerance `tol`, estimated by comparing nested Simpson rules. Reversed
/// limits give the negated integral.
pub fn quad_adaptive<F>(f: F, a: f64, b: f64, tol: f64) -> Result<f64, NumericError>
where
    F: Fn(f64) -> Result<f64, EvalError>,
{
    if a == b {
        return Ok(0.0);
    }
    if b < a {
        return quad_adaptive(f, b, a, tol).map(|v| -v);
    }
    let ctx = Ctx { f: &f };
    // a few initial panels so narrow features are not skipped
    const PANELS: usize = 4;
    let width = (b - a) / PANELS as f64;
    let mut total = 0.0;
    let mut lo = a;
    let mut flo = ctx.eval(a)?;
    for i in 0..PANELS {
        let hi = if i + 1 == PANELS { b } else { a + width * (i + 1) as f64 };
        let mid = 0.5 * (lo + hi);
        let fm = ctx.eval(mid)?;
        let fhi = ctx.eval(hi)?;
        let whole = (hi - lo) / 6.0 * (flo + 4.0 * fm + fhi);
        total += ctx.refine(lo, hi, flo, fm, fhi, whole, tol / PANELS as f64, 0)?;
        lo = hi;
        flo = fhi;
    }
    Ok(total)
}
