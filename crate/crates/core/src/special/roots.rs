use crate::error::{EvalError, NumericError};

/// Bracketed root of `f` on `[lo, hi]`: secant (Illinois-weighted regula
/// falsi) steps with a bisection fallback whenever the secant stalls.
///
/// Stops when `|f(root)| <= tol` or the bracket is narrower than `1e-14`
/// (relative to the root's magnitude, floored at 1).
pub fn find_root<F>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64, NumericError>
where
    F: Fn(f64) -> Result<f64, EvalError>,
{
    let eval = |t: f64| f(t).map_err(|source| NumericError::RootEval { at: t, source });
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut fa = eval(a)?;
    if fa.abs() <= tol {
        return Ok(a);
    }
    if a == b {
        return Err(NumericError::NoSignChange { lo: a, hi: b, flo: fa, fhi: fa });
    }
    let mut fb = eval(b)?;
    if fb.abs() <= tol {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(NumericError::NoSignChange { lo: a, hi: b, flo: fa, fhi: fb });
    }
    // which end was retained last time, for the Illinois halving
    let mut side = 0i8;
    for _ in 0..400 {
        let width = b - a;
        if width <= 1e-14 * a.abs().max(b.abs()).max(1.0) {
            break;
        }
        let mut c = (a * fb - b * fa) / (fb - fa);
        if !(c > a && c < b) {
            c = 0.5 * (a + b);
        }
        let fc = eval(c)?;
        if fc.abs() <= tol {
            return Ok(c);
        }
        if fc.signum() == fb.signum() {
            b = c;
            fb = fc;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = c;
            fa = fc;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
        // force progress if the bracket shrinks too slowly
        if b - a > 0.5 * width {
            let m = 0.5 * (a + b);
            let fm = eval(m)?;
            if fm.abs() <= tol {
                return Ok(m);
            }
            if fm.signum() == fa.signum() {
                a = m;
                fa = fm;
            } else {
                b = m;
                fb = fm;
            }
            side = 0;
        }
    }
    Ok(if fa.abs() < fb.abs() { a } else { b })
}
