use std::sync::Arc;

use crate::error::{EvalError, SolveError};
use crate::expr::{antiderive, num, Antiderivative, Expr};
use crate::special::find_root;
use crate::verify::integrator::{integrate_with_stops, StepControl};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CanonicalKind {
    /// `w'_s = w³ + k(s)`
    Cubic,
    /// `w w'_s = w + k(s)`
    Quadratic,
}

/// One change of variables. Value maps act on the dependent variable at a
/// fixed `t`; `Reparam` changes the independent variable only.
#[derive(Debug, Clone)]
pub enum StepMap {
    /// `u = 1/(g1 y + g0)`
    Reciprocal { g1: Expr, g0: Expr },
    /// `z = g1 y + g0`
    Affine { g1: Expr, g0: Expr },
    /// `v = u + s(t)`
    Shift { s: Expr },
    /// `w = v / e(t)`
    Scale { e: Expr },
    /// `s = ∫ h dt`
    Reparam { s: Arc<Antiderivative> },
}

#[derive(Debug, Clone)]
pub struct Substitution {
    pub description: String,
    pub map: StepMap,
    /// Coefficients of the equation obtained after this step, in `x`.
    pub coefficients: Vec<(String, Expr)>,
}

fn at(e: &Expr, t: f64) -> Result<f64, EvalError> {
    e.eval(&[("x", t)])
}

impl Substitution {
    pub fn forward(&self, t: f64, val: f64) -> Result<(f64, f64), EvalError> {
        Ok(match &self.map {
            StepMap::Reciprocal { g1, g0 } => (t, 1.0 / (at(g1, t)? * val + at(g0, t)?)),
            StepMap::Affine { g1, g0 } => (t, at(g1, t)? * val + at(g0, t)?),
            StepMap::Shift { s } => (t, val + at(s, t)?),
            StepMap::Scale { e } => (t, val / at(e, t)?),
            StepMap::Reparam { s } => (s.value(t)?, val),
        })
    }

    /// Inverse of a value map at the original abscissa `t`; `Reparam` is
    /// the identity here (see [`CanonicalChain::t_of_s`]).
    pub fn inverse_value(&self, t: f64, val: f64) -> Result<f64, EvalError> {
        Ok(match &self.map {
            StepMap::Reciprocal { g1, g0 } => (1.0 - at(g0, t)? * val) / (at(g1, t)? * val),
            StepMap::Affine { g1, g0 } => (val - at(g0, t)?) / at(g1, t)?,
            StepMap::Shift { s } => val - at(s, t)?,
            StepMap::Scale { e } => val * at(e, t)?,
            StepMap::Reparam { .. } => val,
        })
    }
}

/// The sequence of substitutions taking a second-kind Abel equation in
/// `(x, y)` to a canonical form in `(s, w)`.
#[derive(Debug, Clone)]
pub struct CanonicalChain {
    pub kind: CanonicalKind,
    pub steps: Vec<Substitution>,
    /// Canonical coefficient as a function of the original abscissa.
    pub k: Expr,
    pub s_of_t: Arc<Antiderivative>,
    pub interval: (f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundTrip {
    pub max_deviation: f64,
    pub s_end: f64,
}

impl CanonicalChain {
    pub fn forward(&self, t: f64, y: f64) -> Result<(f64, f64), EvalError> {
        let mut state = (t, y);
        for step in &self.steps {
            let (nt, nv) = step.forward(t, state.1)?;
            state = (if matches!(step.map, StepMap::Reparam { .. }) { nt } else { state.0 }, nv);
        }
        Ok(state)
    }

    pub fn t_of_s(&self, s: f64) -> Result<f64, SolveError> {
        let (a, b) = self.interval;
        let span = b - a;
        let (lo, hi) = (a - 0.05 * span, b + 0.05 * span);
        Ok(find_root(|t| Ok(self.s_of_t.value(t)? - s), lo, hi, 1e-14)?)
    }

    pub fn inverse(&self, s: f64, w: f64) -> Result<(f64, f64), SolveError> {
        let t = self.t_of_s(s)?;
        Ok((t, self.inverse_at(t, w)?))
    }

    fn inverse_at(&self, t: f64, w: f64) -> Result<f64, EvalError> {
        self.steps.iter().rev().try_fold(w, |v, step| step.inverse_value(t, v))
    }

    /// Right-hand side of the canonical equation, `dw/ds`.
    pub fn canonical_rhs(&self, s: f64, w: f64) -> Result<f64, SolveError> {
        let k = at(&self.k, self.t_of_s(s)?)?;
        Ok(match self.kind {
            CanonicalKind::Cubic => w * w * w + k,
            CanonicalKind::Quadratic => (w + k) / w,
        })
    }

    /// Integrate `y' = original(x, y)` directly and through the canonical
    /// equation, pulled back on a 101-point grid; returns the largest
    /// absolute deviation. The canonical integration carries `t(s)` along
    /// as a second state (`dt/ds = 1/s'(t)`) to evaluate `k(s)`.
    pub fn round_trip(&self, original: &Expr, y0: f64, tol: f64) -> Result<RoundTrip, SolveError> {
        let (t0, t1) = self.interval;
        let ts: Vec<f64> = (0..=100).map(|i| t0 + (t1 - t0) * i as f64 / 100.0).collect();
        let direct = integrate_with_stops(
            |x, y: &[f64; 1]| Ok([original.eval(&[("x", x), ("y", y[0])])?]),
            t0,
            [y0],
            t1,
            &StepControl::new(tol),
            &ts,
        )
        .map_err(|e| SolveError::BlowUp(format!("direct route: {e}")))?;
        let ss: Vec<f64> = ts.iter().map(|&t| self.s_of_t.value(t)).collect::<Result<_, _>>()?;
        let (s0, w0) = self.forward(t0, y0)?;
        let s1 = ss[100];
        let ds = self.s_of_t.integrand();
        let canon = integrate_with_stops(
            |_s, st: &[f64; 2]| {
                let [t, w] = *st;
                let w_s = match self.kind {
                    CanonicalKind::Cubic => w.powi(3) + at(&self.k, t)?,
                    CanonicalKind::Quadratic => (w + at(&self.k, t)?) / w,
                };
                Ok([1.0 / at(ds, t)?, w_s])
            },
            s0,
            [t0, w0],
            s1,
            &StepControl::new(tol),
            &ss,
        )
        .map_err(|e| SolveError::BlowUp(format!("canonical route: {e}")))?;
        let mut worst: f64 = 0.0;
        for (&t, &s) in ts.iter().zip(&ss) {
            let y = self.inverse_at(t, canon.at(s)[1])?;
            worst = worst.max((y - direct.at(t)[0]).abs());
        }
        Ok(RoundTrip { max_deviation: worst, s_end: s1 })
    }
}

fn sign_constant(e: &Expr, name: &str, (a, b): (f64, f64)) -> Result<(), SolveError> {
    let err = || SolveError::Denominator { name: name.to_string() };
    let mut sign = 0.0;
    for i in 0..=100 {
        let t = a + (b - a) * i as f64 / 100.0;
        let v = at(e, t).map_err(|_| err())?;
        if v == 0.0 || !v.is_finite() || (sign != 0.0 && v.signum() != sign) {
            return Err(err());
        }
        sign = v.signum();
    }
    Ok(())
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn coeffs(names: &[&str], es: &[&Expr]) -> Vec<(String, Expr)> {
    names.iter().zip(es).map(|(n, e)| (n.to_string(), (*e).clone())).collect()
}

/// `y' = (f3 y³ + f2 y² + f1 y + f0)/(g1 y + g0)` to `w'_s = w³ + k(s)` on
/// `interval`, anchored at its left end.
pub fn abel2_cubic_to_canonical(
    f: [&Expr; 4],
    g1: &Expr,
    g0: &Expr,
    interval: (f64, f64),
) -> Result<CanonicalChain, SolveError> {
    let [f3, f2, f1, f0] = f;
    sign_constant(g1, "g1", interval)?;
    let fs = [f0, f1, f2, f3];
    let g1d = g1.differentiate("x").simplify();
    let g0d = g0.differentiate("x").simplify();
    // u' = −g1 Σ (f_i/g1^i) u^{3−i} (1 − g0 u)^i − (g1'/g1) u + (g1' g0/g1 − g0') u²
    let mut ft: Vec<Expr> = vec![num(0.0); 4];
    for (i, fi) in fs.iter().enumerate() {
        if fi.simplify().is_num(0.0) {
            continue;
        }
        for l in 0..=i {
            let c = binom(i, l) * if l % 2 == 0 { -1.0 } else { 1.0 };
            let term = g1.clone() * (*fi).clone() / g1.clone().powf(i as f64)
                * g0.clone().powf(l as f64)
                * c;
            ft[3 - i + l] = ft[3 - i + l].clone() + term;
        }
    }
    ft[1] = ft[1].clone() - g1d.clone() / g1.clone();
    ft[2] = ft[2].clone() + g1d * g0.clone() / g1.clone() - g0d;
    let ft: Vec<Expr> = ft.into_iter().map(|e| e.simplify()).collect();
    sign_constant(&ft[3], "f̃3", interval)?;
    let reciprocal = Substitution {
        description: "y = (1 - g0 u)/(g1 u)".into(),
        map: StepMap::Reciprocal { g1: g1.clone(), g0: g0.clone() },
        coefficients: coeffs(&["f̃3", "f̃2", "f̃1", "f̃0"], &[&ft[3], &ft[2], &ft[1], &ft[0]]),
    };

    let s = (ft[2].clone() / (ft[3].clone() * 3.0)).simplify();
    let sd = s.differentiate("x").simplify();
    let h1 = (ft[1].clone() - ft[2].clone() * s.clone() * 2.0 + ft[3].clone() * s.clone().powf(2.0) * 3.0)
        .simplify();
    let h0 = (ft[0].clone() - ft[1].clone() * s.clone() + ft[2].clone() * s.clone().powf(2.0)
        - ft[3].clone() * s.clone().powf(3.0)
        + sd)
        .simplify();
    let h3 = ft[3].clone();
    let shift = Substitution {
        description: "u = v - f̃2/(3 f̃3)".into(),
        map: StepMap::Shift { s },
        coefficients: coeffs(&["h3", "h1", "h0"], &[&h3, &h1, &h0]),
    };

    let e = antiderive(&h1, "x", interval.0).as_expr().exp().simplify();
    let h3t = (h3 * e.clone().powf(2.0)).simplify();
    let h0t = (h0 / e.clone()).simplify();
    let scale = Substitution {
        description: "v = E(t) w, E = exp(∫ h1 dt)".into(),
        map: StepMap::Scale { e },
        coefficients: coeffs(&["h̃3", "h̃0"], &[&h3t, &h0t]),
    };

    let s_of_t = antiderive(&h3t, "x", interval.0);
    let k = (h0t / h3t).simplify();
    let reparam = Substitution {
        description: "s = ∫ h̃3 dt".into(),
        map: StepMap::Reparam { s: s_of_t.clone() },
        coefficients: coeffs(&["k"], &[&k]),
    };
    Ok(CanonicalChain {
        kind: CanonicalKind::Cubic,
        steps: vec![reciprocal, shift, scale, reparam],
        k,
        s_of_t,
        interval,
    })
}

/// `y' = (f2 y² + f1 y + f0)/(g1 y + g0)` to `w w'_s = w + k(s)`.
pub fn abel2_quadratic_to_canonical(
    f: [&Expr; 3],
    g1: &Expr,
    g0: &Expr,
    interval: (f64, f64),
) -> Result<CanonicalChain, SolveError> {
    let [f2, f1, f0] = f.map(|e| e.clone());
    sign_constant(g1, "g1", interval)?;
    let g1d = g1.differentiate("x").simplify();
    let g0d = g0.differentiate("x").simplify();
    let (g1, g0) = (g1.clone(), g0.clone());
    let ft2 = (g1d.clone() / g1.clone() + f2.clone() / g1.clone()).simplify();
    let ft1 = (-(g1d * g0.clone() / g1.clone()) + g0d - f2.clone() * g0.clone() * 2.0 / g1.clone()
        + f1.clone())
    .simplify();
    let ft0 = (f2 * g0.clone().powf(2.0) / g1.clone() - f1 * g0.clone() + f0 * g1.clone()).simplify();
    sign_constant(&ft1, "f̃1", interval)?;
    let affine = Substitution {
        description: "y = (z - g0)/g1".into(),
        map: StepMap::Affine { g1, g0 },
        coefficients: coeffs(&["f̃2", "f̃1", "f̃0"], &[&ft2, &ft1, &ft0]),
    };
    let e = antiderive(&ft2, "x", interval.0).as_expr().exp().simplify();
    let h1 = (ft1 / e.clone()).simplify();
    let h0 = (ft0 / e.clone().powf(2.0)).simplify();
    let scale = Substitution {
        description: "z = E(x) w, E = exp(∫ f̃2 dx)".into(),
        map: StepMap::Scale { e },
        coefficients: coeffs(&["h̃1", "h̃0"], &[&h1, &h0]),
    };
    let s_of_t = antiderive(&h1, "x", interval.0);
    let k = (h0 / h1).simplify();
    let reparam = Substitution {
        description: "s = ∫ h̃1 dx".into(),
        map: StepMap::Reparam { s: s_of_t.clone() },
        coefficients: coeffs(&["k"], &[&k]),
    };
    Ok(CanonicalChain {
        kind: CanonicalKind::Quadratic,
        steps: vec![affine, scale, reparam],
        k,
        s_of_t,
        interval,
    })
}

/// Real root `Φ` of `(Φ − 2y)²(Φ + y) = a`, the invariant of
/// `K K' = K + 2y`; `None` where the Cardano radicand is negative.
pub fn cubic_invariant_root(y: f64, a: f64) -> Option<f64> {
    let disc = a * a - 4.0 * a * y.powi(3);
    if disc < 0.0 {
        return None;
    }
    let c = (-8.0 * y.powi(3) + 4.0 * a + 4.0 * disc.sqrt()).cbrt();
    if c == 0.0 {
        return (a == 0.0).then_some(2.0 * y);
    }
    Some(c / 2.0 + 2.0 * y * y / c + y)
}

/// Subintervals of `[lo, hi]` on which [`cubic_invariant_root`] is real,
/// with endpoints refined to 1e-12.
pub fn cubic_invariant_range(a: f64, lo: f64, hi: f64) -> Vec<(f64, f64)> {
    let ok = |y: f64| a * a - 4.0 * a * y.powi(3);
    let n = 1000;
    let mut out = Vec::new();
    let mut start: Option<f64> = None;
    let mut prev = lo;
    for i in 0..=n {
        let y = lo + (hi - lo) * i as f64 / n as f64;
        let good = ok(y) >= 0.0;
        let edge = || find_root(|t| Ok(ok(t)), prev, y, 1e-12).unwrap_or(y);
        match (good, start) {
            (true, None) => start = Some(if i == 0 { y } else { edge() }),
            (false, Some(s)) => {
                out.push((s, edge()));
                start = None;
            }
            _ => {}
        }
        prev = y;
    }
    if let Some(s) = start {
        out.push((s, hi));
    }
    out
}
