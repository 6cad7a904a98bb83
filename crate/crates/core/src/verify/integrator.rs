//! Dormand–Prince 5(4) with PI step-size control and cubic Hermite dense
//! output.

use crate::error::{EvalError, IntegrateError};

/// Magnitude beyond which a state component counts as a blow-up.
pub const BLOW_UP: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    /// Largest allowed step; `0` means the whole interval.
    pub max_step: f64,
}

impl StepControl {
    pub fn new(tol: f64) -> Self {
        StepControl {
            rtol: tol,
            atol: tol,
            max_steps: 500_000,
            max_step: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct StepStats {
    pub steps: usize,
    pub rejections: usize,
    pub evaluations: usize,
}

/// Accepted step endpoints with their derivatives; interpolates between
/// them by cubic Hermite.
#[derive(Debug, Clone)]
pub struct DenseSolution<const N: usize> {
    pub xs: Vec<f64>,
    pub ys: Vec<[f64; N]>,
    pub fs: Vec<[f64; N]>,
    pub stats: StepStats,
}

impl<const N: usize> DenseSolution<N> {
    pub fn end(&self) -> (f64, [f64; N]) {
        let i = self.xs.len() - 1;
        (self.xs[i], self.ys[i])
    }

    /// State at `x` (must lie within the integrated range).
    pub fn at(&self, x: f64) -> [f64; N] {
        let n = self.xs.len();
        if n == 1 {
            return self.ys[0];
        }
        let forward = self.xs[n - 1] >= self.xs[0];
        // index of the segment [xs[i], xs[i+1]] containing x
        let i = if forward {
            self.xs.partition_point(|&s| s <= x)
        } else {
            self.xs.partition_point(|&s| s >= x)
        }
        .clamp(1, n - 1)
            - 1;
        let (x0, x1) = (self.xs[i], self.xs[i + 1]);
        let h = x1 - x0;
        if x == x1 {
            return self.ys[i + 1];
        }
        let t = (x - x0) / h;
        let h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
        let h10 = t * (1.0 - t) * (1.0 - t);
        let h01 = t * t * (3.0 - 2.0 * t);
        let h11 = t * t * (t - 1.0);
        let mut out = [0.0; N];
        for (j, o) in out.iter_mut().enumerate() {
            *o = h00 * self.ys[i][j]
                + h10 * h * self.fs[i][j]
                + h01 * self.ys[i + 1][j]
                + h11 * h * self.fs[i + 1][j];
        }
        out
    }
}

// Dormand–Prince tableau
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn combo<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        for j in 0..N {
            out[j] += h * c * k[j];
        }
    }
    out
}

fn finite<const N: usize>(v: &[f64; N]) -> bool {
    v.iter().all(|x| x.is_finite())
}

enum Stage<const N: usize> {
    Ok([f64; N]),
    /// trial point outside the rhs domain or non-finite: shrink and retry
    Bad(EvalError),
}

/// Integrate `y' = f(x, y)` from `(x0, y0)` to `x1` (either direction).
pub fn integrate<const N: usize, F>(
    f: F,
    x0: f64,
    y0: [f64; N],
    x1: f64,
    ctl: &StepControl,
) -> Result<DenseSolution<N>, IntegrateError>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N], EvalError>,
{
    integrate_with_stops(f, x0, y0, x1, ctl, &[])
}

/// As [`integrate`], with every abscissa in `stops` (ordered from `x0`
/// towards `x1`) hit exactly by a step endpoint, so the dense output is
/// exact there rather than interpolated.
pub fn integrate_with_stops<const N: usize, F>(
    mut f: F,
    x0: f64,
    y0: [f64; N],
    x1: f64,
    ctl: &StepControl,
    stops: &[f64],
) -> Result<DenseSolution<N>, IntegrateError>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N], EvalError>,
{
    let mut stats = StepStats::default();
    let mut call = |x: f64, y: &[f64; N], stats: &mut StepStats| -> Stage<N> {
        stats.evaluations += 1;
        match f(x, y) {
            Ok(v) if finite(&v) => Stage::Ok(v),
            Ok(_) => Stage::Bad(EvalError::domain("non-finite derivative", "rhs")),
            Err(e) => Stage::Bad(e),
        }
    };
    if !finite(&y0) {
        return Err(IntegrateError::Degenerate("non-finite initial state".into()));
    }
    let f0 = match call(x0, &y0, &mut stats) {
        Stage::Ok(v) => v,
        Stage::Bad(source) => return Err(IntegrateError::Rhs { at: x0, source }),
    };
    let mut sol = DenseSolution {
        xs: vec![x0],
        ys: vec![y0],
        fs: vec![f0],
        stats,
    };
    if x1 == x0 {
        sol.stats = stats;
        return Ok(sol);
    }
    let dir = (x1 - x0).signum();
    let span = (x1 - x0).abs();
    let max_step = if ctl.max_step > 0.0 { ctl.max_step.min(span) } else { span };

    let scale = |y: &[f64; N], j: usize| ctl.atol + ctl.rtol * y[j].abs();
    let norm = |v: &[f64; N], y: &[f64; N]| -> f64 {
        (v.iter().enumerate().map(|(j, e)| (e / scale(y, j)).powi(2)).sum::<f64>() / N as f64).sqrt()
    };

    // initial step (Hairer–Wanner heuristic)
    let mut h = {
        let d0 = norm(&y0, &y0);
        let d1 = norm(&f0, &y0);
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        let h0 = h0.min(max_step);
        let y1 = combo(&y0, dir * h0, &[(1.0, &f0)]);
        let h1 = match call(x0 + dir * h0, &y1, &mut stats) {
            Stage::Ok(f1) => {
                let diff: [f64; N] = std::array::from_fn(|j| (f1[j] - f0[j]) / h0);
                let d2 = norm(&diff, &y0);
                if d1.max(d2) <= 1e-15 {
                    (h0 * 1e-3).max(1e-6)
                } else {
                    (0.01 / d1.max(d2)).powf(0.2)
                }
            }
            Stage::Bad(_) => h0 * 0.1,
        };
        (100.0 * h0).min(h1).min(max_step)
    };

    let (mut x, mut y, mut k1) = (x0, y0, f0);
    let mut err_prev: f64 = 1e-4;
    const BETA: f64 = 0.04;
    const ALPHA: f64 = 0.2 - 0.75 * BETA;
    let mut last_reject = false;
    let mut next_stop = 0;

    loop {
        if (x1 - x).abs() <= 1e-14 * x1.abs().max(1.0) {
            break;
        }
        if stats.steps + stats.rejections >= ctl.max_steps {
            sol.stats = stats;
            return Err(IntegrateError::TooManySteps { at: x });
        }
        while next_stop < stops.len() && (stops[next_stop] - x) * dir <= 1e-14 * x.abs().max(1.0) {
            next_stop += 1;
        }
        let target = match stops.get(next_stop) {
            Some(&s) if (x1 - s) * dir > 0.0 => s,
            _ => x1,
        };
        let remaining = (target - x).abs();
        let mut hs = h.min(remaining).min(max_step);
        // avoid leaving a sliver
        if remaining - hs < 1e-10 * remaining {
            hs = remaining;
        }
        if hs <= 1e-14 * x.abs().max(1.0) {
            sol.stats = stats;
            return Err(IntegrateError::StepUnderflow { at: x, h: hs });
        }
        let hd = dir * hs;

        let attempt = (|| {
            let y2 = combo(&y, hd, &[(A21, &k1)]);
            let k2 = match call(x + C2 * hd, &y2, &mut stats) { Stage::Ok(v) => v, Stage::Bad(e) => return Err(e) };
            let y3 = combo(&y, hd, &[(A31, &k1), (A32, &k2)]);
            let k3 = match call(x + C3 * hd, &y3, &mut stats) { Stage::Ok(v) => v, Stage::Bad(e) => return Err(e) };
            let y4 = combo(&y, hd, &[(A41, &k1), (A42, &k2), (A43, &k3)]);
            let k4 = match call(x + C4 * hd, &y4, &mut stats) { Stage::Ok(v) => v, Stage::Bad(e) => return Err(e) };
            let y5 = combo(&y, hd, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]);
            let k5 = match call(x + C5 * hd, &y5, &mut stats) { Stage::Ok(v) => v, Stage::Bad(e) => return Err(e) };
            let y6 = combo(&y, hd, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]);
            let k6 = match call(x + hd, &y6, &mut stats) { Stage::Ok(v) => v, Stage::Bad(e) => return Err(e) };
            let ynew = combo(&y, hd, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
            let k7 = match call(x + hd, &ynew, &mut stats) { Stage::Ok(v) => v, Stage::Bad(e) => return Err(e) };
            let errv: [f64; N] = std::array::from_fn(|j| {
                hd * (E1 * k1[j] + E3 * k3[j] + E4 * k4[j] + E5 * k5[j] + E6 * k6[j] + E7 * k7[j])
            });
            Ok((ynew, k7, errv))
        })();

        let (ynew, k7, errv) = match attempt {
            Ok(v) => v,
            Err(source) => {
                stats.rejections += 1;
                h = hs * 0.25;
                if h <= 1e-14 * x.abs().max(1.0) {
                    sol.stats = stats;
                    return Err(IntegrateError::Rhs { at: x, source });
                }
                last_reject = true;
                continue;
            }
        };
        let sc: [f64; N] = std::array::from_fn(|j| y[j].abs().max(ynew[j].abs()));
        let err = (errv
            .iter()
            .enumerate()
            .map(|(j, e)| (e / (ctl.atol + ctl.rtol * sc[j])).powi(2))
            .sum::<f64>()
            / N as f64)
            .sqrt();

        if err <= 1.0 {
            stats.steps += 1;
            x = if hs == remaining { target } else { x + hd };
            y = ynew;
            k1 = k7;
            sol.xs.push(x);
            sol.ys.push(y);
            sol.fs.push(k1);
            let mag = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if mag > BLOW_UP {
                sol.stats = stats;
                return Err(IntegrateError::BlowUp { at: x, magnitude: mag });
            }
            let err_c = err.max(1e-10);
            let mut fac = 0.9 * err_c.powf(-ALPHA) * err_prev.powf(BETA);
            fac = fac.clamp(0.2, 10.0);
            if last_reject {
                fac = fac.min(1.0);
            }
            h = hs * fac;
            err_prev = err_c;
            last_reject = false;
        } else {
            stats.rejections += 1;
            let fac = (0.9 * err.powf(-ALPHA)).clamp(0.2, 1.0);
            h = hs * fac;
            last_reject = true;
        }
    }
    sol.stats = stats;
    Ok(sol)
}
