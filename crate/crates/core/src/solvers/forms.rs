use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::expr::{num, var, Expr};

use super::elliptic::{recognize_in, EllipticPayload};

const PROBE_SEED: u64 = 0x5eed_f0e5;
const NODE_CAP: usize = 20_000;
/// Highest power of y looked for; enough for Bernoulli exponents up to 6.
const MAX_DEG: usize = 6;

/// Structural shape of `y' = rhs(x, y)`, with coefficients as expressions in `x`.
#[derive(Debug, Clone)]
pub enum FirstOrderForm {
    /// `rhs = x(x) · y(y)`
    Separable { x: Expr, y: Expr },
    /// `rhs = p y + q`
    Linear { p: Expr, q: Expr },
    /// `rhs = p y + q y^n`
    Bernoulli { n: i32, p: Expr, q: Expr },
    /// `rhs = f y² + g y + h`
    Riccati { f: Expr, g: Expr, h: Expr },
    AbelKind1 { f3: Expr, f2: Expr, f1: Expr, f0: Expr },
    /// `rhs = (f3 y³ + f2 y² + f1 y + f0) / (g1 y + g0)`
    AbelKind2 { f3: Expr, f2: Expr, f1: Expr, f0: Expr, g1: Expr, g0: Expr },
    /// `rhs = ratio(y/x)`, `ratio` an expression in `w`.
    Homogeneous { ratio: Expr },
    EllipticIntegral(EllipticPayload),
    General,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FormTag {
    Separable,
    Linear,
    Bernoulli(i32),
    Riccati,
    AbelKind1,
    AbelKind2,
    Homogeneous,
    EllipticIntegral,
    General,
}

impl fmt::Display for FormTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FormTag::Bernoulli(n) => write!(f, "Bernoulli({n})"),
            other => write!(f, "{other:?}"),
        }
    }
}

impl FirstOrderForm {
    pub fn tag(&self) -> FormTag {
        match self {
            FirstOrderForm::Separable { .. } => FormTag::Separable,
            FirstOrderForm::Linear { .. } => FormTag::Linear,
            FirstOrderForm::Bernoulli { n, .. } => FormTag::Bernoulli(*n),
            FirstOrderForm::Riccati { .. } => FormTag::Riccati,
            FirstOrderForm::AbelKind1 { .. } => FormTag::AbelKind1,
            FirstOrderForm::AbelKind2 { .. } => FormTag::AbelKind2,
            FirstOrderForm::Homogeneous { .. } => FormTag::Homogeneous,
            FirstOrderForm::EllipticIntegral(_) => FormTag::EllipticIntegral,
            FirstOrderForm::General => FormTag::General,
        }
    }

    /// The right-hand side rebuilt from the payload, in `(x, y)`.
    pub fn reassemble(&self) -> Option<Expr> {
        let y = var("y");
        let poly = |cs: &[&Expr]| {
            cs.iter()
                .enumerate()
                .fold(num(0.0), |acc, (k, c)| acc + (*c).clone() * y.clone().powf(k as f64))
        };
        let e = match self {
            FirstOrderForm::Separable { x, y } => x.clone() * y.clone(),
            FirstOrderForm::Linear { p, q } => p.clone() * y + q.clone(),
            FirstOrderForm::Bernoulli { n, p, q } => {
                p.clone() * y.clone() + q.clone() * y.powf(*n as f64)
            }
            FirstOrderForm::Riccati { f, g, h } => poly(&[h, g, f]),
            FirstOrderForm::AbelKind1 { f3, f2, f1, f0 } => poly(&[f0, f1, f2, f3]),
            FirstOrderForm::AbelKind2 { f3, f2, f1, f0, g1, g0 } => {
                poly(&[f0, f1, f2, f3]) / poly(&[g0, g1])
            }
            FirstOrderForm::Homogeneous { ratio } => ratio.substitute("w", &(y / var("x"))),
            FirstOrderForm::EllipticIntegral(p) => p
                .h1
                .substitute(&p.indep, &var("x"))
                .clone()
                * p.r.substitute(&p.dep, &y),
            FirstOrderForm::General => return None,
        };
        Some(e.simplify())
    }
}

/// Rectangle in the `(x, y)` plane from which classification probes are drawn.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeRegion {
    pub x: (f64, f64),
    pub y: (f64, f64),
}

impl Default for ProbeRegion {
    fn default() -> Self {
        ProbeRegion { x: (0.5, 1.5), y: (0.5, 1.5) }
    }
}

impl ProbeRegion {
    /// A small box around an anchor point.
    pub fn around(x0: f64, y0: f64) -> Self {
        let hx = 0.25 * x0.abs().max(1.0);
        let hy = 0.25 * y0.abs().max(1.0);
        ProbeRegion { x: (x0 - hx, x0 + hx), y: (y0 - hy, y0 + hy) }
    }

    /// Seeded random points of the region at which `e` evaluates finitely.
    pub(crate) fn points(&self, e: &Expr, want: usize) -> Vec<(f64, f64)> {
        let mut rng = ChaCha8Rng::seed_from_u64(PROBE_SEED);
        let mut out = Vec::with_capacity(want);
        for _ in 0..want * 8 {
            if out.len() == want {
                break;
            }
            let x = rng.gen_range(self.x.0..=self.x.1);
            let y = rng.gen_range(self.y.0..=self.y.1);
            if matches!(e.eval(&[("x", x), ("y", y)]), Ok(v) if v.is_finite()) {
                out.push((x, y));
            }
        }
        out
    }
}

fn close(a: f64, b: f64, scale: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * scale
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * i as f64)
}

/// Coefficients `c_k(other)` with `e = Σ c_k v^k`, read off from
/// `v`-derivatives at an expansion point and confirmed at the probes
/// (`(other, v)` pairs). Vanishing coefficients come back as literal zeros.
pub(crate) fn poly_coefficients(
    e: &Expr,
    v: &str,
    other: &str,
    max_deg: usize,
    pts: &[(f64, f64)],
) -> Option<Vec<Expr>> {
    if pts.is_empty() {
        return None;
    }
    let mut derivs = vec![e.clone()];
    for _ in 0..max_deg {
        let d = derivs.last()?.differentiate(v).simplify();
        if d.node_count() > NODE_CAP {
            return None;
        }
        derivs.push(d);
    }
    for ys in [0.0, 1.0, -1.0, 0.5, 2.0] {
        let ds: Vec<Expr> = derivs.iter().map(|d| d.substitute(v, &num(ys)).simplify()).collect();
        let finite = pts.iter().all(|&(t, _)| {
            ds.iter().all(|d| matches!(d.eval(&[(other, t)]), Ok(x) if x.is_finite()))
        });
        if !finite {
            continue;
        }
        let cs: Vec<Expr> = (0..=max_deg)
            .map(|k| {
                (k..=max_deg)
                    .filter_map(|j| {
                        let w = binom(j, k) * (-ys).powi((j - k) as i32) / factorial(j);
                        (w != 0.0).then(|| ds[j].clone() * w)
                    })
                    .fold(num(0.0), |acc, t| acc + t)
                    .simplify()
            })
            .collect();
        let mut table = Vec::with_capacity(pts.len());
        let mut ok = true;
        for &(t, y) in pts {
            let Ok(val) = e.eval(&[(other, t), (v, y)]) else {
                ok = false;
                break;
            };
            let terms: Vec<f64> = cs
                .iter()
                .enumerate()
                .map(|(k, c)| c.eval(&[(other, t)]).unwrap_or(f64::NAN) * y.powi(k as i32))
                .collect();
            let sum: f64 = terms.iter().sum();
            let scale = val.abs() + terms.iter().map(|x| x.abs()).sum::<f64>();
            if !sum.is_finite() || !close(val, sum, scale, 1e-9) {
                ok = false;
                break;
            }
            table.push((terms, scale));
        }
        if !ok {
            continue;
        }
        let trimmed = cs
            .into_iter()
            .enumerate()
            .map(|(k, c)| {
                let negligible = table.iter().all(|(terms, scale)| terms[k].abs() <= 1e-11 * scale);
                if c.is_num(0.0) || negligible {
                    num(0.0)
                } else {
                    c
                }
            })
            .collect();
        return Some(trimmed);
    }
    None
}

fn degree(cs: &[Expr]) -> Option<usize> {
    cs.iter().rposition(|c| !c.is_num(0.0))
}

fn separable(rhs: &Expr, pts: &[(f64, f64)]) -> Option<FirstOrderForm> {
    let (dx, dy) = (rhs.depends_on("x"), rhs.depends_on("y"));
    if !dx {
        return Some(FirstOrderForm::Separable { x: num(1.0), y: rhs.clone() });
    }
    if !dy {
        return Some(FirstOrderForm::Separable { x: rhs.clone(), y: num(1.0) });
    }
    let rx = rhs.differentiate("x").simplify();
    let ry = rhs.differentiate("y").simplify();
    let rxy = rx.differentiate("y").simplify();
    let mut best: Option<(f64, f64, f64)> = None;
    let mut used = 0;
    for &(x, y) in pts {
        let at = [("x", x), ("y", y)];
        let vals: Result<Vec<f64>, _> = [rhs, &rx, &ry, &rxy].iter().map(|e| e.eval(&at)).collect();
        let Ok(v) = vals else { continue };
        let (a, b) = (v[0] * v[3], v[1] * v[2]);
        if !a.is_finite() || !b.is_finite() || !close(a, b, a.abs() + b.abs(), 1e-8) {
            return None;
        }
        used += 1;
        if best.map_or(true, |(_, _, r)| v[0].abs() > r.abs()) {
            best = Some((x, y, v[0]));
        }
    }
    let (xs, ys, r) = best?;
    if used < 4 || r == 0.0 {
        return None;
    }
    let x_part = (rhs.substitute("y", &num(ys)) / r).simplify();
    let y_part = rhs.substitute("x", &num(xs)).simplify();
    Some(FirstOrderForm::Separable { x: x_part, y: y_part })
}

fn polynomial_forms(rhs: &Expr, pts: &[(f64, f64)], out: &mut Vec<FirstOrderForm>) {
    let swapped: Vec<(f64, f64)> = pts.to_vec();
    let Some(cs) = poly_coefficients(rhs, "y", "x", MAX_DEG, &swapped) else {
        return;
    };
    let Some(deg) = degree(&cs) else {
        // rhs ≡ 0
        out.push(FirstOrderForm::Linear { p: num(0.0), q: num(0.0) });
        return;
    };
    if deg <= 1 {
        out.push(FirstOrderForm::Linear { p: cs[1].clone(), q: cs[0].clone() });
        return;
    }
    let middle_zero = cs[2..deg].iter().all(|c| c.is_num(0.0));
    if cs[0].is_num(0.0) && middle_zero {
        out.push(FirstOrderForm::Bernoulli {
            n: deg as i32,
            p: cs[1].clone(),
            q: cs[deg].clone(),
        });
    }
    match deg {
        2 => out.push(FirstOrderForm::Riccati {
            f: cs[2].clone(),
            g: cs[1].clone(),
            h: cs[0].clone(),
        }),
        3 => out.push(FirstOrderForm::AbelKind1 {
            f3: cs[3].clone(),
            f2: cs[2].clone(),
            f1: cs[1].clone(),
            f0: cs[0].clone(),
        }),
        _ => {}
    }
}

fn abel_second_kind(rhs: &Expr, pts: &[(f64, f64)]) -> Option<FirstOrderForm> {
    let (n, d) = match rhs {
        Expr::Div(n, d) => ((**n).clone(), (**d).clone()),
        Expr::Neg(inner) => match &**inner {
            Expr::Div(n, d) => (-(**n).clone(), (**d).clone()),
            _ => return None,
        },
        _ => return None,
    };
    let nc = poly_coefficients(&n, "y", "x", 3, pts)?;
    let dc = poly_coefficients(&d, "y", "x", 1, pts)?;
    if dc[1].is_num(0.0) || degree(&nc).is_none() {
        return None;
    }
    Some(FirstOrderForm::AbelKind2 {
        f3: nc[3].clone(),
        f2: nc[2].clone(),
        f1: nc[1].clone(),
        f0: nc[0].clone(),
        g1: dc[1].clone(),
        g0: dc[0].clone(),
    })
}

fn homogeneous(rhs: &Expr, pts: &[(f64, f64)]) -> Option<FirstOrderForm> {
    let mut used = 0;
    for &(x, y) in pts {
        let Ok(base) = rhs.eval(&[("x", x), ("y", y)]) else { continue };
        for t in [0.7, 1.3] {
            let Ok(scaled) = rhs.eval(&[("x", t * x), ("y", t * y)]) else { continue };
            if !close(base, scaled, base.abs() + scaled.abs(), 1e-9) {
                return None;
            }
            used += 1;
        }
    }
    if used < 4 {
        return None;
    }
    let ratio = rhs.substitute_all(&[("x", num(1.0)), ("y", var("w"))]).simplify();
    Some(FirstOrderForm::Homogeneous { ratio })
}

/// Every form `rhs` matches, most specific first (Separable, Linear,
/// Bernoulli, Riccati, Abel, Homogeneous, EllipticIntegral); `General` last.
pub fn matching_forms(rhs: &Expr, region: ProbeRegion) -> Vec<FirstOrderForm> {
    let rhs = rhs.simplify();
    let pts = region.points(&rhs, 24);
    let mut out = Vec::new();
    if pts.len() >= 6 {
        out.extend(separable(&rhs, &pts));
        polynomial_forms(&rhs, &pts, &mut out);
        out.extend(abel_second_kind(&rhs, &pts));
        if region.x.0 > 0.0 || region.x.1 < 0.0 {
            out.extend(homogeneous(&rhs, &pts));
        }
        if let Some(p) = recognize_in(&rhs, "x", "y", &pts) {
            out.push(FirstOrderForm::EllipticIntegral(p));
        }
    }
    out.push(FirstOrderForm::General);
    out
}

/// The most specific form of `y' = rhs(x, y)` over the default probe region.
pub fn classify_first_order(rhs: &Expr) -> FirstOrderForm {
    classify_near(rhs, ProbeRegion::default())
}

pub fn classify_near(rhs: &Expr, region: ProbeRegion) -> FirstOrderForm {
    matching_forms(rhs, region).swap_remove(0)
}
