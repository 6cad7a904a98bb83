//! Helpers shared by the integration tests.
#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use varparam::expr::{num, var, Expr, Func, JacobiKind};

/// Random expression in `x`, `y` that is smooth on `[0.5, 1.5]²`: divisions
/// and logarithms only see arguments bounded away from zero, powers with a
/// variable exponent only see positive bases.
pub fn random_expr(rng: &mut ChaCha8Rng, depth: u32) -> Expr {
    if depth == 0 || rng.gen_bool(0.2) {
        return match rng.gen_range(0..3) {
            0 => var("x"),
            1 => var("y"),
            _ => num((rng.gen_range(-2.0..2.0f64) * 100.0).round() / 100.0),
        };
    }
    let sub = |rng: &mut ChaCha8Rng| random_expr(rng, depth - 1);
    let positive = |e: Expr| num(1.0) + e.powf(2.0);
    match rng.gen_range(0..13) {
        0 => sub(rng) + sub(rng),
        1 => sub(rng) - sub(rng),
        2 | 3 => sub(rng) * sub(rng),
        4 => sub(rng) / positive(sub(rng)),
        5 => sub(rng).powf(rng.gen_range(2..=3) as f64),
        6 => positive(sub(rng)).pow(sub(rng) * 0.5),
        7 => Expr::func(Func::Sin, sub(rng)),
        8 => Expr::func(Func::Cos, sub(rng)),
        9 => Expr::func(Func::Exp, Expr::func(Func::Sin, sub(rng))),
        10 => Expr::func(Func::Ln, positive(sub(rng))),
        11 => Expr::func(Func::Atan, sub(rng)),
        _ => {
            let kind = [JacobiKind::Sn, JacobiKind::Cn, JacobiKind::Dn][rng.gen_range(0..3)];
            Expr::jacobi(kind, [0.3, 0.7][rng.gen_range(0..2)], sub(rng))
        }
    }
}

pub fn random_point(rng: &mut ChaCha8Rng) -> (f64, f64) {
    (rng.gen_range(0.5..1.5), rng.gen_range(0.5..1.5))
}

/// Five-point central difference of `e` in `v` at `(x, y)`.
pub fn central_difference(e: &Expr, v: &str, x: f64, y: f64) -> Option<f64> {
    let at = |d: f64| {
        let (xs, ys) = if v == "x" { (x + d, y) } else { (x, y + d) };
        e.eval(&[("x", xs), ("y", ys)]).ok().filter(|f| f.is_finite())
    };
    let h = 2e-4;
    let (m2, m1, p1, p2) = (at(-2.0 * h)?, at(-h)?, at(h)?, at(2.0 * h)?);
    Some((m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h))
}

/// Five-point difference at `h` and `h/2`; `None` unless the two agree to
/// 1e-7, i.e. the stencil actually resolves `e` near the point.
pub fn resolved_difference(e: &Expr, v: &str, x: f64, y: f64) -> Option<f64> {
    let at = |d: f64| {
        let (xs, ys) = if v == "x" { (x + d, y) } else { (x, y + d) };
        e.eval(&[("x", xs), ("y", ys)]).ok().filter(|f| f.is_finite())
    };
    let fd = |h: f64| -> Option<f64> {
        let (m2, m1, p1, p2) = (at(-2.0 * h)?, at(-h)?, at(h)?, at(2.0 * h)?);
        Some((m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h))
    };
    let (coarse, fine) = (fd(2e-4)?, fd(1e-4)?);
    (rel_err(coarse, fine) <= 1e-7).then_some(fine)
}

/// `|a − b| / max(|a|, |b|, 1)`.
pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}
