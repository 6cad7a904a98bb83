//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! Run with `cargo test -p varparam --test acceptance`.

mod common;

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use varparam::classes::{residual_expr, ClassDescriptor, ClassTag, InitialCondition};
use varparam::expr::{num, parse, var, Expr};
use varparam::reduction::{reduce, KRoute};
use varparam::solvers::{
    abel2_cubic_to_canonical, abel2_quadratic_to_canonical, cubic_invariant_root, solve_bernoulli, Anchor, FormTag,
};
use varparam::special::jacobi;
use varparam::verify::{
    generate_case, integrate_first_order, integrate_second_order, integrate_with_stops, run_comparison, StepControl,
    Verdict, VerifyOptions,
};

type Outcome = Result<String, String>;

fn px(s: &str) -> Expr {
    parse(s, &["x"]).unwrap()
}
fn py(s: &str) -> Expr {
    parse(s, &["y"]).unwrap()
}
fn pxy(s: &str) -> Expr {
    parse(s, &["x", "y"]).unwrap()
}
fn puv(s: &str) -> Expr {
    parse(s, &["u", "v"]).unwrap()
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect()
}

/// Scalar `y' = f(x, y)` sampled exactly at `xs`.
fn integrate_scalar(f: impl Fn(f64, f64) -> f64, x0: f64, y0: f64, xs: &[f64], tol: f64) -> Vec<f64> {
    let x1 = *xs.last().unwrap();
    let sol = integrate_with_stops(|x, y: &[f64; 1]| Ok([f(x, y[0])]), x0, [y0], x1, &StepControl::new(tol), xs)
        .expect("integration");
    xs.iter().map(|&x| sol.at(x)[0]).collect()
}

/// Class residual of an explicit candidate `y(x)` at `x`.
fn residual_of_closed(d: &ClassDescriptor, ic: &InitialCondition, y: &Expr, x: f64) -> f64 {
    let res = residual_expr(d, ic).unwrap();
    let yp = y.differentiate("x");
    let ypp = yp.differentiate("x");
    let at = |e: &Expr| e.eval(&[("x", x)]).unwrap();
    res.eval(&[("x", x), ("y", at(y)), ("p", at(&yp)), ("q", at(&ypp))]).unwrap()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let opts = VerifyOptions::default();
    let threads = std::thread::available_parallelism().map_or(4, |n| n.get());
    let jobs: Vec<(ClassTag, u64)> = [ClassTag::I, ClassTag::II, ClassTag::III, ClassTag::IV]
        .into_iter()
        .flat_map(|t| (0..100).map(move |s| (t, s)))
        .collect();
    let results: Vec<(ClassTag, u64, f64, f64, bool)> = std::thread::scope(|scope| {
        let chunks: Vec<_> = jobs
            .chunks(jobs.len().div_ceil(threads))
            .map(|chunk| {
                scope.spawn(move || {
                    chunk
                        .iter()
                        .map(|&(tag, seed)| {
                            let c = generate_case(tag, seed);
                            let rep = run_comparison(&c.descriptor, &c.ic, c.x1, &opts).report;
                            let r = rep.residual_sup.unwrap_or(f64::INFINITY);
                            let t = rep.trajectory_dev.unwrap_or(f64::INFINITY);
                            (tag, seed, r, t, rep.verdict == Verdict::Pass)
                        })
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        chunks.into_iter().flat_map(|h| h.join().unwrap()).collect()
    });
    let elapsed = start.elapsed().as_secs_f64();
    let mut per_class = Vec::new();
    for tag in [ClassTag::I, ClassTag::II, ClassTag::III, ClassTag::IV] {
        let mine: Vec<_> = results.iter().filter(|r| r.0 == tag).collect();
        let passed = mine.iter().filter(|r| r.4).count();
        let worst_r = mine.iter().map(|r| r.2).fold(0.0, f64::max);
        let worst_t = mine.iter().map(|r| r.3).fold(0.0, f64::max);
        per_class.push(format!("{tag}: {passed}/100 (res {worst_r:.1e}, dev {worst_t:.1e})"));
    }
    let failed: Vec<String> =
        results.iter().filter(|r| !r.4).take(5).map(|r| format!("{}#{}", r.0, r.1)).collect();
    let ok = failed.is_empty() && elapsed <= 60.0;
    let mut detail = format!("{}; {elapsed:.1} s", per_class.join(", "));
    if !failed.is_empty() {
        detail.push_str(&format!("; failing e.g. {}", failed.join(" ")));
    }
    check(ok, detail)
}

fn eqx10() -> ClassDescriptor {
    ClassDescriptor::class3(0, px("1/x"), puv("v*((v/u)^2 + 2*(v/u))")).with_factor_base(1.0)
}

fn criterion_2() -> Outcome {
    // A = 1 with y(1) = 0.3: K(y0) = y0²/(A − y0)
    let a = 1.0;
    let y0 = 0.3;
    let ic = InitialCondition::new(1.0, y0, y0 * y0 / (a - y0));
    let b = -a / y0 - y0.ln();
    let relation = |x: f64, y: f64| -a / y - y.ln() - x.ln() - b;
    let d = eqx10();
    let opts = VerifyOptions { integrator_tol: 1e-12, residual_tol: 1e-8, deviation_tol: 1e-8 };
    let cmp = run_comparison(&d, &ic, 1.8, &opts);
    let r = cmp.reduced.as_ref().ok_or("reduction failed")?;
    let closed = matches!(r.k.route, KRoute::Closed(_));
    let k_err = grid(0.2, 0.8, 30)
        .into_iter()
        .map(|y| (r.k.expr.eval(&[("y", y)]).unwrap() - y * y / (a - y)).abs())
        .fold(0.0, f64::max);
    let mut worst: f64 = 0.0;
    for t in [cmp.direct.as_ref().unwrap(), cmp.reduced_traj.as_ref().unwrap()] {
        for (&x, &y) in t.grid.iter().zip(&t.y) {
            worst = worst.max(relation(x, y).abs());
        }
    }
    let res = cmp.report.residual_sup.unwrap_or(f64::INFINITY);
    check(
        closed && k_err < 1e-10 && worst <= 1e-8 && res <= 1e-8 && cmp.report.verdict == Verdict::Pass,
        format!("K closed: {closed} (|K − y²/(A−y)| {k_err:.1e}), relation {worst:.1e}, residual {res:.1e}"),
    )
}

fn criterion_3() -> Outcome {
    // K' = K + K³, K(0) = 1, in the canonical variable x
    let k = solve_bernoulli(&num(1.0), &num(1.0), 3, Anchor::new(0.0, 1.0)).map_err(|e| e.to_string())?;
    let ys = grid(0.0, 0.3, 100);
    let numeric = integrate_scalar(|_, k| k + k.powi(3), 0.0, 1.0, &ys, 1e-13);
    let a = 2.0;
    let mut vs_rk: f64 = 0.0;
    let mut vs_paper: f64 = 0.0;
    for (&y, &kn) in ys.iter().zip(&numeric) {
        let kc = k.eval(&[("x", y)]).unwrap();
        vs_rk = vs_rk.max((kc - kn).abs());
        vs_paper = vs_paper.max((kc - (a * (-2.0 * y).exp() - 1.0).powf(-0.5)).abs());
    }

    // the second-order equation from (1, 0, 1) stays in y ∈ [0, 0.3] up to x ≈ 1.25
    let d = ClassDescriptor::class3(0, px("2/x"), puv("v*(v + v^3)")).with_factor_base(1.0);
    let ic = InitialCondition::new(1.0, 0.0, 1.0);
    let opts = VerifyOptions { integrator_tol: 1e-12, residual_tol: 1e-8, deviation_tol: 1e-8 };
    let cmp = run_comparison(&d, &ic, 1.25, &opts);
    let t = cmp.direct.as_ref().ok_or("direct route failed")?;
    // arctan(s) − s = −1/x + B with s = √(A e^{−2y} − 1)
    let b = PI / 4.0;
    let mut rel: f64 = 0.0;
    for (&x, &y) in t.grid.iter().zip(&t.y) {
        let s = (a * (-2.0 * y).exp() - 1.0).sqrt();
        rel = rel.max((s.atan() - s + 1.0 / x - b).abs());
    }
    let y_end = *t.y.last().unwrap();
    check(
        vs_rk <= 1e-8 && vs_paper <= 1e-12 && rel <= 1e-8 && cmp.report.verdict == Verdict::Pass && y_end <= 0.3,
        format!(
            "closed vs RK {vs_rk:.1e}, vs (2e^(-2y) − 1)^(-1/2) {vs_paper:.1e}, relation {rel:.1e} (y(1.25) = {y_end:.3}), two-route {:.1e}",
            cmp.report.trajectory_dev.unwrap_or(f64::NAN)
        ),
    )
}

fn criterion_4() -> Outcome {
    let ys = grid(0.0, 1.0, 100);
    let k = integrate_scalar(|y, k| (k + 2.0 * y) / k, 0.0, 1.0, &ys, 1e-13);
    let inv = |y: f64, k: f64| (k - 2.0 * y).powi(2) * (k + y);
    let a = inv(0.0, 1.0);
    let drift = ys.iter().zip(&k).map(|(&y, &k)| (inv(y, k) - a).abs() / a.abs()).fold(0.0, f64::max);

    // Φ(y, A) agrees with the numeric K where the Cardano radicand is non-negative
    let mut phi_err: f64 = 0.0;
    for (&y, &kv) in ys.iter().zip(&k) {
        if let Some(phi) = cubic_invariant_root(y, a) {
            phi_err = phi_err.max((phi - kv).abs());
        }
    }

    let mut particular: f64 = 0.0;
    for kp in [py("2*y"), py("-y")] {
        let res = kp.clone() * kp.differentiate("y") - kp - var("y") * 2.0;
        for &y in &grid(-2.0, 2.0, 40) {
            particular = particular.max(res.eval(&[("y", y)]).unwrap().abs());
        }
    }

    let d = ClassDescriptor::class3(0, px("-1/x"), puv("v + 2*u")).with_factor_base(1.0);
    let rep = run_comparison(&d, &InitialCondition::new(1.0, 0.0, 1.0), 1.5, &VerifyOptions::default()).report;
    check(
        drift <= 1e-8 && particular == 0.0 && phi_err <= 1e-8 && rep.verdict == Verdict::Pass,
        format!(
            "invariant drift {drift:.1e}, Φ vs numeric {phi_err:.1e}, particular residuals {particular:e}, compare {:?}",
            rep.verdict
        ),
    )
}

fn criterion_5() -> Outcome {
    let k = 0.5;
    let mut ident: f64 = 0.0;
    for u in grid(0.0, 5.0, 500) {
        let j = jacobi(u, k).map_err(|e| e.to_string())?;
        ident = ident.max((j.sn * j.sn + j.cn * j.cn - 1.0).abs());
        ident = ident.max((j.dn * j.dn + k * k * j.sn * j.sn - 1.0).abs());
    }
    let d = ClassDescriptor::class4(0, py("-1/y"), puv("sqrt((1 - v^2)*(1 - 0.25*v^2))")).with_factor_base(1.0);
    let y = px("(dn(x, 0.5) + 0.5*cn(x, 0.5))^(-1/0.5)");
    let y0 = y.eval(&[("x", 0.0)]).unwrap();
    let ic = InitialCondition::new(0.0, y0, 0.0);
    let xs = grid(0.0, 1.0, 100);
    let res = xs.iter().map(|&x| residual_of_closed(&d, &ic, &y, x).abs()).fold(0.0, f64::max);
    let logd = y.ln().differentiate("x");
    let log_err = xs
        .iter()
        .map(|&x| (logd.eval(&[("x", x)]).unwrap() - jacobi(x, k).unwrap().sn).abs())
        .fold(0.0, f64::max);

    // the reduction itself recovers K = sn(x, k)
    let cmp = run_comparison(&d, &ic, 1.0, &VerifyOptions::default());
    let r = cmp.reduced.as_ref().ok_or("reduction failed")?;
    let k_err = xs
        .iter()
        .map(|&x| (r.k.expr.eval(&[("x", x)]).unwrap() - jacobi(x, k).unwrap().sn).abs())
        .fold(0.0, f64::max);
    let elliptic = r.k.route == KRoute::Closed(FormTag::EllipticIntegral);
    check(
        ident <= 1e-12 && res <= 1e-6 && log_err <= 1e-8 && elliptic && k_err <= 1e-10 && cmp.report.verdict == Verdict::Pass,
        format!(
            "identities {ident:.1e}, closed-form residual {res:.1e}, (ln y)' − sn {log_err:.1e}, reduced K vs sn {k_err:.1e} (elliptic route: {elliptic})"
        ),
    )
}

fn criterion_6() -> Outcome {
    let (a, b) = (1.0f64, -2.0f64);
    // a λ² + λ + b = 0
    let lambda = (-1.0 + (1.0 - 4.0 * a * b).sqrt()) / (2.0 * a);
    let (ca, cb) = (1.0, 1.0);
    let e = 2.0 * a * lambda;
    let k_closed = |x: f64| lambda / x - x.powf(e) / (a * x.powf(e + 1.0) / (e + 1.0) + ca);
    let y_text = format!("{cb}*x^{lambda}/(({a})*x*exp({e}*ln(x)) + {}*{ca} + {ca})^(1/{a})", e);
    let y = px(&y_text);
    let d = ClassDescriptor::class4(0, py("-1/y"), puv(&format!("({b})/u^2 + ({a})*v^2")))
        .with_factor_base(1.0)
        .with_particular_k(px(&format!("{lambda}/x")));
    let y1 = y.eval(&[("x", 1.0)]).unwrap();
    let ic = InitialCondition::new(1.0, y1, k_closed(1.0) * y1);
    let xs = grid(1.0, 2.0, 100);
    let res = xs.iter().map(|&x| residual_of_closed(&d, &ic, &y, x).abs()).fold(0.0, f64::max);
    let kn = integrate_scalar(|x, k| b / (x * x) + a * k * k, 1.0, k_closed(1.0), &xs, 1e-13);
    let k_dev = xs.iter().zip(&kn).map(|(&x, &k)| (k - k_closed(x)).abs()).fold(0.0, f64::max);
    let direct = integrate_second_order(&d, &ic, 2.0, 1e-12).map_err(|e| e.to_string())?;
    let y_dev = direct
        .grid
        .iter()
        .zip(&direct.y)
        .map(|(&x, &v)| (v - y.eval(&[("x", x)]).unwrap()).abs())
        .fold(0.0, f64::max);
    let cmp = run_comparison(&d, &ic, 2.0, &VerifyOptions::default());
    let route = cmp.reduced.as_ref().map(|r| r.k.route);
    check(
        res <= 1e-8 && k_dev <= 1e-7 && y_dev <= 1e-7 && route == Some(KRoute::Closed(FormTag::Riccati))
            && cmp.report.verdict == Verdict::Pass,
        format!("λ = {lambda}: residual {res:.1e}, K vs RK {k_dev:.1e}, y vs RK {y_dev:.1e}, K route {route:?}"),
    )
}

fn rcoef(rng: &mut ChaCha8Rng, r: f64) -> f64 {
    (rng.gen_range(-r..=r) * 1000.0).round() / 1000.0
}

fn lin(rng: &mut ChaCha8Rng, r: f64) -> String {
    format!("({}) + ({})*x", rcoef(rng, r), rcoef(rng, r))
}

/// Integrates `rhs` from `(0, y0)` to 0.5 and reports whether the path
/// stays tame and away from the pole of `(g1 y + g0)`.
fn tame(rhs: &Expr, den: &Expr, y0: f64) -> bool {
    let xs = grid(0.0, 0.5, 50);
    let Ok(sol) = integrate_with_stops(
        |x, y: &[f64; 1]| Ok([rhs.eval(&[("x", x), ("y", y[0])])?]),
        0.0,
        [y0],
        0.5,
        &StepControl::new(1e-9),
        &xs,
    ) else {
        return false;
    };
    xs.iter().all(|&x| {
        let y = sol.at(x)[0];
        y.abs() < 10.0 && den.eval(&[("x", x), ("y", y)]).map_or(false, |v| v.abs() > 0.1)
    })
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut cubic, mut quad) = (Vec::new(), Vec::new());
    let mut draws = 0;
    while cubic.len() < 20 || quad.len() < 20 {
        draws += 1;
        if draws > 5000 {
            return Err("could not draw enough admissible instances".into());
        }
        let is_cubic = cubic.len() < 20;
        let g1 = format!("1 + ({})*x", rcoef(&mut rng, 0.5));
        let g0 = format!("{}", rcoef(&mut rng, 0.3));
        let fs: Vec<String> = (0..if is_cubic { 4 } else { 3 }).map(|_| lin(&mut rng, 1.0)).collect();
        let y0 = rng.gen_range(0.5..1.5);
        let numer = fs
            .iter()
            .enumerate()
            .map(|(i, f)| format!("({f})*y^{}", fs.len() - 1 - i))
            .collect::<Vec<_>>()
            .join(" + ");
        let den = pxy(&format!("({g1})*y + ({g0})"));
        let rhs = pxy(&format!("({numer})/(({g1})*y + ({g0}))"));
        if !tame(&rhs, &den, y0) {
            continue;
        }
        let fe: Vec<Expr> = fs.iter().map(|f| pxy(f)).collect();
        let (g1e, g0e) = (pxy(&g1), pxy(&g0));
        let chain = if is_cubic {
            abel2_cubic_to_canonical([&fe[0], &fe[1], &fe[2], &fe[3]], &g1e, &g0e, (0.0, 0.5))
        } else {
            abel2_quadratic_to_canonical([&fe[0], &fe[1], &fe[2]], &g1e, &g0e, (0.0, 0.5))
        };
        // a refused chain means the instance is outside the chain's preconditions
        let Ok(chain) = chain else { continue };
        let dev = chain.round_trip(&rhs, y0, 1e-11).map(|rt| rt.max_deviation).unwrap_or(f64::INFINITY);
        if is_cubic { &mut cubic } else { &mut quad }.push(dev);
    }
    let worst = |v: &[f64]| v.iter().cloned().fold(0.0, f64::max);
    let (wc, wq) = (worst(&cubic), worst(&quad));
    check(
        wc <= 1e-6 && wq <= 1e-6,
        format!("cubic worst {wc:.1e}, quadratic worst {wq:.1e} ({draws} draws)"),
    )
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut dev13, mut dev24) = (Vec::new(), Vec::new());
    let mut draws = 0;
    let opts_ok = |d: &ClassDescriptor, ic: &InitialCondition| {
        integrate_second_order(d, ic, 2.0, 1e-9).map_or(false, |t| {
            t.y.iter().chain(&t.yp).all(|v| v.abs() < 20.0) && t.yp.iter().all(|p| p.abs() > 0.05)
        })
    };
    while dev13.len() < 20 || dev24.len() < 20 {
        draws += 1;
        if draws > 5000 {
            return Err("could not draw enough admissible pairs".into());
        }
        let y0 = rcoef(&mut rng, 0.5);
        let yp0 = rng.gen_range(0.5..1.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let ic = InitialCondition::new(1.0, y0, (yp0 * 1000.0f64).round() / 1000.0);
        let c = rcoef(&mut rng, 1.0);
        let (p, q) = (rcoef(&mut rng, 1.0), rcoef(&mut rng, 1.0));
        let gpoly = |rng: &mut ChaCha8Rng, v: &str| {
            format!("({}) + ({})*{v} + ({})*{v}^2", rcoef(rng, 1.0), rcoef(rng, 1.0), rcoef(rng, 1.0))
        };
        if dev13.len() < 20 {
            // F = C e^{−2∫₁ˣ a}, a = p + q x  ↔  F2 = C + v G(u)
            let g = gpoly(&mut rng, "y");
            let a = format!("({p}) + ({q})*x");
            let f = format!("({c})*exp(-2*(({p})*(x - 1) + ({q})*(x^2 - 1)/2))");
            let d1 = ClassDescriptor::class1(px(&a), px(&f), py(&g)).with_factor_base(1.0);
            let d3 = ClassDescriptor::class3(0, px(&a), puv(&format!("({c}) + v*({})", g.replace('y', "u"))))
                .with_factor_base(1.0);
            if !opts_ok(&d1, &ic) {
                continue;
            }
            dev13.push(pair_deviation(&d1, &d3, &ic));
        } else {
            // G = C  ↔  F2 = F(u) + C v
            let fx = gpoly(&mut rng, "x");
            let a = format!("({p}) + ({q})*y");
            let d2 = ClassDescriptor::class2(py(&a), px(&fx), py(&format!("{c}"))).with_factor_base(y0);
            let d4 = ClassDescriptor::class4(0, py(&a), puv(&format!("({}) + ({c})*v", fx.replace('x', "u"))))
                .with_factor_base(y0);
            if !opts_ok(&d2, &ic) {
                continue;
            }
            dev24.push(pair_deviation(&d2, &d4, &ic));
        }
    }
    let worst = |v: &[f64]| v.iter().cloned().fold(0.0, f64::max);
    let (w13, w24) = (worst(&dev13), worst(&dev24));
    check(
        w13 <= 1e-8 && w24 <= 1e-8,
        format!("I↔III worst {w13:.1e}, II↔IV worst {w24:.1e} ({draws} draws)"),
    )
}

fn pair_deviation(a: &ClassDescriptor, b: &ClassDescriptor, ic: &InitialCondition) -> f64 {
    let traj = |d: &ClassDescriptor| {
        let r = reduce(d, ic).ok()?;
        integrate_first_order(&r, 2.0, 1e-12).ok()
    };
    match (traj(a), traj(b)) {
        (Some(s), Some(t)) => s.y.iter().zip(&t.y).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max),
        _ => f64::INFINITY,
    }
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    let mut skipped = 0;
    while checked < 1000 {
        let e = common::random_expr(&mut rng, 4);
        let (x, y) = common::random_point(&mut rng);
        let v = if rng.gen_bool(0.5) { "x" } else { "y" };
        let sym = e.differentiate(v).eval(&[("x", x), ("y", y)]);
        match (sym, common::central_difference(&e, v, x, y)) {
            (Ok(s), Some(fd)) if s.is_finite() => {
                worst = worst.max(common::rel_err(s, fd));
                checked += 1;
            }
            _ => skipped += 1,
        }
    }
    check(worst <= 1e-5, format!("{checked} pairs, worst relative error {worst:.1e}, {skipped} skipped"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("reduction exactness, 100 random descriptors per class", criterion_1),
        ("homogeneous K-equation example, implicit relation", criterion_2),
        ("Bernoulli K-equation example", criterion_3),
        ("canonical second-kind Abel example, algebraic invariant", criterion_4),
        ("Jacobi elliptic example, k = 0.5", criterion_5),
        ("Riccati K-equation example, a = 1, b = −2", criterion_6),
        ("Abel canonicalization round trips", criterion_7),
        ("cross-class pairs I↔III and II↔IV", criterion_8),
        ("differentiation oracle", criterion_9),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name} — {detail} [{secs:.2} s]", i + 1),
            Err(detail) => {
                failures += 1;
                println!("criterion {}: FAIL  {name} — {detail} [{secs:.2} s]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
