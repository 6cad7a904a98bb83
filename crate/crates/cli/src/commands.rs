use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use varparam::classes::ClassTag;
use varparam::reduction::{implicit_solution, reduce, KRoute, ReducedODE};
use varparam::solvers::{classify_near, solve_closed_form, Anchor, ProbeRegion};
use varparam::verify::{grid, integrate_first_order, residual_along, run_comparison, Trajectory, Verdict};

use crate::error::CliError;
use crate::problem::{Problem, ProblemFile};
use crate::report::{
    BatchEntry, BatchSummary, Constants, ReductionSummary, RunReport, SolutionKind, SolutionSummary, TableRow,
    Timings,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Classify,
    Reduce,
    Solve,
    Verify,
    /// Reduce, solve and verify a bundled example.
    Demo,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Classify => "classify",
            Command::Reduce => "reduce",
            Command::Solve => "solve",
            Command::Verify => "verify",
            Command::Demo => "demo",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: RunReport,
    pub exit_code: i32,
}

fn ms(t: Instant) -> Option<f64> {
    Some(t.elapsed().as_secs_f64() * 1e3)
}

fn summarize(r: &ReducedODE) -> ReductionSummary {
    let (equation, factor) = match r.tag {
        ClassTag::I => ("y' = (H(x) + K(y) + A)/E(x)", "E(x)"),
        ClassTag::II => ("y' = (H(x) + K(y) + A)/E(y)", "E(y)"),
        ClassTag::III => ("y' = K(y)/E(x)", "E(x)"),
        ClassTag::IV => ("y' = K(x)/E(y)", "E(y)"),
    };
    let k_route = match r.k.route {
        KRoute::Quadrature => "quadrature".to_string(),
        KRoute::Closed(tag) => format!("closed ({tag})"),
        KRoute::Numeric => "numeric".to_string(),
    };
    let b = implicit_solution(r).ok().map(|s| s.b);
    let form = classify_near(&r.rhs, ProbeRegion::around(r.anchor.x0, r.anchor.y0)).tag();
    ReductionSummary {
        class: r.tag.to_string(),
        m: r.m,
        equation: equation.to_string(),
        k: format!("K({}) = {}", r.k.var, r.k.expr),
        k_route,
        factor: format!("{factor} = {}", r.factor_expr()),
        rhs: r.rhs.to_string(),
        constants: Constants { a: r.a_const, b },
        form: form.to_string(),
    }
}

fn table_from(p: &Problem, r: &ReducedODE, xs: &[f64], ys: &[f64]) -> Vec<TableRow> {
    let res = residual_along(&p.descriptor, r, xs, ys).ok();
    xs.iter()
        .zip(ys)
        .enumerate()
        .map(|(i, (&x, &y))| TableRow {
            x,
            y,
            yp: r.rhs_at(x, y).unwrap_or(f64::NAN),
            residual: res.as_ref().map(|v| v[i]).filter(|v| v.is_finite()),
        })
        .filter(|row| row.yp.is_finite())
        .collect()
}

fn table_of(p: &Problem, r: &ReducedODE, t: &Trajectory) -> Vec<TableRow> {
    table_from(p, r, &t.grid, &t.y)
}

/// Closed form, then the implicit relation, then numeric integration.
fn solve(p: &Problem, r: &ReducedODE) -> Result<(SolutionSummary, Vec<TableRow>), CliError> {
    let anchor = Anchor::new(r.anchor.x0, r.anchor.y0);
    let xs = grid(p.ic.x0, p.end);
    if let Some(cf) = solve_closed_form(&r.rhs, anchor, p.descriptor.particular_k.as_ref()) {
        let ys = xs.iter().map(|&x| cf.expr.eval(&[("x", x)])).collect::<Result<Vec<f64>, _>>();
        let summary = SolutionSummary {
            kind: SolutionKind::Closed,
            text: format!("y = {}", cf.expr),
            form: Some(cf.form.to_string()),
        };
        if let Some(ys) = ys.ok().filter(|ys| ys.iter().all(|v| v.is_finite())) {
            return Ok((summary, table_from(p, r, &xs, &ys)));
        }
        // valid near the anchor only; tabulate numerically
        let t = integrate_first_order(r, p.end, p.opts.integrator_tol).map_err(CliError::Solve)?;
        return Ok((summary, table_of(p, r, &t)));
    }
    let numeric = integrate_first_order(r, p.end, p.opts.integrator_tol);
    if let Ok(rel) = implicit_solution(r) {
        let summary = SolutionSummary { kind: SolutionKind::Implicit, text: rel.to_string(), form: None };
        return Ok((summary, numeric.map(|t| table_of(p, r, &t)).unwrap_or_default()));
    }
    let t = numeric.map_err(CliError::Solve)?;
    Ok((SolutionSummary { kind: SolutionKind::Numeric, text: "numeric".into(), form: None }, table_of(p, r, &t)))
}

/// Run one command on a validated problem.
pub fn run(cmd: Command, p: &Problem, source: &str) -> Result<Outcome, CliError> {
    let mut report = RunReport {
        command: cmd.name().to_string(),
        source: source.to_string(),
        input: p.file.clone(),
        reduction: None,
        solution: None,
        verification: None,
        table: Vec::new(),
        timings: Timings::default(),
    };
    let mut exit_code = 0;
    match cmd {
        Command::Classify | Command::Reduce | Command::Solve => {
            let t = Instant::now();
            let r = reduce(&p.descriptor, &p.ic)?;
            report.reduction = Some(summarize(&r));
            report.timings.reduce_ms = ms(t);
            if cmd == Command::Solve {
                let t = Instant::now();
                let (summary, table) = solve(p, &r)?;
                report.solution = Some(summary);
                report.table = table;
                report.timings.solve_ms = ms(t);
            }
        }
        Command::Verify | Command::Demo => {
            let t = Instant::now();
            let cmp = run_comparison(&p.descriptor, &p.ic, p.end, &p.opts);
            report.timings.verify_ms = ms(t);
            if let Some(r) = &cmp.reduced {
                report.reduction = Some(summarize(r));
                if let Some(traj) = &cmp.reduced_traj {
                    report.table = table_of(p, r, traj);
                }
                if cmd == Command::Demo {
                    let t = Instant::now();
                    if let Ok((summary, _)) = solve(p, r) {
                        report.solution = Some(summary);
                    }
                    report.timings.solve_ms = ms(t);
                }
            }
            if cmp.report.verdict == Verdict::Fail {
                exit_code = 1;
            }
            report.verification = Some(cmp.report);
        }
    }
    Ok(Outcome { report, exit_code })
}

pub fn run_file(cmd: Command, path: &Path, tol: Option<f64>, end: Option<f64>) -> Result<Outcome, CliError> {
    let p = ProblemFile::load(path)?.resolve()?.with_overrides(tol, end);
    run(cmd, &p, &path.display().to_string())
}

/// `*.toml` files directly inside `dir`, sorted.
pub fn problem_files(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let io = |e| CliError::Io(dir.display().to_string(), e);
    let mut files = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(io)? {
        let path = entry.map_err(io)?.path();
        if path.is_file() && path.extension().is_some_and(|e| e == "toml") {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

/// Run `cmd` over every problem file in `dir` in parallel.
pub fn run_batch(cmd: Command, dir: &Path, tol: Option<f64>, end: Option<f64>) -> Result<BatchSummary, CliError> {
    let entries = problem_files(dir)?
        .par_iter()
        .map(|path| {
            let file = path.file_name().unwrap_or_default().to_string_lossy().into_owned();
            match run_file(cmd, path, tol, end) {
                Ok(o) => BatchEntry {
                    file,
                    exit_code: o.exit_code,
                    verdict: o.report.verdict(),
                    error: None,
                    report: Some(o.report),
                },
                Err(e) => BatchEntry { file, exit_code: e.exit_code(), verdict: None, error: Some(e.to_string()), report: None },
            }
        })
        .collect();
    Ok(BatchSummary::new(cmd.name(), entries))
}
