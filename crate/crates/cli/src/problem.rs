use std::path::Path;

use serde::{Deserialize, Serialize};
use varparam::classes::{validate, validate_ic, ClassDescriptor, ClassTag, InitialCondition};
use varparam::expr::{parse, Expr};
use varparam::verify::VerifyOptions;

use crate::error::CliError;

/// Bundled problem files, keyed by the name `demo` and `example = ...` use.
pub const FIXTURES: &[(&str, &str)] = &[
    ("eqx10", include_str!("../fixtures/eqx10.toml")),
    ("eqxx10", include_str!("../fixtures/eqxx10.toml")),
    ("eqxxx10", include_str!("../fixtures/eqxxx10.toml")),
    ("eqx1", include_str!("../fixtures/eqx1.toml")),
    ("eqxx1", include_str!("../fixtures/eqxx1.toml")),
    ("eqx10_singular", include_str!("../fixtures/eqx10_singular.toml")),
];

pub fn fixture(name: &str) -> Result<&'static str, CliError> {
    FIXTURES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| *text)
        .ok_or_else(|| CliError::UnknownExample {
            name: name.to_string(),
            known: FIXTURES.iter().map(|(n, _)| *n).collect::<Vec<_>>().join(", "),
        })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Initial {
    pub x0: f64,
    pub y0: f64,
    pub yp0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Interval {
    pub end: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub integrator: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deviation: Option<f64>,
}

/// On-disk problem description. Every field is optional so a file naming
/// a bundled `example` only needs the fields it overrides.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub example: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub class: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<String>,
    #[serde(rename = "F", skip_serializing_if = "Option::is_none")]
    pub f: Option<String>,
    #[serde(rename = "G", skip_serializing_if = "Option::is_none")]
    pub g: Option<String>,
    #[serde(rename = "F2", skip_serializing_if = "Option::is_none")]
    pub f2: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub factor_base: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub particular: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial: Option<Initial>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub interval: Option<Interval>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<Tolerances>,
}

macro_rules! overlay {
    ($base:expr, $top:expr, $($field:ident),*) => {
        $( if $top.$field.is_some() { $base.$field = $top.$field.clone(); } )*
    };
}

impl ProblemFile {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Format(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.display().to_string(), e))?;
        Self::from_toml(&text)
    }

    /// Fields of the named example with this file's fields laid on top.
    pub fn flatten(&self) -> Result<ProblemFile, CliError> {
        let Some(name) = &self.example else { return Ok(self.clone()) };
        let mut base = ProblemFile::from_toml(fixture(name)?)?.flatten()?;
        let mut tol = base.tolerances.unwrap_or_default();
        if let Some(t) = &self.tolerances {
            overlay!(tol, t, integrator, residual, deviation);
        }
        overlay!(base, self, class, m, a, f, g, f2, factor_base, particular, initial, interval);
        base.tolerances = (tol != Tolerances::default()).then_some(tol);
        base.example = Some(name.clone());
        Ok(base)
    }

    /// Parse and validate into the engine's types.
    pub fn resolve(&self) -> Result<Problem, CliError> {
        let flat = self.flatten()?;
        let class = flat.class.as_deref().ok_or(CliError::Missing("class"))?;
        let tag: ClassTag = class.parse().map_err(|msg| CliError::Field { field: "class", msg })?;
        let fv = tag.factor_var();
        let a = field_expr("a", flat.a.as_deref().ok_or(CliError::Missing("a"))?, &[fv])?;
        let opt = |field: &'static str, text: &Option<String>, vars: &[&str]| {
            text.as_deref().map(|t| field_expr(field, t, vars)).transpose()
        };
        let m = flat.m.unwrap_or(0);
        let mut d = match tag {
            ClassTag::I | ClassTag::II => {
                let f = opt("F", &flat.f, &["x"])?.ok_or(CliError::Missing("F"))?;
                let g = opt("G", &flat.g, &["y"])?.ok_or(CliError::Missing("G"))?;
                let mut d = if tag == ClassTag::I {
                    ClassDescriptor::class1(a, f, g)
                } else {
                    ClassDescriptor::class2(a, f, g)
                };
                d.m = m;
                d.f2 = opt("F2", &flat.f2, &["u", "v"])?;
                d
            }
            ClassTag::III | ClassTag::IV => {
                let f2 = opt("F2", &flat.f2, &["u", "v"])?.ok_or(CliError::Missing("F2"))?;
                let mut d = if tag == ClassTag::III {
                    ClassDescriptor::class3(m, a, f2)
                } else {
                    ClassDescriptor::class4(m, a, f2)
                };
                d.f = opt("F", &flat.f, &["x"])?;
                d.g = opt("G", &flat.g, &["y"])?;
                d
            }
        };
        d.factor_base = flat.factor_base;
        d.particular_k = opt("particular", &flat.particular, &[tag.k_var()])?;
        let init = flat.initial.ok_or(CliError::Missing("initial"))?;
        let ic = InitialCondition::new(init.x0, init.y0, init.yp0);
        validate(&d)?;
        validate_ic(&d, &ic)?;
        let end = flat.interval.ok_or(CliError::Missing("interval"))?.end;
        if !end.is_finite() || end == ic.x0 {
            return Err(CliError::Field { field: "interval.end", msg: format!("must be finite and differ from x0, got {end}") });
        }
        let defaults = VerifyOptions::default();
        let t = flat.tolerances.unwrap_or_default();
        let opts = VerifyOptions {
            integrator_tol: t.integrator.unwrap_or(defaults.integrator_tol),
            residual_tol: t.residual.unwrap_or(defaults.residual_tol),
            deviation_tol: t.deviation.unwrap_or(defaults.deviation_tol),
        };
        Ok(Problem { file: flat, descriptor: d, ic, end, opts })
    }
}

fn field_expr(field: &'static str, text: &str, vars: &[&str]) -> Result<Expr, CliError> {
    parse(text, vars).map_err(|source| CliError::Expr { field, text: text.to_string(), source })
}

/// A validated problem ready for the engine.
#[derive(Debug, Clone)]
pub struct Problem {
    /// The flattened file, echoed into reports.
    pub file: ProblemFile,
    pub descriptor: ClassDescriptor,
    pub ic: InitialCondition,
    pub end: f64,
    pub opts: VerifyOptions,
}

impl Problem {
    /// Apply `--tol` / `--interval` overrides, keeping the echo in step.
    pub fn with_overrides(mut self, tol: Option<f64>, end: Option<f64>) -> Self {
        if let Some(t) = tol {
            self.opts.integrator_tol = t;
            let mut echo = self.file.tolerances.unwrap_or_default();
            echo.integrator = Some(t);
            self.file.tolerances = Some(echo);
        }
        if let Some(e) = end {
            self.end = e;
            self.file.interval = Some(Interval { end: e });
        }
        self
    }
}
