//! The four reducible second-order classes.
//!
//! With `p = y'`, `q = y''` and `E = exp(∫a)` the integrating factor (in `x`
//! for classes I/III, in `y` for II/IV):
//!
//! | class | equation |
//! |-------|----------|
//! | I     | `q + a(x) p = F(x) + p G(y) / E(x)` |
//! | II    | `q + a(y) p² = F(x) / E(y) + p G(y)` |
//! | III   | `p^m q + a(x) p^(m+1) = E(x)^-(m+2) F2(y, p E(x))` |
//! | IV    | `p^m q + a(y) p^(m+2) = E(y)^-(m+1) F2(x, p E(y))` |
//!
//! The integrating factor is only defined up to a constant multiple, which
//! changes the equation; the descriptor pins it through `factor_base`, the
//! lower limit of `∫a`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::ValidationError;
use crate::expr::{antiderive, var, Antiderivative, Expr};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ClassTag {
    I,
    II,
    III,
    IV,
}

impl ClassTag {
    /// Variable of the coefficient `a` (and of the integrating factor).
    pub fn factor_var(self) -> &'static str {
        match self {
            ClassTag::I | ClassTag::III => "x",
            ClassTag::II | ClassTag::IV => "y",
        }
    }

    /// Independent variable of the auxiliary function `K`.
    pub fn k_var(self) -> &'static str {
        match self {
            ClassTag::I | ClassTag::III => "y",
            ClassTag::II | ClassTag::IV => "x",
        }
    }
}

impl fmt::Display for ClassTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClassTag::I => "I",
            ClassTag::II => "II",
            ClassTag::III => "III",
            ClassTag::IV => "IV",
        })
    }
}

impl std::str::FromStr for ClassTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "I" | "1" => Ok(ClassTag::I),
            "II" | "2" => Ok(ClassTag::II),
            "III" | "3" => Ok(ClassTag::III),
            "IV" | "4" => Ok(ClassTag::IV),
            other => Err(format!("unknown class tag `{other}` (expected I, II, III or IV)")),
        }
    }
}

/// One member of one of the four classes.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassDescriptor {
    pub tag: ClassTag,
    pub m: u32,
    /// In `x` for classes I/III, in `y` for II/IV.
    pub a: Expr,
    /// `F(x)`, classes I/II.
    pub f: Option<Expr>,
    /// `G(y)`, classes I/II.
    pub g: Option<Expr>,
    /// `F2(u, v)`, classes III/IV.
    pub f2: Option<Expr>,
    /// Lower limit of `∫a`; `None` means the initial point.
    pub factor_base: Option<f64>,
    /// A known particular solution of the K-equation (classes III/IV), in
    /// `y` for class III and `x` for class IV. Enables the Riccati route.
    pub particular_k: Option<Expr>,
}

impl ClassDescriptor {
    pub fn class1(a: Expr, f: Expr, g: Expr) -> Self {
        Self::pair(ClassTag::I, a, f, g)
    }

    pub fn class2(a: Expr, f: Expr, g: Expr) -> Self {
        Self::pair(ClassTag::II, a, f, g)
    }

    pub fn class3(m: u32, a: Expr, f2: Expr) -> Self {
        Self::two_arg(ClassTag::III, m, a, f2)
    }

    pub fn class4(m: u32, a: Expr, f2: Expr) -> Self {
        Self::two_arg(ClassTag::IV, m, a, f2)
    }

    fn pair(tag: ClassTag, a: Expr, f: Expr, g: Expr) -> Self {
        ClassDescriptor {
            tag,
            m: 0,
            a,
            f: Some(f),
            g: Some(g),
            f2: None,
            factor_base: None,
            particular_k: None,
        }
    }

    fn two_arg(tag: ClassTag, m: u32, a: Expr, f2: Expr) -> Self {
        ClassDescriptor {
            tag,
            m,
            a,
            f: None,
            g: None,
            f2: Some(f2),
            factor_base: None,
            particular_k: None,
        }
    }

    pub fn with_factor_base(mut self, base: f64) -> Self {
        self.factor_base = Some(base);
        self
    }

    pub fn with_particular_k(mut self, k: Expr) -> Self {
        self.particular_k = Some(k);
        self
    }

    /// Lower limit of `∫a` for this initial condition.
    pub fn factor_base_for(&self, ic: &InitialCondition) -> f64 {
        self.factor_base.unwrap_or(match self.tag.factor_var() {
            "x" => ic.x0,
            _ => ic.y0,
        })
    }

    /// `Ia = ∫_{base}^{t} a`, in the factor variable.
    pub fn factor_exponent(&self, ic: &InitialCondition) -> Arc<Antiderivative> {
        antiderive(&self.a, self.tag.factor_var(), self.factor_base_for(ic))
    }

    fn f_expr(&self) -> &Expr {
        self.f.as_ref().expect("validated descriptor has F")
    }

    fn g_expr(&self) -> &Expr {
        self.g.as_ref().expect("validated descriptor has G")
    }

    fn f2_expr(&self) -> &Expr {
        self.f2.as_ref().expect("validated descriptor has F2")
    }
}

/// `(x0, y0, y'(x0))`; fixes the arbitrary constants of a reduction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialCondition {
    pub x0: f64,
    pub y0: f64,
    pub yp0: f64,
}

impl InitialCondition {
    pub fn new(x0: f64, y0: f64, yp0: f64) -> Self {
        InitialCondition { x0, y0, yp0 }
    }
}

fn check_vars(field: &'static str, e: &Expr, allowed: &[&str]) -> Result<(), ValidationError> {
    for v in e.free_vars() {
        if !allowed.contains(&v.as_str()) {
            return Err(ValidationError::ForbiddenVariable {
                field,
                var: v,
                allowed: if allowed.is_empty() {
                    "none".into()
                } else {
                    allowed.join(", ")
                },
            });
        }
    }
    Ok(())
}

/// Check variable dependencies and `m`.
pub fn validate(d: &ClassDescriptor) -> Result<(), ValidationError> {
    let fv = d.tag.factor_var();
    check_vars("a", &d.a, &[fv])?;
    match d.tag {
        ClassTag::I | ClassTag::II => {
            if d.m != 0 {
                return Err(ValidationError::BadM(d.m));
            }
            let f = d.f.as_ref().ok_or(ValidationError::MissingField("F"))?;
            let g = d.g.as_ref().ok_or(ValidationError::MissingField("G"))?;
            if d.f2.is_some() {
                return Err(ValidationError::UnexpectedField("F2"));
            }
            if d.particular_k.is_some() {
                return Err(ValidationError::UnexpectedField("particular_k"));
            }
            check_vars("F", f, &["x"])?;
            check_vars("G", g, &["y"])?;
        }
        ClassTag::III | ClassTag::IV => {
            let f2 = d.f2.as_ref().ok_or(ValidationError::MissingField("F2"))?;
            if d.f.is_some() {
                return Err(ValidationError::UnexpectedField("F"));
            }
            if d.g.is_some() {
                return Err(ValidationError::UnexpectedField("G"));
            }
            check_vars("F2", f2, &["u", "v"])?;
            if let Some(k) = &d.particular_k {
                check_vars("particular_k", k, &[d.tag.k_var()])?;
            }
        }
    }
    Ok(())
}

/// Validate the initial condition against the descriptor.
pub fn validate_ic(d: &ClassDescriptor, ic: &InitialCondition) -> Result<(), ValidationError> {
    for (name, v) in [("x0", ic.x0), ("y0", ic.y0), ("yp0", ic.yp0)] {
        if !v.is_finite() {
            return Err(ValidationError::NonFinite(format!("{name} = {v}")));
        }
    }
    if let Some(b) = d.factor_base {
        if !b.is_finite() {
            return Err(ValidationError::NonFinite(format!("factor_base = {b}")));
        }
    }
    if matches!(d.tag, ClassTag::III | ClassTag::IV) && d.m >= 1 && ic.yp0 == 0.0 {
        return Err(ValidationError::ZeroSlope);
    }
    Ok(())
}

/// `E = exp(Ia)` at the factor variable, as an expression.
pub fn integrating_factor_expr(d: &ClassDescriptor, ic: &InitialCondition) -> Expr {
    d.factor_exponent(ic).as_expr().exp().simplify()
}

fn ipow(e: Expr, n: i64) -> Expr {
    match n {
        0 => Expr::Num(1.0),
        1 => e,
        _ => e.powf(n as f64),
    }
}

/// Left minus right side of the class equation, in `(x, y, p, q)`.
pub fn residual_expr(d: &ClassDescriptor, ic: &InitialCondition) -> Result<Expr, ValidationError> {
    validate(d)?;
    let (x, y, p, q) = (var("x"), var("y"), var("p"), var("q"));
    let a = d.a.clone();
    let e = integrating_factor_expr(d, ic);
    let m = i64::from(d.m);
    let r = match d.tag {
        ClassTag::I => q + a * p.clone() - d.f_expr().clone() - p * d.g_expr().clone() / e,
        ClassTag::II => {
            q + a * ipow(p.clone(), 2) - d.f_expr().clone() / e - p * d.g_expr().clone()
        }
        ClassTag::III => {
            let f2 = d.f2_expr().substitute_all(&[("u", y), ("v", p.clone() * e.clone())]);
            ipow(p.clone(), m) * q + a * ipow(p, m + 1) - f2 / ipow(e, m + 2)
        }
        ClassTag::IV => {
            let f2 = d.f2_expr().substitute_all(&[("u", x), ("v", p.clone() * e.clone())]);
            ipow(p.clone(), m) * q + a * ipow(p, m + 2) - f2 / ipow(e, m + 1)
        }
    };
    Ok(r.simplify())
}

/// `y''` solved from the class equation, in `(x, y, p)`. For classes
/// III/IV with `m >= 1` this divides by `p^m`.
pub fn second_derivative_expr(
    d: &ClassDescriptor,
    ic: &InitialCondition,
) -> Result<Expr, ValidationError> {
    validate(d)?;
    let (x, y, p) = (var("x"), var("y"), var("p"));
    let a = d.a.clone();
    let e = integrating_factor_expr(d, ic);
    let m = i64::from(d.m);
    let q = match d.tag {
        ClassTag::I => d.f_expr().clone() + p.clone() * d.g_expr().clone() / e - a * p,
        ClassTag::II => d.f_expr().clone() / e + p.clone() * d.g_expr().clone() - a * ipow(p, 2),
        ClassTag::III => {
            let f2 = d.f2_expr().substitute_all(&[("u", y), ("v", p.clone() * e.clone())]);
            (f2 / ipow(e, m + 2) - a * ipow(p.clone(), m + 1)) / ipow(p, m)
        }
        ClassTag::IV => {
            let f2 = d.f2_expr().substitute_all(&[("u", x), ("v", p.clone() * e.clone())]);
            (f2 / ipow(e, m + 1) - a * ipow(p.clone(), m + 2)) / ipow(p, m)
        }
    };
    Ok(q.simplify())
}
