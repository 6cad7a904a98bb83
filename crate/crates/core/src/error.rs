use thiserror::Error;

/// Failure while turning expression text into a tree.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown identifier `{name}` at position {pos}")]
    UnknownIdentifier { pos: usize, name: String },
    #[error("function `{name}` at position {pos} takes {expected} argument(s), got {got}")]
    Arity {
        pos: usize,
        name: String,
        expected: usize,
        got: usize,
    },
}

impl ParseError {
    pub fn position(&self) -> usize {
        match self {
            ParseError::Syntax { pos, .. }
            | ParseError::UnknownIdentifier { pos, .. }
            | ParseError::Arity { pos, .. } => *pos,
        }
    }
}

/// Numeric failure while evaluating an expression or one of its opaque parts.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("variable `{0}` is not bound")]
    Unbound(String),
    #[error("domain violation in `{expr}`: {what}")]
    Domain { what: String, expr: String },
    #[error("quadrature failed: {0}")]
    Quadrature(String),
    #[error("numeric solution failed: {0}")]
    Integration(String),
}

impl EvalError {
    pub(crate) fn domain(what: impl Into<String>, expr: impl ToString) -> Self {
        EvalError::Domain {
            what: what.into(),
            expr: expr.to_string(),
        }
    }
}

/// Errors from the numeric primitives in [`crate::special`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericError {
    #[error("modulus k = {0} outside [0, 1]")]
    Modulus(f64),
    #[error("quadrature subdivision depth cap hit on [{lo}, {hi}] (suspected singularity)")]
    DepthCap { lo: f64, hi: f64 },
    #[error("integrand evaluation failed at t = {at}: {source}")]
    Integrand {
        at: f64,
        #[source]
        source: EvalError,
    },
    #[error("no sign change on [{lo}, {hi}]: f(lo) = {flo}, f(hi) = {fhi}")]
    NoSignChange { lo: f64, hi: f64, flo: f64, fhi: f64 },
    #[error("root finder evaluation failed at {at}: {source}")]
    RootEval {
        at: f64,
        #[source]
        source: EvalError,
    },
}

/// Errors raised while validating a class descriptor or initial condition.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ValidationError {
    #[error("field `{field}` depends on forbidden variable `{var}` (allowed: {allowed})")]
    ForbiddenVariable {
        field: &'static str,
        var: String,
        allowed: String,
    },
    #[error("field `{0}` is required for this class")]
    MissingField(&'static str),
    #[error("field `{0}` is not used by this class")]
    UnexpectedField(&'static str),
    #[error("m must be 0 for classes I and II, got {0}")]
    BadM(u32),
    #[error("initial condition is not finite: {0}")]
    NonFinite(String),
    #[error("y'(x0) must be nonzero for classes III/IV when m >= 1")]
    ZeroSlope,
}

/// Errors from the reduction step.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReduceError {
    #[error(transparent)]
    Invalid(#[from] ValidationError),
    #[error("wrong class for this reduction: expected {expected}, got {got}")]
    WrongClass { expected: String, got: String },
    #[error("integrating factor not finite at the anchor: {0}")]
    Factor(EvalError),
    #[error("quadrature failed near the anchor: {0}")]
    Quadrature(EvalError),
    #[error("K-equation singular at the anchor: {0}")]
    SingularK(String),
    #[error("implicit solution unavailable: {0}")]
    Implicit(String),
}

/// Errors from the closed-form solvers and canonicalization chains.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("separable factor vanishes: {0}")]
    VanishingFactor(String),
    #[error("particular solution fails the residual check (max residual {0:e})")]
    BadParticular(f64),
    #[error("closed form fails the residual check (max residual {0:e})")]
    ResidualCheck(f64),
    #[error("denominator `{name}` changes sign or vanishes on the working interval")]
    Denominator { name: String },
    #[error("blow-up: {0}")]
    BlowUp(String),
    #[error("homogeneous case mismatch: {0}")]
    CaseMismatch(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Numeric(#[from] NumericError),
}

/// Errors from the numeric integrators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntegrateError {
    #[error("blow-up guard tripped at x = {at}: |state| = {magnitude:e}")]
    BlowUp { at: f64, magnitude: f64 },
    #[error("step size underflow at x = {at} (h = {h:e})")]
    StepUnderflow { at: f64, h: f64 },
    #[error("right-hand side failed at x = {at}: {source}")]
    Rhs {
        at: f64,
        #[source]
        source: EvalError,
    },
    #[error("maximum step count exceeded at x = {at}")]
    TooManySteps { at: f64 },
    #[error("degenerate problem: {0}")]
    Degenerate(String),
}

impl IntegrateError {
    /// Abscissa at which the integrator gave up, when known.
    pub fn location(&self) -> Option<f64> {
        match self {
            IntegrateError::BlowUp { at, .. }
            | IntegrateError::StepUnderflow { at, .. }
            | IntegrateError::Rhs { at, .. }
            | IntegrateError::TooManySteps { at } => Some(*at),
            IntegrateError::Degenerate(_) => None,
        }
    }
}
