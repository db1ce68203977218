//! Crate-wide error type.
//!
//! Every fallible operation in the crate returns [`Result`]. Domain errors
//! (poles, non-commensurate orders, defective matrices, ...) are kept
//! distinct from input errors (malformed literals, schema violations) so a
//! caller can map them onto different exit codes.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    // ---- orders ----
    #[error("malformed order literal `{0}` (expected `p/q` or a finite decimal)")]
    MalformedOrder(String),
    #[error("order literal `{0}` is negative; orders must be >= 0")]
    NegativeOrder(String),
    #[error("order literal `{0}` has a zero denominator")]
    ZeroDenominator(String),
    #[error("denominator {den} exceeds the cap of {cap}")]
    DenominatorCap { den: u128, cap: u64 },
    #[error("empty order sequence")]
    EmptyOrders,

    // ---- specfun ----
    #[error("gamma has a pole at {0} (non-positive integer)")]
    GammaPole(f64),
    #[error("mittag-leffler requires alpha > 0, got {0}")]
    NonPositiveAlpha(f64),
    #[error("|z| = {z:.6e} is outside the series convergence budget ({budget:.1})")]
    ConvergenceBudget { z: f64, budget: f64 },

    // ---- generic domain validation ----
    #[error("{what} out of range: {value}")]
    OutOfRange { what: &'static str, value: f64 },

    // ---- powcalc ----
    #[error("power sum exponent {0} is not integrable (must be > -1)")]
    ExponentNotIntegrable(f64),
    #[error("power sum terms use mismatched base points ({0} vs {1})")]
    BasePointMismatch(f64, f64),
    #[error("taylor polynomial of degree {degree} undefined: non-integer exponent {exponent} below the degree")]
    TaylorUndefined { exponent: f64, degree: i64 },

    // ---- gridops ----
    #[error("grid needs at least {need} nodes, got {got}")]
    GridTooShort { need: usize, got: usize },
    #[error("csv: {0}")]
    CsvFormat(String),

    // ---- reduce ----
    #[error("orders must be strictly ascending")]
    OrdersNotAscending,
    #[error("lowest order must lie in (0, 1], got {0}")]
    FirstOrderRange(f64),
    #[error("expected {expected} initial values, got {got}")]
    InitialCount { expected: usize, got: usize },
    #[error("orders are not commensurate (no common base order found)")]
    NonCommensurate,
    #[error("irrational orders are only reducible when the highest order is <= 1, got {0}")]
    IrrationalHighOrder(f64),
    #[error("reduced dimension {n} exceeds the cap of {cap}")]
    DimensionCap { n: usize, cap: usize },
    #[error("component order {0} must lie in (0, 1]")]
    ComponentOrderRange(f64),
    #[error("matrix shape mismatch: {0}")]
    MatrixShape(String),

    // ---- solve ----
    #[error("step size {h} does not divide the interval length {len} evenly")]
    StepMismatch { h: f64, len: f64 },
    #[error("state became non-finite at node {node} (t = {t})")]
    NonFiniteState { node: usize, t: f64 },
    #[error("matrix is numerically defective (initial state not representable in the eigenbasis); use the numeric solver")]
    DefectiveMatrix,

    // ---- stability ----
    #[error("polynomial root finder failed to converge")]
    RootNonConvergence,
    #[error("{0} requires a linear system (constant matrix right-hand side)")]
    NotLinear(&'static str),

    // ---- expression language ----
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("`{name}` takes {expected} argument(s), got {got} (at byte {offset})")]
    ArityMismatch { name: String, expected: usize, got: usize, offset: usize },
    #[error("unbound variable `{0}` during evaluation")]
    UnboundVariable(String),
    #[error("evaluation domain error at byte {offset}: {message}")]
    EvalDomain { offset: usize, message: String },

    // ---- problem files ----
    #[error("problem file: {0}")]
    Schema(String),
    #[error("unsupported problem file version {0} (expected 1)")]
    UnsupportedVersion(u32),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
