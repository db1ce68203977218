//! JSON problem files.
//!
//! A problem file describes either a scalar multi-term equation
//!
//! ```json
//! {
//!   "version": 1,
//!   "kind": "multi_term",
//!   "interval": { "a": 0.0, "b": 2.0 },
//!   "orders": ["1", "3/2"],
//!   "equations": [ { "order": "3/2", "rhs": "d1" } ],
//!   "initial": [0.0, 1.0],
//!   "solver": { "h": 0.0009765625, "t_end": 2.0 }
//! }
//! ```
//!
//! or a multi-order system, whose `equations` field is either an explicit
//! linear block
//!
//! ```json
//! "equations": { "matrix": [[0.0, 1.0], [-1.0, 0.0]], "forcing": ["0", "sin(t)"] }
//! ```
//!
//! or one right-hand-side expression per component, e.g.
//! `"equations": ["x2", "-x1 + t"]`.
//!
//! Scalar equations may reference `t`, `x`, and `d1`, ..., `d{m-1}` (the
//! lower-order derivatives in ascending order); system equations may
//! reference `t` and `x1`, ..., `xk`. Expressions that are affine in the
//! state with constant coefficients are recognised and loaded as explicit
//! linear right-hand sides, which is what the closed-form and stability
//! paths require; anything else is kept as a general closure. Runtime
//! domain errors inside such closures (for example a gamma pole hit while
//! integrating) evaluate to NaN, which the solver reports as a non-finite
//! state.

use std::path::Path;
use std::sync::Arc;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::expr::{parse_expr, BinOp, Expr, ExprKind, SliceBindings};
use crate::linalg::Matrix;
use crate::orders::{parse_order, Order};
use crate::reduce::{Forcing, MultiOrderSystem, MultiTermProblem, Rhs, SystemRhs};

#[derive(Clone, Copy, Debug, Deserialize, PartialEq)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    MultiTerm,
    MultiOrder,
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Interval {
    pub a: f64,
    pub b: f64,
}

/// Step size and horizon suggested by the problem file.
#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverParams {
    pub h: f64,
    #[serde(default)]
    pub t_end: Option<f64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScalarEquation {
    order: String,
    rhs: String,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum Equations {
    Scalar(Vec<ScalarEquation>),
    Linear {
        matrix: Vec<Vec<f64>>,
        #[serde(default)]
        forcing: Option<Vec<String>>,
    },
    PerComponent(Vec<String>),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProblemFile {
    version: u32,
    kind: ProblemKind,
    interval: Interval,
    orders: Vec<String>,
    equations: Equations,
    initial: Vec<f64>,
    #[serde(default)]
    solver: Option<SolverParams>,
    #[serde(default)]
    labels: Option<Vec<String>>,
}

/// A parsed and validated problem file.
#[derive(Debug)]
pub enum LoadedProblem {
    MultiTerm(MultiTermProblem),
    MultiOrder(MultiOrderSystem),
}

#[derive(Debug)]
pub struct Loaded {
    pub problem: LoadedProblem,
    pub interval: Interval,
    pub solver: Option<SolverParams>,
}

struct EmptyBindings;

impl crate::expr::Bindings for EmptyBindings {
    fn get(&self, _name: &str) -> Option<f64> {
        None
    }
}

/// Affine decomposition `sum_i coeffs[i] * vars[i] + value + sum_j c_j * g_j(t)`.
struct AffinePoly {
    coeffs: Vec<f64>,
    value: f64,
    rest: Vec<(f64, Expr)>,
}

impl AffinePoly {
    fn zero(n: usize) -> Self {
        AffinePoly { coeffs: vec![0.0; n], value: 0.0, rest: Vec::new() }
    }

    fn scale(mut self, c: f64) -> Self {
        for v in &mut self.coeffs {
            *v *= c;
        }
        self.value *= c;
        for (w, _) in &mut self.rest {
            *w *= c;
        }
        self
    }

    fn add(mut self, other: AffinePoly) -> Self {
        for (a, b) in self.coeffs.iter_mut().zip(other.coeffs) {
            *a += b;
        }
        self.value += other.value;
        self.rest.extend(other.rest);
        self
    }

    fn forcing(self) -> Forcing {
        if self.rest.is_empty() {
            if self.value == 0.0 {
                Forcing::Zero
            } else {
                Forcing::Constant(self.value)
            }
        } else {
            let value = self.value;
            let rest = self.rest;
            Forcing::Custom(Arc::new(move |t| {
                let names = [String::from("t")];
                let values = [t];
                let b = SliceBindings { names: &names, values: &values };
                let mut acc = value;
                for (w, e) in &rest {
                    acc += w * e.eval(&b).unwrap_or(f64::NAN);
                }
                acc
            }))
        }
    }
}

fn mentions_any(e: &Expr, vars: &[&str]) -> bool {
    e.free_variables().iter().any(|v| vars.contains(v))
}

/// Evaluates a subexpression with no free variables at all.
fn const_value(e: &Expr) -> Option<f64> {
    if !e.free_variables().is_empty() {
        return None;
    }
    e.eval(&EmptyBindings).ok()
}

/// Decomposes `e` as affine in `vars` with constant coefficients, leaving
/// everything else (necessarily `t`-only) in the remainder. Returns `None`
/// when the expression is nonlinear in the state or a state coefficient is
/// not a pure constant.
fn affine_in(e: &Expr, vars: &[&str]) -> Option<AffinePoly> {
    if !mentions_any(e, vars) {
        let mut p = AffinePoly::zero(vars.len());
        match const_value(e) {
            Some(v) => p.value = v,
            None => p.rest.push((1.0, e.clone())),
        }
        return Some(p);
    }
    match &e.kind {
        ExprKind::Var(name) => {
            let i = vars.iter().position(|v| v == name)?;
            let mut p = AffinePoly::zero(vars.len());
            p.coeffs[i] = 1.0;
            Some(p)
        }
        ExprKind::Neg(inner) => Some(affine_in(inner, vars)?.scale(-1.0)),
        ExprKind::Binary(BinOp::Add, l, r) => Some(affine_in(l, vars)?.add(affine_in(r, vars)?)),
        ExprKind::Binary(BinOp::Sub, l, r) => {
            Some(affine_in(l, vars)?.add(affine_in(r, vars)?.scale(-1.0)))
        }
        ExprKind::Binary(BinOp::Mul, l, r) => {
            if let Some(c) = const_value(l) {
                Some(affine_in(r, vars)?.scale(c))
            } else if let Some(c) = const_value(r) {
                Some(affine_in(l, vars)?.scale(c))
            } else {
                None
            }
        }
        ExprKind::Binary(BinOp::Div, l, r) => {
            let c = const_value(r)?;
            Some(affine_in(l, vars)?.scale(1.0 / c))
        }
        _ => None,
    }
}

fn check_variables(e: &Expr, allowed: &[&str], context: &str) -> Result<()> {
    for v in e.free_variables() {
        if !allowed.contains(&v) {
            return Err(Error::Schema(format!(
                "variable `{v}` is not available in {context} (allowed: {})",
                allowed.join(", ")
            )));
        }
    }
    Ok(())
}

fn scalar_rhs(expr: Expr, m: usize) -> Rhs {
    let mut vars: Vec<String> = vec!["x".to_string()];
    for j in 1..m {
        vars.push(format!("d{j}"));
    }
    let var_refs: Vec<&str> = vars.iter().map(|s| s.as_str()).collect();
    if let Some(mut p) = affine_in(&expr, &var_refs) {
        let coeffs = std::mem::take(&mut p.coeffs);
        return Rhs::Linear { coeffs, forcing: p.forcing() };
    }
    let mut names = vec!["t".to_string()];
    names.extend(vars);
    Rhs::General(Arc::new(move |t, args| {
        let mut values = Vec::with_capacity(names.len());
        values.push(t);
        values.extend_from_slice(args);
        let b = SliceBindings { names: &names, values: &values };
        expr.eval(&b).unwrap_or(f64::NAN)
    }))
}

fn system_rhs_from_exprs(exprs: Vec<Expr>, k: usize) -> Result<SystemRhs> {
    let vars: Vec<String> = (1..=k).map(|i| format!("x{i}")).collect();
    let var_refs: Vec<&str> = vars.iter().map(|s| s.as_str()).collect();

    let mut rows = Vec::with_capacity(k);
    let mut forcing = Vec::with_capacity(k);
    let mut all_affine = true;
    for e in &exprs {
        match affine_in(e, &var_refs) {
            Some(p) => {
                rows.push(p.coeffs.clone());
                forcing.push(p.forcing());
            }
            None => {
                all_affine = false;
                break;
            }
        }
    }
    if all_affine {
        return Ok(SystemRhs::Linear { matrix: Matrix::from_rows(&rows)?, forcing });
    }

    let mut names = vec!["t".to_string()];
    names.extend(vars);
    Ok(SystemRhs::General(Arc::new(move |t, x| {
        let mut values = Vec::with_capacity(names.len());
        values.push(t);
        values.extend_from_slice(x);
        let b = SliceBindings { names: &names, values: &values };
        exprs.iter().map(|e| e.eval(&b).unwrap_or(f64::NAN)).collect()
    })))
}

/// Parses and validates a problem file from JSON text.
pub fn load_problem_str(json: &str) -> Result<Loaded> {
    let file: ProblemFile = serde_json::from_str(json)?;
    if file.version != 1 {
        return Err(Error::UnsupportedVersion(file.version));
    }
    if !(file.interval.b > file.interval.a) {
        return Err(Error::Schema(format!(
            "interval must satisfy a < b, got a={}, b={}",
            file.interval.a, file.interval.b
        )));
    }
    if let Some(s) = &file.solver {
        if !(s.h > 0.0) {
            return Err(Error::Schema(format!("solver step must be positive, got {}", s.h)));
        }
    }
    let orders: Vec<Order> =
        file.orders.iter().map(|s| parse_order(s).map(Order::Rational)).collect::<Result<_>>()?;

    let problem = match file.kind {
        ProblemKind::MultiTerm => {
            let eqs = match file.equations {
                Equations::Scalar(eqs) => eqs,
                _ => {
                    return Err(Error::Schema(
                        "a multi_term problem needs `equations: [{order, rhs}]`".into(),
                    ))
                }
            };
            if file.labels.is_some() {
                return Err(Error::Schema("labels apply only to multi_order problems".into()));
            }
            if eqs.len() != 1 {
                return Err(Error::Schema(format!(
                    "a multi_term problem has exactly one equation, got {}",
                    eqs.len()
                )));
            }
            let subject = parse_order(&eqs[0].order)?;
            match orders.last() {
                Some(Order::Rational(top)) if *top == subject => {}
                _ => {
                    return Err(Error::Schema(format!(
                        "equation order {} must be the highest entry of `orders`",
                        eqs[0].order
                    )))
                }
            }
            let expr = parse_expr(&eqs[0].rhs)?;
            let m = orders.len();
            let mut allowed: Vec<String> = vec!["t".into(), "x".into()];
            for j in 1..m {
                allowed.push(format!("d{j}"));
            }
            let allowed_refs: Vec<&str> = allowed.iter().map(|s| s.as_str()).collect();
            check_variables(&expr, &allowed_refs, "a multi_term right-hand side")?;
            let rhs = scalar_rhs(expr, m);
            LoadedProblem::MultiTerm(MultiTermProblem::new(
                file.interval.a,
                orders,
                rhs,
                file.initial,
            )?)
        }
        ProblemKind::MultiOrder => {
            let k = orders.len();
            let rhs = match file.equations {
                Equations::Linear { matrix, forcing } => {
                    let m = Matrix::from_rows(&matrix)?;
                    if m.n() != k {
                        return Err(Error::Schema(format!(
                            "matrix is {}x{} but there are {k} orders",
                            m.n(),
                            m.n()
                        )));
                    }
                    let forcing = match forcing {
                        None => vec![Forcing::Zero; k],
                        Some(texts) => {
                            if texts.len() != k {
                                return Err(Error::Schema(format!(
                                    "{} forcing entries for {k} components",
                                    texts.len()
                                )));
                            }
                            let mut out = Vec::with_capacity(k);
                            for text in &texts {
                                let e = parse_expr(text)?;
                                check_variables(&e, &["t"], "a forcing term")?;
                                out.push(affine_in(&e, &[]).expect("no state variables").forcing());
                            }
                            out
                        }
                    };
                    SystemRhs::Linear { matrix: m, forcing }
                }
                Equations::PerComponent(texts) => {
                    if texts.len() != k {
                        return Err(Error::Schema(format!(
                            "{} equations for {k} components",
                            texts.len()
                        )));
                    }
                    let mut allowed: Vec<String> = vec!["t".into()];
                    for i in 1..=k {
                        allowed.push(format!("x{i}"));
                    }
                    let allowed_refs: Vec<&str> = allowed.iter().map(|s| s.as_str()).collect();
                    let mut exprs = Vec::with_capacity(k);
                    for text in &texts {
                        let e = parse_expr(text)?;
                        check_variables(&e, &allowed_refs, "a multi_order right-hand side")?;
                        exprs.push(e);
                    }
                    system_rhs_from_exprs(exprs, k)?
                }
                Equations::Scalar(_) => return Err(Error::Schema(
                    "a multi_order problem needs a matrix block or one expression per component"
                        .into(),
                )),
            };
            let system = match file.labels {
                Some(labels) => MultiOrderSystem::with_labels(
                    file.interval.a,
                    orders,
                    rhs,
                    file.initial,
                    labels,
                )?,
                None => MultiOrderSystem::new(file.interval.a, orders, rhs, file.initial)?,
            };
            LoadedProblem::MultiOrder(system)
        }
    };
    Ok(Loaded { problem, interval: file.interval, solver: file.solver })
}

/// Reads and parses a problem file from disk.
pub fn load_problem(path: &Path) -> Result<Loaded> {
    let text = std::fs::read_to_string(path)?;
    load_problem_str(&text)
}
