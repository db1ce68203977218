//! Order reductions between fractional problem classes.
//!
//! Three problem shapes appear here, all with Caputo derivatives on `[a, b]`:
//!
//! - [`MultiTermProblem`]: one unknown driven by several orders,
//!   `D^{alpha_k} x = f(t, x, D^{alpha_1} x, ..., D^{alpha_{k-1}} x)` with
//!   `alpha_1 < ... < alpha_k` and initial values `x(a), x'(a), ...` up to
//!   degree `ceil(alpha_k) - 1`.
//! - [`MultiOrderSystem`]: a first-order-like system where component `i`
//!   carries its own order `beta_i` in (0, 1]:
//!   `D^{beta_i} x_i = g_i(t, x)`.
//! - [`SingleOrderSystem`]: every component carries one common order
//!   `gamma`: `D^gamma y = g(t, y)`.
//!
//! The reductions:
//!
//! - [`reduce_to_single_order`] turns a multi-term problem with rational
//!   orders into a chain `y_j = D^{j/M} x` where `M` is the least common
//!   multiple of the order denominators, so `gamma = 1/M` and the dimension
//!   is `alpha_k * M`. A chain variable `y_j` receives the initial value
//!   `x^{(j/M)}(a)` when `j/M` is an integer and zero otherwise; this is the
//!   choice under which the chain composition `D^{j gamma} = (D^gamma)^j`
//!   reproduces the original Caputo problem. Commensurate irrational
//!   families are accepted when the highest order is at most one, where no
//!   chain variable past the first can carry an initial value anyway.
//! - [`reduce_to_multi_order`] rewrites a multi-term problem as a
//!   multi-order system over `x, D^{nu_1} x, D^{nu_2} x, ...` after
//!   normalising the order list (inserting the missing integers) so that
//!   consecutive gaps fit in (0, 1]. Variables at integer orders inherit the
//!   matching initial derivative; fractional ones start at zero.
//! - [`multi_order_to_single`] expands each component of a commensurate
//!   multi-order system into a chain over the common base order.
//!
//! Chain dimensions are capped at [`DIMENSION_CAP`] because pathological
//! denominators would otherwise allocate enormous systems.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::orders::{commensurate_base, lcm_denominators, Order, RationalOrder};

/// Largest reduced system dimension a reduction will produce.
pub const DIMENSION_CAP: usize = 10_000;

/// Inhomogeneous term of one equation.
#[derive(Clone)]
pub enum Forcing {
    Zero,
    Constant(f64),
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl Forcing {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Forcing::Zero => 0.0,
            Forcing::Constant(c) => *c,
            Forcing::Custom(f) => f(t),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Forcing::Zero)
    }
}

impl fmt::Debug for Forcing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Forcing::Zero => write!(f, "Zero"),
            Forcing::Constant(c) => write!(f, "Constant({c})"),
            Forcing::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

/// Right-hand side of a multi-term equation. Arguments arrive in the order
/// `[x, D^{alpha_1} x, ..., D^{alpha_{k-1}} x]`.
#[derive(Clone)]
pub enum Rhs {
    /// `coeffs[0] * x + sum_i coeffs[i] * D^{alpha_i} x + forcing(t)`.
    Linear {
        coeffs: Vec<f64>,
        forcing: Forcing,
    },
    General(Arc<dyn Fn(f64, &[f64]) -> f64 + Send + Sync>),
}

impl Rhs {
    pub fn eval(&self, t: f64, args: &[f64]) -> f64 {
        match self {
            Rhs::Linear { coeffs, forcing } => {
                coeffs.iter().zip(args).map(|(c, x)| c * x).sum::<f64>() + forcing.eval(t)
            }
            Rhs::General(f) => f(t, args),
        }
    }
}

impl fmt::Debug for Rhs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rhs::Linear { coeffs, forcing } => {
                write!(f, "Linear {{ coeffs: {coeffs:?}, forcing: {forcing:?} }}")
            }
            Rhs::General(_) => write!(f, "General(..)"),
        }
    }
}

/// Right-hand side of a system, one value per component.
#[derive(Clone)]
pub enum SystemRhs {
    /// `A x + forcing(t)` with one forcing entry per row.
    Linear {
        matrix: Matrix,
        forcing: Vec<Forcing>,
    },
    General(Arc<dyn Fn(f64, &[f64]) -> Vec<f64> + Send + Sync>),
}

impl SystemRhs {
    pub fn eval(&self, t: f64, x: &[f64]) -> Vec<f64> {
        match self {
            SystemRhs::Linear { matrix, forcing } => {
                let mut y = matrix.matvec(x);
                for (yi, g) in y.iter_mut().zip(forcing) {
                    *yi += g.eval(t);
                }
                y
            }
            SystemRhs::General(f) => f(t, x),
        }
    }

    /// The system matrix, when the right-hand side is linear.
    pub fn matrix(&self) -> Option<&Matrix> {
        match self {
            SystemRhs::Linear { matrix, .. } => Some(matrix),
            SystemRhs::General(_) => None,
        }
    }

    pub fn is_homogeneous_linear(&self) -> bool {
        matches!(self, SystemRhs::Linear { forcing, .. } if forcing.iter().all(Forcing::is_zero))
    }
}

impl fmt::Debug for SystemRhs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SystemRhs::Linear { matrix, forcing } => {
                write!(f, "Linear {{ matrix: {:?}, forcing: {forcing:?} }}", matrix.to_rows())
            }
            SystemRhs::General(_) => write!(f, "General(..)"),
        }
    }
}

/// One scalar equation driven by several Caputo orders.
#[derive(Clone, Debug)]
pub struct MultiTermProblem {
    base: f64,
    orders: Vec<Order>,
    rhs: Rhs,
    initial: Vec<f64>,
}

impl MultiTermProblem {
    /// Validates and stores `D^{alpha_k} x = f(t, x, D^{alpha_1} x, ...)`.
    ///
    /// Orders must be strictly ascending and positive with
    /// `alpha_1 <= 1`; `initial` holds `x^{(j)}(a)` for
    /// `j = 0..ceil(alpha_k)`. A linear right-hand side needs one
    /// coefficient per argument (`x` plus each lower-order derivative).
    pub fn new(base: f64, orders: Vec<Order>, rhs: Rhs, initial: Vec<f64>) -> Result<Self> {
        if !base.is_finite() {
            return Err(Error::OutOfRange { what: "base point", value: base });
        }
        if orders.is_empty() {
            return Err(Error::EmptyOrders);
        }
        for w in orders.windows(2) {
            if w[0].value() >= w[1].value() {
                return Err(Error::OrdersNotAscending);
            }
        }
        let first = orders[0].value();
        if first <= 0.0 || first > 1.0 {
            return Err(Error::FirstOrderRange(first));
        }
        let expected = orders.last().unwrap().ceil().max(1) as usize;
        if initial.len() != expected {
            return Err(Error::InitialCount { expected, got: initial.len() });
        }
        if let Rhs::Linear { coeffs, .. } = &rhs {
            if coeffs.len() != orders.len() {
                return Err(Error::MatrixShape(format!(
                    "linear right-hand side has {} coefficients, expected {}",
                    coeffs.len(),
                    orders.len()
                )));
            }
        }
        Ok(Self { base, orders, rhs, initial })
    }

    pub fn base(&self) -> f64 {
        self.base
    }

    pub fn orders(&self) -> &[Order] {
        &self.orders
    }

    pub fn rhs(&self) -> &Rhs {
        &self.rhs
    }

    pub fn initial(&self) -> &[f64] {
        &self.initial
    }

    pub fn highest_order(&self) -> Order {
        *self.orders.last().unwrap()
    }
}

/// A system where each component has its own order in (0, 1].
#[derive(Clone, Debug)]
pub struct MultiOrderSystem {
    base: f64,
    orders: Vec<Order>,
    rhs: SystemRhs,
    initial: Vec<f64>,
    labels: Vec<String>,
}

impl MultiOrderSystem {
    pub fn new(base: f64, orders: Vec<Order>, rhs: SystemRhs, initial: Vec<f64>) -> Result<Self> {
        let labels = (1..=orders.len()).map(|i| format!("x{i}")).collect();
        Self::with_labels(base, orders, rhs, initial, labels)
    }

    pub fn with_labels(
        base: f64,
        orders: Vec<Order>,
        rhs: SystemRhs,
        initial: Vec<f64>,
        labels: Vec<String>,
    ) -> Result<Self> {
        if !base.is_finite() {
            return Err(Error::OutOfRange { what: "base point", value: base });
        }
        if orders.is_empty() {
            return Err(Error::EmptyOrders);
        }
        let n = orders.len();
        for o in &orders {
            let v = o.value();
            if v <= 0.0 || v > 1.0 {
                return Err(Error::ComponentOrderRange(v));
            }
        }
        if initial.len() != n {
            return Err(Error::InitialCount { expected: n, got: initial.len() });
        }
        if labels.len() != n {
            return Err(Error::MatrixShape(format!("{} labels for {n} components", labels.len())));
        }
        if let SystemRhs::Linear { matrix, forcing } = &rhs {
            if matrix.n() != n {
                return Err(Error::MatrixShape(format!(
                    "system matrix is {}x{0}, expected {n}x{n}",
                    matrix.n()
                )));
            }
            if forcing.len() != n {
                return Err(Error::MatrixShape(format!(
                    "forcing has {} entries, expected {n}",
                    forcing.len()
                )));
            }
        }
        Ok(Self { base, orders, rhs, initial, labels })
    }

    pub fn base(&self) -> f64 {
        self.base
    }

    pub fn dim(&self) -> usize {
        self.orders.len()
    }

    pub fn orders(&self) -> &[Order] {
        &self.orders
    }

    pub fn rhs(&self) -> &SystemRhs {
        &self.rhs
    }

    pub fn initial(&self) -> &[f64] {
        &self.initial
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }
}

/// A system whose components all share one order `gamma`.
#[derive(Clone, Debug)]
pub struct SingleOrderSystem {
    base: f64,
    order: Order,
    rhs: SystemRhs,
    initial: Vec<f64>,
    labels: Vec<String>,
}

impl SingleOrderSystem {
    pub fn new(
        base: f64,
        order: Order,
        rhs: SystemRhs,
        initial: Vec<f64>,
        labels: Vec<String>,
    ) -> Result<Self> {
        if !base.is_finite() {
            return Err(Error::OutOfRange { what: "base point", value: base });
        }
        let v = order.value();
        if v <= 0.0 || v > 1.0 {
            return Err(Error::ComponentOrderRange(v));
        }
        let n = initial.len();
        if n == 0 {
            return Err(Error::InitialCount { expected: 1, got: 0 });
        }
        if labels.len() != n {
            return Err(Error::MatrixShape(format!("{} labels for {n} components", labels.len())));
        }
        if let SystemRhs::Linear { matrix, forcing } = &rhs {
            if matrix.n() != n || forcing.len() != n {
                return Err(Error::MatrixShape(format!(
                    "matrix/forcing sized {} do not match dimension {n}",
                    matrix.n()
                )));
            }
        }
        Ok(Self { base, order, rhs, initial, labels })
    }

    pub fn base(&self) -> f64 {
        self.base
    }

    pub fn order(&self) -> Order {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.initial.len()
    }

    pub fn rhs(&self) -> &SystemRhs {
        &self.rhs
    }

    pub fn initial(&self) -> &[f64] {
        &self.initial
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }
}

fn order_label(o: &Order, target: &str) -> String {
    format!("D^{o} {target}")
}

/// Inserts the integers missing from an ascending positive order list so
/// that the first order and every consecutive gap fit in (0, 1].
pub fn normalize_orders(orders: &[Order]) -> Result<Vec<Order>> {
    if orders.is_empty() {
        return Err(Error::EmptyOrders);
    }
    for w in orders.windows(2) {
        if w[0].value() >= w[1].value() {
            return Err(Error::OrdersNotAscending);
        }
    }
    if orders[0].value() <= 0.0 {
        return Err(Error::FirstOrderRange(orders[0].value()));
    }
    let top = orders.last().unwrap().value();
    let mut out: Vec<Order> = orders.to_vec();
    for k in 1..=(top.floor() as i64) {
        let present = out.iter().any(|o| o.is_integer() && o.floor() == k);
        if !present {
            out.push(Order::from_integer(k as u32));
        }
    }
    out.sort_by(|a, b| a.value().total_cmp(&b.value()));
    Ok(out)
}

fn order_difference(hi: &Order, lo: &Order) -> Result<Order> {
    match (hi.to_exact_rational(), lo.to_exact_rational()) {
        (Some(a), Some(b)) => Ok(Order::Rational(a.sub(&b)?)),
        _ => Ok(Order::Real(hi.value() - lo.value())),
    }
}

/// Rewrites a multi-term problem as a multi-order system over
/// `x, D^{nu_1} x, ...` with the normalised order list `nu`.
pub fn reduce_to_multi_order(p: &MultiTermProblem) -> Result<MultiOrderSystem> {
    let nu = normalize_orders(p.orders())?;
    let n = nu.len();
    if n > DIMENSION_CAP {
        return Err(Error::DimensionCap { n, cap: DIMENSION_CAP });
    }
    let mut betas = Vec::with_capacity(n);
    betas.push(nu[0]);
    for j in 1..n {
        betas.push(order_difference(&nu[j], &nu[j - 1])?);
    }

    // Argument i of the original right-hand side becomes system variable
    // args_idx[i]: x itself is variable 0 and D^{alpha_i} x sits one past
    // the position of alpha_i in the normalised list.
    let mut args_idx = Vec::with_capacity(p.orders().len());
    args_idx.push(0usize);
    for o in &p.orders()[..p.orders().len() - 1] {
        let pos = nu
            .iter()
            .position(|v| (v.value() - o.value()).abs() <= 1e-12)
            .expect("normalisation keeps every original order");
        args_idx.push(pos + 1);
    }

    let rhs = match p.rhs() {
        Rhs::Linear { coeffs, forcing } => {
            let mut matrix = Matrix::zeros(n);
            for j in 0..n - 1 {
                matrix.set(j, j + 1, 1.0);
            }
            for (c, &col) in coeffs.iter().zip(&args_idx) {
                matrix.set(n - 1, col, matrix.get(n - 1, col) + c);
            }
            let mut fvec = vec![Forcing::Zero; n];
            fvec[n - 1] = forcing.clone();
            SystemRhs::Linear { matrix, forcing: fvec }
        }
        Rhs::General(f) => {
            let f = f.clone();
            let idx = args_idx.clone();
            SystemRhs::General(Arc::new(move |t, z| {
                let mut out = Vec::with_capacity(z.len());
                out.extend_from_slice(&z[1..]);
                let args: Vec<f64> = idx.iter().map(|&i| z[i]).collect();
                out.push(f(t, &args));
                out
            }))
        }
    };

    let mut initial = Vec::with_capacity(n);
    initial.push(p.initial()[0]);
    for j in 1..n {
        let prev = &nu[j - 1];
        if prev.is_integer() {
            initial.push(p.initial()[prev.floor() as usize]);
        } else {
            initial.push(0.0);
        }
    }

    let mut labels = Vec::with_capacity(n);
    labels.push("x".to_string());
    for j in 1..n {
        labels.push(order_label(&nu[j - 1], "x"));
    }

    MultiOrderSystem::with_labels(p.base(), betas, rhs, initial, labels)
}

/// Reduces a multi-term problem straight to a common-order chain
/// `y_j = D^{j gamma} x`.
pub fn reduce_to_single_order(p: &MultiTermProblem) -> Result<SingleOrderSystem> {
    let rationals: Option<Vec<RationalOrder>> =
        p.orders().iter().map(Order::to_exact_rational).collect();

    let (gamma, multipliers): (Order, Vec<u64>) = match rationals {
        Some(rats) => {
            let m = lcm_denominators(&rats)?;
            let gamma = RationalOrder::new(1, m as i64)?;
            let mult = rats
                .iter()
                .map(|r| r.integer_multiple_of(&gamma).expect("lcm denominator divides"))
                .collect();
            (Order::Rational(gamma), mult)
        }
        None => {
            let top = p.highest_order().value();
            if top > 1.0 + 1e-12 {
                return Err(Error::IrrationalHighOrder(top));
            }
            let (gamma, mult) = commensurate_base(p.orders()).ok_or(Error::NonCommensurate)?;
            (gamma, mult)
        }
    };

    let n = *multipliers.last().unwrap() as usize;
    if n > DIMENSION_CAP {
        return Err(Error::DimensionCap { n, cap: DIMENSION_CAP });
    }

    // Argument i of the right-hand side reads chain variable alpha_i/gamma.
    let mut args_idx = Vec::with_capacity(p.orders().len());
    args_idx.push(0usize);
    for &m in &multipliers[..multipliers.len() - 1] {
        args_idx.push(m as usize);
    }

    let rhs = match p.rhs() {
        Rhs::Linear { coeffs, forcing } => {
            let mut matrix = Matrix::zeros(n);
            for j in 0..n - 1 {
                matrix.set(j, j + 1, 1.0);
            }
            for (c, &col) in coeffs.iter().zip(&args_idx) {
                matrix.set(n - 1, col, matrix.get(n - 1, col) + c);
            }
            let mut fvec = vec![Forcing::Zero; n];
            fvec[n - 1] = forcing.clone();
            SystemRhs::Linear { matrix, forcing: fvec }
        }
        Rhs::General(f) => {
            let f = f.clone();
            let idx = args_idx.clone();
            SystemRhs::General(Arc::new(move |t, y| {
                let mut out = Vec::with_capacity(y.len());
                out.extend_from_slice(&y[1..]);
                let args: Vec<f64> = idx.iter().map(|&i| y[i]).collect();
                out.push(f(t, &args));
                out
            }))
        }
    };

    // y_j = D^{j gamma} x starts at x^{(j gamma)}(a) when j gamma is an
    // integer and at zero otherwise.
    let mut initial = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for j in 0..n {
        let sub_order = match gamma {
            Order::Rational(g) => {
                Order::Rational(RationalOrder::new(g.numerator() * j as i64, g.denominator())?)
            }
            Order::Real(g) => Order::Real(g * j as f64),
        };
        if j == 0 {
            initial.push(p.initial()[0]);
            labels.push("x".to_string());
        } else if sub_order.is_integer() {
            initial.push(p.initial()[sub_order.floor() as usize]);
            labels.push(order_label(&sub_order, "x"));
        } else {
            initial.push(0.0);
            labels.push(order_label(&sub_order, "x"));
        }
    }

    SingleOrderSystem::new(p.base(), gamma, rhs, initial, labels)
}

/// Expands a commensurate multi-order system into a common-order chain,
/// component by component.
pub fn multi_order_to_single(s: &MultiOrderSystem) -> Result<SingleOrderSystem> {
    let (gamma, multipliers) = commensurate_base(s.orders()).ok_or(Error::NonCommensurate)?;
    let m: Vec<usize> = multipliers.iter().map(|&v| v as usize).collect();
    let n: usize = m.iter().sum();
    if n > DIMENSION_CAP {
        return Err(Error::DimensionCap { n, cap: DIMENSION_CAP });
    }
    let mut offsets = Vec::with_capacity(m.len());
    let mut acc = 0usize;
    for &mi in &m {
        offsets.push(acc);
        acc += mi;
    }

    let rhs = match s.rhs() {
        SystemRhs::Linear { matrix, forcing } => {
            let mut big = Matrix::zeros(n);
            let mut fvec = vec![Forcing::Zero; n];
            for (i, (&off, &mi)) in offsets.iter().zip(&m).enumerate() {
                for l in 0..mi - 1 {
                    big.set(off + l, off + l + 1, 1.0);
                }
                let last = off + mi - 1;
                for (j, &offj) in offsets.iter().enumerate() {
                    let c = matrix.get(i, j);
                    if c != 0.0 {
                        big.set(last, offj, c);
                    }
                }
                fvec[last] = forcing[i].clone();
            }
            SystemRhs::Linear { matrix: big, forcing: fvec }
        }
        SystemRhs::General(f) => {
            let f = f.clone();
            let offs = offsets.clone();
            let ms = m.clone();
            SystemRhs::General(Arc::new(move |t, z| {
                let xs: Vec<f64> = offs.iter().map(|&o| z[o]).collect();
                let g = f(t, &xs);
                let mut out = vec![0.0; z.len()];
                for (i, (&off, &mi)) in offs.iter().zip(&ms).enumerate() {
                    for l in 0..mi - 1 {
                        out[off + l] = z[off + l + 1];
                    }
                    out[off + mi - 1] = g[i];
                }
                out
            }))
        }
    };

    let mut initial = vec![0.0; n];
    let mut labels = vec![String::new(); n];
    for (i, (&off, &mi)) in offsets.iter().zip(&m).enumerate() {
        initial[off] = s.initial()[i];
        labels[off] = s.labels()[i].clone();
        for l in 1..mi {
            let sub_order = match gamma {
                Order::Rational(g) => {
                    Order::Rational(RationalOrder::new(g.numerator() * l as i64, g.denominator())?)
                }
                Order::Real(g) => Order::Real(g * l as f64),
            };
            labels[off + l] = order_label(&sub_order, &s.labels()[i]);
        }
    }

    SingleOrderSystem::new(s.base(), gamma, rhs, initial, labels)
}
