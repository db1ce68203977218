//! Numerical and closed-form solvers for fractional systems.
//!
//! [`solve_multi_order`] and [`solve_single_order`] integrate
//! `D^{beta_i} x_i = g_i(t, x)` (Caputo, `beta_i` in (0, 1]) with the
//! fractional Adams-Bashforth-Moulton predictor-corrector. Each component
//! carries the quadrature weights of its own order:
//!
//! ```text
//! predictor:  x^P_{n+1} = x_0 + h^b/gamma(b+1) sum_{j<=n} (d^b - (d-1)^b) g_j,      d = n+1-j
//! corrector:  x_{n+1}   = x_0 + h^b/gamma(b+2) [ g(t_{n+1}, x^P)
//!                          + (n^{b+1} - (n-b)(n+1)^b) g_0
//!                          + sum_{1<=j<=n} ((d+1)^{b+1} - 2d^{b+1} + (d-1)^{b+1}) g_j ]
//! ```
//!
//! followed by a final re-evaluation of the right-hand side at the corrected
//! state (the P(EC)E form). The convolution sums make the cost quadratic in
//! the step count. For order one these weights reduce to the classical
//! one-step Adams pair, and for smooth problems the corrector converges at
//! order `1 + min_i beta_i`.
//!
//! [`closed_form_solution`] solves homogeneous linear single-order systems
//! `D^gamma y = A y` exactly as a Mittag-Leffler eigenmode expansion
//!
//! ```text
//! y(t) = sum_i c_i E[gamma](lambda_i (t-a)^gamma) v_i
//! ```
//!
//! when the initial state lies in the span of the eigenvectors; a defective
//! matrix whose initial state needs generalized eigenvectors is reported as
//! such rather than silently approximated.

use std::io::{BufRead, Write};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{lstsq_complex, null_space_complex};
use crate::orders::{parse_order, Order};
use crate::reduce::{MultiOrderSystem, SingleOrderSystem, SystemRhs};
use crate::specfun::{gamma, mittag_leffler_complex};
use crate::stability::eigenvalues;

/// Discrete solution on the uniform grid `t_i = a + i h`, one labelled
/// column per state component.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    a: f64,
    h: f64,
    orders: Vec<Order>,
    labels: Vec<String>,
    states: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn t(&self, i: usize) -> f64 {
        self.a + i as f64 * self.h
    }

    /// Derivative order of each component, in column order.
    pub fn orders(&self) -> &[Order] {
        &self.orders
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn state(&self, i: usize) -> &[f64] {
        &self.states[i]
    }

    pub fn final_state(&self) -> &[f64] {
        self.states.last().expect("trajectories have at least one node")
    }

    /// All values of one component along the grid.
    pub fn component(&self, c: usize) -> Vec<f64> {
        self.states.iter().map(|s| s[c]).collect()
    }

    /// Largest absolute difference in component `c` against another
    /// trajectory on the same grid.
    pub fn max_component_diff(&self, other: &Trajectory, c: usize) -> Result<f64> {
        if self.a != other.a || self.h != other.h || self.len() != other.len() {
            return Err(Error::CsvFormat("trajectories live on different grids".into()));
        }
        Ok(self
            .states
            .iter()
            .zip(&other.states)
            .map(|(x, y)| (x[c] - y[c]).abs())
            .fold(0.0, f64::max))
    }

    /// Writes `t,<label>,...` rows at full f64 round-trip precision,
    /// preceded by `#` comment lines recording the scheme, step size, and
    /// component orders.
    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "# scheme: fractional Adams-Bashforth-Moulton (PECE)")?;
        writeln!(w, "# h: {}", self.h)?;
        write!(w, "# orders:")?;
        for o in &self.orders {
            write!(w, " {o}")?;
        }
        writeln!(w)?;
        write!(w, "t")?;
        for l in &self.labels {
            write!(w, ",{l}")?;
        }
        writeln!(w)?;
        for (i, row) in self.states.iter().enumerate() {
            write!(w, "{:.16e}", self.t(i))?;
            for v in row {
                write!(w, ",{v:.16e}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    /// Reads the format produced by [`Self::write_csv`]. The `# orders:`
    /// comment line is restored when present (exact fractions parse back
    /// exactly, decimals become real orders); other `#` lines are ignored.
    pub fn read_csv(r: impl BufRead) -> Result<Self> {
        let mut labels: Option<Vec<String>> = None;
        let mut orders: Vec<Order> = Vec::new();
        let mut ts: Vec<f64> = Vec::new();
        let mut states: Vec<Vec<f64>> = Vec::new();
        for line in r.lines() {
            let line = line?;
            let line = line.trim();
            if let Some(rest) = line.strip_prefix("# orders:") {
                orders.clear();
                for tok in rest.split_whitespace() {
                    let o = match parse_order(tok) {
                        Ok(r) => Order::Rational(r),
                        Err(_) => Order::Real(tok.parse::<f64>().map_err(|_| {
                            Error::CsvFormat(format!("bad order '{tok}' in metadata"))
                        })?),
                    };
                    orders.push(o);
                }
                continue;
            }
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            match &labels {
                None => {
                    if fields.first() != Some(&"t") || fields.len() < 2 {
                        return Err(Error::CsvFormat(format!(
                            "expected header 't,<labels>', got '{line}'"
                        )));
                    }
                    labels = Some(fields[1..].iter().map(|s| s.to_string()).collect());
                }
                Some(labels) => {
                    if fields.len() != labels.len() + 1 {
                        return Err(Error::CsvFormat(format!(
                            "row has {} fields, expected {}",
                            fields.len(),
                            labels.len() + 1
                        )));
                    }
                    let mut nums = Vec::with_capacity(fields.len());
                    for f in &fields {
                        nums.push(
                            f.trim()
                                .parse::<f64>()
                                .map_err(|_| Error::CsvFormat(format!("bad number '{f}'")))?,
                        );
                    }
                    ts.push(nums[0]);
                    states.push(nums[1..].to_vec());
                }
            }
        }
        let labels = labels.ok_or_else(|| Error::CsvFormat("missing header".into()))?;
        if ts.len() < 2 {
            return Err(Error::GridTooShort { need: 2, got: ts.len() });
        }
        let h = ts[1] - ts[0];
        if h <= 0.0 {
            return Err(Error::CsvFormat("grid nodes must be strictly increasing".into()));
        }
        for (i, &t) in ts.iter().enumerate() {
            if (t - (ts[0] + i as f64 * h)).abs() > 1e-9 * h.max(1.0) {
                return Err(Error::CsvFormat(format!("grid is not uniform at row {i}")));
            }
        }
        if !orders.is_empty() && orders.len() != labels.len() {
            return Err(Error::CsvFormat(format!(
                "metadata lists {} orders for {} components",
                orders.len(),
                labels.len()
            )));
        }
        Ok(Self { a: ts[0], h, orders, labels, states })
    }
}

struct WeightTable {
    pow_b: Vec<f64>,
    pow_b1: Vec<f64>,
    beta: f64,
    front_pred: f64,
    front_corr: f64,
}

impl WeightTable {
    fn new(beta: f64, h: f64, n_steps: usize) -> Result<Self> {
        let mut pow_b = Vec::with_capacity(n_steps + 2);
        let mut pow_b1 = Vec::with_capacity(n_steps + 2);
        for d in 0..=n_steps + 1 {
            let df = d as f64;
            pow_b.push(df.powf(beta));
            pow_b1.push(df.powf(beta + 1.0));
        }
        Ok(Self {
            pow_b,
            pow_b1,
            beta,
            front_pred: h.powf(beta) / gamma(beta + 1.0)?,
            front_corr: h.powf(beta) / gamma(beta + 2.0)?,
        })
    }

    fn predictor_weight(&self, d: usize) -> f64 {
        self.pow_b[d] - self.pow_b[d - 1]
    }

    fn corrector_weight(&self, d: usize) -> f64 {
        self.pow_b1[d + 1] - 2.0 * self.pow_b1[d] + self.pow_b1[d - 1]
    }

    fn corrector_first_weight(&self, n: usize) -> f64 {
        let nf = n as f64;
        self.pow_b1[n] - (nf - self.beta) * self.pow_b[n + 1]
    }
}

fn abm_pece(
    a: f64,
    orders: &[Order],
    rhs: &SystemRhs,
    x0: &[f64],
    labels: &[String],
    h: f64,
    t_end: f64,
) -> Result<Trajectory> {
    let betas: Vec<f64> = orders.iter().map(|o| o.value()).collect();
    if !h.is_finite() || h <= 0.0 {
        return Err(Error::OutOfRange { what: "step size", value: h });
    }
    let len = t_end - a;
    if !len.is_finite() || len <= 0.0 {
        return Err(Error::OutOfRange { what: "integration interval length", value: len });
    }
    let steps_f = len / h;
    let n_steps = steps_f.round();
    if (steps_f - n_steps).abs() > 1e-9 * n_steps.max(1.0) || n_steps < 1.0 {
        return Err(Error::StepMismatch { h, len });
    }
    let n_steps = n_steps as usize;
    let dim = x0.len();

    // Components sharing an order share one weight table.
    let mut tables: Vec<WeightTable> = Vec::new();
    let mut table_of: Vec<usize> = Vec::with_capacity(dim);
    for &b in &betas {
        match tables.iter().position(|t| t.beta == b) {
            Some(i) => table_of.push(i),
            None => {
                tables.push(WeightTable::new(b, h, n_steps)?);
                table_of.push(tables.len() - 1);
            }
        }
    }

    let mut states: Vec<Vec<f64>> = Vec::with_capacity(n_steps + 1);
    let mut evals: Vec<Vec<f64>> = Vec::with_capacity(n_steps + 1);
    states.push(x0.to_vec());
    evals.push(rhs.eval(a, x0));

    for n in 0..n_steps {
        let t_next = a + (n + 1) as f64 * h;
        let mut predicted = vec![0.0; dim];
        for c in 0..dim {
            let tab = &tables[table_of[c]];
            let mut acc = 0.0;
            for (j, g) in evals.iter().enumerate() {
                acc += tab.predictor_weight(n + 1 - j) * g[c];
            }
            predicted[c] = x0[c] + tab.front_pred * acc;
        }
        let g_pred = rhs.eval(t_next, &predicted);
        let mut corrected = vec![0.0; dim];
        for c in 0..dim {
            let tab = &tables[table_of[c]];
            let mut acc = g_pred[c] + tab.corrector_first_weight(n) * evals[0][c];
            for (j, g) in evals.iter().enumerate().skip(1) {
                acc += tab.corrector_weight(n + 1 - j) * g[c];
            }
            corrected[c] = x0[c] + tab.front_corr * acc;
        }
        if corrected.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteState { node: n + 1, t: t_next });
        }
        evals.push(rhs.eval(t_next, &corrected));
        states.push(corrected);
    }

    Ok(Trajectory { a, h, orders: orders.to_vec(), labels: labels.to_vec(), states })
}

/// Integrates a multi-order system up to `t_end` with step `h`, which must
/// divide the interval evenly.
pub fn solve_multi_order(s: &MultiOrderSystem, h: f64, t_end: f64) -> Result<Trajectory> {
    abm_pece(s.base(), s.orders(), s.rhs(), s.initial(), s.labels(), h, t_end)
}

/// Integrates a common-order system up to `t_end` with step `h`.
pub fn solve_single_order(s: &SingleOrderSystem, h: f64, t_end: f64) -> Result<Trajectory> {
    let orders = vec![s.order(); s.dim()];
    abm_pece(s.base(), &orders, s.rhs(), s.initial(), s.labels(), h, t_end)
}

/// Mittag-Leffler eigenmode expansion of a homogeneous linear system.
#[derive(Clone, Debug)]
pub struct ClosedFormSolution {
    base: f64,
    gamma_order: f64,
    modes: Vec<(Complex64, Complex64, Vec<Complex64>)>,
}

impl ClosedFormSolution {
    /// Distinct eigenvalues that carry at least one mode.
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        let mut out: Vec<Complex64> = Vec::new();
        for (lambda, _, _) in &self.modes {
            if !out.iter().any(|l| (l - lambda).norm() < 1e-12) {
                out.push(*lambda);
            }
        }
        out
    }

    /// Evaluates the solution at `t >= a`.
    pub fn eval(&self, t: f64) -> Result<Vec<f64>> {
        let tau = t - self.base;
        if tau < 0.0 {
            return Err(Error::OutOfRange { what: "evaluation point before base", value: t });
        }
        let dim = self.modes.first().map_or(0, |(_, _, v)| v.len());
        let mut acc = vec![Complex64::new(0.0, 0.0); dim];
        let scale = tau.powf(self.gamma_order);
        for (lambda, coeff, vector) in &self.modes {
            let e = mittag_leffler_complex(self.gamma_order, 1.0, lambda * scale)?;
            for (a, v) in acc.iter_mut().zip(vector) {
                *a += coeff * e * v;
            }
        }
        Ok(acc.into_iter().map(|z| z.re).collect())
    }
}

/// Builds the closed-form solution of `D^gamma y = A y`, `y(a) = y0`.
///
/// Fails with [`Error::DefectiveMatrix`] when `y0` has a component outside
/// the span of the eigenvectors, which happens exactly when a defective
/// eigenvalue is actually excited.
pub fn closed_form_solution(s: &SingleOrderSystem) -> Result<ClosedFormSolution> {
    let matrix = match s.rhs() {
        SystemRhs::Linear { matrix, .. } if s.rhs().is_homogeneous_linear() => matrix,
        _ => return Err(Error::NotLinear("the closed-form solver")),
    };
    let n = matrix.n();
    let lambdas = eigenvalues(matrix)?;

    // Cluster repeated eigenvalues so each distinct value contributes its
    // eigenspace once.
    let cluster_tol = 1e-6 * (1.0 + matrix.frobenius_norm());
    let mut distinct: Vec<Complex64> = Vec::new();
    for l in &lambdas {
        if !distinct.iter().any(|d| (d - l).norm() <= cluster_tol) {
            distinct.push(*l);
        }
    }

    let mut vectors: Vec<(Complex64, Vec<Complex64>)> = Vec::new();
    for &l in &distinct {
        let shifted: Vec<Vec<Complex64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let mut z = Complex64::new(matrix.get(i, j), 0.0);
                        if i == j {
                            z -= l;
                        }
                        z
                    })
                    .collect()
            })
            .collect();
        for v in null_space_complex(&shifted, 1e-9) {
            vectors.push((l, v));
        }
    }
    if vectors.is_empty() {
        return Err(Error::DefectiveMatrix);
    }

    // Represent the initial state in the eigenbasis.
    let rows: Vec<Vec<Complex64>> =
        (0..n).map(|i| vectors.iter().map(|(_, v)| v[i]).collect()).collect();
    let b: Vec<Complex64> = s.initial().iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let (coeffs, residual) = lstsq_complex(&rows, &b).ok_or(Error::DefectiveMatrix)?;
    let x0_norm = s.initial().iter().map(|v| v * v).sum::<f64>().sqrt();
    if residual > 1e-8 * (1.0 + x0_norm) {
        return Err(Error::DefectiveMatrix);
    }

    let modes = vectors
        .into_iter()
        .zip(coeffs)
        .map(|((lambda, vector), coeff)| (lambda, coeff, vector))
        .collect();
    Ok(ClosedFormSolution { base: s.base(), gamma_order: s.order().value(), modes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;
    use crate::orders::{parse_order, Order};
    use crate::reduce::Forcing;
    use crate::specfun::mittag_leffler_one;
    use std::sync::Arc;

    fn ord(s: &str) -> Order {
        Order::Rational(parse_order(s).unwrap())
    }

    fn scalar_system(order: &str, lambda: f64, x0: f64) -> SingleOrderSystem {
        let m = Matrix::from_rows(&[vec![lambda]]).unwrap();
        SingleOrderSystem::new(
            0.0,
            ord(order),
            SystemRhs::Linear { matrix: m, forcing: vec![Forcing::Zero] },
            vec![x0],
            vec!["x".into()],
        )
        .unwrap()
    }

    #[test]
    fn order_one_reproduces_the_exponential() {
        let s = scalar_system("1", 1.0, 1.0);
        let traj = solve_single_order(&s, 1.0 / 128.0, 1.0).unwrap();
        let got = traj.final_state()[0];
        assert!((got - std::f64::consts::E).abs() < 1e-3, "got {got}");
    }

    #[test]
    fn half_order_eigenfunction_converges_to_mittag_leffler() {
        let exact = mittag_leffler_one(0.5, 1.0).unwrap();
        let err = |steps: usize| {
            let s = scalar_system("1/2", 1.0, 1.0);
            let traj = solve_single_order(&s, 1.0 / steps as f64, 1.0).unwrap();
            (traj.final_state()[0] - exact).abs()
        };
        let coarse = err(256);
        let fine = err(512);
        assert!(coarse < 1e-2, "coarse error {coarse}");
        assert!(coarse / fine > 1.8, "ratio {}", coarse / fine);
    }

    #[test]
    fn mixed_orders_integrate_a_coupled_system() {
        // D^1 u = v, D^{1/2} v = -v: v decays like a Mittag-Leffler
        // function, u accumulates it.
        let m = Matrix::from_rows(&[vec![0.0, 1.0], vec![0.0, -1.0]]).unwrap();
        let s = MultiOrderSystem::new(
            0.0,
            vec![ord("1"), ord("1/2")],
            SystemRhs::Linear { matrix: m, forcing: vec![Forcing::Zero, Forcing::Zero] },
            vec![0.0, 1.0],
        )
        .unwrap();
        let traj = solve_multi_order(&s, 1.0 / 512.0, 1.0).unwrap();
        let v_exact = mittag_leffler_one(0.5, -1.0).unwrap();
        assert!((traj.final_state()[1] - v_exact).abs() < 5e-3);
        assert!(traj.final_state()[0] > 0.0);
    }

    #[test]
    fn nonlinear_blowup_is_reported_not_propagated() {
        // D^1 x = x^2 with x(0) = 2 blows up at t = 1/2.
        let s = MultiOrderSystem::new(
            0.0,
            vec![ord("1")],
            SystemRhs::General(Arc::new(|_t, x: &[f64]| vec![x[0] * x[0]])),
            vec![2.0],
        )
        .unwrap();
        match solve_multi_order(&s, 1.0 / 64.0, 1.0) {
            Err(Error::NonFiniteState { node, .. }) => assert!(node > 8),
            other => panic!("expected non-finite state, got {other:?}"),
        }
    }

    #[test]
    fn step_must_divide_the_interval() {
        let s = scalar_system("1/2", 1.0, 1.0);
        assert!(matches!(solve_single_order(&s, 0.3, 1.0), Err(Error::StepMismatch { .. })));
        assert!(solve_single_order(&s, 0.25, 1.0).is_ok());
    }

    #[test]
    fn trajectory_csv_round_trips() {
        let s = scalar_system("1/2", -1.0, 1.0);
        let traj = solve_single_order(&s, 0.125, 1.0).unwrap();
        let mut buf = Vec::new();
        traj.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.contains("# scheme: fractional Adams-Bashforth-Moulton"));
        assert!(text.contains("# h: 0.125"));
        assert!(text.contains("# orders: 1/2"));
        let back = Trajectory::read_csv(&buf[..]).unwrap();
        assert_eq!(traj, back);
    }

    #[test]
    fn zero_rhs_keeps_the_initial_state_exactly() {
        let s = scalar_system("1/2", 0.0, 1.0);
        let traj = solve_single_order(&s, 0.125, 2.0).unwrap();
        for i in 0..traj.len() {
            assert_eq!(traj.state(i)[0], 1.0, "node {i} drifted");
        }
    }

    #[test]
    fn closed_form_matches_the_stepper_on_random_stable_systems() {
        use rand::{Rng, SeedableRng};
        use rand_chacha::ChaCha8Rng;

        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for g in ["1/4", "1/2", "3/4"] {
            for _ in 0..3 {
                // Diagonally dominant with negative diagonal: Gershgorin
                // keeps every eigenvalue in Re [-1.3, -0.5], inside the
                // stable sector for any order below one and small enough
                // that the Mittag-Leffler series stays well conditioned at
                // order 1/4.
                let mut rows = vec![vec![0.0; 3]; 3];
                for i in 0..3 {
                    for j in 0..3 {
                        rows[i][j] = if i == j {
                            -rng.gen_range(0.7..1.1)
                        } else {
                            rng.gen_range(-0.1..0.1)
                        };
                    }
                }
                let m = Matrix::from_rows(&rows).unwrap();
                let x0: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let s = SingleOrderSystem::new(
                    0.0,
                    ord(g),
                    SystemRhs::Linear { matrix: m, forcing: vec![Forcing::Zero; 3] },
                    x0,
                    vec!["x1".into(), "x2".into(), "x3".into()],
                )
                .unwrap();
                let exact = closed_form_solution(&s).unwrap().eval(1.0).unwrap();
                let traj = solve_single_order(&s, 1.0 / 512.0, 1.0).unwrap();
                let num = traj.final_state();
                for c in 0..3 {
                    let diff = (exact[c] - num[c]).abs();
                    assert!(diff < 5e-3, "gamma {g}: component {c} off by {diff}");
                }
            }
        }
    }

    #[test]
    fn closed_form_matches_the_scalar_eigenfunction() {
        let s = scalar_system("1/2", 1.0, 1.0);
        let cf = closed_form_solution(&s).unwrap();
        let got = cf.eval(1.0).unwrap()[0];
        let want = mittag_leffler_one(0.5, 1.0).unwrap();
        assert!((got - want).abs() < 1e-12, "got {got}, want {want}");
    }

    #[test]
    fn closed_form_handles_complex_pairs() {
        // Rotation generator: eigenvalues +-i, solution stays real.
        let m = Matrix::from_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]).unwrap();
        let s = SingleOrderSystem::new(
            0.0,
            ord("1"),
            SystemRhs::Linear { matrix: m, forcing: vec![Forcing::Zero, Forcing::Zero] },
            vec![1.0, 0.0],
            vec!["x".into(), "y".into()],
        )
        .unwrap();
        let cf = closed_form_solution(&s).unwrap();
        let got = cf.eval(1.0).unwrap();
        assert!((got[0] - 1.0f64.cos()).abs() < 1e-10);
        assert!((got[1] - 1.0f64.sin()).abs() < 1e-10);
    }

    #[test]
    fn closed_form_on_defective_matrix_depends_on_the_initial_state() {
        // One eigenvalue of this chain matrix is double but has a single
        // eigenvector, so only some initial states are representable.
        let m = Matrix::from_rows(&[vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0], vec![0.0, 0.0, 1.0]])
            .unwrap();
        let mk = |x0: Vec<f64>| {
            SingleOrderSystem::new(
                0.0,
                ord("1/2"),
                SystemRhs::Linear {
                    matrix: m.clone(),
                    forcing: vec![Forcing::Zero, Forcing::Zero, Forcing::Zero],
                },
                x0,
                vec!["a".into(), "b".into(), "c".into()],
            )
            .unwrap()
        };
        let cf = closed_form_solution(&mk(vec![1.0, 0.0, 0.0])).unwrap();
        let got = cf.eval(2.0).unwrap();
        assert!((got[0] - 1.0).abs() < 1e-10);
        assert!(got[1].abs() < 1e-10 && got[2].abs() < 1e-10);

        assert!(matches!(
            closed_form_solution(&mk(vec![0.0, 1.0, 0.0])),
            Err(Error::DefectiveMatrix)
        ));
    }

    #[test]
    fn closed_form_requires_homogeneous_linear_input() {
        let s = SingleOrderSystem::new(
            0.0,
            ord("1/2"),
            SystemRhs::General(Arc::new(|_t, x: &[f64]| vec![x[0]])),
            vec![1.0],
            vec!["x".into()],
        )
        .unwrap();
        assert!(matches!(closed_form_solution(&s), Err(Error::NotLinear(_))));
    }
}
