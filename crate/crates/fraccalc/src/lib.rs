//! Fractional-calculus toolkit: exact operators on power sums, reduction of
//! multi-term and multi-order fractional differential equations to
//! common-order systems, a fractional Adams-Bashforth-Moulton solver,
//! Mittag-Leffler closed forms, and sector-based linear stability analysis.
//!
//! The crate is organised around three layers:
//!
//! - Symbolic kernel: [`orders`] (exact rational orders), [`powcalc`]
//!   (Riemann-Liouville and Caputo operators on power sums, semigroup
//!   checking), [`specfun`] (gamma and Mittag-Leffler functions).
//! - Reduction: [`reduce`] turns a multi-term scalar equation or a
//!   multi-order system into a single-order system `D^gamma y = f(t, y)`
//!   suitable for numerics and stability analysis.
//! - Numerics and analysis: [`solve`] (predictor-corrector time stepping
//!   and Mittag-Leffler closed forms), [`stability`] (eigenvalue sector
//!   test), [`gridops`] (operators on sampled grids).

// Published coefficient tables and frozen oracle values keep every decimal
// digit of their sources, even where f64 rounds them away. Matrix kernels
// index by row and column, bound checks of the form `p <= m - 1` follow the
// usual statement of the Taylor bound, and negated comparisons such as
// `!(h > 0.0)` are NaN rejections.
#![allow(clippy::excessive_precision)]
#![allow(clippy::needless_range_loop)]
#![allow(clippy::int_plus_one)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::type_complexity)]

pub mod error;
pub mod expr;
pub mod gridops;
pub mod linalg;
pub mod orders;
pub mod powcalc;
pub mod problem;
pub mod reduce;
pub mod solve;
pub mod specfun;
pub mod stability;

pub use error::{Error, Result};
pub use expr::{parse_expr, Bindings, Expr, SliceBindings};
pub use gridops::{grid_caputo_derivative, grid_fractional_integral, GridFunction};
pub use orders::{commensurate_base, is_commensurate, parse_order, Order, RationalOrder};
pub use powcalc::{
    check_semigroup, Leg, OperatorKind, PowerSum, Regularity, SemigroupReport, SemigroupVerdict,
};
pub use problem::{
    load_problem, load_problem_str, Loaded, LoadedProblem, ProblemKind, SolverParams,
};
pub use reduce::{
    multi_order_to_single, reduce_to_multi_order, reduce_to_single_order, Forcing,
    MultiOrderSystem, MultiTermProblem, Rhs, SingleOrderSystem, SystemRhs,
};
pub use solve::{
    closed_form_solution, solve_multi_order, solve_single_order, ClosedFormSolution, Trajectory,
};
pub use specfun::{
    gamma, ln_gamma, mittag_leffler, mittag_leffler_complex, mittag_leffler_one,
    mittag_leffler_relaxation, recip_gamma,
};
pub use stability::{
    assess_stability, characteristic_polynomial, eigenvalues, polynomial_roots, EigenClass,
    EigenvalueReport, StabilityAssessment, StabilityVerdict,
};
