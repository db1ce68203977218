//! Exact fractional calculus on finite power sums.
//!
//! A [`PowerSum`] is a function of the form
//!
//! ```text
//! f(t) = sum_i  c_i (t - a)^{p_i}
//! ```
//!
//! with real exponents, the class on which Riemann-Liouville and Caputo
//! operators act in closed form:
//!
//! ```text
//! J^alpha c (t-a)^p = c gamma(p+1)/gamma(p+1+alpha) (t-a)^{p+alpha}
//! D^alpha c (t-a)^p = c gamma(p+1)/gamma(p+1-alpha) (t-a)^{p-alpha}
//! ```
//!
//! When `p + 1 - alpha` hits a non-positive integer the reciprocal gamma
//! factor vanishes and the Riemann-Liouville derivative annihilates the term
//! (the classic example being `D^{1/2} t^{-1/2} = 0`). The Caputo derivative
//! subtracts the Taylor polynomial of degree `ceil(alpha) - 1` first, so it
//! annihilates exactly the integer exponents below `ceil(alpha)` and is
//! undefined when a non-integer exponent at or below `ceil(alpha) - 1` makes
//! that Taylor polynomial meaningless.
//!
//! Exponents within [`EXP_TOL`] of an integer snap onto it at construction,
//! so order arithmetic carried out in floating point (`0.7 + 0.3`) still
//! triggers exact integer behaviour. Operator inputs must be locally
//! integrable at the base point: every exponent must exceed -1.
//!
//! [`check_semigroup`] composes two derivatives of the same kind and compares
//! against the single derivative of the summed order, reporting whether the
//! semigroup identity `D^gamma D^beta f = D^{beta+gamma} f` holds for the
//! given function, together with an executable sufficient condition under
//! which the identity is guaranteed in advance.

use std::fmt;

use crate::error::{Error, Result};
use crate::orders::{snap_ceil, snap_floor};
use crate::specfun::gamma;

/// Exponents closer than this to an integer are treated as that integer.
pub const EXP_TOL: f64 = 1e-12;

/// Default relative coefficient tolerance for power sum comparisons.
pub const COEFF_RTOL: f64 = 1e-12;

/// One term `coeff * (t - base)^exponent` of a [`PowerSum`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerTerm {
    pub coeff: f64,
    pub exponent: f64,
}

/// A finite sum of real powers of `(t - base)`, kept sorted by exponent with
/// like terms combined and zero terms removed.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerSum {
    base: f64,
    terms: Vec<PowerTerm>,
}

/// Behaviour of a power sum at its base point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Regularity {
    /// All exponents are non-negative; the function extends continuously
    /// into the base point with the given value.
    Continuous { value_at_base: f64 },
    /// Some exponent lies in (-1, 0): integrable but unbounded at the base.
    L1Only,
    /// Some exponent is -1 or below: not locally integrable.
    NotL1,
}

fn snap_exponent(p: f64) -> f64 {
    let r = p.round();
    if (p - r).abs() <= EXP_TOL {
        r
    } else {
        p
    }
}

impl PowerSum {
    /// Builds a power sum around `base` from `(coeff, exponent)` pairs,
    /// snapping near-integer exponents, merging like terms, and dropping
    /// exact zeros.
    pub fn new(base: f64, terms: &[(f64, f64)]) -> Result<Self> {
        if !base.is_finite() {
            return Err(Error::OutOfRange { what: "power sum base point", value: base });
        }
        let mut collected: Vec<PowerTerm> = Vec::with_capacity(terms.len());
        for &(coeff, exponent) in terms {
            if !coeff.is_finite() {
                return Err(Error::OutOfRange { what: "power sum coefficient", value: coeff });
            }
            if !exponent.is_finite() {
                return Err(Error::OutOfRange { what: "power sum exponent", value: exponent });
            }
            collected.push(PowerTerm { coeff, exponent: snap_exponent(exponent) });
        }
        collected.sort_by(|a, b| a.exponent.total_cmp(&b.exponent));
        let mut merged: Vec<PowerTerm> = Vec::with_capacity(collected.len());
        for t in collected {
            match merged.last_mut() {
                Some(last) if (last.exponent - t.exponent).abs() <= EXP_TOL => {
                    last.coeff += t.coeff;
                }
                _ => merged.push(t),
            }
        }
        merged.retain(|t| t.coeff != 0.0);
        Ok(Self { base, terms: merged })
    }

    /// The zero function around `base`.
    pub fn zero(base: f64) -> Self {
        Self { base, terms: Vec::new() }
    }

    pub fn monomial(base: f64, coeff: f64, exponent: f64) -> Result<Self> {
        Self::new(base, &[(coeff, exponent)])
    }

    pub fn constant(base: f64, value: f64) -> Result<Self> {
        Self::new(base, &[(value, 0.0)])
    }

    pub fn base(&self) -> f64 {
        self.base
    }

    pub fn terms(&self) -> &[PowerTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn min_exponent(&self) -> Option<f64> {
        self.terms.first().map(|t| t.exponent)
    }

    /// Pointwise value at `t >= base`. Exponent zero at `t == base`
    /// contributes its coefficient; negative exponents diverge there with
    /// the usual IEEE semantics.
    pub fn eval(&self, t: f64) -> f64 {
        let x = t - self.base;
        self.terms.iter().map(|term| term.coeff * x.powf(term.exponent)).sum()
    }

    pub fn add(&self, other: &PowerSum) -> Result<PowerSum> {
        if self.base != other.base {
            return Err(Error::BasePointMismatch(self.base, other.base));
        }
        let pairs: Vec<(f64, f64)> =
            self.terms.iter().chain(other.terms.iter()).map(|t| (t.coeff, t.exponent)).collect();
        PowerSum::new(self.base, &pairs)
    }

    pub fn scale(&self, k: f64) -> Result<PowerSum> {
        let pairs: Vec<(f64, f64)> = self.terms.iter().map(|t| (k * t.coeff, t.exponent)).collect();
        PowerSum::new(self.base, &pairs)
    }

    /// Coefficient-wise comparison with exponent matching up to [`EXP_TOL`]
    /// and coefficients compared relative to the larger sum's scale (with an
    /// absolute floor of one). Sums around different base points never
    /// compare equal.
    pub fn approx_eq(&self, other: &PowerSum, rtol: f64) -> bool {
        if self.base != other.base {
            return false;
        }
        let scale = self
            .terms
            .iter()
            .chain(other.terms.iter())
            .map(|t| t.coeff.abs())
            .fold(1.0f64, f64::max);
        let tol = rtol * scale;
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() || j < other.terms.len() {
            let a = self.terms.get(i);
            let b = other.terms.get(j);
            match (a, b) {
                (Some(a), Some(b)) if (a.exponent - b.exponent).abs() <= EXP_TOL => {
                    if (a.coeff - b.coeff).abs() > tol {
                        return false;
                    }
                    i += 1;
                    j += 1;
                }
                (Some(a), Some(b)) if a.exponent < b.exponent => {
                    if a.coeff.abs() > tol {
                        return false;
                    }
                    i += 1;
                }
                (Some(_), Some(b)) => {
                    if b.coeff.abs() > tol {
                        return false;
                    }
                    j += 1;
                }
                (Some(a), None) => {
                    if a.coeff.abs() > tol {
                        return false;
                    }
                    i += 1;
                }
                (None, Some(b)) => {
                    if b.coeff.abs() > tol {
                        return false;
                    }
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        true
    }

    pub fn is_approx_zero(&self, atol: f64) -> bool {
        self.terms.iter().all(|t| t.coeff.abs() <= atol)
    }

    /// Classification of the behaviour at the base point.
    pub fn regularity(&self) -> Regularity {
        match self.min_exponent() {
            None => Regularity::Continuous { value_at_base: 0.0 },
            Some(p) if p >= -EXP_TOL => {
                let value = self.terms.iter().find(|t| t.exponent == 0.0).map_or(0.0, |t| t.coeff);
                Regularity::Continuous { value_at_base: value }
            }
            Some(p) if p <= -1.0 + EXP_TOL => Regularity::NotL1,
            Some(_) => Regularity::L1Only,
        }
    }

    fn check_operator_order(alpha: f64) -> Result<()> {
        if !alpha.is_finite() || alpha < 0.0 {
            return Err(Error::OutOfRange { what: "operator order", value: alpha });
        }
        Ok(())
    }

    fn check_integrable(&self) -> Result<()> {
        for t in &self.terms {
            if t.exponent <= -1.0 + EXP_TOL {
                return Err(Error::ExponentNotIntegrable(t.exponent));
            }
        }
        Ok(())
    }

    /// Riemann-Liouville fractional integral of order `alpha >= 0`.
    pub fn riemann_liouville_integral(&self, alpha: f64) -> Result<PowerSum> {
        Self::check_operator_order(alpha)?;
        if alpha <= EXP_TOL {
            return Ok(self.clone());
        }
        self.check_integrable()?;
        let mut out = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            let coeff = t.coeff * gamma(t.exponent + 1.0)? / gamma(t.exponent + 1.0 + alpha)?;
            out.push((coeff, t.exponent + alpha));
        }
        PowerSum::new(self.base, &out)
    }

    /// Riemann-Liouville fractional derivative of order `alpha >= 0`.
    ///
    /// Terms whose shifted exponent `p + 1 - alpha` lands on a non-positive
    /// integer are annihilated exactly.
    pub fn riemann_liouville_derivative(&self, alpha: f64) -> Result<PowerSum> {
        Self::check_operator_order(alpha)?;
        if alpha <= EXP_TOL {
            return Ok(self.clone());
        }
        self.check_integrable()?;
        let mut out = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            let q = t.exponent + 1.0 - alpha;
            if q <= EXP_TOL && (q - q.round()).abs() <= EXP_TOL {
                continue;
            }
            let coeff = t.coeff * gamma(t.exponent + 1.0)? / gamma(q)?;
            out.push((coeff, t.exponent - alpha));
        }
        PowerSum::new(self.base, &out)
    }

    /// Caputo fractional derivative of order `alpha >= 0`.
    ///
    /// Subtracting the degree `ceil(alpha) - 1` Taylor polynomial before
    /// differentiating means integer exponents below `ceil(alpha)` vanish;
    /// a non-integer exponent at or below `ceil(alpha) - 1` has no Taylor
    /// polynomial of that degree and makes the operator undefined.
    pub fn caputo_derivative(&self, alpha: f64) -> Result<PowerSum> {
        Self::check_operator_order(alpha)?;
        if alpha <= EXP_TOL {
            return Ok(self.clone());
        }
        self.check_integrable()?;
        let m = snap_ceil(alpha);
        let mut out = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            let p = t.exponent;
            let is_integer = p.fract() == 0.0;
            if is_integer && p >= 0.0 && (p as i64) <= m - 1 {
                continue;
            }
            if !(is_integer && p >= 0.0) && p <= (m - 1) as f64 {
                return Err(Error::TaylorUndefined { exponent: p, degree: m - 1 });
            }
            let coeff = t.coeff * gamma(p + 1.0)? / gamma(p + 1.0 - alpha)?;
            out.push((coeff, p - alpha));
        }
        PowerSum::new(self.base, &out)
    }

    /// Whether [`Self::caputo_derivative`] is defined for this function.
    pub fn caputo_applicable(&self, alpha: f64) -> bool {
        self.caputo_derivative(alpha).is_ok()
    }
}

impl fmt::Display for PowerSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            let c = t.coeff.abs();
            if i == 0 {
                if t.coeff < 0.0 {
                    write!(f, "-")?;
                }
            } else if t.coeff < 0.0 {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if t.exponent == 0.0 {
                write!(f, "{c}")?;
                continue;
            }
            if c != 1.0 {
                write!(f, "{c}*")?;
            }
            if self.base == 0.0 {
                write!(f, "t")?;
            } else if self.base > 0.0 {
                write!(f, "(t - {})", self.base)?;
            } else {
                write!(f, "(t + {})", -self.base)?;
            }
            if t.exponent != 1.0 {
                if t.exponent.fract() == 0.0 {
                    write!(f, "^{}", t.exponent as i64)?;
                } else {
                    write!(f, "^{}", t.exponent)?;
                }
            }
        }
        Ok(())
    }
}

/// Which fractional derivative a semigroup check composes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OperatorKind {
    Caputo,
    RiemannLiouville,
    /// Classical integer-order derivative inside, Caputo outside: compares
    /// the Caputo `D^gamma` of the `beta`-th classical derivative with the
    /// Caputo `D^{beta+gamma}` of `f` itself.
    IntegerSplit,
}

/// Outcome of comparing `D^gamma D^beta f` with `D^{beta+gamma} f`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SemigroupVerdict {
    /// Both sides are defined and agree coefficient-wise.
    Holds,
    /// Both composition legs are defined but disagree, or the stepwise
    /// composition exists while the direct derivative does not.
    Violated,
    /// The stepwise composition itself is undefined (inner or outer leg).
    OuterUndefined,
}

/// Leg of the comparison that failed to evaluate, if any.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Leg {
    Inner,
    Outer,
    Direct,
}

/// Full record of one semigroup check.
#[derive(Clone, Debug)]
pub struct SemigroupReport {
    pub kind: OperatorKind,
    pub inner_order: f64,
    pub outer_order: f64,
    pub verdict: SemigroupVerdict,
    /// Executable sufficient condition under which the identity is
    /// guaranteed; whenever this is true the verdict is `Holds`.
    pub hypothesis_met: bool,
    pub undefined_leg: Option<Leg>,
    /// `D^beta f`, when defined.
    pub inner: Option<PowerSum>,
    pub inner_regularity: Option<Regularity>,
    /// `D^gamma (D^beta f)`, when defined.
    pub stepwise: Option<PowerSum>,
    /// `D^{beta+gamma} f`, when defined.
    pub direct: Option<PowerSum>,
}

fn apply(kind: OperatorKind, f: &PowerSum, order: f64) -> Result<PowerSum> {
    match kind {
        OperatorKind::Caputo => f.caputo_derivative(order),
        OperatorKind::RiemannLiouville => f.riemann_liouville_derivative(order),
        OperatorKind::IntegerSplit => unreachable!("split mode dispatches per leg"),
    }
}

fn is_continuous(sum: Option<&PowerSum>) -> bool {
    matches!(sum.map(|s| s.regularity()), Some(Regularity::Continuous { .. }))
}

/// Checks the additive index law `D^gamma D^beta f = D^{beta+gamma} f` for
/// one derivative kind on a concrete power sum.
///
/// In `IntegerSplit` mode the inner operator is the classical derivative of
/// (integer) order `beta` and the outer and direct operators are Caputo; the
/// other two modes use the same operator on every leg. The verdict
/// distinguishes a genuine disagreement (`Violated`) from a composition that
/// cannot even be formed (`OuterUndefined`); a stepwise result whose direct
/// counterpart is undefined counts as a violation, since the composition
/// then cannot equal any single derivative.
///
/// The `hypothesis_met` flag reports an executable sufficient condition:
///
/// - Caputo: `gamma <= 1`, `ceil(beta + gamma) - floor(beta) == 1`, and the
///   direct derivative exists and is continuous at the base point.
/// - Riemann-Liouville: `0 < beta < 1` and the function, the inner result,
///   and the stepwise result are all continuous at the base point.
/// - IntegerSplit: `beta` is a non-negative integer at most
///   `ceil(beta + gamma) - 1`, and every exponent of `f` is an integer or
///   at least `ceil(beta + gamma)`.
pub fn check_semigroup(
    kind: OperatorKind,
    f: &PowerSum,
    beta: f64,
    gamma_outer: f64,
) -> Result<SemigroupReport> {
    for (what, v) in [("inner order", beta), ("outer order", gamma_outer)] {
        if !v.is_finite() || v < 0.0 {
            return Err(Error::OutOfRange { what, value: v });
        }
    }
    let (inner_kind, composed_kind) = match kind {
        OperatorKind::Caputo => (OperatorKind::Caputo, OperatorKind::Caputo),
        OperatorKind::RiemannLiouville => {
            (OperatorKind::RiemannLiouville, OperatorKind::RiemannLiouville)
        }
        OperatorKind::IntegerSplit => (OperatorKind::RiemannLiouville, OperatorKind::Caputo),
    };
    let inner = apply(inner_kind, f, beta).ok();
    let inner_regularity = inner.as_ref().map(|s| s.regularity());
    let stepwise = inner.as_ref().and_then(|g| apply(composed_kind, g, gamma_outer).ok());
    let direct = apply(composed_kind, f, beta + gamma_outer).ok();

    let (verdict, undefined_leg) = match (&inner, &stepwise, &direct) {
        (None, _, _) => (SemigroupVerdict::OuterUndefined, Some(Leg::Inner)),
        (_, None, _) => (SemigroupVerdict::OuterUndefined, Some(Leg::Outer)),
        (_, _, None) => (SemigroupVerdict::Violated, Some(Leg::Direct)),
        (_, Some(s), Some(d)) => {
            let eq = s.approx_eq(d, COEFF_RTOL);
            (if eq { SemigroupVerdict::Holds } else { SemigroupVerdict::Violated }, None)
        }
    };

    let hypothesis_met = match kind {
        OperatorKind::Caputo => {
            gamma_outer <= 1.0 + EXP_TOL
                && snap_ceil(beta + gamma_outer) - snap_floor(beta) == 1
                && is_continuous(direct.as_ref())
        }
        OperatorKind::RiemannLiouville => {
            beta > EXP_TOL
                && beta < 1.0 - EXP_TOL
                && matches!(f.regularity(), Regularity::Continuous { .. })
                && is_continuous(inner.as_ref())
                && is_continuous(stepwise.as_ref())
        }
        OperatorKind::IntegerSplit => {
            let total = snap_ceil(beta + gamma_outer);
            (beta - beta.round()).abs() <= EXP_TOL
                && (beta.round() as i64) <= total - 1
                && f.terms()
                    .iter()
                    .all(|t| t.exponent.fract() == 0.0 || t.exponent >= total as f64 - EXP_TOL)
        }
    };

    Ok(SemigroupReport {
        kind,
        inner_order: beta,
        outer_order: gamma_outer,
        verdict,
        hypothesis_met,
        undefined_leg,
        inner,
        inner_regularity,
        stepwise,
        direct,
    })
}
