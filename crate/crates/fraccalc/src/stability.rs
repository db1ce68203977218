//! Linear stability analysis for common-order fractional systems.
//!
//! For `D^gamma y = A y` with `gamma` in (0, 1], the zero solution is
//! asymptotically stable exactly when every eigenvalue of `A` satisfies
//!
//! ```text
//! |arg(lambda)| > gamma * pi / 2,    lambda != 0
//! ```
//!
//! so the stability sector widens as the order drops. The pipeline here is
//! deliberately self-contained and matrix-size-agnostic:
//!
//! 1. [`characteristic_polynomial`] computes `det(lambda I - A)` by the
//!    Faddeev-LeVerrier trace recursion, which is exact up to floating point
//!    rounding (no similarity transforms, no balancing).
//! 2. [`polynomial_roots`] deflates exact zero roots, solves degrees one and
//!    two in closed form, and otherwise runs Durand-Kerner from an
//!    asymmetric spiral start followed by a few Newton polishing steps.
//!    Residual-based termination keeps multiple roots (which converge only
//!    linearly) from being reported as failures.
//! 3. [`assess_stability`] clusters the roots into eigenvalues with
//!    multiplicity, measures each angular margin `|arg| - gamma pi/2`, and
//!    aggregates: any margin below `-eps` makes the system unstable, any
//!    margin inside the `eps` band makes it marginal, otherwise it is
//!    stable. A (numerically) zero eigenvalue violates the criterion
//!    outright. The band `eps` is [`MARGIN_EPS`].

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::reduce::{SingleOrderSystem, SystemRhs};

/// Angular band around the sector boundary classified as marginal.
pub const MARGIN_EPS: f64 = 1e-6;

/// Coefficients of `det(lambda I - A)`, monic and descending:
/// `[1, c_{n-1}, ..., c_0]`.
pub fn characteristic_polynomial(a: &Matrix) -> Vec<f64> {
    let n = a.n();
    let mut coeffs = vec![0.0; n + 1];
    coeffs[0] = 1.0;
    let mut m = a.clone();
    for k in 1..=n {
        let c = -m.trace() / k as f64;
        coeffs[k] = c;
        if k < n {
            m = a.matmul(&m.add_scaled_identity(c));
        }
    }
    coeffs
}

fn eval_poly(coeffs: &[f64], z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for &c in coeffs {
        acc = acc * z + c;
    }
    acc
}

fn eval_poly_deriv(coeffs: &[f64], z: Complex64) -> Complex64 {
    let n = coeffs.len() - 1;
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, &c) in coeffs.iter().take(n).enumerate() {
        acc = acc * z + c * (n - i) as f64;
    }
    acc
}

fn quadratic_roots(b: f64, c: f64) -> [Complex64; 2] {
    // Monic x^2 + b x + c, stable against cancellation for real roots.
    let disc = b * b - 4.0 * c;
    if disc >= 0.0 {
        let s = disc.sqrt();
        let q = -0.5 * (b + b.signum() * s);
        if q == 0.0 {
            return [Complex64::new(0.0, 0.0), Complex64::new(-b, 0.0)];
        }
        [Complex64::new(q, 0.0), Complex64::new(c / q, 0.0)]
    } else {
        let s = (-disc).sqrt() * 0.5;
        [Complex64::new(-b * 0.5, s), Complex64::new(-b * 0.5, -s)]
    }
}

/// All complex roots (with multiplicity) of a real polynomial given by
/// descending coefficients with a nonzero leading entry.
pub fn polynomial_roots(coeffs: &[f64]) -> Result<Vec<Complex64>> {
    if coeffs.is_empty() || coeffs[0] == 0.0 || coeffs.iter().any(|c| !c.is_finite()) {
        return Err(Error::MatrixShape(
            "polynomial needs a finite nonzero leading coefficient".into(),
        ));
    }
    let lead = coeffs[0];
    let mut p: Vec<f64> = coeffs.iter().map(|c| c / lead).collect();

    let mut roots: Vec<Complex64> = Vec::new();
    // Exact deflation of zero roots keeps chain matrices exact.
    while p.len() > 1 && *p.last().unwrap() == 0.0 {
        roots.push(Complex64::new(0.0, 0.0));
        p.pop();
    }
    let deg = p.len() - 1;
    match deg {
        0 => return Ok(roots),
        1 => {
            roots.push(Complex64::new(-p[1], 0.0));
            return Ok(roots);
        }
        2 => {
            roots.extend(quadratic_roots(p[1], p[2]));
            return Ok(roots);
        }
        _ => {}
    }

    // Durand-Kerner on the deflated polynomial.
    let bound = 1.0 + p[1..].iter().map(|c| c.abs()).fold(0.0, f64::max);
    let seed = Complex64::new(0.4, 0.9);
    let mut z: Vec<Complex64> = (0..deg).map(|k| bound * seed.powu(k as u32 + 1)).collect();
    let mut converged = false;
    for _ in 0..600 {
        let mut max_update = 0.0f64;
        for i in 0..deg {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..deg {
                if i != j {
                    denom *= z[i] - z[j];
                }
            }
            if denom.norm() == 0.0 {
                // Two iterates collided; nudge and keep going.
                z[i] += Complex64::new(1e-6 * bound, 1e-6 * bound);
                continue;
            }
            let delta = eval_poly(&p, z[i]) / denom;
            z[i] -= delta;
            max_update = max_update.max(delta.norm() / z[i].norm().max(1.0));
        }
        let max_residual = z
            .iter()
            .map(|&zi| eval_poly(&p, zi).norm() / zi.norm().max(1.0).powi(deg as i32))
            .fold(0.0, f64::max);
        if max_update <= 1e-14 || max_residual <= 1e-13 {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::RootNonConvergence);
    }

    // Newton polishing sharpens simple roots to machine precision without
    // disturbing multiple ones.
    for zi in &mut z {
        for _ in 0..3 {
            let d = eval_poly_deriv(&p, *zi);
            if d.norm() < 1e-300 {
                break;
            }
            let step = eval_poly(&p, *zi) / d;
            if !step.re.is_finite() || !step.im.is_finite() {
                break;
            }
            *zi -= step;
        }
    }

    for mut zi in z {
        if zi.im.abs() <= 1e-10 * (1.0 + zi.norm()) {
            zi = Complex64::new(zi.re, 0.0);
        }
        roots.push(zi);
    }
    Ok(roots)
}

/// Eigenvalues of a real matrix, with multiplicity, via its characteristic
/// polynomial.
pub fn eigenvalues(a: &Matrix) -> Result<Vec<Complex64>> {
    polynomial_roots(&characteristic_polynomial(a))
}

/// How one eigenvalue sits relative to the stability sector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EigenClass {
    Stable,
    Marginal,
    Unstable,
}

#[derive(Clone, Debug)]
pub struct EigenvalueReport {
    pub value: Complex64,
    pub multiplicity: usize,
    /// `|arg(value)|`; zero for a numerically zero eigenvalue.
    pub arg_abs: f64,
    /// `|arg| - gamma pi/2`; positive means inside the stable sector.
    pub margin: f64,
    pub near_zero: bool,
    pub class: EigenClass,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StabilityVerdict {
    Stable,
    Marginal,
    Unstable,
}

#[derive(Clone, Debug)]
pub struct StabilityAssessment {
    pub gamma: f64,
    /// Sector half-angle `gamma pi / 2`.
    pub threshold: f64,
    pub eigenvalues: Vec<EigenvalueReport>,
    pub verdict: StabilityVerdict,
}

/// Assesses the common-order system `D^gamma y = A y (+ forcing)` through
/// the eigenvalues of `A`. The forcing plays no role in the linear
/// stability of the equilibrium, but the right-hand side must be linear.
pub fn assess_stability(s: &SingleOrderSystem) -> Result<StabilityAssessment> {
    let matrix = match s.rhs() {
        SystemRhs::Linear { matrix, .. } => matrix,
        SystemRhs::General(_) => return Err(Error::NotLinear("stability assessment")),
    };
    let gamma = s.order().value();
    let threshold = gamma * std::f64::consts::PI / 2.0;
    let roots = eigenvalues(matrix)?;

    // Cluster repeated roots into one report with a multiplicity.
    let cluster_tol = 1e-6 * (1.0 + matrix.frobenius_norm());
    let mut clusters: Vec<(Complex64, usize)> = Vec::new();
    for r in roots {
        match clusters.iter_mut().find(|(mean, _)| (*mean - r).norm() <= cluster_tol) {
            Some((mean, count)) => {
                *mean = (*mean * *count as f64 + r) / (*count as f64 + 1.0);
                *count += 1;
            }
            None => clusters.push((r, 1)),
        }
    }

    let zero_tol = 1e-9 * (1.0 + matrix.frobenius_norm());
    let mut reports = Vec::with_capacity(clusters.len());
    for (value, multiplicity) in clusters {
        let near_zero = value.norm() <= zero_tol;
        let (arg_abs, margin, class) = if near_zero {
            (0.0, -threshold, EigenClass::Unstable)
        } else {
            let arg_abs = value.arg().abs();
            let margin = arg_abs - threshold;
            let class = if margin < -MARGIN_EPS {
                EigenClass::Unstable
            } else if margin <= MARGIN_EPS {
                EigenClass::Marginal
            } else {
                EigenClass::Stable
            };
            (arg_abs, margin, class)
        };
        reports.push(EigenvalueReport { value, multiplicity, arg_abs, margin, near_zero, class });
    }

    let verdict = if reports.iter().any(|r| r.class == EigenClass::Unstable) {
        StabilityVerdict::Unstable
    } else if reports.iter().any(|r| r.class == EigenClass::Marginal) {
        StabilityVerdict::Marginal
    } else {
        StabilityVerdict::Stable
    };

    Ok(StabilityAssessment { gamma, threshold, eigenvalues: reports, verdict })
}
