//! Discrete fractional operators on uniform grids.
//!
//! [`GridFunction`] stores samples `v_i = f(a + i h)`. Two classical schemes
//! act on it:
//!
//! - [`grid_fractional_integral`]: the product-trapezoidal rule for the
//!   fractional integral. The integrand is replaced by its piecewise linear
//!   interpolant, which makes the rule exact for linear data and second
//!   order for smooth functions:
//!
//!   ```text
//!   (J^alpha v)_n = h^alpha / gamma(alpha+2) *
//!       [ ((n-1)^{alpha+1} - (n-alpha-1) n^alpha) v_0
//!         + sum_{j=1}^{n-1} ((n-j+1)^{alpha+1} - 2(n-j)^{alpha+1} + (n-j-1)^{alpha+1}) v_j
//!         + v_n ]
//!   ```
//!
//!   At `alpha = 1` the weights collapse to the composite trapezoid rule.
//!
//! - [`grid_caputo_derivative`]: the L1 scheme for a Caputo derivative of
//!   order `alpha` in (0, 1), built from first differences:
//!
//!   ```text
//!   (D^alpha v)_n = h^{-alpha} / gamma(2-alpha) *
//!       sum_{j=0}^{n-1} ((j+1)^{1-alpha} - j^{1-alpha}) (v_{n-j} - v_{n-j-1})
//!   ```
//!
//!   The scheme telescopes exactly on linear data for nodes `n >= 1`. The
//!   derivative at node 0 is not defined by the sum; it is filled with the
//!   linear extrapolation `2 w_1 - w_2` of the two neighbouring outputs,
//!   which is why at least three nodes are required.
//!
//! Both operators cost O(n^2) over the whole grid, matching their
//! convolution structure.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::specfun::gamma;

/// Samples of a function on the uniform grid `t_i = a + i h`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    a: f64,
    h: f64,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(a: f64, h: f64, values: Vec<f64>) -> Result<Self> {
        if !a.is_finite() {
            return Err(Error::OutOfRange { what: "grid origin", value: a });
        }
        if !h.is_finite() || h <= 0.0 {
            return Err(Error::OutOfRange { what: "grid step", value: h });
        }
        if values.is_empty() {
            return Err(Error::GridTooShort { need: 1, got: 0 });
        }
        Ok(Self { a, h, values })
    }

    /// Samples `f` on `n + 1` nodes covering `[a, a + n h]`.
    pub fn sample(a: f64, h: f64, n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = (0..=n).map(|i| f(a + i as f64 * h)).collect();
        Self::new(a, h, values)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn t(&self, i: usize) -> f64 {
        self.a + i as f64 * self.h
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Largest absolute difference against another grid function on the
    /// same grid.
    pub fn max_abs_diff(&self, other: &GridFunction) -> Result<f64> {
        if self.a != other.a || self.h != other.h || self.len() != other.len() {
            return Err(Error::CsvFormat("grids do not match".into()));
        }
        Ok(self.values.iter().zip(&other.values).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
    }

    /// Writes `t,value` rows with full f64 round-trip precision.
    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "t,value")?;
        for (i, v) in self.values.iter().enumerate() {
            writeln!(w, "{:.16e},{:.16e}", self.t(i), v)?;
        }
        Ok(())
    }

    /// Reads the format produced by [`Self::write_csv`]. Lines starting
    /// with `#` are ignored; the grid must be uniform.
    pub fn read_csv(r: impl BufRead) -> Result<Self> {
        let mut ts: Vec<f64> = Vec::new();
        let mut vs: Vec<f64> = Vec::new();
        let mut saw_header = false;
        for line in r.lines() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if !saw_header {
                if line != "t,value" {
                    return Err(Error::CsvFormat(format!(
                        "expected header 't,value', got '{line}'"
                    )));
                }
                saw_header = true;
                continue;
            }
            let (t, v) = line
                .split_once(',')
                .ok_or_else(|| Error::CsvFormat(format!("expected 't,value' row, got '{line}'")))?;
            let t: f64 =
                t.trim().parse().map_err(|_| Error::CsvFormat(format!("bad t value '{t}'")))?;
            let v: f64 =
                v.trim().parse().map_err(|_| Error::CsvFormat(format!("bad value '{v}'")))?;
            ts.push(t);
            vs.push(v);
        }
        if ts.len() < 2 {
            return Err(Error::GridTooShort { need: 2, got: ts.len() });
        }
        let h = ts[1] - ts[0];
        if h <= 0.0 {
            return Err(Error::CsvFormat("grid nodes must be strictly increasing".into()));
        }
        for (i, &t) in ts.iter().enumerate() {
            let expect = ts[0] + i as f64 * h;
            if (t - expect).abs() > 1e-9 * h.max(1.0) {
                return Err(Error::CsvFormat(format!("grid is not uniform at row {i}")));
            }
        }
        Self::new(ts[0], h, vs)
    }
}

/// Product-trapezoidal fractional integral of order `alpha >= 0` on the
/// grid; `alpha = 0` returns the input unchanged.
pub fn grid_fractional_integral(f: &GridFunction, alpha: f64) -> Result<GridFunction> {
    if !alpha.is_finite() || alpha < 0.0 {
        return Err(Error::OutOfRange { what: "integral order", value: alpha });
    }
    if alpha == 0.0 {
        return Ok(f.clone());
    }
    let n_max = f.len() - 1;
    let mut pow = Vec::with_capacity(n_max + 2);
    for d in 0..=n_max + 1 {
        pow.push((d as f64).powf(alpha + 1.0));
    }
    let front = f.h().powf(alpha) / gamma(alpha + 2.0)?;
    let v = f.values();
    let mut out = vec![0.0; f.len()];
    for n in 1..=n_max {
        let nf = n as f64;
        let mut acc = (pow[n - 1] - (nf - alpha - 1.0) * nf.powf(alpha)) * v[0];
        for j in 1..n {
            let d = n - j;
            acc += (pow[d + 1] - 2.0 * pow[d] + pow[d - 1]) * v[j];
        }
        acc += v[n];
        out[n] = front * acc;
    }
    GridFunction::new(f.a(), f.h(), out)
}

/// L1 discretisation of the Caputo derivative of order `alpha` in (0, 1).
///
/// Node 0 is filled by linear extrapolation from nodes 1 and 2, so the grid
/// needs at least three nodes.
pub fn grid_caputo_derivative(f: &GridFunction, alpha: f64) -> Result<GridFunction> {
    if !alpha.is_finite() || alpha <= 0.0 || alpha >= 1.0 {
        return Err(Error::OutOfRange { what: "derivative order", value: alpha });
    }
    if f.len() < 3 {
        return Err(Error::GridTooShort { need: 3, got: f.len() });
    }
    let n_max = f.len() - 1;
    let mut b = Vec::with_capacity(n_max);
    for j in 0..n_max {
        b.push(((j + 1) as f64).powf(1.0 - alpha) - (j as f64).powf(1.0 - alpha));
    }
    let front = f.h().powf(-alpha) / gamma(2.0 - alpha)?;
    let v = f.values();
    let mut out = vec![0.0; f.len()];
    for n in 1..=n_max {
        let mut acc = 0.0;
        for j in 0..n {
            acc += b[j] * (v[n - j] - v[n - j - 1]);
        }
        out[n] = front * acc;
    }
    out[0] = 2.0 * out[1] - out[2];
    GridFunction::new(f.a(), f.h(), out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integral_weights_collapse_to_trapezoid_at_order_one() {
        // The trapezoid rule integrates linear functions exactly.
        let f = GridFunction::sample(0.0, 0.25, 8, |t| 3.0 * t + 1.0).unwrap();
        let j = grid_fractional_integral(&f, 1.0).unwrap();
        for i in 0..j.len() {
            let t = j.t(i);
            let exact = 1.5 * t * t + t;
            assert!((j.values()[i] - exact).abs() < 1e-13, "node {i}");
        }
    }

    #[test]
    fn integral_is_exact_on_constants() {
        let f = GridFunction::sample(0.0, 0.125, 16, |_| 2.0).unwrap();
        let j = grid_fractional_integral(&f, 0.5).unwrap();
        let g15 = gamma(1.5).unwrap();
        for i in 1..j.len() {
            let exact = 2.0 * j.t(i).sqrt() / g15;
            assert!((j.values()[i] - exact).abs() < 1e-12, "node {i}");
        }
        assert_eq!(j.values()[0], 0.0);
    }

    #[test]
    fn integral_converges_at_second_order_on_smooth_data() {
        let exact = |t: f64| gamma(4.0).unwrap() / gamma(4.5).unwrap() * t.powf(3.5);
        let err = |n: usize| {
            let f = GridFunction::sample(0.0, 1.0 / n as f64, n, |t| t.powi(3)).unwrap();
            let j = grid_fractional_integral(&f, 0.5).unwrap();
            (j.values()[n] - exact(1.0)).abs()
        };
        let ratio = err(64) / err(128);
        assert!(ratio > 3.4, "ratio {ratio}");
    }

    #[test]
    fn l1_derivative_is_exact_on_linear_data_away_from_node_zero() {
        let alpha = 0.7;
        let f = GridFunction::sample(0.0, 0.1, 20, |t| 4.0 * t).unwrap();
        let d = grid_caputo_derivative(&f, alpha).unwrap();
        let g = gamma(2.0 - alpha).unwrap();
        for i in 1..d.len() {
            let exact = 4.0 * d.t(i).powf(1.0 - alpha) / g;
            assert!((d.values()[i] - exact).abs() < 1e-12, "node {i}");
        }
    }

    #[test]
    fn l1_derivative_converges_on_quadratic_data() {
        let alpha = 0.5;
        let exact = |t: f64| 2.0 * t.powf(2.0 - alpha) / gamma(3.0 - alpha).unwrap();
        let err = |n: usize| {
            let f = GridFunction::sample(0.0, 1.0 / n as f64, n, |t| t * t).unwrap();
            let d = grid_caputo_derivative(&f, alpha).unwrap();
            (d.values()[n] - exact(1.0)).abs()
        };
        // The L1 scheme is order 2 - alpha.
        let ratio = err(64) / err(128);
        assert!(ratio > 2.0f64.powf(2.0 - alpha) - 0.3, "ratio {ratio}");
    }

    #[test]
    fn operators_validate_their_inputs() {
        let f = GridFunction::sample(0.0, 0.5, 4, |t| t).unwrap();
        assert!(matches!(grid_caputo_derivative(&f, 1.2), Err(Error::OutOfRange { .. })));
        let short = GridFunction::new(0.0, 0.5, vec![1.0, 2.0]).unwrap();
        assert!(matches!(grid_caputo_derivative(&short, 0.5), Err(Error::GridTooShort { .. })));
        assert!(GridFunction::new(0.0, -1.0, vec![1.0]).is_err());
        assert!(GridFunction::new(0.0, 1.0, vec![]).is_err());
    }

    #[test]
    fn csv_round_trip_preserves_every_bit() {
        let f = GridFunction::sample(0.5, 0.123, 9, |t| (t * 1.7).sin() / 3.0).unwrap();
        let mut buf = Vec::new();
        f.write_csv(&mut buf).unwrap();
        let back = GridFunction::read_csv(&buf[..]).unwrap();
        assert_eq!(f.values(), back.values());
        assert_eq!(f.a(), back.a());
        let junk = b"t,value\n1.0,2.0\n9.0,3.0\n";
        assert!(GridFunction::read_csv(&junk[..]).is_ok());
        let nonuniform = b"t,value\n0.0,1.0\n1.0,1.0\n3.0,1.0\n";
        assert!(GridFunction::read_csv(&nonuniform[..]).is_err());
    }
}
