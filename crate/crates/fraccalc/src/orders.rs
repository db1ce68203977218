//! Exact rational differentiation orders.
//!
//! Reductions of multi-term fractional equations hinge on arithmetic with the
//! orders themselves: least common denominators decide the chain length and
//! greatest common divisors decide the base order of a commensurate family.
//! Doing this in floating point invites off-by-one chain dimensions, so orders
//! are kept as reduced fractions whenever they are known exactly and only fall
//! back to opaque `f64` values when the caller truly has an irrational order.
//!
//! Conventions:
//!
//! ```text
//! parse_order("3/2")  == 3/2        fractions are reduced, denominator >= 1
//! parse_order("0.75") == 3/4        decimals convert exactly from the literal
//! lcm_denominators({1, 3/2}) == 2
//! is_commensurate({1/2, 1/4}) == Some(1/4)   largest rational base order
//! ```
//!
//! Denominators are capped (default 1 000 000) because the single-term chain
//! dimension scales with the common denominator; a runaway denominator should
//! fail loudly rather than allocate a gigantic system.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest denominator accepted for a [`RationalOrder`].
pub const DENOMINATOR_CAP: u64 = 1_000_000;

/// A non-negative rational differentiation or integration order, kept in
/// lowest terms with a positive denominator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RationalOrder {
    num: i64,
    den: i64,
}

pub(crate) fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub(crate) fn lcm_checked(a: u64, b: u64) -> Option<u64> {
    if a == 0 || b == 0 {
        return Some(0);
    }
    (a / gcd_u64(a, b)).checked_mul(b)
}

impl RationalOrder {
    /// Builds `num/den` reduced to lowest terms.
    ///
    /// Fails on a zero denominator, a negative value, or a reduced
    /// denominator above [`DENOMINATOR_CAP`].
    pub fn new(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::ZeroDenominator(format!("{num}/{den}")));
        }
        let (mut num, mut den) = if den < 0 { (-num, -den) } else { (num, den) };
        if num < 0 {
            return Err(Error::NegativeOrder(format!("{num}/{den}")));
        }
        let g = gcd_u64(num as u64, den as u64).max(1) as i64;
        num /= g;
        den /= g;
        if den as u64 > DENOMINATOR_CAP {
            return Err(Error::DenominatorCap { den: den as u128, cap: DENOMINATOR_CAP });
        }
        Ok(Self { num, den })
    }

    pub fn from_integer(n: u32) -> Self {
        Self { num: n as i64, den: 1 }
    }

    pub fn numerator(&self) -> i64 {
        self.num
    }

    pub fn denominator(&self) -> i64 {
        self.den
    }

    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn is_integer(&self) -> bool {
        self.den == 1
    }

    /// Smallest integer >= the order.
    pub fn ceil(&self) -> i64 {
        (self.num + self.den - 1) / self.den
    }

    /// Largest integer <= the order.
    pub fn floor(&self) -> i64 {
        self.num / self.den
    }

    /// Exact difference, failing if the result would be negative.
    pub fn sub(&self, other: &RationalOrder) -> Result<RationalOrder> {
        let num =
            (self.num as i128) * (other.den as i128) - (other.num as i128) * (self.den as i128);
        let den = (self.den as i128) * (other.den as i128);
        if num < 0 {
            return Err(Error::NegativeOrder(format!("{} - {}", self, other)));
        }
        let g = gcd_u64(num as u64, den as u64).max(1) as i128;
        let (num, den) = (num / g, den / g);
        if den as u128 > DENOMINATOR_CAP as u128 {
            return Err(Error::DenominatorCap { den: den as u128, cap: DENOMINATOR_CAP });
        }
        Ok(RationalOrder { num: num as i64, den: den as i64 })
    }

    /// How many times `base` fits into this order, if the ratio is an exact
    /// non-negative integer.
    pub fn integer_multiple_of(&self, base: &RationalOrder) -> Option<u64> {
        if base.num == 0 {
            return None;
        }
        let lhs = (self.num as i128) * (base.den as i128);
        let rhs = (self.den as i128) * (base.num as i128);
        if lhs % rhs == 0 {
            Some((lhs / rhs) as u64)
        } else {
            None
        }
    }
}

impl PartialOrd for RationalOrder {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for RationalOrder {
    fn cmp(&self, other: &Self) -> Ordering {
        let lhs = (self.num as i128) * (other.den as i128);
        let rhs = (other.num as i128) * (self.den as i128);
        lhs.cmp(&rhs)
    }
}

impl fmt::Display for RationalOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl FromStr for RationalOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_order(s)
    }
}

/// Parses `p/q` or a finite decimal literal into an exact reduced fraction.
///
/// Decimals convert from the decimal text itself, not through binary floating
/// point, so `"0.1"` is exactly 1/10.
pub fn parse_order(src: &str) -> Result<RationalOrder> {
    let s = src.trim();
    if s.is_empty() {
        return Err(Error::MalformedOrder(src.to_string()));
    }
    if s.starts_with('-') {
        return Err(Error::NegativeOrder(src.to_string()));
    }
    if let Some((p, q)) = s.split_once('/') {
        let num: i64 = p.trim().parse().map_err(|_| Error::MalformedOrder(src.to_string()))?;
        let den: i64 = q.trim().parse().map_err(|_| Error::MalformedOrder(src.to_string()))?;
        if den == 0 {
            return Err(Error::ZeroDenominator(src.to_string()));
        }
        return RationalOrder::new(num, den);
    }
    let (int_part, frac_part) = match s.split_once('.') {
        Some((i, f)) => (i, f),
        None => (s, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(Error::MalformedOrder(src.to_string()));
    }
    let digits_ok = |d: &str| d.chars().all(|c| c.is_ascii_digit());
    if !digits_ok(int_part) || !digits_ok(frac_part) {
        return Err(Error::MalformedOrder(src.to_string()));
    }
    let mut num: i128 = 0;
    for c in int_part.chars().chain(frac_part.chars()) {
        num = num
            .checked_mul(10)
            .and_then(|n| n.checked_add((c as u8 - b'0') as i128))
            .ok_or_else(|| Error::MalformedOrder(src.to_string()))?;
    }
    let mut den: i128 = 1;
    for _ in 0..frac_part.len() {
        den = den.checked_mul(10).ok_or_else(|| Error::MalformedOrder(src.to_string()))?;
    }
    let g = {
        let (mut a, mut b) = (num, den);
        while b != 0 {
            let t = a % b;
            a = b;
            b = t;
        }
        a.max(1)
    };
    let (num, den) = (num / g, den / g);
    if den as u128 > DENOMINATOR_CAP as u128 {
        return Err(Error::DenominatorCap { den: den as u128, cap: DENOMINATOR_CAP });
    }
    if num > i64::MAX as i128 {
        return Err(Error::MalformedOrder(src.to_string()));
    }
    RationalOrder::new(num as i64, den as i64)
}

/// Least common multiple of the denominators of a non-empty order sequence.
pub fn lcm_denominators(orders: &[RationalOrder]) -> Result<u64> {
    if orders.is_empty() {
        return Err(Error::EmptyOrders);
    }
    let mut m: u64 = 1;
    for o in orders {
        m = lcm_checked(m, o.den as u64)
            .ok_or(Error::DenominatorCap { den: u128::MAX, cap: DENOMINATOR_CAP })?;
        if m > DENOMINATOR_CAP {
            return Err(Error::DenominatorCap { den: m as u128, cap: DENOMINATOR_CAP });
        }
    }
    Ok(m)
}

/// An order that is either an exact rational or an opaque real.
///
/// Problem files always carry rationals; `Real` exists for API callers with
/// genuinely irrational orders (a commensurate irrational family can still be
/// reduced when the highest order is at most 1).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Order {
    Rational(RationalOrder),
    Real(f64),
}

impl Order {
    pub fn value(&self) -> f64 {
        match self {
            Order::Rational(r) => r.value(),
            Order::Real(x) => *x,
        }
    }

    pub fn as_rational(&self) -> Option<RationalOrder> {
        match self {
            Order::Rational(r) => Some(*r),
            Order::Real(_) => None,
        }
    }

    pub fn from_integer(n: u32) -> Self {
        Order::Rational(RationalOrder::from_integer(n))
    }

    /// Smallest integer >= the order, snapping reals within 1e-12 of an
    /// integer onto it.
    pub fn ceil(&self) -> i64 {
        match self {
            Order::Rational(r) => r.ceil(),
            Order::Real(x) => snap_ceil(*x),
        }
    }

    pub fn floor(&self) -> i64 {
        match self {
            Order::Rational(r) => r.floor(),
            Order::Real(x) => snap_floor(*x),
        }
    }

    /// Exact rational form, if one exists with a denominator under the cap.
    /// Opaque reals qualify only when their dyadic expansion is short
    /// (`0.5`, `0.25`, ...); `Real(0.3)` does not.
    pub fn to_exact_rational(&self) -> Option<RationalOrder> {
        match self {
            Order::Rational(r) => Some(*r),
            Order::Real(x) => rational_from_f64_exact(*x, DENOMINATOR_CAP),
        }
    }

    /// Whether the order is an integer, snapping reals within 1e-12.
    pub fn is_integer(&self) -> bool {
        match self {
            Order::Rational(r) => r.is_integer(),
            Order::Real(x) => (x - x.round()).abs() <= 1e-12,
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Rational(r) => write!(f, "{r}"),
            Order::Real(x) => write!(f, "{x}"),
        }
    }
}

impl From<RationalOrder> for Order {
    fn from(r: RationalOrder) -> Self {
        Order::Rational(r)
    }
}

pub(crate) fn snap_ceil(x: f64) -> i64 {
    let r = x.round();
    if (x - r).abs() <= 1e-12 {
        r as i64
    } else {
        x.ceil() as i64
    }
}

pub(crate) fn snap_floor(x: f64) -> i64 {
    let r = x.round();
    if (x - r).abs() <= 1e-12 {
        r as i64
    } else {
        x.floor() as i64
    }
}

/// Exact rational form of an `f64`, if its reduced (dyadic) denominator fits
/// under the cap. Returns `None` for values like `sqrt(2)/2` whose dyadic
/// expansion needs a huge denominator.
fn rational_from_f64_exact(x: f64, cap: u64) -> Option<RationalOrder> {
    if !x.is_finite() || x < 0.0 {
        return None;
    }
    let mut num = x;
    let mut den: u64 = 1;
    while num.fract() != 0.0 {
        num *= 2.0;
        den = den.checked_mul(2)?;
        if den > cap {
            return None;
        }
    }
    if num > i64::MAX as f64 {
        return None;
    }
    RationalOrder::new(num as i64, den as i64).ok()
}

/// Largest rational base order dividing every order in the sequence, when one
/// exists.
///
/// All orders must be expressible as exact rationals with denominators under
/// the cap; an opaque real with an irrational ratio to any rational grid
/// yields `None`. For reduced fractions the base is
/// `gcd(numerators) / lcm(denominators)`.
pub fn is_commensurate(orders: &[Order]) -> Option<RationalOrder> {
    if orders.is_empty() {
        return None;
    }
    let mut rats = Vec::with_capacity(orders.len());
    for o in orders {
        let r = o.to_exact_rational()?;
        if r.is_zero() {
            return None;
        }
        rats.push(r);
    }
    let mut num = rats[0].num as u64;
    let mut den = rats[0].den as u64;
    for r in &rats[1..] {
        num = gcd_u64(num, r.num as u64);
        den = lcm_checked(den, r.den as u64)?;
        if den > DENOMINATOR_CAP {
            return None;
        }
    }
    RationalOrder::new(num as i64, den as i64).ok()
}

/// Best rational approximation of `x` with denominator at most `max_den`,
/// via continued fractions, accepted only when it reproduces `x` within
/// `tol` (relative).
pub(crate) fn rationalize(x: f64, max_den: u64, tol: f64) -> Option<(i64, u64)> {
    if !x.is_finite() || x < 0.0 {
        return None;
    }
    let (mut p0, mut q0, mut p1, mut q1) = (1i64, 0u64, x.floor() as i64, 1u64);
    let mut frac = x - x.floor();
    for _ in 0..64 {
        let err = (p1 as f64 / q1 as f64 - x).abs();
        if err <= tol * x.abs().max(1.0) {
            return Some((p1, q1));
        }
        if frac.abs() < 1e-15 {
            break;
        }
        let inv = 1.0 / frac;
        let a = inv.floor();
        frac = inv - a;
        let p2 = (a as i64).checked_mul(p1)?.checked_add(p0)?;
        let q2 = (a as u64).checked_mul(q1)?.checked_add(q0)?;
        if q2 > max_den {
            break;
        }
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
    }
    let err = (p1 as f64 / q1 as f64 - x).abs();
    (err <= tol * x.abs().max(1.0)).then_some((p1, q1))
}

/// Base order and integer multipliers for a commensurate family.
///
/// Rational families use [`is_commensurate`]; families with opaque reals are
/// accepted when every pairwise ratio is rational to within 1e-9 (detected by
/// continued fractions), giving an irrational base such as `sqrt(2)/4` for
/// `{sqrt(2)/4, sqrt(2)/2}`.
pub fn commensurate_base(orders: &[Order]) -> Option<(Order, Vec<u64>)> {
    if orders.is_empty() || orders.iter().any(|o| o.value() <= 0.0) {
        return None;
    }
    if let Some(base) = is_commensurate(orders) {
        let mult = orders
            .iter()
            .map(|o| o.as_rational().and_then(|r| r.integer_multiple_of(&base)))
            .collect::<Option<Vec<_>>>();
        if let Some(mult) = mult {
            return Some((Order::Rational(base), mult));
        }
    }
    // Ratio path for opaque reals: every order relative to the smallest must
    // be rational with a modest denominator.
    let min = orders.iter().map(|o| o.value()).fold(f64::INFINITY, f64::min);
    let mut den_lcm: u64 = 1;
    let mut ratios = Vec::with_capacity(orders.len());
    for o in orders {
        let (p, q) = rationalize(o.value() / min, 1_000, 1e-9)?;
        if p <= 0 {
            return None;
        }
        ratios.push((p as u64, q));
        den_lcm = lcm_checked(den_lcm, q)?;
    }
    let base = min / den_lcm as f64;
    let mut mult = Vec::with_capacity(orders.len());
    for o in orders {
        let m = o.value() / base;
        let k = m.round();
        if (m - k).abs() > 1e-9 * k.max(1.0) {
            return None;
        }
        mult.push(k as u64);
    }
    Some((Order::Real(base), mult))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_order("3/2").unwrap(), RationalOrder::new(3, 2).unwrap());
        assert_eq!(parse_order("6/4").unwrap(), RationalOrder::new(3, 2).unwrap());
        assert_eq!(parse_order("1.5").unwrap(), RationalOrder::new(3, 2).unwrap());
        assert_eq!(parse_order("0.1").unwrap(), RationalOrder::new(1, 10).unwrap());
        assert_eq!(parse_order("2").unwrap(), RationalOrder::from_integer(2));
        assert_eq!(parse_order("0").unwrap(), RationalOrder::new(0, 1).unwrap());
        assert_eq!(parse_order(" 7/3 ").unwrap(), RationalOrder::new(7, 3).unwrap());
    }

    #[test]
    fn rejects_bad_literals() {
        assert!(matches!(parse_order("-1/2"), Err(Error::NegativeOrder(_))));
        assert!(matches!(parse_order("3/0"), Err(Error::ZeroDenominator(_))));
        assert!(matches!(parse_order("abc"), Err(Error::MalformedOrder(_))));
        assert!(matches!(parse_order(""), Err(Error::MalformedOrder(_))));
        assert!(matches!(parse_order("1e-3"), Err(Error::MalformedOrder(_))));
        assert!(matches!(parse_order("0.1234567"), Err(Error::DenominatorCap { .. })));
    }

    #[test]
    fn ceil_and_floor() {
        let r = parse_order("3/2").unwrap();
        assert_eq!((r.ceil(), r.floor()), (2, 1));
        let r = parse_order("2").unwrap();
        assert_eq!((r.ceil(), r.floor()), (2, 2));
        let r = parse_order("1/10").unwrap();
        assert_eq!((r.ceil(), r.floor()), (1, 0));
        let r = parse_order("0").unwrap();
        assert_eq!((r.ceil(), r.floor()), (0, 0));
    }

    #[test]
    fn lcm_of_denominators() {
        let os = [parse_order("1").unwrap(), parse_order("3/2").unwrap()];
        assert_eq!(lcm_denominators(&os).unwrap(), 2);
        let os = [parse_order("1/2").unwrap(), parse_order("1/4").unwrap()];
        assert_eq!(lcm_denominators(&os).unwrap(), 4);
        let os = [parse_order("1").unwrap()];
        assert_eq!(lcm_denominators(&os).unwrap(), 1);
        assert!(matches!(lcm_denominators(&[]), Err(Error::EmptyOrders)));
    }

    /// Brute-force oracle: largest p/q with q bounded that divides every
    /// order to an exact integer multiple.
    fn brute_force_base(orders: &[RationalOrder], max_den: i64) -> Option<RationalOrder> {
        let mut best: Option<RationalOrder> = None;
        for den in 1..=max_den {
            for num in 1..=(orders.iter().map(|o| o.ceil()).max().unwrap() * den) {
                let cand = RationalOrder::new(num, den).unwrap();
                if orders.iter().all(|o| o.integer_multiple_of(&cand).is_some())
                    && best.is_none_or(|b| cand > b)
                {
                    best = Some(cand);
                }
            }
        }
        best
    }

    #[test]
    fn commensurate_families() {
        let half = Order::Rational(parse_order("1/2").unwrap());
        let quarter = Order::Rational(parse_order("1/4").unwrap());
        assert_eq!(is_commensurate(&[half, quarter]), Some(parse_order("1/4").unwrap()));

        let a = parse_order("3/10").unwrap();
        let b = parse_order("9/10").unwrap();
        let got = is_commensurate(&[Order::Rational(a), Order::Rational(b)]).unwrap();
        assert_eq!(got, parse_order("3/10").unwrap());
        assert_eq!(got, brute_force_base(&[a, b], 40).unwrap());
    }

    #[test]
    fn irrational_orders_have_no_rational_base() {
        let s = std::f64::consts::SQRT_2;
        assert_eq!(is_commensurate(&[Order::Real(s / 2.0), Order::Real(s)]), None);
    }

    #[test]
    fn exact_dyadic_reals_are_recognised() {
        assert_eq!(
            is_commensurate(&[Order::Real(0.5), Order::Real(0.25)]),
            Some(parse_order("1/4").unwrap())
        );
        // 0.3 as a double is not 3/10; its dyadic denominator blows the cap.
        assert_eq!(is_commensurate(&[Order::Real(0.3)]), None);
    }

    #[test]
    fn ratio_detection_for_irrational_families() {
        let s = std::f64::consts::SQRT_2;
        let (base, mult) =
            commensurate_base(&[Order::Real(s / 4.0), Order::Real(s / 2.0)]).unwrap();
        assert!((base.value() - s / 4.0).abs() < 1e-12);
        assert_eq!(mult, vec![1, 2]);

        assert!(commensurate_base(&[Order::Real(1.0), Order::Real(s)]).is_none());
    }

    #[test]
    fn display_uses_reduced_fraction_form() {
        assert_eq!(parse_order("3/2").unwrap().to_string(), "3/2");
        assert_eq!(parse_order("4/2").unwrap().to_string(), "2");
        assert_eq!(Order::Real(0.5).to_string(), "0.5");
    }

    proptest! {
        #[test]
        fn parse_render_round_trip(num in 0i64..10_000, den in 1i64..1_000) {
            let r = RationalOrder::new(num, den).unwrap();
            let back = parse_order(&r.to_string()).unwrap();
            prop_assert_eq!(r, back);
        }

        #[test]
        fn lcm_is_divisible_by_every_denominator(nums in proptest::collection::vec((0i64..500, 1i64..200), 1..6)) {
            let orders: Vec<RationalOrder> =
                nums.iter().map(|&(n, d)| RationalOrder::new(n, d).unwrap()).collect();
            match lcm_denominators(&orders) {
                Ok(m) => {
                    for o in &orders {
                        prop_assert_eq!(m % o.denominator() as u64, 0);
                    }
                }
                Err(Error::DenominatorCap { den, cap }) => {
                    prop_assert!(den > cap as u128);
                }
                Err(other) => prop_assert!(false, "unexpected error: {other}"),
            }
        }

        #[test]
        fn singleton_is_its_own_base(num in 1i64..500, den in 1i64..200) {
            let r = RationalOrder::new(num, den).unwrap();
            prop_assert_eq!(is_commensurate(&[Order::Rational(r)]), Some(r));
        }
    }
}
