//! Exact arithmetic in imaginary quadratic fields `Q(i√D)` and a float adapter.
//!
//! A [`QuadExtScalar`] is `x + y·i√d` with rational `x`, `y` and squarefree `d`.
//! Values are kept canonical (`y = 0` forces `d = 1`), so two scalars denote the
//! same complex number iff their `(x, y, d)` triples are identical, even when
//! they were built in different fields.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Double-precision complex value used by the float backend.
pub type ComplexFloat = Complex64;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Always `p/q`, also for integers.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("bad rational {s:?}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(p, q))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// Splits `d = f²·r` with `r` squarefree; returns `(f, r)`.
pub fn square_part(d: u64) -> (u64, u64) {
    let mut f = 1;
    let mut r = d;
    let mut p = 2u64;
    while p * p <= r {
        while r.is_multiple_of(p * p) {
            r /= p * p;
            f *= p;
        }
        p += 1;
    }
    (f, r)
}

fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "ScalarJson", into = "ScalarJson")]
pub struct QuadExtScalar {
    x: Rational,
    y: Rational,
    d: u64,
}

/// Extracts square factors of `d` into `y` and enforces `y = 0 ⇒ d = 1`.
pub fn normalize_radicand(x: Rational, y: Rational, d: u64) -> QuadExtScalar {
    assert!(d >= 1, "radicand must be positive");
    if y.is_zero() {
        return QuadExtScalar { x, y, d: 1 };
    }
    let (f, r) = square_part(d);
    QuadExtScalar {
        x,
        y: y * Rational::from_integer(BigInt::from(f)),
        d: r,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QextOp {
    Add,
    Sub,
    Mul,
    Div,
    Conj,
    Neg,
}

/// Field arithmetic; unary ops ignore `b`.
pub fn qext_arith(a: &QuadExtScalar, b: &QuadExtScalar, op: QextOp) -> Result<QuadExtScalar> {
    match op {
        QextOp::Add => a.checked_add(b),
        QextOp::Sub => a.checked_sub(b),
        QextOp::Mul => a.checked_mul(b),
        QextOp::Div => a.checked_div(b),
        QextOp::Conj => Ok(a.conj()),
        QextOp::Neg => Ok(-a),
    }
}

impl QuadExtScalar {
    pub fn new(x: Rational, y: Rational, d: u64) -> Self {
        normalize_radicand(x, y, d)
    }

    pub fn from_rational(x: Rational) -> Self {
        Self { x, y: Rational::zero(), d: 1 }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(int(n))
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    /// `re ± i·√(1 − re²)` written in canonical form; `None` if `|re| > 1`.
    pub fn unimodular_with_re(re: Rational, positive: bool) -> Option<Self> {
        let one = Rational::one();
        if re.abs() > one {
            return None;
        }
        let im_sq = &one - &re * &re;
        if im_sq.is_zero() {
            return Some(Self::from_rational(re));
        }
        // im² = s/t  ⇒  im = √(s·t)/t
        let s = im_sq.numer().to_u64()?;
        let t = im_sq.denom().to_u64()?;
        let sign = if positive { 1 } else { -1 };
        let y = Rational::new(BigInt::from(sign), BigInt::from(t));
        Some(normalize_radicand(re, y, s.checked_mul(t)?))
    }

    pub fn re(&self) -> &Rational {
        &self.x
    }

    /// Coefficient of `i√d`.
    pub fn im_coeff(&self) -> &Rational {
        &self.y
    }

    pub fn radicand(&self) -> u64 {
        self.d
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.y.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self { x: self.x.clone(), y: -&self.y, d: self.d }
    }

    /// `x² + d·y²`, which equals `z·conj(z)`.
    pub fn abs_squared(&self) -> Rational {
        &self.x * &self.x + Rational::from_integer(BigInt::from(self.d)) * &self.y * &self.y
    }

    pub fn is_unimodular(&self) -> bool {
        self.abs_squared().is_one()
    }

    pub fn to_float(&self) -> ComplexFloat {
        let im = rational_to_f64(&self.y) * (self.d as f64).sqrt();
        Complex64::new(rational_to_f64(&self.x), im)
    }

    fn common_radicand(&self, other: &Self) -> Result<u64> {
        if self.y.is_zero() {
            Ok(other.d)
        } else if other.y.is_zero() || self.d == other.d {
            Ok(self.d)
        } else {
            Err(Error::MixedRadicand(self.d, other.d))
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        let d = self.common_radicand(other)?;
        Ok(normalize_radicand(&self.x + &other.x, &self.y + &other.y, d))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        let d = self.common_radicand(other)?;
        Ok(normalize_radicand(&self.x - &other.x, &self.y - &other.y, d))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        let d = self.common_radicand(other)?;
        let dd = Rational::from_integer(BigInt::from(d));
        let x = &self.x * &other.x - dd * &self.y * &other.y;
        let y = &self.x * &other.y + &other.x * &self.y;
        Ok(normalize_radicand(x, y, d))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let num = self.checked_mul(&other.conj())?;
        let den = other.abs_squared();
        Ok(normalize_radicand(num.x / &den, num.y / &den, num.d))
    }

    /// Integer power; negative exponents invert.
    pub fn pow(&self, e: i32) -> Result<Self> {
        let base = if e < 0 { Self::one().checked_div(self)? } else { self.clone() };
        let mut acc = Self::one();
        for _ in 0..e.unsigned_abs() {
            acc = acc.checked_mul(&base)?;
        }
        Ok(acc)
    }

    /// Multiplicative order if this is a root of unity. In an imaginary
    /// quadratic field only orders 1, 2, 3, 4 and 6 occur.
    pub fn root_of_unity_order(&self) -> Option<u32> {
        if !self.is_unimodular() {
            return None;
        }
        let half = rat(1, 2);
        if self.y.is_zero() {
            return if self.x.is_one() { Some(1) } else { Some(2) };
        }
        match self.d {
            1 if self.x.is_zero() => Some(4),
            3 if self.y.abs() == half => {
                if self.x == -half.clone() {
                    Some(3)
                } else if self.x == half {
                    Some(6)
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    /// Surd rendering, e.g. `-7/8 + i√15/8`.
    pub fn render_surd(&self) -> String {
        if self.y.is_zero() {
            return render_rational(&self.x);
        }
        let mut out = String::new();
        if !self.x.is_zero() {
            out.push_str(&render_rational(&self.x));
            out.push_str(if self.y.is_negative() { " - " } else { " + " });
        } else if self.y.is_negative() {
            out.push('-');
        }
        let y = self.y.abs();
        let root = if self.d == 1 { String::new() } else { format!("√{}", self.d) };
        if !y.numer().is_one() {
            out.push_str(&y.numer().to_string());
        }
        out.push('i');
        out.push_str(&root);
        if !y.denom().is_one() {
            out.push('/');
            out.push_str(&y.denom().to_string());
        }
        out
    }
}

fn render_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Renders `√value` symbolically, e.g. `12 → 2√3`, `4 → 2`, `7/4 → √7/2`.
pub fn render_sqrt(value: &Rational) -> String {
    if value.is_zero() {
        return "0".into();
    }
    let (Some(p), Some(q)) = (value.numer().to_u64(), value.denom().to_u64()) else {
        return format!("√({})", render_rational(value));
    };
    // √(p/q) = √(p·q)/q
    let (f, r) = square_part(p * q);
    let g = f.gcd(&q);
    let (f, q) = (f / g, q / g);
    let mut out = String::new();
    if f != 1 || r == 1 {
        out.push_str(&f.to_string());
    }
    if r != 1 {
        out.push('√');
        out.push_str(&r.to_string());
    }
    if q != 1 {
        out.push('/');
        out.push_str(&q.to_string());
    }
    out
}

/// `x`, or `x + y*i*sqrt(d)` / `x - y*i*sqrt(d)`.
impl fmt::Display for QuadExtScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_rational(&self.x))?;
        if !self.y.is_zero() {
            let sign = if self.y.is_negative() { '-' } else { '+' };
            write!(f, " {sign} {}*i*sqrt({})", format_rational(&self.y.abs()), self.d)?;
        }
        Ok(())
    }
}

impl FromStr for QuadExtScalar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("bad scalar {s:?}"));
        // the separator is the first " + " / " - " after a leading sign
        let split = s
            .char_indices()
            .skip(1)
            .find(|&(i, c)| (c == '+' || c == '-') && s[..i].ends_with(' '));
        let Some((idx, sign)) = split else {
            return Ok(Self::from_rational(parse_rational(s)?));
        };
        let x = parse_rational(&s[..idx])?;
        let rest = s[idx + 1..].trim();
        let (y, root) = rest.split_once("*i*sqrt(").ok_or_else(bad)?;
        let d: u64 = root.strip_suffix(')').ok_or_else(bad)?.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        let mut y = parse_rational(y)?;
        if sign == '-' {
            y = -y;
        }
        Ok(normalize_radicand(x, y, d))
    }
}

#[derive(Serialize, Deserialize)]
struct ScalarJson {
    x: String,
    y: String,
    d: u64,
}

impl From<QuadExtScalar> for ScalarJson {
    fn from(z: QuadExtScalar) -> Self {
        ScalarJson { x: format_rational(&z.x), y: format_rational(&z.y), d: z.d }
    }
}

impl TryFrom<ScalarJson> for QuadExtScalar {
    type Error = Error;

    fn try_from(j: ScalarJson) -> Result<Self> {
        if j.d == 0 {
            return Err(Error::Parse("radicand must be positive".into()));
        }
        Ok(normalize_radicand(parse_rational(&j.x)?, parse_rational(&j.y)?, j.d))
    }
}

// Operator forms panic on mixed radicands; use the `checked_*` methods when
// operands may come from different fields.
macro_rules! forward_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl<'a> $tr<&'a QuadExtScalar> for &'a QuadExtScalar {
            type Output = QuadExtScalar;
            fn $method(self, rhs: &'a QuadExtScalar) -> QuadExtScalar {
                self.$checked(rhs).expect(concat!("QuadExtScalar::", stringify!($method)))
            }
        }
        impl $tr for QuadExtScalar {
            type Output = QuadExtScalar;
            fn $method(self, rhs: QuadExtScalar) -> QuadExtScalar {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);
forward_binop!(Div, div, checked_div);

impl Neg for &QuadExtScalar {
    type Output = QuadExtScalar;
    fn neg(self) -> QuadExtScalar {
        QuadExtScalar { x: -&self.x, y: -&self.y, d: self.d }
    }
}

impl Neg for QuadExtScalar {
    type Output = QuadExtScalar;
    fn neg(self) -> QuadExtScalar {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(x: Rational, y: Rational, d: u64) -> QuadExtScalar {
        QuadExtScalar::new(x, y, d)
    }

    #[test]
    fn u15_entry_times_conjugate_is_one() {
        let a = q(rat(-7, 8), rat(1, 8), 15);
        let b = q(rat(-7, 8), rat(-1, 8), 15);
        assert_eq!(qext_arith(&a, &b, QextOp::Mul).unwrap(), QuadExtScalar::one());
        assert_eq!(a.abs_squared(), int(1));
    }

    #[test]
    fn additive_inverse() {
        let z = q(rat(3, 5), rat(-2, 7), 11);
        let n = qext_arith(&z, &z, QextOp::Neg).unwrap();
        assert_eq!(qext_arith(&z, &n, QextOp::Add).unwrap(), QuadExtScalar::zero());
    }

    #[test]
    fn cube_root_squared_is_conjugate() {
        let w = q(rat(-1, 2), rat(1, 2), 3);
        let w2 = qext_arith(&w, &w, QextOp::Mul).unwrap();
        assert_eq!(w2, q(rat(-1, 2), rat(-1, 2), 3));
        assert_eq!(w2, w.conj());
    }

    #[test]
    fn mixed_radicands_rejected_unless_one_side_is_real() {
        let a = q(int(0), int(1), 3);
        let b = q(int(0), int(1), 5);
        assert!(matches!(a.checked_mul(&b), Err(Error::MixedRadicand(3, 5))));
        let r = QuadExtScalar::from_int(2);
        assert_eq!(a.checked_mul(&r).unwrap(), q(int(0), int(2), 3));
        assert!(matches!(a.checked_div(&QuadExtScalar::zero()), Err(Error::DivisionByZero)));
    }

    #[test]
    fn radicand_normalization() {
        assert_eq!(normalize_radicand(int(0), rat(1, 2), 12), q(int(0), int(1), 3));
        let r = normalize_radicand(int(3), int(0), 7);
        assert_eq!((r.re().clone(), r.im_coeff().clone(), r.radicand()), (int(3), int(0), 1));
        let c = normalize_radicand(rat(1, 4), rat(1, 4), 15);
        assert_eq!(c.radicand(), 15);
        assert_eq!(c.im_coeff(), &rat(1, 4));
    }

    #[test]
    fn abs_squared_examples() {
        assert_eq!(q(rat(-7, 8), rat(1, 8), 15).abs_squared(), int(1));
        assert_eq!(QuadExtScalar::zero().abs_squared(), int(0));
        assert_eq!(q(int(1), int(1), 3).abs_squared(), int(4));
    }

    #[test]
    fn float_projection() {
        let w = q(rat(-1, 2), rat(1, 2), 3).to_float();
        assert_eq!((w.re, w.im), (-0.5, 0.8660254037844386));
        let one = QuadExtScalar::one().to_float();
        assert_eq!((one.re, one.im), (1.0, 0.0));
        let c = q(rat(1, 4), rat(1, 4), 15).to_float();
        assert_eq!(c.re, 0.25);
        assert!((c.im - 0.9682458365518543).abs() < 1e-16);
    }

    #[test]
    fn roots_of_unity() {
        assert_eq!(QuadExtScalar::one().root_of_unity_order(), Some(1));
        assert_eq!(QuadExtScalar::from_int(-1).root_of_unity_order(), Some(2));
        assert_eq!(q(rat(-1, 2), rat(-1, 2), 3).root_of_unity_order(), Some(3));
        assert_eq!(q(int(0), int(-1), 1).root_of_unity_order(), Some(4));
        assert_eq!(q(rat(1, 2), rat(1, 2), 3).root_of_unity_order(), Some(6));
        assert_eq!(q(rat(-7, 8), rat(1, 8), 15).root_of_unity_order(), None);
    }

    #[test]
    fn unimodular_from_real_part() {
        let a = QuadExtScalar::unimodular_with_re(rat(-3, 4), true).unwrap();
        assert_eq!(a, q(rat(-3, 4), rat(1, 4), 7));
        let m = QuadExtScalar::unimodular_with_re(int(-1), false).unwrap();
        assert_eq!(m, QuadExtScalar::from_int(-1));
        assert!(QuadExtScalar::unimodular_with_re(rat(-7, 6), true).is_none());
    }

    #[test]
    fn string_forms() {
        let a = q(rat(-7, 8), rat(-1, 8), 15);
        assert_eq!(a.to_string(), "-7/8 - 1/8*i*sqrt(15)");
        assert_eq!(a.to_string().parse::<QuadExtScalar>().unwrap(), a);
        assert_eq!("-1".parse::<QuadExtScalar>().unwrap(), QuadExtScalar::from_int(-1));
        assert_eq!(a.render_surd(), "-7/8 - i√15/8");
        assert_eq!(q(int(0), int(1), 1).render_surd(), "i");
        let json = serde_json::to_string(&q(rat(1, 4), rat(1, 4), 15)).unwrap();
        assert_eq!(json, r#"{"x":"1/4","y":"1/4","d":15}"#);
        let back: QuadExtScalar = serde_json::from_str(&json).unwrap();
        assert_eq!(back, q(rat(1, 4), rat(1, 4), 15));
    }

    #[test]
    fn sqrt_rendering() {
        assert_eq!(render_sqrt(&int(3)), "√3");
        assert_eq!(render_sqrt(&int(12)), "2√3");
        assert_eq!(render_sqrt(&int(27)), "3√3");
        assert_eq!(render_sqrt(&int(4)), "2");
        assert_eq!(render_sqrt(&int(1)), "1");
        assert_eq!(render_sqrt(&int(0)), "0");
        assert_eq!(render_sqrt(&rat(7, 4)), "√7/2");
    }

    fn arb_scalar(d: u64) -> impl Strategy<Value = QuadExtScalar> {
        (-20i64..20, 1i64..10, -20i64..20, 1i64..10)
            .prop_map(move |(a, b, c, e)| q(rat(a, b), rat(c, e), d))
    }

    fn arb_unimodular() -> impl Strategy<Value = QuadExtScalar> {
        // (u + i√d·v)/(u - i√d·v) is unimodular for any (u, v) ≠ 0
        (-9i64..9, -9i64..9, prop::sample::select(vec![1u64, 3, 7, 15]))
            .prop_filter("nonzero", |(u, v, _)| *u != 0 || *v != 0)
            .prop_map(|(u, v, d)| {
                let z = q(int(u), int(v), d);
                z.checked_div(&z.conj()).unwrap()
            })
    }

    proptest! {
        #[test]
        fn unimodularity_closed_under_products(z in arb_unimodular(), w in arb_unimodular()) {
            prop_assert!(z.checked_mul(&z).unwrap().is_unimodular());
            if let Ok(p) = z.checked_mul(&w) {
                prop_assert!(p.is_unimodular());
            }
        }

        #[test]
        fn conj_involution_and_norm(z in arb_scalar(15)) {
            prop_assert_eq!(z.conj().conj(), z.clone());
            let p = z.checked_mul(&z.conj()).unwrap();
            prop_assert!(p.is_real());
            prop_assert_eq!(p.re(), &z.abs_squared());
        }

        #[test]
        fn canonical_triples_decide_equality(
            a in -6i64..6, b in 1i64..4, c in -6i64..6, e in 1i64..4, f in 1u64..4,
            d1 in prop::sample::select(vec![1u64, 2, 3, 5, 6, 7, 12, 18, 20]),
        ) {
            // same number written with radicand d1·f² and coefficient scaled by 1/f
            let z1 = q(rat(a, b), rat(c, e), d1);
            let z2 = q(rat(a, b), rat(c, e) / int(f as i64), d1 * f * f);
            prop_assert_eq!(&z1, &z2);
            prop_assert!((z1.to_float() - z2.to_float()).norm() < 1e-12);
            let w = q(rat(a, b), rat(c + 1, e), d1);
            prop_assert_ne!(&z1, &w);
            prop_assert!((z1.to_float() - w.to_float()).norm() > 1e-12);
        }

        #[test]
        fn division_inverts_multiplication(z in arb_scalar(7), w in arb_scalar(7)) {
            prop_assume!(!w.is_zero());
            let p = z.checked_mul(&w).unwrap();
            prop_assert_eq!(p.checked_div(&w).unwrap(), z);
        }
    }
}
