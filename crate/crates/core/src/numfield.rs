//! Exact arithmetic in Q(√2).

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always kept in lowest terms with a positive denominator.
pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    assert!(d != 0, "rational with zero denominator");
    Rational::new(BigInt::from(n), BigInt::from(d))
}

fn rat_sign(r: &Rational) -> i8 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

/// The real number `p + q·√2` with rational `p`, `q`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct QSqrt2 {
    p: Rational,
    q: Rational,
}

impl QSqrt2 {
    pub fn new(p: Rational, q: Rational) -> Self {
        QSqrt2 { p, q }
    }

    pub fn from_ints(p: i64, q: i64) -> Self {
        QSqrt2::new(Rational::from_integer(p.into()), Rational::from_integer(q.into()))
    }

    pub fn from_rational(p: Rational) -> Self {
        QSqrt2::new(p, Rational::zero())
    }

    pub fn zero() -> Self {
        QSqrt2::default()
    }

    pub fn one() -> Self {
        QSqrt2::from_ints(1, 0)
    }

    pub fn sqrt2() -> Self {
        QSqrt2::from_ints(0, 1)
    }

    pub fn p(&self) -> &Rational {
        &self.p
    }

    pub fn q(&self) -> &Rational {
        &self.q
    }

    pub fn is_zero(&self) -> bool {
        self.p.is_zero() && self.q.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.q.is_zero()
    }

    /// Galois conjugate `p − q·√2`.
    pub fn conj(&self) -> Self {
        QSqrt2::new(self.p.clone(), -self.q.clone())
    }

    /// Field norm `p² − 2q²`.
    pub fn norm(&self) -> Rational {
        &self.p * &self.p - (&self.q * &self.q) * Rational::from_integer(2.into())
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroDivisor);
        }
        let n = self.norm();
        Ok(QSqrt2::new(&self.p / &n, -(&self.q / &n)))
    }

    pub fn checked_div(&self, rhs: &QSqrt2) -> Result<Self> {
        Ok(self * &rhs.recip()?)
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = QSqrt2::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    pub fn abs(&self) -> Self {
        if self.sign() < 0 {
            -self.clone()
        } else {
            self.clone()
        }
    }

    /// Exact sign of the real value.
    pub fn sign(&self) -> i8 {
        let sp = rat_sign(&self.p);
        let sq = rat_sign(&self.q);
        if sq == 0 {
            return sp;
        }
        if sp == 0 || sp == sq {
            return sq;
        }
        let p2 = &self.p * &self.p;
        let q2 = (&self.q * &self.q) * Rational::from_integer(2.into());
        match p2.cmp(&q2) {
            Ordering::Greater => sp,
            Ordering::Less => sq,
            Ordering::Equal => unreachable!("p^2 = 2 q^2 with q != 0"),
        }
    }

    /// Largest integer `n ≤ self`, certified by exact sign tests.
    pub fn floor(&self) -> BigInt {
        let mut n = self.floor_guess();
        loop {
            let diff = self - &QSqrt2::from_rational(Rational::from_integer(n.clone()));
            if diff.sign() < 0 {
                n -= 1;
                continue;
            }
            let next = &diff - &QSqrt2::one();
            if next.sign() >= 0 {
                n += 1;
                continue;
            }
            return n;
        }
    }

    fn floor_guess(&self) -> BigInt {
        if let Ok(v) = self.to_f64() {
            if v.abs() < 1e15 {
                return BigInt::from(v.floor() as i64);
            }
        }
        // (P + Q√2)/D over a common denominator, with √(2Q²) replaced by its integer root.
        let d = self.p.denom().lcm(self.q.denom());
        let big_p = self.p.numer() * (&d / self.p.denom());
        let big_q = self.q.numer() * (&d / self.q.denom());
        let root: BigInt = Roots::sqrt(&(&big_q * &big_q * 2u32));
        let s = if big_q.is_negative() { -root } else { root };
        (big_p + s).div_floor(&d)
    }

    /// Nearest-double approximation; relative error within a few ulp.
    pub fn to_f64(&self) -> Result<f64> {
        let sp = rat_sign(&self.p);
        let sq = rat_sign(&self.q);
        let v = if sp * sq >= 0 {
            let p = rat_to_f64(&self.p)?;
            let q = rat_to_f64(&self.q)?;
            q.mul_add(std::f64::consts::SQRT_2, p)
        } else {
            // Opposite signs: divide the norm by the conjugate, which has no cancellation.
            let n = rat_to_f64(&self.norm())?;
            let p = rat_to_f64(&self.p)?;
            let q = rat_to_f64(&self.q)?;
            n / (-q).mul_add(std::f64::consts::SQRT_2, p)
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NotRepresentable)
        }
    }
}

fn rat_to_f64(r: &Rational) -> Result<f64> {
    match r.to_f64() {
        Some(v) if v.is_finite() => Ok(v),
        _ => Err(Error::NotRepresentable),
    }
}

impl PartialOrd for QSqrt2 {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QSqrt2 {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).sign().cmp(&0)
    }
}

impl Add<&QSqrt2> for &QSqrt2 {
    type Output = QSqrt2;
    fn add(self, rhs: &QSqrt2) -> QSqrt2 {
        QSqrt2::new(&self.p + &rhs.p, &self.q + &rhs.q)
    }
}

impl Sub<&QSqrt2> for &QSqrt2 {
    type Output = QSqrt2;
    fn sub(self, rhs: &QSqrt2) -> QSqrt2 {
        QSqrt2::new(&self.p - &rhs.p, &self.q - &rhs.q)
    }
}

impl Mul<&QSqrt2> for &QSqrt2 {
    type Output = QSqrt2;
    fn mul(self, rhs: &QSqrt2) -> QSqrt2 {
        let two = Rational::from_integer(2.into());
        QSqrt2::new(&self.p * &rhs.p + &self.q * &rhs.q * two, &self.p * &rhs.q + &self.q * &rhs.p)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<QSqrt2> for QSqrt2 {
            type Output = QSqrt2;
            fn $m(self, rhs: QSqrt2) -> QSqrt2 {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&QSqrt2> for QSqrt2 {
            type Output = QSqrt2;
            fn $m(self, rhs: &QSqrt2) -> QSqrt2 {
                (&self).$m(rhs)
            }
        }
        impl $tr<QSqrt2> for &QSqrt2 {
            type Output = QSqrt2;
            fn $m(self, rhs: QSqrt2) -> QSqrt2 {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for QSqrt2 {
    type Output = QSqrt2;
    fn neg(self) -> QSqrt2 {
        QSqrt2::new(-self.p, -self.q)
    }
}

impl Neg for &QSqrt2 {
    type Output = QSqrt2;
    fn neg(self) -> QSqrt2 {
        -self.clone()
    }
}

impl From<i64> for QSqrt2 {
    fn from(n: i64) -> Self {
        QSqrt2::from_ints(n, 0)
    }
}

impl From<Rational> for QSqrt2 {
    fn from(r: Rational) -> Self {
        QSqrt2::from_rational(r)
    }
}

/// Prints `p/q + r/s*sqrt2`.
impl fmt::Display for QSqrt2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{} + {}/{}*sqrt2", self.p.numer(), self.p.denom(), self.q.numer(), self.q.denom())
    }
}

impl fmt::Debug for QSqrt2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QSqrt2({self})")
    }
}

fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::Parse(format!("bad rational {s:?}"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(n, d))
}

/// Accepts `P`, `Q*sqrt2` and `P + Q*sqrt2` (or `P - Q*sqrt2`), where each of `P`, `Q` is `n` or `n/d`.
impl FromStr for QSqrt2 {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.ends_with("sqrt2") && !compact.ends_with("*sqrt2") {
            compact.insert_str(compact.len() - 5, "1*");
        }
        if compact.is_empty() {
            return Err(Error::Parse("empty".into()));
        }
        let Some(body) = compact.strip_suffix("*sqrt2") else {
            return Ok(QSqrt2::from_rational(parse_rational(&compact)?));
        };
        let bytes = body.as_bytes();
        let split = (1..bytes.len())
            .rev()
            .find(|&i| matches!(bytes[i], b'+' | b'-') && !matches!(bytes[i - 1], b'/' | b'+' | b'-'));
        match split {
            None => Ok(QSqrt2::new(Rational::zero(), parse_rational(body)?)),
            Some(i) => {
                let p = parse_rational(&body[..i])?;
                let rest = if bytes[i] == b'+' { &body[i + 1..] } else { &body[i..] };
                let q =
                    if let Some(neg) = rest.strip_prefix("--") { parse_rational(neg)? } else { parse_rational(rest)? };
                Ok(QSqrt2::new(p, q))
            }
        }
    }
}

impl Serialize for QSqrt2 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for QSqrt2 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `1 + √2`, the fundamental unit.
pub fn unit() -> QSqrt2 {
    QSqrt2::from_ints(1, 1)
}

/// `2 + √2`, the width of the first cusp.
pub fn alpha() -> QSqrt2 {
    QSqrt2::from_ints(2, 1)
}

impl One for QSqrt2 {
    fn one() -> Self {
        QSqrt2::one()
    }
}

impl Zero for QSqrt2 {
    fn zero() -> Self {
        QSqrt2::zero()
    }
    fn is_zero(&self) -> bool {
        QSqrt2::is_zero(self)
    }
}
