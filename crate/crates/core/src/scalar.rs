//! The ordered-field abstraction shared by the exact and floating backends.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::ToPrimitive;
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numfield::{rat, QSqrt2};

pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(n: i64) -> Self;
    fn from_ratio(n: i64, d: i64) -> Self;
    fn sqrt2() -> Self;
    fn from_qsqrt2(x: &QSqrt2) -> Result<Self>;
    fn try_div(&self, rhs: &Self) -> Result<Self>;
    fn sign(&self) -> i8;
    fn floor_i64(&self) -> Result<i64>;
    fn to_f64(&self) -> Result<f64>;
    /// Exact text in the exact backend, 17 significant digits otherwise.
    fn to_text(&self) -> String;

    fn is_zero(&self) -> bool {
        self.sign() == 0
    }

    fn recip(&self) -> Result<Self> {
        Self::one().try_div(self)
    }
}

impl Scalar for QSqrt2 {
    const EXACT: bool = true;

    fn zero() -> Self {
        QSqrt2::zero()
    }
    fn one() -> Self {
        QSqrt2::one()
    }
    fn from_i64(n: i64) -> Self {
        QSqrt2::from(n)
    }
    fn from_ratio(n: i64, d: i64) -> Self {
        QSqrt2::from_rational(rat(n, d))
    }
    fn sqrt2() -> Self {
        QSqrt2::sqrt2()
    }
    fn from_qsqrt2(x: &QSqrt2) -> Result<Self> {
        Ok(x.clone())
    }
    fn try_div(&self, rhs: &Self) -> Result<Self> {
        self.checked_div(rhs)
    }
    fn sign(&self) -> i8 {
        QSqrt2::sign(self)
    }
    fn floor_i64(&self) -> Result<i64> {
        self.floor().to_i64().ok_or(Error::NotRepresentable)
    }
    fn to_f64(&self) -> Result<f64> {
        QSqrt2::to_f64(self)
    }
    fn to_text(&self) -> String {
        self.to_string()
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_i64(n: i64) -> Self {
        n as f64
    }
    fn from_ratio(n: i64, d: i64) -> Self {
        n as f64 / d as f64
    }
    fn sqrt2() -> Self {
        std::f64::consts::SQRT_2
    }
    fn from_qsqrt2(x: &QSqrt2) -> Result<Self> {
        x.to_f64()
    }
    fn try_div(&self, rhs: &Self) -> Result<Self> {
        if *rhs == 0.0 {
            Err(Error::ZeroDivisor)
        } else {
            Ok(self / rhs)
        }
    }
    fn sign(&self) -> i8 {
        if *self > 0.0 {
            1
        } else if *self < 0.0 {
            -1
        } else {
            0
        }
    }
    fn floor_i64(&self) -> Result<i64> {
        let f = self.floor();
        if f.is_finite() && f.abs() < 9.0e18 {
            Ok(f as i64)
        } else {
            Err(Error::NotRepresentable)
        }
    }
    fn to_f64(&self) -> Result<f64> {
        if self.is_finite() {
            Ok(*self)
        } else {
            Err(Error::NotRepresentable)
        }
    }
    fn to_text(&self) -> String {
        fmt_g17(*self)
    }
}

/// `%.17g`-style formatting: shortest of fixed or scientific, trailing zeros dropped.
pub fn fmt_g17(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let sci = format!("{v:.16e}");
    let (mant, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if (-4..17).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        trim_zeros(&format!("{v:.decimals$}"))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim_zeros(mant), sign, exp.abs())
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}
