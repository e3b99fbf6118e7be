//! Exact rational parameters.
//!
//! Map parameters keep the exact rational they were written as (for instance
//! `"199/99"`) next to the nearest double. Threshold tests on the parameters
//! run on the rationals, evaluation runs on the doubles.

use std::fmt;

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Parses `"p/q"`, integers, and decimals (with optional exponent) exactly.
pub fn parse_exact(s: &str) -> Result<BigRational> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let num = parse_decimal(num.trim())?;
        let den = parse_decimal(den.trim())?;
        if den.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(num / den);
    }
    parse_decimal(s)
}

fn parse_decimal(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("not an exact number: {s:?}"));
    let (negative, body) = match s.as_bytes().first() {
        Some(b'-') => (true, &s[1..]),
        Some(b'+') => (false, &s[1..]),
        _ => (false, s),
    };
    let (mantissa, exp) = match body.find(['e', 'E']) {
        Some(i) => {
            let e: i64 = body[i + 1..].parse().map_err(|_| bad())?;
            (&body[..i], e)
        }
        None => (body, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let mut value = BigInt::parse_bytes(digits.as_bytes(), 10).ok_or_else(bad)?;
    if negative {
        value = -value;
    }
    let scale = exp - frac_part.len() as i64;
    if scale.unsigned_abs() > 10_000 {
        return Err(bad());
    }
    let pow = num_traits::pow(BigInt::from(10), scale.unsigned_abs() as usize);
    Ok(if scale >= 0 {
        BigRational::from_integer(value * pow)
    } else {
        BigRational::new(value, pow)
    })
}

/// Exact value of a finite double.
pub fn from_f64(v: f64) -> Option<BigRational> {
    BigRational::from_float(v)
}

/// Nearest double to `q`, ties to even.
pub fn to_f64(q: &BigRational) -> f64 {
    if q.is_zero() {
        return 0.0;
    }
    let negative = q.is_negative();
    let num = q.numer().abs();
    let den = q.denom().abs();

    // Choose a binary exponent so the integer quotient carries 53 bits.
    let mut exp = num.bits() as i64 - den.bits() as i64 - 53;
    let quotient = |e: i64| -> (BigInt, BigInt, BigInt) {
        let (n, d) = if e >= 0 {
            (num.clone(), &den << (e as usize))
        } else {
            (&num << ((-e) as usize), den.clone())
        };
        let q = &n / &d;
        let r = &n - &q * &d;
        (q, r, d)
    };
    let (mut mant, mut rem, mut div) = quotient(exp);
    while mant.bits() > 53 {
        exp += 1;
        (mant, rem, div) = quotient(exp);
    }
    while mant.bits() < 53 {
        exp -= 1;
        (mant, rem, div) = quotient(exp);
    }
    // Subnormal range: fewer mantissa bits.
    if exp < -1074 {
        exp = -1074;
        (mant, rem, div) = quotient(exp);
    }
    let twice = &rem * 2u32;
    let round_up = match twice.cmp(&div) {
        std::cmp::Ordering::Greater => true,
        std::cmp::Ordering::Equal => mant.bit(0),
        std::cmp::Ordering::Less => false,
    };
    if round_up {
        mant += 1u32;
        if mant.bits() > 53 {
            mant >>= 1usize;
            exp += 1;
        }
    }
    if exp > 971 {
        return if negative { f64::NEG_INFINITY } else { f64::INFINITY };
    }
    let m = mant.to_f64().expect("53-bit mantissa fits");
    let half = exp / 2;
    let v = m * 2f64.powi(half as i32) * 2f64.powi((exp - half) as i32);
    if negative {
        -v
    } else {
        v
    }
}

/// Renders `q` as `"p/q"`, or `"p"` for integers.
pub fn ratio_string(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// A real parameter carrying both its exact value and the nearest double.
#[derive(Clone, PartialEq)]
pub struct Param {
    exact: BigRational,
    value: f64,
}

impl Param {
    pub fn from_f64(v: f64) -> Result<Self> {
        let exact = from_f64(v)
            .ok_or_else(|| Error::InvalidParameters(format!("parameter must be finite, got {v}")))?;
        Ok(Self { exact, value: v })
    }

    pub fn from_ratio(exact: BigRational) -> Self {
        let value = to_f64(&exact);
        Self { exact, value }
    }

    pub fn parse(s: &str) -> Result<Self> {
        parse_exact(s).map(Self::from_ratio)
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn exact(&self) -> &BigRational {
        &self.exact
    }

    /// True when the double is the exact value.
    pub fn is_double(&self) -> bool {
        from_f64(self.value).as_ref() == Some(&self.exact)
    }
}

impl From<f64> for Param {
    /// Panics on non-finite input; use [`Param::from_f64`] for fallible conversion.
    fn from(v: f64) -> Self {
        Self::from_f64(v).expect("finite parameter")
    }
}

impl fmt::Debug for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_double() {
            write!(f, "{}", self.value)
        } else {
            write!(f, "{} (~{})", ratio_string(&self.exact), self.value)
        }
    }
}

impl Serialize for Param {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.is_double() {
            s.serialize_f64(self.value)
        } else {
            s.serialize_str(&ratio_string(&self.exact))
        }
    }
}

impl<'de> Deserialize<'de> for Param {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        match serde_json::Value::deserialize(d)? {
            serde_json::Value::Number(n) => {
                let v = n.as_f64().ok_or_else(|| D::Error::custom("bad number"))?;
                Param::from_f64(v).map_err(D::Error::custom)
            }
            serde_json::Value::String(s) => Param::parse(&s).map_err(D::Error::custom),
            other => Err(D::Error::custom(format!(
                "expected a number or exact number string, got {other}"
            ))),
        }
    }
}

pub(crate) fn sign_of(q: &BigRational) -> Sign {
    if q.is_zero() {
        Sign::NoSign
    } else if q.is_negative() {
        Sign::Minus
    } else {
        Sign::Plus
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn parses_rationals_and_decimals() {
        assert_eq!(parse_exact("199/99").unwrap(), q(199, 99));
        assert_eq!(parse_exact("-3").unwrap(), q(-3, 1));
        assert_eq!(parse_exact("0.1").unwrap(), q(1, 10));
        assert_eq!(parse_exact("2.5e-1").unwrap(), q(1, 4));
        assert_eq!(parse_exact("1.5E2").unwrap(), q(150, 1));
        assert_eq!(parse_exact(" 6/4 ").unwrap(), q(3, 2));
    }

    #[test]
    fn rejects_garbage() {
        for s in ["x", "", "1/0", "1..2", "--1", "1e", "/3", "0x10"] {
            assert!(parse_exact(s).is_err(), "{s:?}");
        }
    }

    #[test]
    fn nearest_double_matches_ieee_division() {
        for (n, d) in [(199, 99), (298, 99), (1, 3), (2, 3), (-7, 10), (1, 1 << 40), (123456789, 1000)] {
            assert_eq!(to_f64(&q(n, d)), n as f64 / d as f64, "{n}/{d}");
        }
    }

    #[test]
    fn nearest_double_round_trips_doubles() {
        for v in [0.1, 1e-310, 5e-324, 1.7976931348623157e308, -4.1, 3.0] {
            assert_eq!(to_f64(&from_f64(v).unwrap()), v);
        }
    }

    #[test]
    fn ties_round_to_even() {
        // 2^53 + 1 sits halfway between 2^53 and 2^53 + 2.
        let big = BigInt::from(1u64 << 53) + 1;
        assert_eq!(to_f64(&BigRational::from_integer(big)), 9007199254740992.0);
        let big = BigInt::from(1u64 << 53) + 3;
        assert_eq!(to_f64(&BigRational::from_integer(big)), 9007199254740996.0);
    }

    #[test]
    fn param_serializes_exactly() {
        let p = Param::parse("199/99").unwrap();
        assert_eq!(serde_json::to_string(&p).unwrap(), "\"199/99\"");
        let p = Param::from(0.5);
        assert_eq!(serde_json::to_string(&p).unwrap(), "0.5");
        let back: Param = serde_json::from_str("\"199/99\"").unwrap();
        assert_eq!(back.exact(), &q(199, 99));
        assert!(serde_json::from_str::<Param>("\"x\"").is_err());
    }
}
