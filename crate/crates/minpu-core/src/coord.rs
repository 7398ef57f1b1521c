//! Exact rational plane coordinates.
//!
//! Coordinates enter the system as decimal strings ("0.25", "-3.1") and are
//! held as exact rationals, so every comparison in the solvers is exact and
//! a value written back out reproduces its input digits. There is no
//! floating-point path.

use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Sub};

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::Error;

/// An exact rational coordinate on the plane.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Coord(BigRational);

impl Coord {
    pub fn zero() -> Self {
        Coord(BigRational::zero())
    }

    pub fn from_integer(v: i64) -> Self {
        Coord(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Coord(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn rational(&self) -> &BigRational {
        &self.0
    }

    pub fn into_rational(self) -> BigRational {
        self.0
    }

    pub fn from_rational(r: BigRational) -> Self {
        Coord(r)
    }

    /// Parses a plain decimal literal: optional sign, digits, optional
    /// fractional digits. Anything else (exponents, hex, spaces) is rejected.
    pub fn from_decimal_str(s: &str) -> Result<Self, Error> {
        let bad = || Error::BadDecimal(String::from(s));
        let bytes = s.as_bytes();
        if bytes.is_empty() {
            return Err(bad());
        }
        let (neg, rest) = match bytes[0] {
            b'-' => (true, &bytes[1..]),
            b'+' => (false, &bytes[1..]),
            _ => (false, bytes),
        };
        let mut parts = rest.splitn(2, |&b| b == b'.');
        let int_part = parts.next().ok_or_else(bad)?;
        let frac_part = parts.next().unwrap_or(b"");
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(bad());
        }
        if !int_part.iter().all(u8::is_ascii_digit) || !frac_part.iter().all(u8::is_ascii_digit) {
            return Err(bad());
        }
        let mut digits = Vec::with_capacity(int_part.len() + frac_part.len());
        digits.extend_from_slice(int_part);
        digits.extend_from_slice(frac_part);
        let num = BigInt::parse_bytes(&digits, 10).ok_or_else(bad)?;
        let num = if neg { -num } else { num };
        let den = BigInt::from(10u32).pow(frac_part.len() as u32);
        Ok(Coord(BigRational::new(num, den)))
    }

    /// Renders the exact value back as a decimal string. Only possible when
    /// the reduced denominator is of the form 2^a·5^b, which holds for every
    /// coordinate that entered through `from_decimal_str` or the perturber.
    pub fn to_decimal_string(&self) -> String {
        let num = self.0.numer();
        let den = self.0.denom();
        let (twos, rest) = factor_out(den.magnitude().clone().into(), 2u32);
        let (fives, rest) = factor_out(rest, 5u32);
        assert!(
            rest.is_one(),
            "coordinate denominator {} is not decimal",
            den
        );
        let scale = twos.max(fives);
        // numerator * 10^scale / denominator is an integer.
        let scaled = (num * BigInt::from(10u32).pow(scale)) / den;
        let neg = scaled.sign() == Sign::Minus;
        let digits = scaled.magnitude().to_str_radix(10);
        let mut out = String::new();
        if neg {
            out.push('-');
        }
        let scale = scale as usize;
        if scale == 0 {
            out.push_str(&digits);
            return out;
        }
        if digits.len() > scale {
            let (int, frac) = digits.split_at(digits.len() - scale);
            out.push_str(int);
            out.push('.');
            out.push_str(frac);
        } else {
            out.push_str("0.");
            for _ in 0..scale - digits.len() {
                out.push('0');
            }
            out.push_str(&digits);
        }
        // Trim trailing zeros but keep at least one fractional digit.
        while out.ends_with('0') && !out.ends_with(".0") {
            out.pop();
        }
        out
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    /// Smallest integer >= self, as i64.
    pub fn ceil_i64(&self) -> i64 {
        self.0
            .ceil()
            .to_integer()
            .to_i64()
            .expect("coordinate magnitude exceeds supported range")
    }

    /// Largest integer <= self, as i64.
    pub fn floor_i64(&self) -> i64 {
        self.0
            .floor()
            .to_integer()
            .to_i64()
            .expect("coordinate magnitude exceeds supported range")
    }

    /// Fractional part in [0, 1): self - floor(self).
    pub fn fract(&self) -> Coord {
        Coord(&self.0 - self.0.floor())
    }

    pub fn abs(&self) -> Coord {
        Coord(self.0.abs())
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn plus_one(&self) -> Coord {
        Coord(&self.0 + BigRational::one())
    }

    pub fn plus_i64(&self, v: i64) -> Coord {
        Coord(&self.0 + BigRational::from_integer(BigInt::from(v)))
    }

    pub fn cmp_i64(&self, v: i64) -> Ordering {
        self.0.cmp(&BigRational::from_integer(BigInt::from(v)))
    }
}

fn factor_out(mut n: num_bigint::BigUint, p: u32) -> (u32, num_bigint::BigUint) {
    let p = num_bigint::BigUint::from(p);
    let mut count = 0;
    while !n.is_one() && (&n % &p).is_zero() {
        n /= &p;
        count += 1;
    }
    (count, n)
}

impl fmt::Debug for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Add for &Coord {
    type Output = Coord;
    fn add(self, rhs: &Coord) -> Coord {
        Coord(&self.0 + &rhs.0)
    }
}

impl Sub for &Coord {
    type Output = Coord;
    fn sub(self, rhs: &Coord) -> Coord {
        Coord(&self.0 - &rhs.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_plain_decimals() {
        assert_eq!(Coord::from_decimal_str("0.5").unwrap(), Coord::from_ratio(1, 2));
        assert_eq!(Coord::from_decimal_str("-1.25").unwrap(), Coord::from_ratio(-5, 4));
        assert_eq!(Coord::from_decimal_str("3").unwrap(), Coord::from_integer(3));
        assert_eq!(Coord::from_decimal_str(".5").unwrap(), Coord::from_ratio(1, 2));
    }

    #[test]
    fn rejects_non_decimal_tokens() {
        for s in ["", "1e3", "0x10", " 1", "1.2.3", "1/2", "-", "nan"] {
            assert!(Coord::from_decimal_str(s).is_err(), "accepted {:?}", s);
        }
    }

    #[test]
    fn decimal_round_trip() {
        for s in ["0.5", "-1.25", "3", "0.1", "-0.007", "12.340000000001", "0"] {
            let c = Coord::from_decimal_str(s).unwrap();
            let back = Coord::from_decimal_str(&c.to_decimal_string()).unwrap();
            assert_eq!(c, back, "round trip of {}", s);
        }
    }

    #[test]
    fn ceil_and_fract() {
        assert_eq!(Coord::from_ratio(1, 4).ceil_i64(), 1);
        assert_eq!(Coord::from_ratio(-1, 2).ceil_i64(), 0);
        assert_eq!(Coord::from_ratio(16, 5).ceil_i64(), 4);
        assert_eq!(Coord::from_ratio(29, 10).ceil_i64(), 3);
        assert_eq!(Coord::from_ratio(6, 5).fract(), Coord::from_ratio(1, 5));
        assert_eq!(Coord::from_ratio(-1, 2).fract(), Coord::from_ratio(1, 2));
    }
}
