//! Exact arithmetic on dyadic rationals `num / 2^exp`.
//!
//! Every density, cumulative value, and scan minimum in this crate lives in
//! the ring Z[1/2], so sums, differences, and products never leave it and
//! nothing is ever rounded. A value is stored as an integer numerator and a
//! *stored* exponent — the denominator `2^exp` is never materialized, which
//! keeps repeated halving (the dominant operation in the density recurrence)
//! cheap.
//!
//! The canonical textual form is `num/2^exp`, e.g. `3/2^2` or
//! `18169025645289/2^45`; [`std::fmt::Display`] and [`std::str::FromStr`]
//! round-trip bit-exactly, and the same form is used in all JSON and CSV
//! output.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

/// A dyadic rational `num / 2^exp` in lowest terms.
///
/// Invariants (restored by every constructor and operation):
/// * if `exp > 0` then `num` is odd — the fraction is fully reduced;
/// * if `num == 0` then `exp == 0`, so zero has a unique representation.
///
/// Even numerators occur only with `exp == 0`, i.e. for integers.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    num: BigInt,
    exp: u64,
}

impl Dyadic {
    /// Builds `num / 2^exp` and normalizes it to canonical form.
    pub fn new(num: BigInt, exp: u64) -> Self {
        let mut d = Dyadic { num, exp };
        d.normalize();
        d
    }

    fn normalize(&mut self) {
        if self.num.is_zero() {
            self.exp = 0;
            return;
        }
        if self.exp > 0 {
            let tz = self.num.trailing_zeros().unwrap_or(0);
            let k = tz.min(self.exp);
            if k > 0 {
                self.num >>= k;
                self.exp -= k;
            }
        }
    }

    pub fn zero() -> Self {
        Dyadic { num: BigInt::zero(), exp: 0 }
    }

    pub fn one() -> Self {
        Dyadic { num: BigInt::one(), exp: 0 }
    }

    pub fn from_int(n: i64) -> Self {
        Dyadic { num: BigInt::from(n), exp: 0 }
    }

    /// `2^k` for any (possibly negative) integer `k`.
    pub fn pow2(k: i64) -> Self {
        if k >= 0 {
            Dyadic { num: BigInt::one() << k as u64, exp: 0 }
        } else {
            Dyadic { num: BigInt::one(), exp: (-k) as u64 }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.num.is_negative()
    }

    /// Numerator of the canonical form.
    pub fn numerator(&self) -> &BigInt {
        &self.num
    }

    /// Stored exponent of the canonical form (the denominator is `2^exp`).
    pub fn exponent(&self) -> u64 {
        self.exp
    }

    /// Multiplies by `2^s`; `s` may be negative.
    pub fn shift(&self, s: i64) -> Self {
        if self.num.is_zero() {
            return Dyadic::zero();
        }
        if s >= 0 {
            let s = s as u64;
            let k = s.min(self.exp);
            Dyadic {
                num: &self.num << (s - k),
                exp: self.exp - k,
            }
        } else {
            // The numerator may be even here (only when exp == 0), so renormalize.
            Dyadic::new(self.num.clone(), self.exp + (-s) as u64)
        }
    }

    /// Divides by two (exact).
    pub fn half(&self) -> Self {
        self.shift(-1)
    }

    pub fn abs(&self) -> Self {
        Dyadic { num: self.num.abs(), exp: self.exp }
    }

    /// Exact conversion into a general rational.
    pub fn to_rational(&self) -> BigRational {
        BigRational::new(self.num.clone(), BigInt::one() << self.exp)
    }

    /// Nearest `f64` (used only for reporting, never for decisions).
    pub fn to_f64(&self) -> f64 {
        self.to_rational().to_f64().unwrap_or(f64::NAN)
    }

    /// Correctly rounded decimal expansion with `digits ≥ 1` fractional
    /// digits (round to nearest, ties to even).
    ///
    /// `Dyadic::parse("18169025645289/2^45").to_decimal(6)` is `"0.516394"`.
    pub fn to_decimal(&self, digits: usize) -> String {
        assert!(digits >= 1, "to_decimal needs at least one fractional digit");
        let negative = self.num.is_negative();
        let scaled: BigUint = (self.num.magnitude() * BigUint::from(10u32).pow(digits as u32)).clone();
        // Divide by 2^exp, rounding to nearest with ties to even.
        let q = &scaled >> self.exp;
        let rem = &scaled - (&q << self.exp);
        let mut q = q;
        if self.exp > 0 {
            let twice = &rem << 1u8;
            let den = BigUint::one() << self.exp;
            match twice.cmp(&den) {
                Ordering::Greater => q += 1u32,
                Ordering::Equal => {
                    if q.bit(0) {
                        q += 1u32;
                    }
                }
                Ordering::Less => {}
            }
        }
        let mut s = q.to_string();
        if s.len() <= digits {
            s = format!("{}{}", "0".repeat(digits - s.len() + 1), s);
        }
        let point = s.len() - digits;
        let (int_part, frac_part) = s.split_at(point);
        format!("{}{}.{}", if negative { "-" } else { "" }, int_part, frac_part)
    }

    /// Exact decimal expansion (every dyadic rational has a finite one),
    /// with trailing zeros trimmed. `3/2^2` renders as `"0.75"`.
    pub fn to_decimal_exact(&self) -> String {
        if self.exp == 0 {
            return self.num.to_string();
        }
        // num / 2^e  ==  num * 5^e / 10^e
        let negative = self.num.is_negative();
        let scaled = self.num.magnitude() * BigUint::from(5u32).pow(self.exp as u32);
        let mut s = scaled.to_string();
        let digits = self.exp as usize;
        if s.len() <= digits {
            s = format!("{}{}", "0".repeat(digits - s.len() + 1), s);
        }
        let point = s.len() - digits;
        let (int_part, frac_part) = s.split_at(point);
        let frac_part = frac_part.trim_end_matches('0');
        let frac_part = if frac_part.is_empty() { "0" } else { frac_part };
        format!("{}{}.{}", if negative { "-" } else { "" }, int_part, frac_part)
    }

    /// Parses the canonical form; plain integers are accepted as `n/2^0`.
    pub fn parse(s: &str) -> Result<Self, crate::Error> {
        s.parse()
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/2^{}", self.num, self.exp)
    }
}

impl FromStr for Dyadic {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || crate::Error::InvalidArgument(format!("not a dyadic rational: `{s}`"));
        match s.split_once("/2^") {
            Some((num, exp)) => {
                let num = BigInt::from_str(num.trim()).map_err(|_| bad())?;
                let exp = u64::from_str(exp.trim()).map_err(|_| bad())?;
                Ok(Dyadic::new(num, exp))
            }
            None => {
                let num = BigInt::from_str(s.trim()).map_err(|_| bad())?;
                Ok(Dyadic::new(num, 0))
            }
        }
    }
}

impl Serialize for Dyadic {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Dyadic {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        // Compare num_a * 2^(g-ea)  vs  num_b * 2^(g-eb) at the common exponent g.
        let g = self.exp.max(other.exp);
        let a = &self.num << (g - self.exp);
        let b = &other.num << (g - other.exp);
        a.cmp(&b)
    }
}

impl Add for &Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: &Dyadic) -> Dyadic {
        let g = self.exp.max(rhs.exp);
        let a = &self.num << (g - self.exp);
        let b = &rhs.num << (g - rhs.exp);
        Dyadic::new(a + b, g)
    }
}

impl Sub for &Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: &Dyadic) -> Dyadic {
        let g = self.exp.max(rhs.exp);
        let a = &self.num << (g - self.exp);
        let b = &rhs.num << (g - rhs.exp);
        Dyadic::new(a - b, g)
    }
}

impl Mul for &Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: &Dyadic) -> Dyadic {
        Dyadic::new(&self.num * &rhs.num, self.exp + rhs.exp)
    }
}

impl Neg for &Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic { num: -&self.num, exp: self.exp }
    }
}

// Owned-operand conveniences, all deferring to the reference impls.
impl Add for Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: Dyadic) -> Dyadic { &self + &rhs }
}
impl Sub for Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: Dyadic) -> Dyadic { &self - &rhs }
}
impl Mul for Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: Dyadic) -> Dyadic { &self * &rhs }
}
impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic { -&self }
}
impl AddAssign<&Dyadic> for Dyadic {
    fn add_assign(&mut self, rhs: &Dyadic) {
        *self = &*self + rhs;
    }
}
impl SubAssign<&Dyadic> for Dyadic {
    fn sub_assign(&mut self, rhs: &Dyadic) {
        *self = &*self - rhs;
    }
}

impl Mul<&BigInt> for &Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: &BigInt) -> Dyadic {
        Dyadic::new(&self.num * rhs, self.exp)
    }
}

impl From<i64> for Dyadic {
    fn from(n: i64) -> Self {
        Dyadic::from_int(n)
    }
}
