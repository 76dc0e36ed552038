//! Exact truncated power series over the rationals, and 2×2 matrices of
//! them.
//!
//! A [`TruncatedSeries`] holds the coefficients `c_0 .. c_N` of a formal
//! power series modulo `x^(N+1)`. All arithmetic (addition, Cauchy
//! products, reciprocals of units) is exact over arbitrary rationals —
//! the exponential series contributes `1/ℓ!`, so dyadic denominators do
//! not suffice here. Truncation is the only "loss", and it is benign for
//! the moment recurrences, which never move information from high degrees
//! to low ones.

use crate::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// A power series truncated after degree `order`. `coeffs[k]` is the
/// coefficient of `x^k`; the vector always has length `order + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries {
    coeffs: Vec<BigRational>,
}

pub(crate) fn factorial(k: u32) -> BigInt {
    let mut f = BigInt::one();
    for i in 2..=u64::from(k) {
        f *= i;
    }
    f
}

impl TruncatedSeries {
    pub fn zero(order: usize) -> Self {
        TruncatedSeries { coeffs: vec![BigRational::zero(); order + 1] }
    }

    pub fn one(order: usize) -> Self {
        Self::constant(BigRational::one(), order)
    }

    pub fn constant(c: BigRational, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    /// Builds a series from explicit coefficients `c_0, c_1, …`.
    pub fn from_coeffs(coeffs: Vec<BigRational>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least a constant term");
        TruncatedSeries { coeffs }
    }

    /// The exponential `e^(c·x)`, exactly: coefficients `c^k / k!`.
    pub fn exp(c: i64, order: usize) -> Self {
        let mut coeffs = Vec::with_capacity(order + 1);
        let mut num = BigInt::one();
        let mut den = BigInt::one();
        for k in 0..=order {
            if k > 0 {
                num *= c;
                den *= k as i64;
            }
            coeffs.push(BigRational::new(num.clone(), den.clone()));
        }
        TruncatedSeries { coeffs }
    }

    /// `cosh(x)`: even part of `e^x`.
    pub fn cosh(order: usize) -> Self {
        let mut s = Self::exp(1, order);
        for (k, c) in s.coeffs.iter_mut().enumerate() {
            if k % 2 == 1 {
                c.set_zero();
            }
        }
        s
    }

    /// `sinh(x)`: odd part of `e^x`.
    pub fn sinh(order: usize) -> Self {
        let mut s = Self::exp(1, order);
        for (k, c) in s.coeffs.iter_mut().enumerate() {
            if k % 2 == 0 {
                c.set_zero();
            }
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient of `x^k` (zero beyond the truncation order).
    pub fn coeff(&self, k: usize) -> BigRational {
        self.coeffs.get(k).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Multiplies every coefficient by `c`.
    pub fn scale(&self, c: &BigRational) -> Self {
        TruncatedSeries { coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    /// Reciprocal of a unit series (nonzero constant term), exact modulo
    /// `x^(order+1)`: `g_0 = 1/f_0`, `g_n = -(Σ_{i=1..n} f_i g_{n-i})/f_0`.
    pub fn recip(&self) -> Result<Self> {
        if self.coeffs[0].is_zero() {
            return Err(Error::NonUnitDivisor);
        }
        let inv0 = self.coeffs[0].recip();
        let mut g = Vec::with_capacity(self.coeffs.len());
        g.push(inv0.clone());
        for n in 1..self.coeffs.len() {
            let mut acc = BigRational::zero();
            for i in 1..=n {
                acc += &self.coeffs[i] * &g[n - i];
            }
            g.push(-acc * &inv0);
        }
        Ok(TruncatedSeries { coeffs: g })
    }

    /// Exact division by a unit series.
    pub fn div(&self, rhs: &Self) -> Result<Self> {
        Ok(self * &rhs.recip()?)
    }

    /// `m`-th power by repeated multiplication (`m = 0` gives 1).
    pub fn pow(&self, m: u64) -> Self {
        let mut acc = Self::one(self.order());
        let mut base = self.clone();
        let mut m = m;
        while m > 0 {
            if m & 1 == 1 {
                acc = &acc * &base;
            }
            m >>= 1;
            if m > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Largest absolute coefficient value — handy for bound checks.
    pub fn max_abs_coeff(&self) -> BigRational {
        self.coeffs
            .iter()
            .map(Signed::abs)
            .max()
            .unwrap_or_else(BigRational::zero)
    }

    fn check_order(&self, other: &Self) {
        assert_eq!(
            self.coeffs.len(),
            other.coeffs.len(),
            "series orders must match"
        );
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() && !(first && k == self.order()) {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})x")?,
                _ => write!(f, "({c})x^{k}")?,
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl Add for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn add(self, rhs: Self) -> TruncatedSeries {
        self.check_order(rhs);
        TruncatedSeries {
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn sub(self, rhs: Self) -> TruncatedSeries {
        self.check_order(rhs);
        TruncatedSeries {
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Neg for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn neg(self) -> TruncatedSeries {
        TruncatedSeries { coeffs: self.coeffs.iter().map(|a| -a).collect() }
    }
}

impl Mul for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn mul(self, rhs: Self) -> TruncatedSeries {
        self.check_order(rhs);
        let n = self.coeffs.len();
        let mut out = vec![BigRational::zero(); n];
        for i in 0..n {
            if self.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..n - i {
                if rhs.coeffs[j].is_zero() {
                    continue;
                }
                out[i + j] += &self.coeffs[i] * &rhs.coeffs[j];
            }
        }
        TruncatedSeries { coeffs: out }
    }
}

/// A 2×2 matrix of truncated series, all sharing one order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesMatrix {
    entries: [[TruncatedSeries; 2]; 2],
}

impl SeriesMatrix {
    pub fn new(
        a: TruncatedSeries,
        b: TruncatedSeries,
        c: TruncatedSeries,
        d: TruncatedSeries,
    ) -> Self {
        assert!(
            a.order() == b.order() && b.order() == c.order() && c.order() == d.order(),
            "matrix entries must share one order"
        );
        SeriesMatrix { entries: [[a, b], [c, d]] }
    }

    pub fn identity(order: usize) -> Self {
        Self::new(
            TruncatedSeries::one(order),
            TruncatedSeries::zero(order),
            TruncatedSeries::zero(order),
            TruncatedSeries::one(order),
        )
    }

    /// Constant-entry matrix lifted to series of the given order.
    pub fn from_ints(m: [[i64; 2]; 2], order: usize) -> Self {
        let lift = |v: i64| TruncatedSeries::constant(BigRational::from_integer(v.into()), order);
        Self::new(lift(m[0][0]), lift(m[0][1]), lift(m[1][0]), lift(m[1][1]))
    }

    pub fn order(&self) -> usize {
        self.entries[0][0].order()
    }

    pub fn entry(&self, i: usize, j: usize) -> &TruncatedSeries {
        &self.entries[i][j]
    }

    /// Multiplies every entry by the scalar series `s`.
    pub fn scale_series(&self, s: &TruncatedSeries) -> Self {
        Self::new(
            &self.entries[0][0] * s,
            &self.entries[0][1] * s,
            &self.entries[1][0] * s,
            &self.entries[1][1] * s,
        )
    }

    /// Multiplies every entry by the rational constant `c`.
    pub fn scale(&self, c: &BigRational) -> Self {
        Self::new(
            self.entries[0][0].scale(c),
            self.entries[0][1].scale(c),
            self.entries[1][0].scale(c),
            self.entries[1][1].scale(c),
        )
    }

    /// Applies the matrix to a column vector of series.
    pub fn apply(
        &self,
        top: &TruncatedSeries,
        bottom: &TruncatedSeries,
    ) -> (TruncatedSeries, TruncatedSeries) {
        (
            &(&self.entries[0][0] * top) + &(&self.entries[0][1] * bottom),
            &(&self.entries[1][0] * top) + &(&self.entries[1][1] * bottom),
        )
    }

    /// `m`-th power by iterated multiplication (`m = 0` gives identity).
    pub fn pow(&self, m: u64) -> Self {
        let mut acc = Self::identity(self.order());
        for _ in 0..m {
            acc = &acc * self;
        }
        acc
    }
}

impl Add for &SeriesMatrix {
    type Output = SeriesMatrix;
    fn add(self, rhs: Self) -> SeriesMatrix {
        SeriesMatrix::new(
            &self.entries[0][0] + &rhs.entries[0][0],
            &self.entries[0][1] + &rhs.entries[0][1],
            &self.entries[1][0] + &rhs.entries[1][0],
            &self.entries[1][1] + &rhs.entries[1][1],
        )
    }
}

impl Mul for &SeriesMatrix {
    type Output = SeriesMatrix;
    fn mul(self, rhs: Self) -> SeriesMatrix {
        let e = |i: usize, j: usize| {
            &(&self.entries[i][0] * &rhs.entries[0][j])
                + &(&self.entries[i][1] * &rhs.entries[1][j])
        };
        SeriesMatrix::new(e(0, 0), e(0, 1), e(1, 0), e(1, 1))
    }
}
