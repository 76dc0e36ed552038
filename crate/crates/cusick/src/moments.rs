//! Normalized moments m_k(t) of the carry distributions, computed through
//! exact power-series recurrences.
//!
//! Writing `m_k(t) = (Σ_j δ(j,t) j^k)/k!`, the density recurrence turns
//! into a recurrence on the generating functions `Σ_k m_k(t) x^k`. It is
//! most convenient for the pair sums and differences
//!
//! ```text
//! a_k(t) = m_k(t) + m_k(t+1),       F_t(x) = Σ a_k(t) x^k,
//! b_k(t) = m_k(t) - m_k(t+1),       G_t(x) = Σ b_k(t) x^k,
//! ```
//!
//! which evolve under one 2×2 series matrix per appended bit:
//! `(F_{2t}, G_{2t}) = M₀(F_t, G_t)` and `(F_{2t+1}, G_{2t+1}) = M₁(F_t, G_t)`,
//! where `M₀ = ½(A₀+B₀)`, `M₁ = ½(A₁+B₁)` are built from `cosh`, `sinh`
//! and constant matrices. Appending a whole block of `m` equal bits has a
//! closed form ([`block_power`]) whose entries stay bounded uniformly in
//! `m` — the key to the effective moment bounds.
//!
//! The base point is `t = 0`: the distribution for shift 1 is geometric,
//! with moment generating function `e^x / (2 - e^(-x))`, so
//! `F_0 = 1 + that series` and `G_0 = 1 - that series`.

use crate::dyadic::Dyadic;
use crate::series::{factorial, SeriesMatrix, TruncatedSeries};
use crate::{Error, Result};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

/// The moment generating function of the shift-1 distribution,
/// `e^x / (2 - e^(-x)) = 1 + x² - x³ + (19/12)x⁴ - …`, truncated exactly.
pub fn mgf_series_t1(order: usize) -> TruncatedSeries {
    let numer = TruncatedSeries::exp(1, order);
    let denom = &TruncatedSeries::constant(BigRational::from_integer(2.into()), order)
        - &TruncatedSeries::exp(-1, order);
    numer.div(&denom).expect("2 - e^(-x) has unit constant term")
}

/// The exponential generating function of the Fubini (ordered Bell)
/// numbers, `1/(2 - e^x)`, truncated exactly.
pub fn fubini_series(order: usize) -> TruncatedSeries {
    let denom = &TruncatedSeries::constant(BigRational::from_integer(2.into()), order)
        - &TruncatedSeries::exp(1, order);
    TruncatedSeries::one(order)
        .div(&denom)
        .expect("2 - e^x has unit constant term")
}

/// `[x^k] 1/(2 - e^x)`, i.e. the k-th Fubini number divided by k!.
pub fn fubini_coeff(k: u32) -> BigRational {
    fubini_series(k as usize).coeff(k as usize)
}

/// The transition matrix applied to `(F, G)` when appending one bit.
pub fn step_matrix(bit: u8, order: usize) -> SeriesMatrix {
    assert!(bit <= 1);
    let c = TruncatedSeries::cosh(order);
    let s = TruncatedSeries::sinh(order);
    let half = BigRational::new(BigInt::one(), 2.into());
    let (wave, flat) = if bit == 0 {
        (
            SeriesMatrix::new(c.clone(), s.clone(), -&c, -&s),
            SeriesMatrix::from_ints([[1, 1], [1, 1]], order),
        )
    } else {
        (
            SeriesMatrix::new(c.clone(), s.clone(), c, s),
            SeriesMatrix::from_ints([[1, -1], [-1, 1]], order),
        )
    };
    (&wave + &flat).scale(&half)
}

/// The matrix for appending a block of `m` equal bits, in closed form.
///
/// For a zero block:
/// `2·M₀^m = (e^(-x)/2)^(m-1)·A₀ + B₀ + e^x/(2-e^(-x))·(1-(e^(-x)/2)^(m-1))·D₀`,
/// and the one-block form mirrors it with `x ↦ -x` and the companion
/// constant matrices. Equal to the iterated product of [`step_matrix`],
/// but with coefficients bounded uniformly in `m`.
pub fn block_power(bit: u8, m: u64, order: usize) -> Result<SeriesMatrix> {
    assert!(bit <= 1);
    if m == 0 {
        return Err(Error::EmptyBlock);
    }
    let half = BigRational::new(BigInt::one(), 2.into());
    let two = BigRational::from_integer(2.into());
    let pow2 = BigRational::new(BigInt::one(), BigInt::one() << (m - 1));
    let (wave, flat, residue, decay, ratio) = if bit == 0 {
        let decay = TruncatedSeries::exp(-(m as i64 - 1), order).scale(&pow2);
        let ratio = TruncatedSeries::exp(1, order)
            .div(&(&TruncatedSeries::constant(two, order) - &TruncatedSeries::exp(-1, order)))
            .expect("unit denominator");
        (
            {
                let c = TruncatedSeries::cosh(order);
                let s = TruncatedSeries::sinh(order);
                SeriesMatrix::new(c.clone(), s.clone(), -&c, -&s)
            },
            SeriesMatrix::from_ints([[1, 1], [1, 1]], order),
            SeriesMatrix::from_ints([[1, 1], [-1, -1]], order),
            decay,
            ratio,
        )
    } else {
        let decay = TruncatedSeries::exp(m as i64 - 1, order).scale(&pow2);
        let ratio = TruncatedSeries::exp(-1, order)
            .div(&(&TruncatedSeries::constant(two, order) - &TruncatedSeries::exp(1, order)))
            .expect("unit denominator");
        (
            {
                let c = TruncatedSeries::cosh(order);
                let s = TruncatedSeries::sinh(order);
                SeriesMatrix::new(c.clone(), s.clone(), c, s)
            },
            SeriesMatrix::from_ints([[1, -1], [-1, 1]], order),
            SeriesMatrix::from_ints([[1, -1], [1, -1]], order),
            decay,
            ratio,
        )
    };
    let one = TruncatedSeries::one(order);
    let third = residue.scale_series(&(&ratio * &(&one - &decay)));
    let doubled = &(&wave.scale_series(&decay) + &flat) + &third;
    Ok(doubled.scale(&half))
}

/// The pair `(F_t, G_t)` of sum/difference moment generating functions,
/// truncated at `order`, by walking the bits of `t` from most significant
/// to least.
pub fn fg_series(t: &BigUint, order: usize) -> (TruncatedSeries, TruncatedSeries) {
    let base = mgf_series_t1(order);
    let one = TruncatedSeries::one(order);
    let mut f = &one + &base;
    let mut g = &one - &base;
    let m0 = step_matrix(0, order);
    let m1 = step_matrix(1, order);
    for i in (0..t.bits()).rev() {
        let m = if t.bit(i) { &m1 } else { &m0 };
        let (nf, ng) = m.apply(&f, &g);
        f = nf;
        g = ng;
    }
    (f, g)
}

/// The normalized moment `m_k(t) = (a_k(t) + b_k(t))/2`, exact.
pub fn moment(t: &BigUint, k: u32) -> BigRational {
    let (f, g) = fg_series(t, k as usize);
    let half = BigRational::new(BigInt::one(), 2.into());
    (f.coeff(k as usize) + g.coeff(k as usize)) * half
}

/// All moments `m_0(t) … m_kmax(t)` from a single series chain.
pub fn moments_upto(t: &BigUint, kmax: u32) -> Vec<BigRational> {
    let (f, g) = fg_series(t, kmax as usize);
    let half = BigRational::new(BigInt::one(), 2.into());
    (0..=kmax as usize)
        .map(|k| (f.coeff(k) + g.coeff(k)) * &half)
        .collect()
}

/// The raw moment `m̃_k(t) = k!·m_k(t)` as a rational (it is in fact
/// always dyadic).
pub fn raw_moment_via_series(t: &BigUint, k: u32) -> BigRational {
    moment(t, k) * BigRational::from_integer(factorial(k))
}

/// Exact second moment straight from the bit pattern:
/// `m_2(t) = Σ_i ε_i - Σ_{i<j} ε_i ε_j 2^(i-j)` for `t = Σ ε_i 2^i`.
pub fn m2_exact(t: &BigUint) -> BigRational {
    let bits: Vec<u64> = (0..t.bits()).filter(|&i| t.bit(i)).collect();
    let mut total = Dyadic::from_int(bits.len() as i64);
    for (idx, &i) in bits.iter().enumerate() {
        for &j in &bits[idx + 1..] {
            // i < j, subtract 2^(i-j)
            total -= &Dyadic::pow2(i as i64 - j as i64);
        }
    }
    total.to_rational()
}

/// Checks the star-discrepancy bound `m_2(t) ≤ log t/(3 log 2) + 1 = log₂(t)/3 + 1`
/// for `t ≥ 1`, conservatively: `log₂ t` is replaced by the rational lower
/// bound `(bitlength(t^e) - 1)/e`, which undershoots by less than `1/e`.
/// A failure at `e = 256` is retried at `e = 4096` before being reported.
pub fn bejian_faure_check(t: &BigUint) -> bool {
    if t.is_zero() {
        return true; // m_2(0) = 0
    }
    let m2 = m2_exact(t);
    for e in [256u32, 4096] {
        let floor_log2 = BigRational::new(
            BigInt::from(t.pow(e).bits() - 1),
            BigInt::from(3u64 * u64::from(e)),
        );
        if m2 <= floor_log2 + BigRational::one() {
            return true;
        }
    }
    false
}
