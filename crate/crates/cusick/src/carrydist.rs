//! Exact carry distributions δ(·, t).
//!
//! For a shift `t`, the value `δ(j, t)` is the asymptotic density of natural
//! numbers `n` with `s(n + t) - s(n) = j`, where `s` counts binary ones.
//! These densities obey the coupled recurrence
//!
//! ```text
//! δ(j, 2t)     = δ(j, t)
//! δ(j, 2t + 1) = ½ δ(j - 1, t)  +  ½ δ(j + 1, t + 1)
//! ```
//!
//! with base case `δ(j, 1) = 2^(j-2)` for `j ≤ 1` (a geometric law with mean
//! zero). Because mixing two geometric tails of ratio 2 yields another such
//! tail — `½·c₁2^(j-1) + ½·c₂2^(j+1) = (c₁/4 + c₂)·2^j` — every distribution
//! reachable from the base case is *finitely supported above a cutoff and
//! exactly geometric below it*. [`CarryDistribution`] stores exactly that:
//! a sparse map of explicit values for `j ≥ j_min` plus a single
//! `tail_coeff` with `δ(j) = tail_coeff · 2^j` for every `j < j_min`.
//!
//! Walking the bits of `t` from most to least significant while carrying the
//! pair (δ(·, a), δ(·, a+1)) for the growing prefix `a` — a [`DistPair`] —
//! evaluates any shift in `O(bits)` steps. The same pair tree drives the
//! exhaustive scanner.

use crate::dyadic::Dyadic;
use crate::Error;
use num_bigint::{BigInt, BigUint};
use num_integer::binomial;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// The exact distribution of carry differences for one shift `t`.
///
/// `support` holds every nonzero density at `j ≥ j_min`; below `j_min` the
/// law is exactly geometric, `δ(j) = tail_coeff · 2^j`. Keeping `j_min` at
/// the largest index where the geometric law takes over (entries equal to
/// the tail law are absorbed) keeps the support no larger than the bit
/// length of `t` plus its digit sum.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CarryDistribution {
    support: BTreeMap<i64, Dyadic>,
    tail_coeff: Dyadic,
    j_min: i64,
    /// Bits of `t` consumed to produce this distribution (diagnostics only;
    /// ignored by equality, since δ(·, 2t) = δ(·, t)).
    t_bits: u32,
}

impl PartialEq for CarryDistribution {
    fn eq(&self, other: &Self) -> bool {
        // Canonical representations make semantic equality structural.
        self.support == other.support
            && self.tail_coeff == other.tail_coeff
            && self.j_min == other.j_min
    }
}
impl Eq for CarryDistribution {}

impl CarryDistribution {
    fn new(support: BTreeMap<i64, Dyadic>, tail_coeff: Dyadic, j_min: i64, t_bits: u32) -> Self {
        let mut d = CarryDistribution { support, tail_coeff, j_min, t_bits };
        d.canonicalize();
        d
    }

    /// Point mass at `j = 0`: the distribution for `t = 0`.
    pub fn point_mass_at_zero() -> Self {
        let mut support = BTreeMap::new();
        support.insert(0, Dyadic::one());
        CarryDistribution::new(support, Dyadic::zero(), 0, 0)
    }

    /// The geometric base case δ(j, 1) = 2^(j-2) for j ≤ 1.
    pub fn geometric_base() -> Self {
        let mut support = BTreeMap::new();
        support.insert(1, Dyadic::pow2(-1));
        CarryDistribution::new(support, Dyadic::pow2(-2), 1, 1)
    }

    /// Absorbs explicit entries that already follow the tail law, so equal
    /// distributions get identical representations.
    fn canonicalize(&mut self) {
        loop {
            match self.support.get(&self.j_min) {
                Some(v) => {
                    if *v == self.tail_coeff.shift(self.j_min) {
                        self.support.remove(&self.j_min);
                        self.j_min += 1;
                    } else {
                        break;
                    }
                }
                None => {
                    if self.tail_coeff.is_zero() {
                        // Pure finite distribution: pin j_min to the lowest key.
                        self.j_min = self.support.keys().next().copied().unwrap_or(0);
                        break;
                    } else if let Some(&lo) = self.support.keys().next() {
                        if lo > self.j_min {
                            // A zero value cannot match a nonzero tail law.
                            break;
                        }
                        break;
                    } else {
                        break;
                    }
                }
            }
        }
    }

    /// δ(j) — exact.
    pub fn delta_at(&self, j: i64) -> Dyadic {
        if j >= self.j_min {
            self.support.get(&j).cloned().unwrap_or_else(Dyadic::zero)
        } else {
            self.tail_coeff.shift(j)
        }
    }

    /// Total mass `Σ_j δ(j)`; always exactly one for a genuine distribution.
    pub fn mass(&self) -> Dyadic {
        let mut m = self.tail_coeff.shift(self.j_min);
        for v in self.support.values() {
            m += v;
        }
        m
    }

    /// Upper cumulative mass `Σ_{j ≥ j0} δ(j)` — exact, including the part
    /// of the geometric tail at or above `j0` when `j0 < j_min`.
    pub fn mass_at_least(&self, j0: i64) -> Dyadic {
        let mut m = Dyadic::zero();
        for (_, v) in self.support.range(j0..) {
            m += v;
        }
        if j0 < self.j_min {
            // Σ_{j0 ≤ j < j_min} c·2^j  =  c·(2^j_min − 2^j0)
            m += &(&self.tail_coeff.shift(self.j_min) - &self.tail_coeff.shift(j0));
        }
        m
    }

    /// The Cusick value `c_t = Σ_{j ≥ 0} δ(j, t)`: the density of `n` with
    /// `s(n + t) ≥ s(n)`.
    pub fn c_value(&self) -> Dyadic {
        self.mass_at_least(0)
    }

    /// Raw moment `Σ_j δ(j) · j^k`, exact. The geometric tail is summed in
    /// closed form through the weighted power sums `S_m = Σ_{i≥0} i^m 2^-i`
    /// (integers: 2, 2, 6, 26, …, twice the ordered Bell numbers) and a
    /// binomial expansion of `(j_min - i)^k`.
    pub fn raw_moment(&self, k: u32) -> Dyadic {
        let mut total = Dyadic::zero();
        for (&j, v) in &self.support {
            total += &(v * &BigInt::from(j).pow(k));
        }
        if !self.tail_coeff.is_zero() {
            let s = weighted_power_sums(k);
            let jm = BigInt::from(self.j_min);
            let mut inner = BigInt::zero();
            for m in 0..=k {
                let mut term = BigInt::from(binomial(BigUint::from(k), BigUint::from(m)));
                term *= jm.pow(k - m);
                let mut sm = s[m as usize].clone();
                if m == 0 {
                    sm -= 1; // Σ_{i≥1} starts at i = 1
                }
                term *= sm;
                if m % 2 == 1 {
                    term = -term;
                }
                inner += term;
            }
            total += &(&self.tail_coeff.shift(self.j_min) * &inner);
        }
        total
    }

    /// Largest explicitly stored index, if any.
    pub fn support_max(&self) -> Option<i64> {
        self.support.keys().next_back().copied()
    }

    /// Cutoff below which the law is exactly geometric.
    pub fn j_min(&self) -> i64 {
        self.j_min
    }

    /// Coefficient of the geometric tail.
    pub fn tail_coeff(&self) -> &Dyadic {
        &self.tail_coeff
    }

    /// Explicit part of the distribution.
    pub fn support(&self) -> &BTreeMap<i64, Dyadic> {
        &self.support
    }

    /// Bits consumed to build this distribution (diagnostics).
    pub fn t_bits(&self) -> u32 {
        self.t_bits
    }

    /// The distribution shifted by `s`: `δ'(j) = δ(j - s)`.
    fn shifted(&self, s: i64) -> Self {
        let support = self
            .support
            .iter()
            .map(|(&j, v)| (j + s, v.clone()))
            .collect();
        // δ'(j) = c·2^(j-s) = (c·2^-s)·2^j below the shifted cutoff.
        CarryDistribution {
            support,
            tail_coeff: self.tail_coeff.shift(-s),
            j_min: self.j_min + s,
            t_bits: self.t_bits,
        }
    }
}

/// Equal-weight mixture `(a + b) / 2`, with the tails combined in closed
/// form: below both cutoffs the result is geometric with coefficient
/// `(c_a + c_b)/2`; between the cutoffs the lower tail is materialized.
fn average(a: &CarryDistribution, b: &CarryDistribution, t_bits: u32) -> CarryDistribution {
    let j_min = a.j_min.min(b.j_min);
    let tail_coeff = (&a.tail_coeff + &b.tail_coeff).half();
    let mut keys: Vec<i64> = a
        .support
        .keys()
        .chain(b.support.keys())
        .copied()
        .chain(j_min..a.j_min.max(b.j_min))
        .collect();
    keys.sort_unstable();
    keys.dedup();
    let mut support = BTreeMap::new();
    for j in keys {
        let v = (&a.delta_at(j) + &b.delta_at(j)).half();
        if !v.is_zero() {
            support.insert(j, v);
        }
    }
    CarryDistribution::new(support, tail_coeff, j_min, t_bits)
}

/// The pair (δ(·, a), δ(·, a+1)) for a growing bit prefix `a` of the target
/// shift. Appending one bit of `t` (most significant first) advances the
/// pair; after all bits, `lo` is δ(·, t).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistPair {
    pub lo: CarryDistribution,
    pub hi: CarryDistribution,
    prefix: BigUint,
}

impl DistPair {
    /// The pair for the empty prefix `a = 0`: (point mass at 0, δ(·, 1)).
    pub fn initial() -> Self {
        DistPair {
            lo: CarryDistribution::point_mass_at_zero(),
            hi: CarryDistribution::geometric_base(),
            prefix: BigUint::zero(),
        }
    }

    /// The prefix value this pair describes.
    pub fn prefix(&self) -> &BigUint {
        &self.prefix
    }

    /// The mixture `½·shift(lo, +1) + ½·shift(hi, -1)`, i.e. δ(·, 2a + 1).
    /// Both children of a prefix share this one distribution.
    pub fn mixture(&self) -> CarryDistribution {
        let bits = self.lo.t_bits.max(self.hi.t_bits) + 1;
        average(&self.lo.shifted(1), &self.hi.shifted(-1), bits)
    }

    /// Advances the prefix `a` to `2a + bit`.
    ///
    /// * bit 0: the new pair is (δ(·, 2a), δ(·, 2a+1)) = (lo, mixture);
    /// * bit 1: the new pair is (δ(·, 2a+1), δ(·, 2a+2)) = (mixture, hi).
    pub fn append_bit(&self, bit: u8) -> DistPair {
        debug_assert!(bit <= 1);
        let mixed = self.mixture();
        let prefix = (&self.prefix << 1u8) + bit;
        if bit == 0 {
            DistPair { lo: self.lo.clone(), hi: mixed, prefix }
        } else {
            DistPair { lo: mixed, hi: self.hi.clone(), prefix }
        }
    }

    /// Both children at once, computing the shared mixture a single time.
    pub fn children(&self) -> (DistPair, DistPair) {
        let mixed = self.mixture();
        let p0 = (&self.prefix) << 1u8;
        let p1 = &p0 + 1u8;
        (
            DistPair { lo: self.lo.clone(), hi: mixed.clone(), prefix: p0 },
            DistPair { lo: mixed, hi: self.hi.clone(), prefix: p1 },
        )
    }
}

/// δ(·, t), by walking the bits of `t` from most significant to least.
pub fn dist_for(t: &BigUint) -> CarryDistribution {
    let mut pair = DistPair::initial();
    let n = t.bits();
    for i in (0..n).rev() {
        pair = pair.append_bit(t.bit(i) as u8);
    }
    pair.lo
}

/// Convenience wrapper for machine-sized shifts.
pub fn dist_for_u64(t: u64) -> CarryDistribution {
    dist_for(&BigUint::from(t))
}

/// Number of blocks in the binary expansion of `t`: maximal runs of equal
/// digits in `t / 2^(ν₂(t))`, i.e. blocks of ones plus the interior blocks
/// of zeros. Zero has no blocks. A shift with `ℓ` blocks of ones has
/// `2ℓ - 1` blocks in total.
pub fn blocks_count(t: &BigUint) -> u64 {
    if t.is_zero() {
        return 0;
    }
    let odd = t >> t.trailing_zeros().unwrap_or(0);
    let n = odd.bits();
    let mut runs = 1;
    for i in 1..n {
        if odd.bit(i) != odd.bit(i - 1) {
            runs += 1;
        }
    }
    runs
}

/// Reverses the canonical binary expansion of `t ≥ 1`. The reversal fixes
/// every carry distribution: δ(·, t) = δ(·, t^R).
pub fn reverse_binary(t: &BigUint) -> Result<BigUint, Error> {
    if t.is_zero() {
        return Err(Error::ReverseOfZero);
    }
    let n = t.bits();
    let mut r = BigUint::zero();
    for i in 0..n {
        if t.bit(i) {
            r.set_bit(n - 1 - i, true);
        }
    }
    Ok(r)
}

/// Integer weighted power sums `S_m = Σ_{i≥0} i^m 2^-i` for `m = 0..=k`.
/// These are twice the ordered Bell numbers: 2, 2, 6, 26, 150, 1082, …
fn weighted_power_sums(k: u32) -> Vec<BigInt> {
    let mut bell: Vec<BigInt> = Vec::with_capacity(k as usize + 1);
    bell.push(BigInt::one());
    for n in 1..=k {
        let mut a = BigInt::zero();
        for j in 1..=n {
            a += BigInt::from(binomial(BigUint::from(n), BigUint::from(j))) * &bell[(n - j) as usize];
        }
        bell.push(a);
    }
    bell.into_iter().map(|b| b << 1u8).collect()
}
