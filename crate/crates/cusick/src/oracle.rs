//! Independent brute-force computation of δ(j, t) and c_t.
//!
//! Everything here is deliberately naive — direct enumeration of residues —
//! so it can serve as ground truth for the recurrence-based engine without
//! sharing any code with it.
//!
//! The exact method enumerates residues `u` modulo `2^m` for any `m` with
//! `2^m > t`. Writing `n = q·2^m + u`, the difference `s(n+t) - s(n)`
//! depends only on `u` unless `u + t` overflows the low `m` bits; in the
//! overflow case it equals `s(w) - s(u) + s(q+1) - s(q)` with
//! `w = u + t - 2^m`, and `s(q+1) - s(q) = 1 - (trailing ones of q)`,
//! where exactly `k` trailing ones occur with density `2^(-k-1)`. Summing
//! that geometric correction in closed form makes the result exact — the
//! same Dyadic for every valid `m`.

use crate::dyadic::Dyadic;
use crate::{Error, Result};
use num_bigint::BigInt;
use serde::Serialize;
use std::collections::BTreeMap;

/// Number of ones in the binary expansion of `n`.
pub fn sum_of_digits(n: u64) -> u32 {
    n.count_ones()
}

/// How a value was obtained, for reporting.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "method")]
pub enum OracleMethod {
    ExactResidue,
    Empirical { samples: u64 },
}

/// A value computed by this module, tagged with the method that produced it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleResult {
    pub value: Dyadic,
    pub modulus_bits: u32,
    #[serde(flatten)]
    pub method: OracleMethod,
}

/// The smallest valid enumeration modulus for `t`: two bits beyond `t`'s
/// bit length.
pub fn default_modulus(t: u64) -> u32 {
    (64 - t.leading_zeros()) + 2
}

fn check_modulus(t: u64, m: u32) -> Result<u64> {
    if m >= 63 {
        return Err(Error::InvalidArgument(format!(
            "modulus 2^{m} too large to enumerate"
        )));
    }
    let n = 1u64 << m;
    if n <= t {
        return Err(Error::ModulusTooSmall { m, t });
    }
    Ok(n)
}

/// Exact δ(j, t) by enumeration of residues modulo `2^m`.
pub fn exact_delta(t: u64, j: i64, m: u32) -> Result<Dyadic> {
    let n = check_modulus(t, m)?;
    let mut in_range: u64 = 0;
    // Overflow cases, keyed by the required trailing-ones count k ≥ 0.
    let mut carry_hist: BTreeMap<i64, u64> = BTreeMap::new();
    for u in 0..n {
        let v = u + t;
        if v < n {
            if i64::from(v.count_ones()) - i64::from(u.count_ones()) == j {
                in_range += 1;
            }
        } else {
            let w = v - n;
            let k = i64::from(w.count_ones()) - i64::from(u.count_ones()) + 1 - j;
            if k >= 0 {
                *carry_hist.entry(k).or_insert(0) += 1;
            }
        }
    }
    let mut total = Dyadic::new(BigInt::from(in_range), u64::from(m));
    for (k, count) in carry_hist {
        // count · 2^(-m-k-1)
        total += &Dyadic::new(BigInt::from(count), u64::from(m) + k as u64 + 1);
    }
    Ok(total)
}

/// Exact c_t = Σ_{j≥0} δ(j, t) by the same enumeration. An overflow residue
/// with `base = s(u+t-2^m) - s(u) + 1 ≥ 0` contributes over all j ∈ [0, base]
/// the geometric partial sum `1 - 2^(-base-1)`.
pub fn exact_c(t: u64, m: u32) -> Result<Dyadic> {
    let n = check_modulus(t, m)?;
    let mut full: u64 = 0;
    let mut deficit_hist: BTreeMap<i64, u64> = BTreeMap::new();
    for u in 0..n {
        let v = u + t;
        if v < n {
            if v.count_ones() >= u.count_ones() {
                full += 1;
            }
        } else {
            let w = v - n;
            let base = i64::from(w.count_ones()) - i64::from(u.count_ones()) + 1;
            if base >= 0 {
                full += 1;
                *deficit_hist.entry(base).or_insert(0) += 1;
            }
        }
    }
    let mut total = Dyadic::new(BigInt::from(full), u64::from(m));
    for (base, count) in deficit_hist {
        total -= &Dyadic::new(BigInt::from(count), u64::from(m) + base as u64 + 1);
    }
    Ok(total)
}

/// Finite-sample frequency of `s(n+t) - s(n) = j` over `n < samples`.
/// `samples` must be a power of two so the frequency is itself dyadic.
pub fn empirical_delta(t: u64, j: i64, samples: u64) -> Result<Dyadic> {
    if samples == 0 || !samples.is_power_of_two() {
        return Err(Error::SampleCountNotPowerOfTwo(samples));
    }
    let mut count: u64 = 0;
    for n in 0..samples {
        let a = (n + t).count_ones();
        let b = n.count_ones();
        if i64::from(a) - i64::from(b) == j {
            count += 1;
        }
    }
    Ok(Dyadic::new(
        BigInt::from(count),
        u64::from(samples.trailing_zeros()),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::carrydist::{dist_for_u64, reverse_binary};
    use num_bigint::BigUint;
    use proptest::prelude::*;

    fn dy(s: &str) -> Dyadic {
        Dyadic::parse(s).unwrap()
    }

    #[test]
    fn digit_sum_examples() {
        assert_eq!(sum_of_digits(0), 0);
        assert_eq!(sum_of_digits(7), 3);
        assert_eq!(sum_of_digits(1 << 10), 1);
        assert_eq!(sum_of_digits(u64::MAX), 64);
    }

    #[test]
    fn base_case_densities_at_the_smallest_modulus() {
        assert_eq!(exact_delta(1, 1, 2).unwrap(), dy("1/2^1"));
        assert_eq!(exact_delta(1, 0, 2).unwrap(), dy("1/2^2"));
        assert_eq!(exact_delta(1, -1, 2).unwrap(), dy("1/2^3"));
        assert_eq!(exact_delta(1, 2, 2).unwrap(), Dyadic::zero());
        assert_eq!(exact_c(1, 2).unwrap(), dy("3/2^2"));
        assert_eq!(exact_c(0, 1).unwrap(), Dyadic::one());
    }

    #[test]
    fn modulus_validation() {
        assert!(matches!(
            exact_delta(4, 0, 2),
            Err(Error::ModulusTooSmall { m: 2, t: 4 })
        ));
        assert!(exact_delta(3, 0, 2).is_ok()); // 2^2 > 3
        assert!(exact_delta(1, 0, 63).is_err());
        assert_eq!(default_modulus(1), 3);
        assert_eq!(default_modulus(255), 10);
    }

    #[test]
    fn independence_of_the_modulus() {
        for t in [0u64, 1, 3, 6, 13, 77, 200, 255] {
            let m0 = default_modulus(t);
            for j in -6..=9 {
                let v = exact_delta(t, j, m0).unwrap();
                for m in (m0 + 1)..=(m0 + 3).min(14) {
                    assert_eq!(exact_delta(t, j, m).unwrap(), v, "t={t} j={j} m={m}");
                }
            }
            let c = exact_c(t, m0).unwrap();
            assert_eq!(exact_c(t, m0 + 2).unwrap(), c, "t={t}");
        }
    }

    #[test]
    fn densities_sum_to_one_up_to_the_deep_tail() {
        for t in [1u64, 3, 13, 77] {
            let m = default_modulus(t);
            let mut total = Dyadic::zero();
            for j in -40..=(64 - i64::from(t.leading_zeros())) {
                total += &exact_delta(t, j, m).unwrap();
            }
            let missing = &Dyadic::one() - &total;
            assert!(!missing.is_negative(), "t={t}");
            assert!(missing < Dyadic::pow2(-30), "t={t}: missing {missing}");
        }
    }

    #[test]
    fn agrees_with_the_recurrence_engine() {
        for t in [0u64, 1, 2, 3, 5, 12, 13, 77, 128, 255, 1023] {
            let d = dist_for_u64(t);
            let m = default_modulus(t);
            for j in -12..=10 {
                assert_eq!(
                    exact_delta(t, j, m).unwrap(),
                    d.delta_at(j),
                    "t={t} j={j}"
                );
            }
            assert_eq!(exact_c(t, m).unwrap(), d.c_value(), "t={t}");
        }
    }

    #[test]
    fn respects_reversal_invariance() {
        for t in [11u64, 38, 91, 342] {
            let r_big = reverse_binary(&BigUint::from(t)).unwrap();
            let r = u64::try_from(&r_big).unwrap();
            let m = default_modulus(t.max(r));
            for j in -8..=8 {
                assert_eq!(
                    exact_delta(t, j, m).unwrap(),
                    exact_delta(r, j, m).unwrap(),
                    "t={t} j={j}"
                );
            }
        }
    }

    #[test]
    fn empirical_estimates_converge() {
        for (t, j) in [(1u64, 1i64), (1, 0), (3, 2), (13, -1)] {
            let exact = exact_delta(t, j, default_modulus(t)).unwrap();
            for m in [10u32, 12, 14] {
                let est = empirical_delta(t, j, 1 << m).unwrap();
                let dev = (&est - &exact).abs();
                let bound = Dyadic::new(BigInt::from(t + 64), u64::from(m));
                assert!(dev <= bound, "t={t} j={j} m={m}: dev {dev}");
            }
        }
    }

    #[test]
    fn empirical_sample_count_must_be_a_power_of_two() {
        assert!(matches!(
            empirical_delta(1, 0, 1000),
            Err(Error::SampleCountNotPowerOfTwo(1000))
        ));
        assert!(matches!(
            empirical_delta(1, 0, 0),
            Err(Error::SampleCountNotPowerOfTwo(0))
        ));
        assert_eq!(empirical_delta(0, 0, 16).unwrap(), Dyadic::one());
        // n = 0 always contributes j = s(t).
        assert!(empirical_delta(3, 2, 1 << 12).unwrap() > Dyadic::zero());
    }

    proptest! {
        #[test]
        fn oracle_matches_recurrence_on_random_shifts(t in 0u64..1024, j in -12i64..=10) {
            let m = default_modulus(t);
            prop_assert_eq!(exact_delta(t, j, m).unwrap(), dist_for_u64(t).delta_at(j));
        }

        #[test]
        fn modulus_never_matters(t in 0u64..256, j in -9i64..=9, extra in 0u32..4) {
            let m = default_modulus(t);
            prop_assert_eq!(
                exact_delta(t, j, m + extra).unwrap(),
                exact_delta(t, j, m).unwrap()
            );
        }
    }
}
