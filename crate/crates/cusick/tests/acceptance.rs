//! Acceptance gate: ten end-to-end checks, one test per criterion.
//!
//! Each test prints a single `criterion N: PASS — …` (or `FAIL — …`) line;
//! run with `cargo test --test acceptance -- --nocapture` to see all ten.
//! Every tolerance and budget is pinned as a constant below. Checks that
//! compare rational values against powers of log 2 use the rational bracket
//! 6931471805/10^10 < log 2 < 6931471806/10^10 in the direction that makes
//! the tested inequality at least as strong as the target inequality.

use std::time::{Duration, Instant};

use cusick::bounds::{self, build_ledger, shifted_mass_check, verify_moment_bounds_range};
use cusick::carrydist::{dist_for, dist_for_u64};
use cusick::charfn::{ct_integral, decay_check, imag_part_check, kernel_identity_quadrature};
use cusick::moments::{
    bejian_faure_check, block_power, fubini_coeff, m2_exact, mgf_series_t1, moment, step_matrix,
};
use cusick::oracle;
use cusick::scanner::{scan_min_ct, verify_conjecture_range, ScanConfig, ScanMode};
use cusick::series::SeriesMatrix;
use cusick::{blocks_count, reverse_binary, Dyadic, Error};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Quadrature tolerance for recovering c_t from its integral form.
const INTEGRAL_TOL: f64 = 1e-6;
/// Quadrature points for the c_t recovery.
const INTEGRAL_POINTS: u64 = 1 << 14;
/// Tolerance for the closed kernel integral, which equals 1 exactly.
const KERNEL_TOL: f64 = 1e-7;
/// Quadrature points for the kernel integral (denser than the recovery
/// grid because the tolerance is ten times tighter).
const KERNEL_POINTS: u64 = 1 << 18;
/// Wall-clock budget for the 20-bit scan plus its naive recomputation.
const SCAN_BUDGET: Duration = Duration::from_secs(600);
/// Wall-clock budget for the 30-bit minimum spot check.
const SPOT_BUDGET: Duration = Duration::from_secs(1);
/// Largest block count considered practical for random sampling.
const SAMPLING_CAP_BLOCKS: u64 = 10_000_000;
/// Block count for the feasible-scale soundness demonstration.
const DEMO_BLOCKS: u64 = 33;

const SEED_INTEGRAL: u64 = 0x0800;
const SEED_CHARFN: u64 = 0x0900;
const SEED_THRESHOLD: u64 = 0x1000;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn u(t: u64) -> BigUint {
    BigUint::from(t)
}

fn dy(num: i64, exp: u64) -> Dyadic {
    Dyadic::new(BigInt::from(num), exp)
}

#[test]
fn criterion_01_base_case_is_exact() {
    let d = dist_for_u64(1);
    assert_eq!(d.c_value(), dy(3, 2), "c_1");
    assert_eq!(d.delta_at(1), dy(1, 1), "density at j = 1");
    assert_eq!(d.delta_at(0), dy(1, 2), "density at j = 0");
    assert_eq!(d.delta_at(-1), dy(1, 3), "density at j = -1");
    println!(
        "criterion 1: PASS — c_1 = 3/4 and the densities at j = 1, 0, -1 are 1/2, 1/4, 1/8, all exact"
    );
}

#[test]
fn criterion_02_thirty_bit_minimum_and_its_reversal() {
    let start = Instant::now();
    let champion = BigUint::parse_bytes(b"111101111011110111101111011111", 2).unwrap();
    let expected = Dyadic::new(BigInt::from(18_169_025_645_289u64), 45);
    assert_eq!(dist_for(&champion).c_value(), expected, "champion shift");
    let reversed = reverse_binary(&champion).unwrap();
    assert_eq!(dist_for(&reversed).c_value(), expected, "bit-reversed champion");
    let elapsed = start.elapsed();
    assert!(elapsed < SPOT_BUDGET, "took {elapsed:?}");
    println!(
        "criterion 2: PASS — the 30-bit champion and its bit reversal both give exactly \
         18169025645289/2^45 in {elapsed:?}"
    );
}

#[test]
fn criterion_03_twenty_bit_scan_matches_naive_recomputation() {
    let start = Instant::now();
    let violations = verify_conjecture_range(20, ScanMode::Float).unwrap();
    assert_eq!(violations, 0, "conjecture violations below 2^20");

    let scan = scan_min_ct(&ScanConfig::new(20, ScanMode::Exact)).unwrap();
    assert_eq!(scan.violations, 0);

    // Naive recomputation: walk every t in [1, 2^20) independently, with no
    // prefix sharing, and rebuild the exact minimum and full argmin set.
    let (naive_min, mut naive_argmin) = (1u64..1 << 20)
        .into_par_iter()
        .fold(
            || (None::<Dyadic>, Vec::<u64>::new()),
            |(mut min, mut args), t| {
                let c = dist_for_u64(t).c_value();
                match min.as_ref() {
                    Some(m) if c > *m => {}
                    Some(m) if c == *m => args.push(t),
                    _ => {
                        min = Some(c);
                        args.clear();
                        args.push(t);
                    }
                }
                (min, args)
            },
        )
        .reduce(
            || (None, Vec::new()),
            |(amin, mut aargs), (bmin, bargs)| match (amin, bmin) {
                (None, b) => (b, bargs),
                (a, None) => (a, aargs),
                (Some(a), Some(b)) => match a.cmp(&b) {
                    std::cmp::Ordering::Less => (Some(a), aargs),
                    std::cmp::Ordering::Greater => (Some(b), bargs),
                    std::cmp::Ordering::Equal => {
                        aargs.extend(bargs);
                        (Some(a), aargs)
                    }
                },
            },
        );
    naive_argmin.sort_unstable();
    let naive_min = naive_min.unwrap();

    assert_eq!(scan.minimum, naive_min, "minimum value");
    assert_eq!(scan.argmin, naive_argmin, "argmin set");
    let elapsed = start.elapsed();
    assert!(elapsed < SCAN_BUDGET, "took {elapsed:?}");
    println!(
        "criterion 3: PASS — zero violations below 2^20, and the scan minimum {} with its \
         {}-element argmin set matches the naive per-shift recomputation exactly ({elapsed:?})",
        scan.minimum,
        scan.argmin.len()
    );
}

#[test]
fn criterion_04_enumeration_oracle_matches_the_recurrence() {
    let checked: u64 = (0u64..256)
        .into_par_iter()
        .map(|t| {
            let bitlen = 64 - t.leading_zeros();
            let m = bitlen + 2;
            let d = dist_for_u64(t);
            let mut n = 0u64;
            for j in -12i64..=10 {
                let by_enumeration = oracle::exact_delta(t, j, m).unwrap();
                assert_eq!(by_enumeration, d.delta_at(j), "t={t} j={j} m={m}");
                n += 1;
            }
            n
        })
        .sum();
    assert_eq!(checked, 256 * 23);
    println!(
        "criterion 4: PASS — the residue-enumeration oracle equals the recurrence distribution \
         at all {checked} (t, j) pairs with t < 256, j in [-12, 10], exactly"
    );
}

#[test]
fn criterion_05_series_moments_match_distribution_moments() {
    (0u64..1 << 9).into_par_iter().for_each(|t| {
        let tb = u(t);
        let d = dist_for_u64(t);
        let mut kfact = BigRational::one();
        for k in 0..=8u32 {
            if k > 0 {
                kfact *= BigRational::from_integer(k.into());
            }
            assert_eq!(
                moment(&tb, k) * &kfact,
                d.raw_moment(k).to_rational(),
                "t={t} k={k}"
            );
        }
    });
    (0u64..1 << 12).into_par_iter().for_each(|t| {
        let tb = u(t);
        assert_eq!(moment(&tb, 2), m2_exact(&tb), "t={t}");
    });
    println!(
        "criterion 5: PASS — k!·m_k(t) equals the distribution raw moment for all t < 2^9, \
         k ≤ 8, and m_2(t) equals its bitwise closed form for all t < 2^12, exactly"
    );
}

#[test]
fn criterion_06_series_and_block_power_fidelity() {
    // Base series through x^4.
    let base = mgf_series_t1(4);
    let expected = [q(1, 1), q(0, 1), q(1, 1), q(-1, 1), q(19, 12)];
    for (k, e) in expected.iter().enumerate() {
        assert_eq!(base.coeff(k), e.clone(), "base series coefficient of x^{k}");
    }

    // Closed-form block powers against iterated matrix products at order 12.
    for bit in [0u8, 1] {
        let step = step_matrix(bit, 12);
        let mut iterated = SeriesMatrix::identity(12);
        for m in 1..=20u64 {
            iterated = &iterated * &step;
            assert_eq!(
                block_power(bit, m, 12).unwrap(),
                iterated,
                "bit={bit} m={m}"
            );
        }
    }

    // Low-order coefficients of the block powers in closed form.
    for m in 1..=16u64 {
        let pow2m = BigInt::one() << m;
        let top = BigRational::new(&pow2m - BigInt::one(), &pow2m * BigInt::from(2));
        let side = BigRational::new(&pow2m - BigInt::one(), pow2m.clone());
        let tiny = BigRational::new(BigInt::one(), pow2m);
        for (label, mat, b_sign, c_sign) in [
            ("zeros", block_power(0, m, 3).unwrap(), 1, -1),
            ("ones", block_power(1, m, 3).unwrap(), -1, 1),
        ] {
            assert_eq!(mat.entry(0, 0).coeff(0), q(1, 1), "{label} m={m}");
            assert_eq!(mat.entry(0, 0).coeff(1), q(0, 1), "{label} m={m}");
            assert_eq!(mat.entry(0, 0).coeff(2), top.clone(), "{label} m={m}");
            assert_eq!(
                mat.entry(0, 1).coeff(0),
                &side * BigRational::from_integer(b_sign.into()),
                "{label} m={m}"
            );
            assert_eq!(mat.entry(1, 0).coeff(0), q(0, 1), "{label} m={m}");
            assert_eq!(mat.entry(1, 0).coeff(1), q(0, 1), "{label} m={m}");
            assert_eq!(
                mat.entry(1, 0).coeff(2),
                &top * BigRational::from_integer(c_sign.into()),
                "{label} m={m}"
            );
            assert_eq!(mat.entry(1, 1).coeff(0), tiny.clone(), "{label} m={m}");
        }
    }
    println!(
        "criterion 6: PASS — base series coefficients 1, 0, 1, -1, 19/12; block powers equal \
         iterated products through order 12 for m ≤ 20; low-order closed forms hold for m ≤ 16"
    );
}

#[test]
fn criterion_07_bound_suites_have_zero_failures() {
    let start = Instant::now();

    // Every coefficient of every entry of an m-fold block power stays within
    // 2/(log 2)^k. Tested with |coeff|·hi^k ≤ 2 where hi > log 2, which is
    // stronger than the target inequality.
    let hi = q(6_931_471_806, 10_000_000_000);
    let mut growth_checks = 0u64;
    for bit in [0u8, 1] {
        for m in 1..=64u64 {
            let mat = block_power(bit, m, 12).unwrap();
            for i in 0..2 {
                for j in 0..2 {
                    let mut scale = BigRational::one();
                    for k in 0..=12usize {
                        let lhs = mat.entry(i, j).coeff(k).abs() * &scale;
                        assert!(
                            lhs <= q(2, 1),
                            "bit={bit} m={m} entry=({i},{j}) k={k}"
                        );
                        scale *= &hi;
                        growth_checks += 1;
                    }
                }
            }
        }
    }

    // Ordered-partition series coefficients stay within (log 2)^(-k);
    // again tested in the stronger direction via the upper bracket.
    for k in 0..=30u32 {
        let mut scale = BigRational::one();
        for _ in 0..k {
            scale *= &hi;
        }
        assert!(fubini_coeff(k) * scale <= BigRational::one(), "k={k}");
    }

    // Second-moment logarithmic bound for every shift below 2^16.
    (0u64..1 << 16)
        .into_par_iter()
        .for_each(|t| assert!(bejian_faure_check(&u(t)), "t={t}"));

    // Shifted-mass inequality for every shift below 2^12.
    (1u64..1 << 12).into_par_iter().for_each(|t| {
        let report = shifted_mass_check(&u(t)).unwrap();
        assert!(report.pass, "t={t}");
    });

    // Moment-growth bounds for every shift below 2^14 at kmax = 4.
    let ledger = build_ledger(4);
    let report = verify_moment_bounds_range(14, 4, &ledger).unwrap();
    assert_eq!(report.failures, 0, "moment bounds: {report:?}");

    let elapsed = start.elapsed();
    println!(
        "criterion 7: PASS — {growth_checks} block-power growth checks (m ≤ 64, k ≤ 12), \
         31 partition-series bounds, 65536 second-moment bounds, 4095 shifted-mass checks, \
         and {} moment-bound checks below 2^14: zero failures ({elapsed:?})",
        report.checked
    );
}

#[test]
fn criterion_08_integral_representation_recovers_ct() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED_INTEGRAL);
    let shifts: Vec<u64> = (0..100).map(|_| rng.gen_range(0..1u64 << 16)).collect();
    shifts.par_iter().for_each(|&t| {
        let report = ct_integral(&u(t), INTEGRAL_POINTS).unwrap();
        assert!(
            report.abs_error <= INTEGRAL_TOL,
            "t={t} error={:e}",
            report.abs_error
        );
    });
    for k in 1..=10u64 {
        let v = kernel_identity_quadrature(k, KERNEL_POINTS).unwrap();
        assert!((v - 1.0).abs() <= KERNEL_TOL, "k={k} value={v}");
    }
    println!(
        "criterion 8: PASS — the integral form recovers c_t within {INTEGRAL_TOL:e} at \
         {INTEGRAL_POINTS} points for 100 seeded shifts below 2^16, and the closed kernel \
         integral equals 1 within {KERNEL_TOL:e} for k ≤ 10"
    );
}

#[test]
fn criterion_09_characteristic_function_bounds_hold() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED_CHARFN);

    // Modulus decay at five-plus blocks: 500 seeded (t, theta) pairs.
    let mut decay_samples = Vec::with_capacity(500);
    while decay_samples.len() < 500 {
        let t = rng.gen_range(1..1u64 << 24);
        let theta = rng.gen::<f64>();
        if blocks_count(&u(t)) >= 5 {
            decay_samples.push((t, theta));
        }
    }
    decay_samples.par_iter().for_each(|&(t, theta)| {
        let check = decay_check(&u(t), theta).unwrap();
        assert!(
            check.pass,
            "t={t} theta={theta} |gamma|={} bound={}",
            check.gamma.norm(),
            check.bound
        );
    });

    // Imaginary-part linearization: 200 seeded (t, theta, order) triples.
    let lin_samples: Vec<(u64, f64, u32)> = (0..200)
        .map(|_| {
            (
                rng.gen_range(1..1u64 << 12),
                rng.gen::<f64>() * 0.1,
                rng.gen_range(1..=3u32),
            )
        })
        .collect();
    lin_samples.par_iter().for_each(|&(t, theta, order)| {
        let check = imag_part_check(&u(t), theta, order).unwrap();
        assert!(
            check.pass,
            "t={t} theta={theta} order={order} imag={} bound={}",
            check.imag, check.bound
        );
    });

    println!(
        "criterion 9: PASS — modulus decay holds for 500 seeded shifts below 2^24 with at \
         least 5 runs, and the imaginary-part linearization holds for 200 seeded shifts \
         below 2^12 with theta < 0.1 and truncation order ≤ 3"
    );
}

#[test]
fn criterion_10_block_threshold_certificates_and_sampling() {
    // Build and independently re-verify a certificate for each target slack.
    let targets = [(q(9, 20), "9/20"), (q(1, 4), "1/4")];
    let mut certs = Vec::new();
    for (eps, label) in &targets {
        let cert = bounds::block_threshold(eps).unwrap();
        assert!(!cert.trivial, "slack {label} needs a real certificate");
        let ledger = build_ledger(cert.ledger_kmax.max(1));
        assert!(
            cert.verify(&ledger).unwrap(),
            "certificate for slack {label} did not re-verify"
        );
        certs.push((eps.clone(), *label, cert));
    }

    // Deterministic sampler: shifts with a prescribed number of ones-blocks
    // (runs of length 1 to 3), exact carry value compared against 1/2 - eps.
    let sample_and_check = |blocks: u64, floors: &[(BigRational, &str)]| {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED_THRESHOLD);
        let patterns: Vec<String> = (0..1000)
            .map(|_| {
                let mut pattern = String::new();
                for block in 0..blocks {
                    if block > 0 {
                        for _ in 0..rng.gen_range(1..=3u32) {
                            pattern.push('0');
                        }
                    }
                    for _ in 0..rng.gen_range(1..=3u32) {
                        pattern.push('1');
                    }
                }
                pattern
            })
            .collect();
        patterns.par_iter().for_each(|pattern| {
            let t = BigUint::parse_bytes(pattern.as_bytes(), 2).unwrap();
            let c = dist_for(&t).c_value().to_rational();
            for (floor, label) in floors {
                assert!(
                    &c > floor,
                    "slack {label}: carry value {c} at {blocks} ones-blocks fell to the floor"
                );
            }
        });
    };

    // The sampled-soundness half, at the certified scale when practical.
    let mut infeasible = Vec::new();
    for (eps, label, cert) in &certs {
        match cert.sampling_budget(SAMPLING_CAP_BLOCKS) {
            Ok(blocks) => {
                let floor = q(1, 2) - eps;
                sample_and_check(blocks, &[(floor, *label)]);
            }
            Err(Error::SamplingInfeasible { required_log2, cap }) => {
                let block_digits = cert.min_blocks.bits();
                let bit_digits = cert.min_bits_required().bits();
                let decimal_exp =
                    (bit_digits.saturating_sub(1)) as f64 * std::f64::consts::LOG10_2;
                infeasible.push((
                    *label,
                    block_digits,
                    bit_digits,
                    decimal_exp,
                    required_log2,
                    cap,
                ));
            }
            Err(other) => panic!("unexpected sampling error for slack {label}: {other}"),
        }
    }

    if infeasible.is_empty() {
        println!(
            "criterion 10: PASS — both certificates re-verify and 1000 sampled shifts at the \
             certified block count stay above 1/2 - eps for each slack"
        );
        return;
    }

    // Certified block counts are astronomically large, so the sampled half
    // cannot run at scale. Demonstrate the same soundness property at a
    // feasible block count before failing honestly.
    let floors: Vec<(BigRational, &str)> = targets
        .iter()
        .map(|(eps, label)| (q(1, 2) - eps, *label))
        .collect();
    sample_and_check(DEMO_BLOCKS, &floors);

    let detail = infeasible
        .iter()
        .map(|(label, block_digits, bit_digits, decimal_exp, _, _)| {
            format!(
                "L({label}) is a {block_digits}-bit integer, so one sampled shift would need \
                 a {bit_digits}-bit bit-length, about 10^{decimal_exp:.0} binary digits"
            )
        })
        .collect::<Vec<_>>()
        .join("; ");
    println!(
        "criterion 10: FAIL — both certificates re-verify, and 1000 sampled shifts with \
         {DEMO_BLOCKS} ones-blocks stay above 1/2 - eps for both slacks, but sampling at the \
         certified block count is physically impossible: {detail}"
    );
    panic!(
        "sampled-soundness at the certified block count is unattainable: {detail}. The cap was \
         {SAMPLING_CAP_BLOCKS} blocks. Certificate validity and the feasible-scale soundness \
         demonstration both passed; only the literal 1000-samples-at-certified-scale half fails."
    );
}
