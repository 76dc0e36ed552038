//! The character sum `γ_t(ϑ) = Σ_j δ(j, t)·e(jϑ)` with `e(x) = exp(2πix)`,
//! evaluated two independent ways, plus the cotangent-kernel integral that
//! recovers the carry value and the analytic decay/linearization checks.

use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::carrydist::{blocks_count, dist_for, CarryDistribution};
use crate::moments::moment;
use crate::{Error, Result};

const TAU: f64 = std::f64::consts::TAU;

/// `e(x) = exp(2πix)`.
fn e(x: f64) -> Complex64 {
    Complex64::from_polar(1.0, TAU * x)
}

/// Distance from `x` to the nearest integer.
pub fn circle_norm(x: f64) -> f64 {
    let frac = x.rem_euclid(1.0);
    frac.min(1.0 - frac)
}

/// Evaluate `γ_t(ϑ)` as a product of one 2×2 step matrix per binary digit
/// of `t`, least significant digit first, applied between the fixed row
/// `(1 0)` and the column `(1, u)ᵀ` with `u = e(ϑ)/(2 − e(−ϑ))`.
pub fn gamma_matrix(t: &BigUint, theta: f64) -> Complex64 {
    if t.is_zero() {
        // The shift 0 has all mass at 0.
        return Complex64::new(1.0, 0.0);
    }
    let ep = e(theta);
    let em = e(-theta);
    let half_ep = 0.5 * ep;
    let half_em = 0.5 * em;
    // Row vector (1 0) pushed through A(ε_0)·A(ε_1)···, ε_0 the least
    // significant digit:
    //   A(0) = [[1, 0], [e(ϑ)/2, e(-ϑ)/2]]
    //   A(1) = [[e(ϑ)/2, e(-ϑ)/2], [0, 1]]
    let mut row = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
    for i in 0..t.bits() {
        row = if t.bit(i) {
            (row.0 * half_ep, row.0 * half_em + row.1)
        } else {
            (row.0 + row.1 * half_ep, row.1 * half_em)
        };
    }
    let u = ep / (Complex64::new(2.0, 0.0) - em);
    row.0 + row.1 * u
}

/// Evaluate `γ_t(ϑ)` directly from a carry distribution: the finitely many
/// supported values plus the closed form of the geometric tail
/// `Σ_{j < j_min} c·2^j·e(jϑ)`.
pub fn gamma_from_dist(dist: &CarryDistribution, theta: f64) -> Complex64 {
    let mut sum = Complex64::zero();
    for (&j, delta) in dist.support() {
        sum += delta.to_f64() * e(j as f64 * theta);
    }
    let c = dist.tail_coeff().to_f64();
    if c != 0.0 {
        let j_min = dist.j_min();
        let scale = c * 2f64.powi(i32::try_from(j_min).expect("tail cutoff fits i32"));
        let ratio = 0.5 * e(-theta);
        sum += scale * e(j_min as f64 * theta) * ratio / (Complex64::new(1.0, 0.0) - ratio);
    }
    sum
}

// ---------------------------------------------------------------------------
// Cotangent-kernel quadrature
// ---------------------------------------------------------------------------

/// Integrate `f` over `[0, 1/2]` where `f` extends continuously to 0 with
/// value `limit_at_zero`: a flat strip `[0, δ₀]` with `δ₀ = 1/(8·points)`
/// plus a midpoint rule with `points` intervals on `[δ₀, 1/2]`. Evaluations
/// run in parallel and the partial sums are reduced pairwise.
fn integrate_half_interval<F>(f: F, points: u64, limit_at_zero: f64) -> f64
where
    F: Fn(f64) -> f64 + Sync,
{
    let delta0 = 1.0 / (8.0 * points as f64);
    let h = (0.5 - delta0) / points as f64;
    let sum: f64 = (0..points)
        .into_par_iter()
        .map(|i| f(delta0 + (i as f64 + 0.5) * h))
        .sum();
    delta0 * limit_at_zero + h * sum
}

/// The result of recovering a carry value through the singular integral.
pub struct CtIntegralReport {
    pub t: BigUint,
    pub points: u64,
    /// Quadrature value of `c_t`.
    pub value: f64,
    /// The exact carry value, for comparison.
    pub exact: f64,
    pub abs_error: f64,
}

/// Recover `c_t` from the integral representation
/// `c_t = 1/2 + δ(0,t)/2 + (1/2)·∫₀¹ Im γ_t(ϑ)·cot(πϑ) dϑ`.
///
/// The integrand is symmetric about ϑ = 1/2, so the integral is twice the
/// integral over `[0, 1/2]`; the singular endpoint is removable because the
/// carry distribution has mean zero, so the integrand extends continuously
/// to 0 with value 0.
pub fn ct_integral(t: &BigUint, points: u64) -> Result<CtIntegralReport> {
    if points < 16 {
        return Err(Error::InvalidArgument(format!(
            "quadrature needs at least 16 points, got {points}"
        )));
    }
    let dist = dist_for(t);
    let integrand = |theta: f64| {
        gamma_matrix(t, theta).im * (std::f64::consts::PI * theta).tan().recip()
    };
    let half = integrate_half_interval(integrand, points, 0.0);
    let value = 0.5 + 0.5 * dist.delta_at(0).to_f64() + half;
    let exact = dist.c_value().to_f64();
    Ok(CtIntegralReport {
        t: t.clone(),
        points,
        value,
        exact,
        abs_error: (value - exact).abs(),
    })
}

/// Quadrature check of the closed identity
/// `∫₀¹ sin(2πkϑ)·cot(πϑ) dϑ = 1` for every integer `k ≥ 1`, using the same
/// integrator as the carry-value recovery (the removable value at 0 is
/// `2k`). Returns the quadrature value, to be compared with 1.
pub fn kernel_identity_quadrature(k: u64, points: u64) -> Result<f64> {
    if k < 1 {
        return Err(Error::InvalidArgument(
            "the kernel identity is stated for k ≥ 1".into(),
        ));
    }
    if points < 16 {
        return Err(Error::InvalidArgument(format!(
            "quadrature needs at least 16 points, got {points}"
        )));
    }
    let integrand = |theta: f64| {
        (TAU * k as f64 * theta).sin() * (std::f64::consts::PI * theta).tan().recip()
    };
    Ok(2.0 * integrate_half_interval(integrand, points, 2.0 * k as f64))
}

// ---------------------------------------------------------------------------
// Analytic bound checks
// ---------------------------------------------------------------------------

/// Outcome of one pointwise decay check `|γ_t(ϑ)| ≤ (1 − ‖ϑ‖²/2)^M`.
pub struct DecayCheck {
    pub t: BigUint,
    pub theta: f64,
    pub gamma: Complex64,
    pub blocks: u64,
    /// `M = ⌊(r − 1)/4⌋` decay factors.
    pub exponent: u64,
    pub bound: f64,
    pub pass: bool,
}

/// Floating-point slack for the modulus-decay comparison.
pub const DECAY_SLACK: f64 = 1e-12;

/// Check the block-driven modulus decay `|γ_t(ϑ)| ≤ (1 − ‖ϑ‖²/2)^M` with
/// `M = ⌊(r − 1)/4⌋` for a shift with `r` blocks. With fewer than 5 blocks
/// the exponent is 0 and the check is vacuously true.
pub fn decay_check(t: &BigUint, theta: f64) -> Result<DecayCheck> {
    if t.is_zero() {
        return Err(Error::InvalidArgument(
            "the decay bound is stated for t ≥ 1".into(),
        ));
    }
    let r = blocks_count(t);
    let exponent = (r - 1) / 4;
    let gamma = gamma_matrix(t, theta);
    let norm = circle_norm(theta);
    let base = 1.0 - 0.5 * norm * norm;
    let bound = base.powi(i32::try_from(exponent).expect("exponent fits i32"));
    let pass = gamma.norm() <= bound + DECAY_SLACK;
    Ok(DecayCheck {
        t: t.clone(),
        theta,
        gamma,
        blocks: r,
        exponent,
        bound,
        pass,
    })
}

/// Outcome of one linearization check for the imaginary part.
pub struct ImagPartCheck {
    pub t: BigUint,
    pub theta: f64,
    pub imag: f64,
    pub bound: f64,
    pub order: u32,
    pub pass: bool,
}

/// Floating-point slack for the imaginary-part comparison.
pub const IMAG_SLACK: f64 = 1e-10;

/// Check the truncated odd expansion of the imaginary part:
/// `|Im γ_t(ϑ)| ≤ Σ_{k<K} (2πϑ)^(2k+1)·|m_(2k+1)| +
///  (2πϑ)^(2K+1)·(√((2K)!·(2K+2)!)/(2K+1)!)·√(m_(2K)·m_(2K+2))`,
/// with the moments of the carry distribution evaluated exactly and the
/// comparison done in floating point with a pinned slack.
pub fn imag_part_check(t: &BigUint, theta: f64, order: u32) -> Result<ImagPartCheck> {
    if t.is_zero() {
        return Err(Error::InvalidArgument(
            "the linearization bound is stated for t ≥ 1".into(),
        ));
    }
    if order < 1 {
        return Err(Error::InvalidArgument("order must be at least 1".into()));
    }
    let x = TAU * theta;
    let mut bound = 0.0f64;
    for k in 0..order {
        let m = crate::bounds::rational_to_f64(&moment(t, 2 * k + 1)).abs();
        bound += x.powi(2 * k as i32 + 1).abs() * m;
    }
    let m_2k = crate::bounds::rational_to_f64(&moment(t, 2 * order));
    let m_2k2 = crate::bounds::rational_to_f64(&moment(t, 2 * order + 2));
    let f_2k = big_factorial_f64(2 * order);
    let f_2k1 = big_factorial_f64(2 * order + 1);
    let f_2k2 = big_factorial_f64(2 * order + 2);
    bound += x.powi(2 * order as i32 + 1).abs() * ((f_2k * f_2k2).sqrt() / f_2k1)
        * (m_2k * m_2k2).sqrt();
    let imag = gamma_matrix(t, theta).im;
    Ok(ImagPartCheck {
        t: t.clone(),
        theta,
        imag: imag.abs(),
        bound,
        order,
        pass: imag.abs() <= bound + IMAG_SLACK,
    })
}

fn big_factorial_f64(n: u32) -> f64 {
    crate::series::factorial(n).to_f64().unwrap_or(f64::INFINITY)
}

/// CSV row for a pointwise evaluation: `t, theta, re, im, bound, pass`
/// (bound empty when no bound was checked).
pub fn csv_row(t: &BigUint, theta: f64, gamma: Complex64, bound: Option<f64>, pass: Option<bool>) -> String {
    format!(
        "{},{},{},{},{},{}",
        t,
        theta,
        gamma.re,
        gamma.im,
        bound.map(|b| b.to_string()).unwrap_or_default(),
        pass.map(|p| p.to_string()).unwrap_or_default(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::carrydist::reverse_binary;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn single_shift_matches_closed_form() {
        for theta in [0.0, 0.1, 0.3, 0.49, 0.77] {
            let u = e(theta) / (Complex64::new(2.0, 0.0) - e(-theta));
            let g = gamma_matrix(&BigUint::from(1u32), theta);
            assert!(close(g, u, 1e-14), "theta={theta}: {g} vs {u}");
        }
    }

    #[test]
    fn value_at_zero_is_total_mass() {
        for t in [0u64, 1, 2, 7, 173] {
            let g = gamma_matrix(&BigUint::from(t), 0.0);
            assert!(close(g, Complex64::new(1.0, 0.0), 1e-13), "t={t}");
        }
    }

    #[test]
    fn trailing_zeros_do_not_change_the_sum() {
        for t in [1u64, 3, 5, 13, 173] {
            for theta in [0.13, 0.4, 0.71] {
                let a = gamma_matrix(&BigUint::from(t), theta);
                let b = gamma_matrix(&BigUint::from(t << 3), theta);
                assert!(close(a, b, 1e-13), "t={t} theta={theta}");
            }
        }
    }

    #[test]
    fn conjugate_symmetry_and_periodicity() {
        let t = BigUint::from(181u32);
        for theta in [0.05, 0.2, 0.33, 0.48] {
            let g = gamma_matrix(&t, theta);
            let h = gamma_matrix(&t, 1.0 - theta);
            assert!(close(h, g.conj(), 1e-13), "theta={theta}");
            let p = gamma_matrix(&t, theta + 1.0);
            assert!(close(p, g, 1e-12), "period theta={theta}");
        }
    }

    #[test]
    fn digit_reversal_preserves_the_sum() {
        for t in [13u64, 11, 38, 1997, 54321] {
            let r = reverse_binary(&BigUint::from(t)).unwrap();
            for theta in [0.11, 0.37] {
                let a = gamma_matrix(&BigUint::from(t), theta);
                let b = gamma_matrix(&r, theta);
                assert!(close(a, b, 1e-13), "t={t} theta={theta}");
            }
        }
    }

    #[test]
    fn modulus_never_exceeds_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let t = BigUint::from(rng.gen_range(1u64..1 << 24));
            let theta: f64 = rng.gen_range(0.0..1.0);
            let g = gamma_matrix(&t, theta);
            assert!(g.norm() <= 1.0 + 1e-12, "t={t} theta={theta} |g|={}", g.norm());
        }
    }

    #[test]
    fn matrix_and_distribution_representations_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..60 {
            let t = BigUint::from(rng.gen_range(1u64..1 << 20));
            let dist = dist_for(&t);
            for _ in 0..4 {
                let theta: f64 = rng.gen_range(0.0..1.0);
                let a = gamma_matrix(&t, theta);
                let b = gamma_from_dist(&dist, theta);
                assert!(close(a, b, 1e-12), "t={t} theta={theta}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn integral_recovers_carry_values() {
        for t in [1u64, 3, 5, 11, 173, 9999] {
            let rep = ct_integral(&BigUint::from(t), 1 << 12).unwrap();
            assert!(
                rep.abs_error < 2e-6,
                "t={t}: value {} vs exact {} (err {})",
                rep.value,
                rep.exact,
                rep.abs_error
            );
        }
    }

    #[test]
    fn integral_sharpens_as_points_double() {
        let t = BigUint::from(77u32);
        let coarse = ct_integral(&t, 1 << 8).unwrap().abs_error;
        let fine = ct_integral(&t, 1 << 13).unwrap().abs_error;
        assert!(fine < coarse, "coarse {coarse} vs fine {fine}");
        assert!(fine < 1e-6);
    }

    #[test]
    fn kernel_identity_evaluates_to_one() {
        for k in 1..=6u64 {
            let v = kernel_identity_quadrature(k, 1 << 13).unwrap();
            assert!((v - 1.0).abs() < 1e-6, "k={k}: {v}");
        }
    }

    #[test]
    fn quadrature_rejects_tiny_grids() {
        assert!(ct_integral(&BigUint::from(1u32), 8).is_err());
        assert!(kernel_identity_quadrature(0, 64).is_err());
    }

    #[test]
    fn decay_bound_example() {
        // 10101 has five blocks, hence one decay factor; at ϑ = 1/2 the
        // bound is 1 − (1/2)²/2 = 7/8.
        let t = BigUint::from(0b10101u32);
        let check = decay_check(&t, 0.5).unwrap();
        assert_eq!(check.blocks, 5);
        assert_eq!(check.exponent, 1);
        assert!((check.bound - 0.875).abs() < 1e-15);
        assert!(check.pass, "|gamma| = {}", check.gamma.norm());
    }

    #[test]
    fn decay_bound_random_many_blocks() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut tested = 0;
        while tested < 100 {
            let t = BigUint::from(rng.gen_range(1u64..1 << 22));
            if blocks_count(&t) < 5 {
                continue;
            }
            let theta: f64 = rng.gen_range(0.0..1.0);
            let check = decay_check(&t, theta).unwrap();
            assert!(
                check.pass,
                "t={t} theta={theta}: |g|={} bound={}",
                check.gamma.norm(),
                check.bound
            );
            tested += 1;
        }
    }

    #[test]
    fn few_block_decay_is_vacuous() {
        let check = decay_check(&BigUint::from(3u32), 0.4).unwrap();
        assert_eq!(check.exponent, 0);
        assert!(check.pass);
    }

    #[test]
    fn imag_part_checks_hold() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..40 {
            let t = BigUint::from(rng.gen_range(1u64..1 << 12));
            let theta: f64 = rng.gen_range(0.0..0.1);
            for order in 1..=3u32 {
                let check = imag_part_check(&t, theta, order).unwrap();
                assert!(
                    check.pass,
                    "t={t} theta={theta} K={order}: imag={} bound={}",
                    check.imag,
                    check.bound
                );
            }
        }
    }

    #[test]
    fn csv_rows_have_six_fields() {
        let row = csv_row(
            &BigUint::from(5u32),
            0.25,
            Complex64::new(0.5, -0.1),
            Some(0.9),
            Some(true),
        );
        assert_eq!(row.split(',').count(), 6);
        let bare = csv_row(&BigUint::from(5u32), 0.25, Complex64::new(0.5, -0.1), None, None);
        assert!(bare.ends_with(",,"));
    }
}
