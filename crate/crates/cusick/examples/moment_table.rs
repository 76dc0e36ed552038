//! Exact moments of the carry distribution of a shift.
//!
//! The normalized moments m_k(t) = (1/k!)·E[X^k] of the carry distribution
//! come out of a truncated-series walk over the binary digits of t, with no
//! numerical error. This example tabulates them, cross-checks the raw
//! moments k!·m_k(t) against direct summation over the distribution, checks
//! the closed bitwise formula for m_2, and evaluates the logarithmic
//! second-moment bound.
//!
//! Run with: `cargo run --example moment_table [t] [kmax]`
//! (defaults t = 53, kmax = 8).

use cusick::carrydist::dist_for;
use cusick::cli::parse_shift;
use cusick::moments::{bejian_faure_check, m2_exact, moments_upto};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

fn main() {
    let mut args = std::env::args().skip(1);
    let t = parse_shift(&args.next().unwrap_or_else(|| "53".into()))
        .expect("shift must be a nonnegative integer");
    let kmax: u32 = args
        .next()
        .map(|a| a.parse().expect("kmax must be a small integer"))
        .unwrap_or(8);

    println!("t = {t} = {t:#b}");
    println!();
    println!(
        "{:>3}  {:<28} {:<16} {}",
        "k", "m_k(t) exact", "m_k(t) approx", "k!·m_k(t) vs distribution"
    );

    let ms = moments_upto(&t, kmax);
    let dist = dist_for(&t);
    let mut kfact = BigRational::one();
    for (k, m) in ms.iter().enumerate() {
        if k > 0 {
            kfact *= BigRational::from_integer(BigInt::from(k));
        }
        let approx =
            m.numer().to_f64().unwrap_or(f64::NAN) / m.denom().to_f64().unwrap_or(f64::NAN);
        let raw = dist.raw_moment(k as u32).to_rational();
        let agree = m * &kfact == raw;
        println!(
            "{k:>3}  {:<28} {:<16.10} {}",
            m.to_string(),
            approx,
            if agree { "agree exactly" } else { "MISMATCH (bug!)" }
        );
        assert!(agree);
    }
    println!();

    let m2 = m2_exact(&t);
    println!("m_2(t) by the bitwise closed form: {m2}");
    if kmax >= 2 {
        assert_eq!(ms[2], m2);
    }
    println!(
        "logarithmic second-moment bound: {}",
        if bejian_faure_check(&t) { "holds" } else { "VIOLATED (bug!)" }
    );
}
