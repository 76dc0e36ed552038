//! Cross-check the recurrence distribution against brute enumeration.
//!
//! The library computes carry densities two fully independent ways: the
//! production path extends a distribution digit by digit through a
//! recurrence, and the oracle path enumerates all residues u modulo 2^m,
//! counting digit-sum changes directly (with the wrap-around residues
//! folded in exactly). The two must agree to the last bit. This example
//! runs the comparison over a range of shifts and shows one worked table.
//!
//! Run with: `cargo run --example oracle_crosscheck [max_t]` (default 64).

use cusick::carrydist::dist_for_u64;
use cusick::oracle::{default_modulus, exact_c, exact_delta};

fn main() {
    let max_t: u64 = std::env::args()
        .nth(1)
        .map(|a| a.parse().expect("max_t must be an integer"))
        .unwrap_or(64);

    let mut pairs = 0u64;
    for t in 0..=max_t {
        let m = default_modulus(t);
        let dist = dist_for_u64(t);
        for j in -10..=10i64 {
            assert_eq!(
                exact_delta(t, j, m).unwrap(),
                dist.delta_at(j),
                "density mismatch at t={t}, j={j}"
            );
            pairs += 1;
        }
        assert_eq!(
            exact_c(t, m).unwrap(),
            dist.c_value(),
            "carry-value mismatch at t={t}"
        );
    }
    println!(
        "recurrence and enumeration agree exactly on {pairs} densities and {} carry values",
        max_t + 1
    );
    println!();

    let t = 13;
    let m = default_modulus(t);
    let dist = dist_for_u64(t);
    println!("worked example, t = {t} = {t:#b} (enumeration modulus 2^{m}):");
    println!("{:>4}  {:<12} {}", "j", "recurrence", "enumeration");
    for j in (-4..=3i64).rev() {
        println!(
            "{j:>4}  {:<12} {}",
            dist.delta_at(j).to_string(),
            exact_delta(t, j, m).unwrap()
        );
    }
}
