//! Reproduce the published 30-bit minimum of the carry value exactly.
//!
//! Among all shifts with at most 30 binary digits, the smallest carry value
//! is attained at t = (111101111011110111101111011111)₂ — four ones, a
//! zero, repeated, with a final run of five ones — and at its bit reversal.
//! This example recomputes both values with exact dyadic arithmetic and
//! prints the full decimal expansion (no rounding is involved at any step).
//!
//! Run with: `cargo run --example exact_minimum`

use cusick::carrydist::dist_for;
use cusick::{blocks_count, reverse_binary};
use num_bigint::BigUint;

fn main() {
    let champion = BigUint::parse_bytes(b"111101111011110111101111011111", 2).unwrap();
    let reversed = reverse_binary(&champion).unwrap();

    println!("champion  t   = {champion} = {champion:#b}");
    println!("bit reversal  = {reversed} = {reversed:#b}");
    println!("runs: {} (six runs of ones, five of zeros)", blocks_count(&champion));
    println!();

    let c = dist_for(&champion).c_value();
    let c_rev = dist_for(&reversed).c_value();
    println!("c_t      = {c}");
    println!("         = {}", c.to_decimal_exact());
    println!("c_(t^R)  = {c_rev}");
    println!(
        "the two values are {}",
        if c == c_rev { "identical, as reversal symmetry demands" } else { "DIFFERENT (bug!)" }
    );
    println!();

    // Doubling a shift only pads its written expansion with a trailing zero,
    // so the carry value is invariant: the 31-bit doubled champion ties.
    let doubled = &champion << 1u32;
    let c_doubled = dist_for(&doubled).c_value();
    println!("c_(2t)   = {c_doubled} (doubling leaves the carry value unchanged)");
    assert_eq!(c, c_doubled);
}
