//! Print the exact carry-density table of a shift.
//!
//! For a shift t, the distribution assigns to each integer j the density of
//! the set of u whose binary digit sum grows by exactly j under u ↦ u + t.
//! Every density is a dyadic rational, so the table below is exact, and the
//! conjectured inequality c_t > 1/2 concerns the sum of the j ≥ 0 rows.
//!
//! Run with: `cargo run --example density_table [t]` (default t = 39;
//! `0x`/`0b` prefixes work).

use cusick::carrydist::dist_for;
use cusick::cli::parse_shift;

fn main() {
    let arg = std::env::args().nth(1).unwrap_or_else(|| "39".into());
    let t = parse_shift(&arg).expect("shift must be a nonnegative integer");
    let dist = dist_for(&t);

    println!("t = {t} = {:#b}, {} bits", t, t.bits());
    println!();
    println!("{:>6}  {:<18} {}", "j", "density (exact)", "density (decimal)");
    let lo = dist.j_min().min(0) - 1;
    let hi = dist.support_max().unwrap_or(0).max(0);
    for j in (lo..=hi).rev() {
        let d = dist.delta_at(j);
        println!("{j:>6}  {:<18} {}", d.to_string(), d.to_decimal(16));
    }
    println!("{:>6}  {:<18} (geometric tail, halving per step)", "< lo", "...");
    println!();

    let c = dist.c_value();
    println!("c_t  = {c} (exact)");
    println!("     = {} (exact decimal expansion)", c.to_decimal_exact());
    println!("runs in the written expansion of t: {}", cusick::blocks_count(&t));
}
