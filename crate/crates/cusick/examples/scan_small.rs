//! Scan every shift below 2^B for the minimal carry value, both ways.
//!
//! The scanner walks the prefix tree of binary expansions so that each
//! distribution is extended from its parent instead of rebuilt, covers only
//! odd shifts (evenness never changes the carry value), and runs in two
//! modes: `exact` dyadic arithmetic, and `float` windowed arithmetic with
//! certified error radii whose near-minimal candidates are re-checked
//! exactly. Both modes must agree bit for bit; this example runs both and
//! compares them.
//!
//! Run with: `cargo run --release --example scan_small [bits]` (default 14).

use std::time::Instant;

use cusick::scanner::{scan_min_ct, ScanConfig, ScanMode};

fn main() {
    let bits: u32 = std::env::args()
        .nth(1)
        .map(|a| a.parse().expect("bits must be a small integer"))
        .unwrap_or(14);

    let mut results = Vec::new();
    for mode in [ScanMode::Exact, ScanMode::Float] {
        let start = Instant::now();
        let result = scan_min_ct(&ScanConfig::new(bits, mode)).expect("scan failed");
        let elapsed = start.elapsed();
        println!("mode {mode}: {elapsed:.2?}");
        println!("  scanned odd shifts : {}", result.scanned_odd);
        println!("  minimum            = {} ≈ {}", result.minimum, result.minimum_decimal);
        println!("  odd minimizers     : {:?}", result.argmin_odd);
        println!("  all minimizers     : {:?}", result.argmin);
        println!("  violations of c_t > 1/2: {}", result.violations);
        if mode == ScanMode::Float {
            println!("  exact re-checks    : {}", result.exact_rechecks);
        }
        println!();
        results.push(result);
    }

    let (exact, float) = (&results[0], &results[1]);
    assert_eq!(exact.minimum, float.minimum, "minimum values disagree");
    assert_eq!(exact.argmin, float.argmin, "minimizer sets disagree");
    assert_eq!(exact.violations, float.violations, "violation counts disagree");
    assert_eq!(exact.scanned_odd, float.scanned_odd, "coverage disagrees");
    println!("exact and float scans agree exactly.");
}
