//! Build and display the ledger of moment-bound constants.
//!
//! The coefficient bounds behind the block-threshold certificates rest on
//! five families of constants indexed by the moment order k. The ledger
//! computes every entry exactly (as a rational or a directed-rounding
//! float upper bound) from a pinned rational bracket of log 2, so any
//! downstream certificate can be re-verified from the ledger alone.
//!
//! Run with: `cargo run --example constants_ledger [kmax]` (default 6).

use cusick::bounds::build_ledger;

fn cell(row: &serde_json::Value, key: &str) -> String {
    row.get(key)
        .and_then(|v| v.get("approx"))
        .and_then(|v| v.as_str())
        .unwrap_or("—")
        .to_string()
}

fn main() {
    let kmax: u32 = std::env::args()
        .nth(1)
        .map(|a| a.parse().expect("kmax must be a small integer"))
        .unwrap_or(6);

    let ledger = build_ledger(kmax);
    let (num, den) = ledger.bracket();
    println!("log 2 lower bracket used for every division: {num}/{den}");
    println!();
    println!(
        "{:>3} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12}",
        "k", "A_k", "B_k", "C_k", "D_k", "E_k", "E'_k", "d1_k", "d2_k"
    );
    for row in ledger.rows_json() {
        println!(
            "{:>3} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12}",
            row["k"],
            cell(&row, "A"),
            cell(&row, "B"),
            cell(&row, "C"),
            cell(&row, "D"),
            cell(&row, "E"),
            cell(&row, "E_prime"),
            cell(&row, "d1"),
            cell(&row, "d2"),
        );
    }
    println!();
    println!("each approx value is an upper bound; exact rationals are in the JSON form:");
    println!("  cargo run -- ledger --kmax {kmax}");
}
