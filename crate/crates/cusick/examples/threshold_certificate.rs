//! Build self-verifying block-count threshold certificates.
//!
//! For a tolerance ε, the certificate names a block count L such that every
//! shift whose binary expansion has at least L blocks of ones is guaranteed
//! a carry value above 1/2 − ε, and records each inequality it rests on so
//! the claim can be re-checked from the ledger alone.
//!
//! Run with: `cargo run --release --example threshold_certificate [eps...]`
//! (defaults to 6/5 and 9/10).

use std::time::Instant;

use cusick::bounds::{block_threshold, build_ledger};
use cusick::cli::parse_epsilon;
use num_bigint::BigInt;
use num_rational::BigRational;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let epsilons: Vec<BigRational> = if args.is_empty() {
        vec![
            BigRational::new(BigInt::from(6), BigInt::from(5)),
            BigRational::new(BigInt::from(9), BigInt::from(10)),
        ]
    } else {
        args.iter()
            .map(|a| parse_epsilon(a).expect("tolerance must be a positive rational"))
            .collect()
    };

    for eps in epsilons {
        let start = Instant::now();
        match block_threshold(&eps) {
            Ok(cert) => {
                let elapsed = start.elapsed();
                println!(
                    "{}",
                    serde_json::to_string_pretty(&cert.to_json()).unwrap()
                );
                println!("built in {elapsed:.2?}");
                if !cert.trivial {
                    let ledger = build_ledger(cert.ledger_kmax);
                    let ok = cert.verify(&ledger).unwrap();
                    println!("independent re-verification: {}", if ok { "PASS" } else { "FAIL" });
                }
                println!(
                    "any shift with at least min_blocks blocks of ones needs \
                     {} binary digits",
                    cusick::bounds::describe_biguint(&cert.min_bits_required())
                );
            }
            Err(e) => println!("epsilon {eps}: {e}"),
        }
        println!();
    }
}
