//! Truncated-series machinery behind the moment computations.
//!
//! Appending one binary digit to a shift acts on a pair of generating
//! functions as a 2×2 matrix of truncated series, and a run of m equal
//! digits has a closed-form m-th matrix power. This example prints the base
//! series, compares the closed form against the iterated product, shows the
//! low-order coefficients matching their closed forms, and illustrates how
//! every coefficient stays within 2/(log 2)^k no matter how long the run is.
//!
//! Run with: `cargo run --example series_blocks`

use cusick::moments::{block_power, fubini_coeff, mgf_series_t1, step_matrix};
use cusick::series::SeriesMatrix;
use num_traits::{Signed, ToPrimitive};

fn approx(r: &num_rational::BigRational) -> f64 {
    r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
}

fn main() {
    let base = mgf_series_t1(6);
    println!("base series (shift t = 1), coefficients of x^0 … x^6:");
    for k in 0..=6 {
        println!("  [x^{k}] = {}", base.coeff(k));
    }
    println!();

    // Closed-form run powers against the iterated product.
    let order = 8;
    for bit in [0u8, 1] {
        let step = step_matrix(bit, order);
        let mut iterated = SeriesMatrix::identity(order);
        for m in 1..=12u64 {
            iterated = &iterated * &step;
            assert_eq!(block_power(bit, m, order).unwrap(), iterated);
        }
        println!("runs of {bit}s: closed-form powers equal iterated products for m ≤ 12");
    }
    println!();

    // Low-order coefficients of a run of ones.
    for m in [1u64, 4, 16] {
        let mat = block_power(1, m, 3).unwrap();
        println!("run of {m} ones, low-order coefficients:");
        println!(
            "  top-left  : {} + {}·x + {}·x²",
            mat.entry(0, 0).coeff(0),
            mat.entry(0, 0).coeff(1),
            mat.entry(0, 0).coeff(2)
        );
        println!("  top-right : {} + …", mat.entry(0, 1).coeff(0));
        println!("  bot-left  : {}·x² + …", mat.entry(1, 0).coeff(2));
        println!("  bot-right : {} + … (= 2^-{m})", mat.entry(1, 1).coeff(0));
    }
    println!();

    // Coefficient growth stays bounded by 2/(log 2)^k uniformly in m.
    println!("largest |coefficient| of x^k over runs m ≤ 64, against 2/(log 2)^k:");
    let log2 = std::f64::consts::LN_2;
    for k in [0usize, 4, 8, 12] {
        let mut worst: f64 = 0.0;
        for bit in [0u8, 1] {
            for m in 1..=64u64 {
                let mat = block_power(bit, m, 12).unwrap();
                for i in 0..2 {
                    for j in 0..2 {
                        worst = worst.max(approx(&mat.entry(i, j).coeff(k).abs()));
                    }
                }
            }
        }
        println!("  k = {k:>2}: observed {worst:>14.6}, bound {:>14.6}", 2.0 / log2.powi(k as i32));
    }
    println!();

    println!("ordered-partition series coefficients against (log 2)^-k:");
    for k in [0u32, 5, 10, 20, 30] {
        let c = fubini_coeff(k);
        println!(
            "  k = {k:>2}: coefficient {:>14.6e}, bound {:>14.6e}",
            approx(&c),
            log2.powi(-(k as i32))
        );
    }
}
