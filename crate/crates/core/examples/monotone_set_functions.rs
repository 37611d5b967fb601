//! Nonconstant nondecreasing set functions, one per lattice polynomial.
//!
//! cargo run --release --example monotone_set_functions -- 4

use ordagg::lattice::{enumerate_cn, enumerate_cn_in};
use ordagg::scale::IntervalSpec;

fn main() -> ordagg::Result<()> {
    let max: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(4);
    for n in 1..=max {
        println!("|C_{n}| = {}", enumerate_cn(n)?.len());
    }
    println!("\nC_2:");
    for a in enumerate_cn(2)? {
        println!("  {a}");
    }
    // With both endpoints in the scale the constants join in.
    println!("\nC_2 on [0,1]: {}", enumerate_cn_in(2, IntervalSpec::CLOSED)?.len());
    Ok(())
}
