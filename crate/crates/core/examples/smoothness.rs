//! Smoothness of discrete representatives: one-rank input steps move the
//! output by at most one rank.

use ordagg::chain::{discrete_representative, is_smooth, polynomial_table, Chain};
use ordagg::functions::Mode;
use ordagg::lattice::{enumerate_cn, LatticePolynomial};
use ordagg::scale::IntervalSpec;

fn main() -> ordagg::Result<()> {
    for n in 1..=3 {
        let mut rough = 0;
        let cn = enumerate_cn(n)?;
        for alpha in &cn {
            let p = LatticePolynomial::new(alpha.clone())?;
            for k in 2..=4 {
                rough += is_smooth(&polynomial_table(&p, k)?).is_some() as usize;
            }
        }
        println!("n={n}: {} polynomials, {rough} non-smooth representatives for k <= 4", cn.len());
    }

    let mode = discrete_representative(&Mode(3), Chain::new(3)?, IntervalSpec::OPEN)?;
    match is_smooth(&mode) {
        Some(p) => println!("mode on a 3-chain jumps from {:?} -> {} to {:?} -> {}", p.lower, mode.get(&p.lower), p.upper, mode.get(&p.upper)),
        None => println!("mode is smooth"),
    }
    Ok(())
}
