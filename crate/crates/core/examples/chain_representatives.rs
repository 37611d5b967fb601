//! Discrete representatives of aggregation functions on finite chains.

use ordagg::chain::{discrete_representative, sample_table, Chain};
use ordagg::functions::{parse_function, TwoBranch};
use ordagg::lattice::LatticePolynomial;
use ordagg::scale::{rat, IntervalSpec};

fn print_table(t: &ordagg::chain::DiscreteTable) {
    for a in t.cells() {
        println!("  {:?} -> {}", a, t.get(&a));
    }
}

fn main() -> ordagg::Result<()> {
    let min = LatticePolynomial::min(2)?;
    let t = discrete_representative(&min, Chain::new(3)?, IntervalSpec::CLOSED)?;
    println!("min on a 3-chain:");
    print_table(&t);

    let bottom = parse_function("const-bottom")?;
    let t = discrete_representative(bottom.as_ref(), Chain::new(3)?, IntervalSpec::CLOSED)?;
    println!("const-bottom: {:?}", t.entries());

    // Functions that are not order invariant can still be sampled and ranked.
    let grid = vec![rat(0, 1), rat(1, 2), rat(1, 1)];
    let (t, values) = sample_table(&TwoBranch, &[grid.clone(), grid])?;
    println!("two-branch on {{0,1/2,1}}^2, values {:?}:", values.iter().map(|v| v.to_string()).collect::<Vec<_>>());
    print_table(&t);
    Ok(())
}
