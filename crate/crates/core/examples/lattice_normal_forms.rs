//! Lattice polynomials: disjunctive and conjunctive normal forms, order
//! statistics, the median, and self-duality.

use ordagg::lattice::{parse_min_true, LatticePolynomial};
use ordagg::scale::rat;

fn main() -> ordagg::Result<()> {
    // x1 v (x1 ^ x2) absorbs to x1.
    let raw = parse_min_true("[{1},{1,2}]", Some(2))?;
    let p = LatticePolynomial::canonicalize(&raw)?;
    println!("canonical form of x1 v (x1 ^ x2): {p}");

    let x = [rat(3, 10), rat(7, 10), rat(1, 2)];
    for k in 1..=3 {
        let os = LatticePolynomial::order_statistic(3, k)?;
        println!("os{k}{:?} = {} (cnf {})", x.iter().map(|v| v.to_string()).collect::<Vec<_>>(), os.eval_dnf(&x)?, os.eval_cnf(&x)?);
    }

    let median = LatticePolynomial::median(3)?;
    println!("median(3): {median}");
    println!("  symmetric: {:?}", median.is_symmetric());
    println!("  weakly self-dual: {}", median.is_weakly_self_dual());

    let skewed = LatticePolynomial::new(parse_min_true("[{1},{2,3}]", Some(3))?)?;
    println!("{skewed}: symmetric {:?}, self-dual {}, dual {}", skewed.is_symmetric(), skewed.is_weakly_self_dual(), skewed.dual());

    // The same polynomial read on ranks of a 5-chain.
    println!("on ranks (0,4,2) of a 5-chain: {}", skewed.eval_ranks(&[0, 4, 2], 5));
    Ok(())
}
