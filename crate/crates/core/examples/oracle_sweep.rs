//! Compares the structural checkers with the generate-and-match oracles on
//! every binary table over a 2-chain.

use ordagg::chain::DiscreteTable;
use ordagg::meaningfulness::*;
use ordagg::scale::IntervalSpec;

fn main() -> ordagg::Result<()> {
    for e in IntervalSpec::all() {
        let mut members = [0usize; 3];
        let families = [Family::OrderInvariant, Family::CmSingle, Family::CmIndependent];
        let spaces: Vec<OracleSpace> = families.iter().map(|&f| OracleSpace::generate(f, &[2, 2], e)).collect::<Result<_, _>>()?;
        for idx in 0..16usize {
            let entries = (0..4).map(|i| idx >> (3 - i) & 1).collect();
            let t = DiscreteTable::uniform(2, 2, entries)?;
            for (i, &family) in families.iter().enumerate() {
                let structural = classify_family(&t, e, family)?.is_none();
                assert_eq!(structural, spaces[i].contains(&t));
                members[i] += structural as usize;
            }
        }
        println!("{:<13} oi {:>2}  cm1 {:>2}  cmi {:>2}  (of 16, all agree)", e.name(), members[0], members[1], members[2]);
    }
    Ok(())
}
