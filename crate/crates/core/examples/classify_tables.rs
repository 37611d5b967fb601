//! Structural classification of tables, with forms, witnesses and the
//! decomposition of nondecreasing members.

use ordagg::chain::{discrete_representative, sample_table, Chain, DiscreteTable};
use ordagg::functions::{AnchoredMax, Mode, SumThresholdSwitch};
use ordagg::meaningfulness::*;
use ordagg::orbits::StrongOrbit;
use ordagg::scale::{rat, IntervalSpec};

fn report(name: &str, t: &DiscreteTable, e: IntervalSpec) -> ordagg::Result<()> {
    println!("{name} ({e}):");
    for family in [Family::OrderInvariant, Family::CmSingle, Family::CmIndependent] {
        match classify_family(t, e, family)? {
            None => println!("  {family}: yes"),
            Some(w) => println!("  {family}: no, {}", w.observed),
        }
    }
    Ok(())
}

fn main() -> ordagg::Result<()> {
    let open = IntervalSpec::OPEN;
    let mode = discrete_representative(&Mode(3), Chain::new(3)?, open)?;
    report("mode", &mode, open)?;

    let grid = vec![rat(1, 4), rat(1, 2), rat(3, 4)];
    let (switch, _) = sample_table(&SumThresholdSwitch, &[grid.clone(), grid])?;
    report("sum-threshold-switch", &switch, open)?;

    let lc = IntervalSpec::LEFT_CLOSED;
    let anchored = discrete_representative(&AnchoredMax, Chain::new(3)?, lc)?;
    report("anchored-max", &anchored, lc)?;
    let d = decompose_nondecreasing(&anchored, Family::OrderInvariant, lc)?;
    for entry in &d.entries {
        println!("  xi({}) = {}", entry.class, entry.xi);
    }
    let interior = StrongOrbit::of_ranks(&[1, 1, 1], &[3, 3, 3], lc);
    println!("  on the interior: {:?}", d.xi_on(&interior).map(|x| x.to_string()));
    Ok(())
}
