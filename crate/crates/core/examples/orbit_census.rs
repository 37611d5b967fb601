//! Orbits of `E^n` under order automorphisms, for each interval shape.
//!
//! cargo run --example orbit_census -- 3

use ordagg::orbits::{enumerate_orbits, enumerate_strong_orbits, orbit_count, pattern_of};
use ordagg::scale::{rat, IntervalSpec};

fn main() -> ordagg::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2);

    println!("{:<14} {:>8} {:>8}", "shape", "orbits", "strong");
    for e in IntervalSpec::all() {
        let strong = enumerate_strong_orbits(n, e)?.len();
        println!("{:<14} {:>8} {:>8}", e.name(), orbit_count(n, e), strong);
    }

    let closed = IntervalSpec::CLOSED;
    println!("\norbits of [0,1]^2:");
    for o in enumerate_orbits(2, closed)? {
        println!("  {o}  strong {}  rep {:?}", o.strong(), o.representative().iter().map(|r| r.to_string()).collect::<Vec<_>>());
    }

    // Points in the same orbit share a pattern.
    let x = [rat(1, 5), rat(0, 1), rat(1, 5)];
    let y = [rat(9, 10), rat(0, 1), rat(9, 10)];
    println!("\n{} and {}", pattern_of(&x, closed)?, pattern_of(&y, closed)?);
    Ok(())
}
