//! Randomised search for violations on the continuous domain, with replay.
//!
//! cargo run --example falsify_functions -- 500 11

use ordagg::functions::parse_function;
use ordagg::meaningfulness::{falsify_cm, falsify_invariance, CmMode, ReplayTarget};
use ordagg::scale::IntervalSpec;

fn main() -> ordagg::Result<()> {
    let mut args = std::env::args().skip(1);
    let trials: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(1000);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(7);
    let e = IntervalSpec::OPEN;

    for spec in ["median3", "min", "mode:3", "mean", "squash-max", "max"] {
        let f = parse_function(spec)?;
        let inv = falsify_invariance(f.as_ref(), e, trials, seed)?;
        let single = falsify_cm(f.as_ref(), e, CmMode::Single, trials, seed)?;
        let indep = falsify_cm(f.as_ref(), e, CmMode::Independent, trials, seed)?;
        let show = |w: &Option<ordagg::meaningfulness::Witness>| match w {
            None => "none".to_string(),
            Some(w) => format!("witness (replays: {})", w.replay(ReplayTarget::Function(f.as_ref()), e).unwrap_or(false)),
        };
        println!("{spec:<11} inv {:<22} cm1 {:<22} cmi {}", show(&inv), show(&single), show(&indep));
    }

    let mean = parse_function("mean")?;
    if let Some(w) = falsify_cm(mean.as_ref(), e, CmMode::Single, trials, seed)? {
        println!("\n{w}");
    }
    Ok(())
}
