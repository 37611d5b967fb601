//! Randomised search for counterexamples on continuous functions.
//!
//! Inputs are drawn from a rational grid that is refined from trial to trial,
//! and transformations get more breakpoints as the search goes on. Half of
//! the trials use a random bijection; the other half re-place the sampled
//! values at fresh random positions in the same order. Everything is
//! deterministic in the seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::functions::Aggregator;
use crate::scale::{format_rational, rat, IntervalSpec, PlBijection, Rational};

use super::witness::{sign, sign_str, Evidence, Witness, WitnessKind};
use super::CmMode;

fn grid_denominator(trial: usize) -> i64 {
    3 + (trial % 37) as i64
}

fn budget(trial: usize, trials: usize) -> usize {
    1 + trial * 8 / trials.max(1)
}

/// Draws a point of `E` on the grid with the given denominator.
fn draw_value(rng: &mut ChaCha8Rng, d: i64, e: IntervalSpec) -> Rational {
    let lo = if e.has_inf { 0 } else { 1 };
    let hi = if e.has_sup { d } else { d - 1 };
    rat(rng.gen_range(lo..=hi), d)
}

/// Draws `count` tuples of arity `n`, reusing earlier values now and then so
/// that ties occur.
fn draw_points(rng: &mut ChaCha8Rng, n: usize, count: usize, d: i64, e: IntervalSpec) -> Vec<Vec<Rational>> {
    let mut used: Vec<Rational> = Vec::new();
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let mut x = Vec::with_capacity(n);
        for _ in 0..n {
            let v = if !used.is_empty() && rng.gen_bool(0.3) {
                used[rng.gen_range(0..used.len())].clone()
            } else {
                draw_value(rng, d, e)
            };
            used.push(v.clone());
            x.push(v);
        }
        out.push(x);
    }
    out
}

/// A bijection sending the sorted interior values to fresh random positions
/// in the same order; endpoints stay fixed.
fn replace_values(rng: &mut ChaCha8Rng, values: &[Rational]) -> Result<PlBijection> {
    let mut vals: Vec<Rational> = values
        .iter()
        .filter(|v| *v > &rat(0, 1) && *v < &rat(1, 1))
        .cloned()
        .collect();
    vals.sort();
    vals.dedup();
    if vals.is_empty() {
        return Ok(PlBijection::identity());
    }
    let denom = 16 * (vals.len() as i64 + 1);
    let mut targets: Vec<i64> = Vec::new();
    while targets.len() < vals.len() {
        let c = rng.gen_range(1..denom);
        if !targets.contains(&c) {
            targets.push(c);
        }
    }
    targets.sort_unstable();
    let pairs: Vec<(Rational, Rational)> = vals.into_iter().zip(targets.into_iter().map(|c| rat(c, denom))).collect();
    PlBijection::through(&pairs)
}

fn transform(rng: &mut ChaCha8Rng, trial: usize, trials: usize, values: &[Rational]) -> Result<PlBijection> {
    if trial % 2 == 0 {
        Ok(PlBijection::random_with(rng, budget(trial, trials)))
    } else {
        replace_values(rng, values)
    }
}

fn apply(phi: &PlBijection, x: &[Rational]) -> Vec<Rational> {
    x.iter().map(|v| phi.apply(v)).collect()
}

fn show(x: &[Rational]) -> String {
    let parts: Vec<String> = x.iter().map(format_rational).collect();
    format!("({})", parts.join(", "))
}

/// Searches for `x, φ` with `F(φx) ≠ φ(F(x))`.
pub fn falsify_invariance(f: &dyn Aggregator, e: IntervalSpec, trials: usize, seed: u64) -> Result<Option<Witness>> {
    let n = f.arity();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for t in 0..trials {
        let x = draw_points(&mut rng, n, 1, grid_denominator(t), e).remove(0);
        let y = f.eval(&x)?;
        if !e.contains(&y) {
            return Err(Error::Evaluation(format!("{} maps {} outside the scale", f.name(), show(&x))));
        }
        let mut support = x.clone();
        support.push(y.clone());
        let phi = transform(&mut rng, t, trials, &support)?;
        let moved = f.eval(&apply(&phi, &x))?;
        let expected = phi.apply(&y);
        if moved != expected {
            return Ok(Some(Witness {
                kind: WitnessKind::Invariance,
                observed: format!("F(phi x) = {} but phi(F x) = {}", format_rational(&moved), format_rational(&expected)),
                required: "F(phi x) = phi(F x)".into(),
                evidence: Evidence::Transform { points: vec![x], transforms: vec![phi] },
                cells: vec![],
            }));
        }
    }
    Ok(None)
}

/// Searches for `x, x'` and bijections reversing the comparison of `F(x)`
/// and `F(x')`.
pub fn falsify_cm(f: &dyn Aggregator, e: IntervalSpec, mode: CmMode, trials: usize, seed: u64) -> Result<Option<Witness>> {
    let n = f.arity();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for t in 0..trials {
        let pts = draw_points(&mut rng, n, 2, grid_denominator(t), e);
        let (x, x2) = (&pts[0], &pts[1]);
        let transforms: Vec<PlBijection> = match mode {
            CmMode::Single => {
                let support: Vec<Rational> = x.iter().chain(x2).cloned().collect();
                vec![transform(&mut rng, t, trials, &support)?]
            }
            CmMode::Independent => (0..n)
                .map(|i| transform(&mut rng, t, trials, &[x[i].clone(), x2[i].clone()]))
                .collect::<Result<_>>()?,
        };
        let image = |p: &[Rational]| -> Vec<Rational> {
            if transforms.len() == 1 {
                apply(&transforms[0], p)
            } else {
                p.iter().zip(&transforms).map(|(v, phi)| phi.apply(v)).collect()
            }
        };
        let before = sign(&f.eval(x)?, &f.eval(x2)?);
        let (y, y2) = (image(x), image(x2));
        let after = sign(&f.eval(&y)?, &f.eval(&y2)?);
        if before != after {
            return Ok(Some(Witness {
                kind: if mode == CmMode::Single { WitnessKind::CmSingle } else { WitnessKind::CmIndependent },
                observed: format!(
                    "F{} {} F{} but F{} {} F{}",
                    show(x),
                    sign_str(before),
                    show(x2),
                    show(&y),
                    sign_str(after),
                    show(&y2)
                ),
                required: "the comparison survives every admissible transformation".into(),
                evidence: Evidence::Transform { points: pts.clone(), transforms },
                cells: vec![],
            }));
        }
    }
    Ok(None)
}
