//! Aggregation functions evaluated on exact rationals.

use num::{One, Zero};

use crate::error::{Error, Result};
use crate::lattice::{self, LatticePolynomial};
use crate::scale::{rat, IntervalSpec, Rational};

/// A function `E^n -> R` that can be evaluated exactly.
pub trait Aggregator {
    fn arity(&self) -> usize;
    fn eval(&self, x: &[Rational]) -> Result<Rational>;
    fn name(&self) -> String;
}

fn check_arity(expected: usize, x: &[Rational]) -> Result<()> {
    if x.len() != expected {
        return Err(Error::ArityMismatch { expected, found: x.len() });
    }
    Ok(())
}

impl Aggregator for LatticePolynomial {
    fn arity(&self) -> usize {
        LatticePolynomial::arity(self)
    }

    fn eval(&self, x: &[Rational]) -> Result<Rational> {
        self.eval_dnf(x)
    }

    fn name(&self) -> String {
        self.to_string()
    }
}

#[derive(Clone, Debug)]
pub struct Mean(pub usize);

impl Aggregator for Mean {
    fn arity(&self) -> usize {
        self.0
    }

    fn eval(&self, x: &[Rational]) -> Result<Rational> {
        check_arity(self.0, x)?;
        let sum: Rational = x.iter().sum();
        Ok(sum / Rational::from_integer(self.0.into()))
    }

    fn name(&self) -> String {
        format!("mean:{}", self.0)
    }
}

#[derive(Clone, Debug)]
pub struct Mode(pub usize);

impl Aggregator for Mode {
    fn arity(&self) -> usize {
        self.0
    }

    fn eval(&self, x: &[Rational]) -> Result<Rational> {
        check_arity(self.0, x)?;
        lattice::mode(x).ok_or_else(|| Error::Evaluation("mode of an empty tuple".into()))
    }

    fn name(&self) -> String {
        format!("mode:{}", self.0)
    }
}

/// A constant endpoint of the scale.
#[derive(Clone, Debug)]
pub struct Constant {
    pub arity: usize,
    pub top: bool,
}

impl Aggregator for Constant {
    fn arity(&self) -> usize {
        self.arity
    }

    fn eval(&self, x: &[Rational]) -> Result<Rational> {
        check_arity(self.arity, x)?;
        Ok(if self.top { Rational::one() } else { Rational::zero() })
    }

    fn name(&self) -> String {
        format!("{}:{}", if self.top { "const-top" } else { "const-bottom" }, self.arity)
    }
}

/// `t / (1 + t)` applied after another function.
pub struct Squashed<F>(pub F);

impl<F: Aggregator> Aggregator for Squashed<F> {
    fn arity(&self) -> usize {
        self.0.arity()
    }

    fn eval(&self, x: &[Rational]) -> Result<Rational> {
        let t = self.0.eval(x)?;
        Ok(&t / (Rational::one() + &t))
    }

    fn name(&self) -> String {
        format!("squash({})", self.0.name())
    }
}

/// `x1` when `x1 + x2 < 1`, otherwise `x2`.
#[derive(Clone, Debug)]
pub struct SumThresholdSwitch;

impl Aggregator for SumThresholdSwitch {
    fn arity(&self) -> usize {
        2
    }

    fn eval(&self, x: &[Rational]) -> Result<Rational> {
        check_arity(2, x)?;
        Ok(if &x[0] + &x[1] < Rational::one() { x[0].clone() } else { x[1].clone() })
    }

    fn name(&self) -> String {
        "sum-threshold-switch".into()
    }
}

/// `1 - x1` when `x1 >= x2`, otherwise `2 x2 - 3`.
#[derive(Clone, Debug)]
pub struct TwoBranch;

impl Aggregator for TwoBranch {
    fn arity(&self) -> usize {
        2
    }

    fn eval(&self, x: &[Rational]) -> Result<Rational> {
        check_arity(2, x)?;
        Ok(if x[0] >= x[1] { Rational::one() - &x[0] } else { rat(2, 1) * &x[1] - rat(3, 1) })
    }

    fn name(&self) -> String {
        "two-branch".into()
    }
}

/// On a scale whose infimum is included: the infimum when `x1` is there,
/// `x3` when only `x2` is there, and the maximum otherwise.
#[derive(Clone, Debug)]
pub struct AnchoredMax;

impl Aggregator for AnchoredMax {
    fn arity(&self) -> usize {
        3
    }

    fn eval(&self, x: &[Rational]) -> Result<Rational> {
        check_arity(3, x)?;
        Ok(if x[0].is_zero() {
            Rational::zero()
        } else if x[1].is_zero() {
            x[2].clone()
        } else {
            x.iter().max().cloned().expect("three values")
        })
    }

    fn name(&self) -> String {
        "anchored-max".into()
    }
}

/// Parses a function name.
///
/// Accepted forms, each optionally followed by `:n` for the arity:
/// `min`, `max`, `mean`, `mode`, `median` (also `median3`, `median5`, ...),
/// `osK` (K-th smallest), `projK`, `const-bottom`, `const-top`, `squash-max`,
/// a list of minimal true sets such as `[{1,2}]` or `min-true: [{1},{2}]`,
/// and the fixed-arity examples `sum-threshold-switch`, `two-branch`,
/// `anchored-max`.
pub fn parse_function(spec: &str) -> Result<Box<dyn Aggregator>> {
    let spec = spec.trim();
    let unknown = || Error::UnknownFunction(spec.to_string());
    if spec.starts_with('[') || spec.starts_with("min-true:") {
        let (body, n) = match spec.rsplit_once("]:") {
            Some((b, n)) => (format!("{b}]"), Some(n.trim().parse::<usize>().map_err(|_| unknown())?)),
            None => (spec.to_string(), None),
        };
        let alpha = lattice::parse_min_true(&body, n)?;
        return Ok(Box::new(LatticePolynomial::new(alpha)?));
    }
    let (name, arity) = match spec.split_once(':') {
        Some((name, n)) => (name, Some(n.trim().parse::<usize>().map_err(|_| unknown())?)),
        None => (spec, None),
    };
    if arity == Some(0) {
        return Err(Error::Precondition("arity must be at least 1".into()));
    }
    let n = arity.unwrap_or(2);
    let fixed = |k: usize, f: Box<dyn Aggregator>| -> Result<Box<dyn Aggregator>> {
        match arity {
            Some(a) if a != k => Err(Error::ArityMismatch { expected: k, found: a }),
            _ => Ok(f),
        }
    };
    match name {
        "min" => Ok(Box::new(LatticePolynomial::min(n)?)),
        "max" => Ok(Box::new(LatticePolynomial::max(n)?)),
        "mean" => Ok(Box::new(Mean(n))),
        "mode" => Ok(Box::new(Mode(n))),
        "median" => Ok(Box::new(LatticePolynomial::median(arity.unwrap_or(3))?)),
        "const-bottom" => Ok(Box::new(Constant { arity: n, top: false })),
        "const-top" => Ok(Box::new(Constant { arity: n, top: true })),
        "squash-max" => Ok(Box::new(Squashed(LatticePolynomial::max(n)?))),
        "sum-threshold-switch" => fixed(2, Box::new(SumThresholdSwitch)),
        "two-branch" => fixed(2, Box::new(TwoBranch)),
        "anchored-max" => fixed(3, Box::new(AnchoredMax)),
        _ => {
            if let Some(m) = name.strip_prefix("median") {
                let m: usize = m.parse().map_err(|_| unknown())?;
                return fixed(m, Box::new(LatticePolynomial::median(m)?));
            }
            if let Some(k) = name.strip_prefix("os") {
                let k: usize = k.parse().map_err(|_| unknown())?;
                return Ok(Box::new(LatticePolynomial::order_statistic(n, k)?));
            }
            if let Some(k) = name.strip_prefix("proj") {
                let k: usize = k.parse().map_err(|_| unknown())?;
                return Ok(Box::new(LatticePolynomial::projection(n, k)?));
            }
            Err(unknown())
        }
    }
}

/// Checks that a function maps `E^n` into `E` at the given points.
pub fn check_internal_value(v: &Rational, e: IntervalSpec) -> Result<()> {
    if e.contains(v) {
        Ok(())
    } else {
        Err(Error::Evaluation(format!("value {v} is outside the scale {e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_names() {
        assert_eq!(parse_function("median3").unwrap().arity(), 3);
        assert_eq!(parse_function("os2:3").unwrap().arity(), 3);
        assert_eq!(parse_function("[{1,2}]").unwrap().name(), "min-true: [{1,2}]");
        assert_eq!(parse_function("min-true: [{1}]:3").unwrap().arity(), 3);
        assert!(matches!(parse_function("blend"), Err(Error::UnknownFunction(_))));
        assert!(parse_function("two-branch:3").is_err());
    }

    #[test]
    fn two_branch_samples() {
        let grid = [rat(0, 1), rat(1, 2), rat(1, 1)];
        let mut got = Vec::new();
        for a in &grid {
            for b in &grid {
                got.push(TwoBranch.eval(&[a.clone(), b.clone()]).unwrap());
            }
        }
        let want = [rat(1, 1), rat(-2, 1), rat(-1, 1), rat(1, 2), rat(1, 2), rat(-1, 1), rat(0, 1), rat(0, 1), rat(0, 1)];
        assert_eq!(got, want);
    }
}
