//! The ordinal scale: an interval of the rationals with its endpoints normalised
//! to 0 and 1, and the order automorphisms acting on it.
//!
//! Every automorphism used here is piecewise linear with finitely many
//! rational breakpoints, so all arithmetic is exact.

use std::fmt;
use std::str::FromStr;

use num::{BigInt, BigRational, One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Builds the rational `p/q`.
pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Formats a rational as `p/q` (always with a denominator).
pub fn format_rational(x: &Rational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Parses `p/q`, `p` or a finite decimal such as `0.25`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::parse(0, format!("not a rational: {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int.starts_with('-');
        let int_part: BigInt = if int.is_empty() || int == "-" {
            BigInt::zero()
        } else {
            int.parse().map_err(|_| bad())?
        };
        let scale = num::pow(BigInt::from(10), frac.len());
        let frac_part: BigInt = frac.parse().map_err(|_| bad())?;
        let mut value = Rational::from_integer(int_part.abs()) + Rational::new(frac_part, scale);
        if negative {
            value = -value;
        }
        return Ok(value);
    }
    let p: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(p))
}

/// Which endpoints of the normalised interval belong to the scale.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IntervalSpec {
    pub has_inf: bool,
    pub has_sup: bool,
}

impl IntervalSpec {
    pub const OPEN: IntervalSpec = IntervalSpec { has_inf: false, has_sup: false };
    pub const LEFT_CLOSED: IntervalSpec = IntervalSpec { has_inf: true, has_sup: false };
    pub const RIGHT_CLOSED: IntervalSpec = IntervalSpec { has_inf: false, has_sup: true };
    pub const CLOSED: IntervalSpec = IntervalSpec { has_inf: true, has_sup: true };

    pub fn new(has_inf: bool, has_sup: bool) -> Self {
        IntervalSpec { has_inf, has_sup }
    }

    /// All four shapes, in a fixed order.
    pub fn all() -> [IntervalSpec; 4] {
        [Self::OPEN, Self::LEFT_CLOSED, Self::RIGHT_CLOSED, Self::CLOSED]
    }

    /// Number of endpoints in the scale, `|B[E]|`.
    pub fn boundary_count(&self) -> usize {
        self.has_inf as usize + self.has_sup as usize
    }

    pub fn contains(&self, x: &Rational) -> bool {
        if x.is_zero() {
            self.has_inf
        } else if x.is_one() {
            self.has_sup
        } else {
            x.is_positive() && x < &Rational::one()
        }
    }

    pub fn check_point(&self, x: &Rational) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::PointOutsideDomain(format_rational(x), self.to_string()))
        }
    }

    pub fn check_tuple(&self, x: &[Rational]) -> Result<()> {
        x.iter().try_for_each(|v| self.check_point(v))
    }

    pub fn name(&self) -> &'static str {
        match (self.has_inf, self.has_sup) {
            (false, false) => "open",
            (true, false) => "left-closed",
            (false, true) => "right-closed",
            (true, true) => "closed",
        }
    }
}

impl fmt::Display for IntervalSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for IntervalSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "open" | "(0,1)" => Ok(Self::OPEN),
            "left-closed" | "[0,1)" => Ok(Self::LEFT_CLOSED),
            "right-closed" | "(0,1]" => Ok(Self::RIGHT_CLOSED),
            "closed" | "[0,1]" => Ok(Self::CLOSED),
            other => Err(Error::InvalidInterval(format!(
                "unknown shape {other:?}; expected open, left-closed, right-closed or closed"
            ))),
        }
    }
}

/// A strictly increasing piecewise linear bijection of [0,1].
///
/// The breakpoint list always starts at (0,0), ends at (1,1) and contains no
/// redundant collinear points, so equal maps have equal representations.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PlBijection {
    points: Vec<(Rational, Rational)>,
}

impl PlBijection {
    pub fn identity() -> Self {
        PlBijection { points: vec![(Rational::zero(), Rational::zero()), (Rational::one(), Rational::one())] }
    }

    /// Validates a full breakpoint list.
    pub fn new(points: Vec<(Rational, Rational)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidTransform("need at least two breakpoints".into()));
        }
        let (first, last) = (&points[0], &points[points.len() - 1]);
        if !first.0.is_zero() || !first.1.is_zero() {
            return Err(Error::InvalidTransform("first breakpoint must be (0,0)".into()));
        }
        if !last.0.is_one() || !last.1.is_one() {
            return Err(Error::InvalidTransform("last breakpoint must be (1,1)".into()));
        }
        for w in points.windows(2) {
            if w[0].0 >= w[1].0 || w[0].1 >= w[1].1 {
                return Err(Error::InvalidTransform(format!(
                    "breakpoints not strictly increasing at ({}, {})",
                    format_rational(&w[1].0),
                    format_rational(&w[1].1)
                )));
            }
        }
        Ok(Self::simplify(points))
    }

    /// The bijection interpolating the given pairs, with (0,0) and (1,1) added.
    /// Pairs must be order-consistent; duplicates are allowed.
    pub fn through(pairs: &[(Rational, Rational)]) -> Result<Self> {
        let mut pts: Vec<(Rational, Rational)> = pairs.to_vec();
        pts.push((Rational::zero(), Rational::zero()));
        pts.push((Rational::one(), Rational::one()));
        pts.sort();
        pts.dedup();
        for w in pts.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::InvalidTransform(format!(
                    "{} sent to two values",
                    format_rational(&w[0].0)
                )));
            }
        }
        Self::new(pts)
    }

    fn simplify(points: Vec<(Rational, Rational)>) -> Self {
        let mut out: Vec<(Rational, Rational)> = Vec::with_capacity(points.len());
        for p in points {
            while out.len() >= 2 {
                let a = &out[out.len() - 2];
                let b = &out[out.len() - 1];
                let collinear = (&b.1 - &a.1) * (&p.0 - &a.0) == (&p.1 - &a.1) * (&b.0 - &a.0);
                if collinear {
                    out.pop();
                } else {
                    break;
                }
            }
            out.push(p);
        }
        PlBijection { points: out }
    }

    pub fn breakpoints(&self) -> &[(Rational, Rational)] {
        &self.points
    }

    pub fn is_identity(&self) -> bool {
        self.points.len() == 2
    }

    pub fn apply(&self, x: &Rational) -> Rational {
        Self::interpolate(&self.points, x, false)
    }

    fn interpolate(points: &[(Rational, Rational)], x: &Rational, inverse: bool) -> Rational {
        let key = |p: &(Rational, Rational)| if inverse { p.1.clone() } else { p.0.clone() };
        let val = |p: &(Rational, Rational)| if inverse { p.0.clone() } else { p.1.clone() };
        if x <= &key(&points[0]) {
            return val(&points[0]) + (x - key(&points[0]));
        }
        for w in points.windows(2) {
            let (x0, x1) = (key(&w[0]), key(&w[1]));
            if x <= &x1 {
                let (y0, y1) = (val(&w[0]), val(&w[1]));
                return &y0 + (&y1 - &y0) * (x - &x0) / (&x1 - &x0);
            }
        }
        let last = &points[points.len() - 1];
        val(last) + (x - key(last))
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &PlBijection) -> PlBijection {
        let mut xs: Vec<Rational> = other.points.iter().map(|p| p.0.clone()).collect();
        xs.extend(self.points.iter().map(|p| Self::interpolate(&other.points, &p.0, true)));
        xs.sort();
        xs.dedup();
        let points = xs
            .into_iter()
            .map(|x| {
                let y = self.apply(&other.apply(&x));
                (x, y)
            })
            .collect();
        Self::simplify(points)
    }

    pub fn invert(&self) -> PlBijection {
        PlBijection { points: self.points.iter().map(|(x, y)| (y.clone(), x.clone())).collect() }
    }

    /// A random bijection with `budget` interior breakpoints, deterministic in
    /// `seed`. Budget 0 gives the identity.
    pub fn random(seed: u64, budget: usize) -> PlBijection {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::random_with(&mut rng, budget)
    }

    pub(crate) fn random_with<R: Rng>(rng: &mut R, budget: usize) -> PlBijection {
        if budget == 0 {
            return Self::identity();
        }
        let denom = 4 * (budget as i64 + 1) * rng.gen_range(1..=8);
        let draw = |rng: &mut R| -> Vec<Rational> {
            let mut v: Vec<i64> = Vec::with_capacity(budget);
            while v.len() < budget {
                let c = rng.gen_range(1..denom);
                if !v.contains(&c) {
                    v.push(c);
                }
            }
            v.sort_unstable();
            v.into_iter().map(|c| rat(c, denom)).collect()
        };
        let xs = draw(rng);
        let ys = draw(rng);
        let mut points = vec![(Rational::zero(), Rational::zero())];
        points.extend(xs.into_iter().zip(ys));
        points.push((Rational::one(), Rational::one()));
        Self::simplify(points)
    }
}

impl fmt::Display for PlBijection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .points
            .iter()
            .map(|(x, y)| format!("({},{})", format_rational(x), format_rational(y)))
            .collect();
        f.write_str(&parts.join(" "))
    }
}

impl FromStr for PlBijection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut points = Vec::new();
        for tok in s.split_whitespace() {
            let inner = tok
                .strip_prefix('(')
                .and_then(|t| t.strip_suffix(')'))
                .ok_or_else(|| Error::InvalidTransform(format!("bad breakpoint {tok:?}")))?;
            let (x, y) = inner
                .split_once(',')
                .ok_or_else(|| Error::InvalidTransform(format!("bad breakpoint {tok:?}")))?;
            points.push((parse_rational(x)?, parse_rational(y)?));
        }
        PlBijection::new(points)
    }
}

impl Serialize for PlBijection {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for PlBijection {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Serde adapters storing rationals as `p/q` strings.
pub mod serde_rational {
    use super::*;

    pub fn serialize<S: serde::Serializer>(x: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(x))
    }

    pub fn deserialize<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }

    pub mod tuples {
        use super::*;

        pub fn serialize<S: serde::Serializer>(
            xs: &[Vec<Rational>],
            s: S,
        ) -> std::result::Result<S::Ok, S::Error> {
            let v: Vec<Vec<String>> = xs.iter().map(|t| t.iter().map(format_rational).collect()).collect();
            v.serialize(s)
        }

        pub fn deserialize<'de, D: serde::Deserializer<'de>>(
            d: D,
        ) -> std::result::Result<Vec<Vec<Rational>>, D::Error> {
            let v: Vec<Vec<String>> = Vec::deserialize(d)?;
            v.into_iter()
                .map(|t| t.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()
                .map_err(serde::de::Error::custom)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invert_swaps_coordinates() {
        let phi = PlBijection::new(vec![(rat(0, 1), rat(0, 1)), (rat(1, 2), rat(1, 4)), (rat(1, 1), rat(1, 1))]).unwrap();
        let inv = phi.invert();
        assert_eq!(inv.breakpoints()[1], (rat(1, 4), rat(1, 2)));
        assert!(phi.compose(&inv).is_identity());
        assert_eq!(phi.apply(&rat(3, 4)), rat(5, 8));
    }

    #[test]
    fn rejects_decreasing_breakpoints() {
        let r = PlBijection::new(vec![(rat(0, 1), rat(0, 1)), (rat(1, 2), rat(3, 4)), (rat(1, 3), rat(4, 5)), (rat(1, 1), rat(1, 1))]);
        assert!(matches!(r, Err(Error::InvalidTransform(_))));
    }

    #[test]
    fn random_is_deterministic() {
        assert_eq!(PlBijection::random(9, 3), PlBijection::random(9, 3));
        assert!(PlBijection::random(9, 0).is_identity());
    }

    #[test]
    fn parses_rationals() {
        assert_eq!(parse_rational("3/4").unwrap(), rat(3, 4));
        assert_eq!(parse_rational("0.25").unwrap(), rat(1, 4));
        assert_eq!(parse_rational("-2").unwrap(), rat(-2, 1));
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn text_round_trip() {
        let phi = PlBijection::random(3, 4);
        assert_eq!(phi.to_string().parse::<PlBijection>().unwrap(), phi);
    }

    #[test]
    fn membership_respects_endpoints() {
        assert!(!IntervalSpec::OPEN.contains(&rat(0, 1)));
        assert!(IntervalSpec::LEFT_CLOSED.contains(&rat(0, 1)));
        assert!(!IntervalSpec::LEFT_CLOSED.contains(&rat(1, 1)));
        assert!(IntervalSpec::CLOSED.contains(&rat(1, 1)));
        assert!(!IntervalSpec::CLOSED.contains(&rat(3, 2)));
    }
}
