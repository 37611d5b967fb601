//! Orbits of E^n under the diagonal action of the order automorphisms, and
//! strong orbits under the product action.
//!
//! An orbit is an ordered set partition of the coordinates (the blocks of equal
//! values, listed from smallest to largest) together with flags saying whether
//! the first block sits on the infimum and the last block on the supremum.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scale::{rat, IntervalSpec, Rational};

/// Default largest arity for full orbit enumeration.
pub const MAX_ENUM_ARITY: usize = 12;
/// Default largest number of orbits materialised by one enumeration.
pub const MAX_ENUM_ITEMS: u128 = 5_000_000;

/// Position of a single coordinate relative to the boundary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Bottom,
    Interior,
    Top,
}

impl Level {
    pub fn as_str(&self) -> &'static str {
        match self {
            Level::Bottom => "inf",
            Level::Interior => "int",
            Level::Top => "sup",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Orbit {
    blocks: Vec<Vec<usize>>,
    anchored_bottom: bool,
    anchored_top: bool,
}

impl Orbit {
    /// Builds an orbit from 0-based blocks, validating that they partition `0..n`.
    pub fn new(blocks: Vec<Vec<usize>>, anchored_bottom: bool, anchored_top: bool) -> Result<Self> {
        let n: usize = blocks.iter().map(Vec::len).sum();
        let mut seen = vec![false; n];
        for b in &blocks {
            if b.is_empty() {
                return Err(Error::Precondition("orbit blocks must be nonempty".into()));
            }
            for &i in b {
                if i >= n || seen[i] {
                    return Err(Error::Precondition("orbit blocks must partition the coordinates".into()));
                }
                seen[i] = true;
            }
        }
        if blocks.len() == 1 && anchored_bottom && anchored_top {
            return Err(Error::Precondition("a single block cannot sit on both endpoints".into()));
        }
        let mut blocks = blocks;
        for b in &mut blocks {
            b.sort_unstable();
        }
        Ok(Orbit { blocks, anchored_bottom, anchored_top })
    }

    /// The orbit of a tuple of ordered values; `bottom`/`top` say which values
    /// are the included endpoints.
    pub fn of_values<T: Ord>(values: &[T], bottom: impl Fn(&T) -> bool, top: impl Fn(&T) -> bool) -> Orbit {
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by(|&a, &b| values[a].cmp(&values[b]).then(a.cmp(&b)));
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let mut prev: Option<usize> = None;
        for i in order {
            match prev {
                Some(p) if values[p] == values[i] => blocks.last_mut().unwrap().push(i),
                _ => blocks.push(vec![i]),
            }
            prev = Some(i);
        }
        let anchored_bottom = blocks.first().is_some_and(|b| bottom(&values[b[0]]));
        let anchored_top = blocks.last().is_some_and(|b| top(&values[b[0]]));
        Orbit { blocks, anchored_bottom, anchored_top }
    }

    /// The orbit of a tuple of ranks in a chain of `k` ranks embedded in `e`.
    pub fn of_ranks(ranks: &[usize], k: usize, e: IntervalSpec) -> Orbit {
        Orbit::of_values(ranks, |&r| e.has_inf && r == 0, |&r| e.has_sup && r + 1 == k)
    }

    pub fn arity(&self) -> usize {
        self.blocks.iter().map(Vec::len).sum()
    }

    /// Blocks of 0-based coordinate indices, smallest value first.
    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn anchored_bottom(&self) -> bool {
        self.anchored_bottom
    }

    pub fn anchored_top(&self) -> bool {
        self.anchored_top
    }

    /// Index of the block containing coordinate `i`.
    pub fn block_of(&self, i: usize) -> usize {
        self.blocks.iter().position(|b| b.contains(&i)).expect("coordinate out of range")
    }

    /// Level of block `b`.
    pub fn block_level(&self, b: usize) -> Level {
        if b == 0 && self.anchored_bottom {
            Level::Bottom
        } else if b + 1 == self.blocks.len() && self.anchored_top {
            Level::Top
        } else {
            Level::Interior
        }
    }

    /// Number of blocks taking interior values.
    pub fn interior_blocks(&self) -> usize {
        self.blocks.len() - self.anchored_bottom as usize - self.anchored_top as usize
    }

    /// The level of coordinate `i`.
    pub fn projection(&self, i: usize) -> Result<Level> {
        if i >= self.arity() {
            return Err(Error::ArityMismatch { expected: self.arity(), found: i + 1 });
        }
        Ok(self.block_level(self.block_of(i)))
    }

    pub fn strong(&self) -> StrongOrbit {
        let mut coords = vec![Level::Interior; self.arity()];
        for (b, block) in self.blocks.iter().enumerate() {
            for &i in block {
                coords[i] = self.block_level(b);
            }
        }
        StrongOrbit { coords }
    }

    /// Whether this orbit is admissible for the interval shape.
    pub fn fits(&self, e: IntervalSpec) -> bool {
        (!self.anchored_bottom || e.has_inf) && (!self.anchored_top || e.has_sup)
    }

    /// The sub-pattern on the given coordinates, renumbered `0..indices.len()`
    /// in the order given.
    pub fn restrict(&self, indices: &[usize]) -> Orbit {
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let mut first_kept = None;
        let mut last_kept = 0;
        for (b, block) in self.blocks.iter().enumerate() {
            let kept: Vec<usize> =
                indices.iter().enumerate().filter(|(_, i)| block.contains(i)).map(|(j, _)| j).collect();
            if !kept.is_empty() {
                first_kept.get_or_insert(b);
                last_kept = b;
                blocks.push(kept);
            }
        }
        let anchored_bottom = self.anchored_bottom && first_kept == Some(0);
        let anchored_top = self.anchored_top && last_kept + 1 == self.blocks.len() && first_kept.is_some();
        Orbit { blocks, anchored_bottom, anchored_top }
    }

    /// A canonical point of the orbit: blocks placed evenly in the scale.
    pub fn representative(&self) -> Vec<Rational> {
        let m = self.blocks.len();
        let lo = if self.anchored_bottom { 0 } else { 1 };
        let denom = (m - 1 + lo + if self.anchored_top { 0 } else { 1 }) as i64;
        let mut x = vec![Rational::zero(); self.arity()];
        for (b, block) in self.blocks.iter().enumerate() {
            let v = if denom == 0 { rat(1, 2) } else { rat((b + lo) as i64, denom) };
            for &i in block {
                x[i] = v.clone();
            }
        }
        x
    }

    /// Coordinate-wise comparison of the induced levels.
    pub fn leq(&self, other: &Orbit) -> Result<bool> {
        self.strong().leq(&other.strong())
    }

    fn sort_key(&self) -> (usize, &Vec<Vec<usize>>, bool, bool) {
        (self.blocks.len(), &self.blocks, self.anchored_bottom, self.anchored_top)
    }
}

impl PartialOrd for Orbit {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Orbit {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

/// The orbit containing `x`.
pub fn pattern_of(x: &[Rational], e: IntervalSpec) -> Result<Orbit> {
    e.check_tuple(x)?;
    Ok(Orbit::of_values(x, |v| v.is_zero(), |v| v.is_one()))
}

/// All orbits of E^n in canonical order.
pub fn enumerate_orbits(n: usize, e: IntervalSpec) -> Result<Vec<Orbit>> {
    enumerate_orbits_capped(n, e, MAX_ENUM_ARITY, MAX_ENUM_ITEMS)
}

/// Number of orbits of E^n.
pub fn orbit_count(n: usize, e: IntervalSpec) -> u128 {
    if n == 0 {
        return 1;
    }
    let anchors = (1 + e.has_inf as u128) * (1 + e.has_sup as u128);
    fubini(n) * anchors - (e.has_inf && e.has_sup) as u128
}

/// Ordered Bell numbers.
pub fn fubini(n: usize) -> u128 {
    let mut binom = vec![vec![0u128; n + 1]; n + 1];
    for i in 0..=n {
        binom[i][0] = 1;
        for j in 1..=i {
            binom[i][j] = binom[i - 1][j - 1] + if j < i { binom[i - 1][j] } else { 0 };
        }
    }
    let mut a = vec![0u128; n + 1];
    a[0] = 1;
    for m in 1..=n {
        a[m] = (1..=m).map(|j| binom[m][j] * a[m - j]).sum();
    }
    a[n]
}

pub fn enumerate_orbits_capped(n: usize, e: IntervalSpec, max_arity: usize, max_items: u128) -> Result<Vec<Orbit>> {
    if n == 0 {
        return Err(Error::Precondition("arity must be at least 1".into()));
    }
    if n > max_arity {
        return Err(Error::SizeLimit(format!("orbit enumeration is capped at n = {max_arity}, got {n}")));
    }
    let count = orbit_count(n, e);
    if count > max_items {
        return Err(Error::SizeLimit(format!("{count} orbits exceed the limit of {max_items}")));
    }
    let mut out = Vec::with_capacity(count as usize);
    for blocks in ordered_partitions(n) {
        let single = blocks.len() == 1;
        for bottom in [false, true] {
            for top in [false, true] {
                if (bottom && !e.has_inf) || (top && !e.has_sup) || (single && bottom && top) {
                    continue;
                }
                out.push(Orbit { blocks: blocks.clone(), anchored_bottom: bottom, anchored_top: top });
            }
        }
    }
    out.sort();
    Ok(out)
}

/// All ordered set partitions of `0..n` (weak orders), unsorted.
pub fn ordered_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    fn go(remaining: u32, current: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        if remaining == 0 {
            out.push(current.clone());
            return;
        }
        let mut sub = remaining;
        while sub != 0 {
            let block: Vec<usize> = (0..32).filter(|i| sub >> i & 1 == 1).collect();
            current.push(block);
            go(remaining & !sub, current, out);
            current.pop();
            sub = (sub - 1) & remaining;
        }
    }
    let mut out = Vec::new();
    go(((1u64 << n) - 1) as u32, &mut Vec::new(), &mut out);
    out
}

impl fmt::Display for Orbit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.anchored_bottom {
            f.write_str("inf=")?;
        }
        for (b, block) in self.blocks.iter().enumerate() {
            if b > 0 {
                f.write_str("<")?;
            }
            let items: Vec<String> = block.iter().map(|i| (i + 1).to_string()).collect();
            write!(f, "{{{}}}", items.join(","))?;
        }
        if self.anchored_top {
            f.write_str("=sup")?;
        }
        Ok(())
    }
}

impl FromStr for Orbit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |m: &str| Error::parse(0, format!("bad orbit {s:?}: {m}"));
        let mut body = s.trim();
        let anchored_bottom = body.starts_with("inf=");
        if anchored_bottom {
            body = &body[4..];
        }
        let anchored_top = body.ends_with("=sup");
        if anchored_top {
            body = &body[..body.len() - 4];
        }
        let mut blocks = Vec::new();
        for part in body.split('<') {
            let inner = part
                .strip_prefix('{')
                .and_then(|p| p.strip_suffix('}'))
                .ok_or_else(|| bad("expected {..} blocks"))?;
            let block = inner
                .split(',')
                .map(|t| t.trim().parse::<usize>().ok().filter(|&i| i >= 1).map(|i| i - 1))
                .collect::<Option<Vec<usize>>>()
                .ok_or_else(|| bad("block entries must be positive integers"))?;
            blocks.push(block);
        }
        let orbit = Orbit::new(blocks, anchored_bottom, anchored_top).map_err(|e| bad(&e.to_string()))?;
        if orbit.to_string() != s.trim() {
            return Err(bad("blocks must be listed in increasing index order"));
        }
        Ok(orbit)
    }
}

impl Serialize for Orbit {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Orbit {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// One boundary-status level per coordinate.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StrongOrbit {
    coords: Vec<Level>,
}

impl StrongOrbit {
    pub fn new(coords: Vec<Level>) -> Self {
        StrongOrbit { coords }
    }

    pub fn of_ranks(ranks: &[usize], sizes: &[usize], e: IntervalSpec) -> StrongOrbit {
        let coords = ranks
            .iter()
            .zip(sizes)
            .map(|(&r, &k)| {
                if e.has_inf && r == 0 {
                    Level::Bottom
                } else if e.has_sup && r + 1 == k {
                    Level::Top
                } else {
                    Level::Interior
                }
            })
            .collect();
        StrongOrbit { coords }
    }

    pub fn arity(&self) -> usize {
        self.coords.len()
    }

    pub fn levels(&self) -> &[Level] {
        &self.coords
    }

    pub fn fits(&self, e: IntervalSpec) -> bool {
        self.coords.iter().all(|l| match l {
            Level::Bottom => e.has_inf,
            Level::Top => e.has_sup,
            Level::Interior => true,
        })
    }

    pub fn leq(&self, other: &StrongOrbit) -> Result<bool> {
        if self.arity() != other.arity() {
            return Err(Error::ArityMismatch { expected: self.arity(), found: other.arity() });
        }
        Ok(self.coords.iter().zip(&other.coords).all(|(a, b)| a <= b))
    }

    /// A canonical point: interior coordinates at 1/2.
    pub fn representative(&self) -> Vec<Rational> {
        self.coords
            .iter()
            .map(|l| match l {
                Level::Bottom => rat(0, 1),
                Level::Interior => rat(1, 2),
                Level::Top => rat(1, 1),
            })
            .collect()
    }
}

impl fmt::Display for StrongOrbit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<&str> = self.coords.iter().map(Level::as_str).collect();
        write!(f, "({})", parts.join(","))
    }
}

pub fn strong_pattern_of(x: &[Rational], e: IntervalSpec) -> Result<StrongOrbit> {
    Ok(pattern_of(x, e)?.strong())
}

/// The strong orbit containing the orbit `o`.
pub fn strong_orbit_of(o: &Orbit) -> StrongOrbit {
    o.strong()
}

/// All strong orbits of E^n, lexicographic in the levels.
pub fn enumerate_strong_orbits(n: usize, e: IntervalSpec) -> Result<Vec<StrongOrbit>> {
    if n == 0 {
        return Err(Error::Precondition("arity must be at least 1".into()));
    }
    let mut levels = vec![];
    if e.has_inf {
        levels.push(Level::Bottom);
    }
    levels.push(Level::Interior);
    if e.has_sup {
        levels.push(Level::Top);
    }
    let total = (levels.len() as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if total > MAX_ENUM_ITEMS {
        return Err(Error::SizeLimit(format!("{total} strong orbits exceed the limit of {MAX_ENUM_ITEMS}")));
    }
    let mut out = vec![StrongOrbit { coords: vec![] }];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|s| {
                levels.iter().map(move |&l| {
                    let mut c = s.coords.clone();
                    c.push(l);
                    StrongOrbit { coords: c }
                })
            })
            .collect();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_small_cases() {
        assert_eq!(enumerate_orbits(2, IntervalSpec::CLOSED).unwrap().len(), 11);
        assert_eq!(enumerate_orbits(2, IntervalSpec::OPEN).unwrap().len(), 3);
        assert_eq!(enumerate_orbits(1, IntervalSpec::CLOSED).unwrap().len(), 3);
        assert_eq!(enumerate_strong_orbits(2, IntervalSpec::CLOSED).unwrap().len(), 9);
        assert_eq!(enumerate_strong_orbits(3, IntervalSpec::LEFT_CLOSED).unwrap().len(), 8);
    }

    #[test]
    fn text_form() {
        let o = pattern_of(&[rat(0, 1), rat(0, 1), rat(1, 2)], IntervalSpec::CLOSED).unwrap();
        assert_eq!(o.to_string(), "inf={1,2}<{3}");
        assert_eq!("inf={1,2}<{3}".parse::<Orbit>().unwrap(), o);
        let o = pattern_of(&[rat(1, 3), rat(1, 1)], IntervalSpec::CLOSED).unwrap();
        assert_eq!(o.to_string(), "{1}<{2}=sup");
    }

    #[test]
    fn rejects_points_outside() {
        assert!(matches!(pattern_of(&[rat(0, 1)], IntervalSpec::OPEN), Err(Error::PointOutsideDomain(..))));
    }

    #[test]
    fn projection_levels() {
        let o: Orbit = "inf={1,2}<{3}".parse().unwrap();
        assert_eq!(o.projection(0).unwrap(), Level::Bottom);
        assert_eq!(o.projection(2).unwrap(), Level::Interior);
        assert!(o.projection(3).is_err());
    }

    #[test]
    fn restriction_keeps_anchors() {
        let o: Orbit = "inf={1}<{2,4}<{3}=sup".parse().unwrap();
        assert_eq!(o.restrict(&[1, 2]).to_string(), "{1}<{2}=sup");
        assert_eq!(o.restrict(&[3, 0]).to_string(), "inf={2}<{1}");
    }

    #[test]
    fn enumeration_cap() {
        assert!(matches!(enumerate_orbits(13, IntervalSpec::OPEN), Err(Error::SizeLimit(_))));
    }

    #[test]
    fn representative_lies_in_orbit() {
        for e in IntervalSpec::all() {
            for o in enumerate_orbits(3, e).unwrap() {
                assert_eq!(pattern_of(&o.representative(), e).unwrap(), o);
            }
        }
    }
}
