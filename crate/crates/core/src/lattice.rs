//! Set functions on subsets of [n] and the lattice polynomials they define.
//!
//! Subsets are bitmasks: bit `i` stands for coordinate `i + 1`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scale::{IntervalSpec, Rational};

/// Largest arity accepted by [`SetFunction`].
pub const MAX_SET_ARITY: usize = 16;
/// Largest arity for which [`enumerate_cn`] runs.
pub const MAX_CN_ARITY: usize = 5;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SetFunction {
    n: usize,
    words: Vec<u64>,
}

impl SetFunction {
    pub fn zero(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_SET_ARITY {
            return Err(Error::SizeLimit(format!("set functions need 1 <= n <= {MAX_SET_ARITY}, got {n}")));
        }
        Ok(SetFunction { n, words: vec![0; (1usize << n).div_ceil(64)] })
    }

    pub fn from_fn(n: usize, f: impl Fn(usize) -> bool) -> Result<Self> {
        let mut s = Self::zero(n)?;
        for mask in 0..1usize << n {
            if f(mask) {
                s.set(mask, true);
            }
        }
        Ok(s)
    }

    /// Builds a set function from the integer whose bit `S` is the value at `S`.
    pub fn from_index(n: usize, index: u64) -> Result<Self> {
        if n > 6 {
            return Err(Error::SizeLimit("truth-table index only covers n <= 6".into()));
        }
        let mut s = Self::zero(n)?;
        s.words[0] = index;
        Ok(s)
    }

    pub fn arity(&self) -> usize {
        self.n
    }

    pub fn get(&self, mask: usize) -> bool {
        self.words[mask / 64] >> (mask % 64) & 1 == 1
    }

    pub fn set(&mut self, mask: usize, v: bool) {
        if v {
            self.words[mask / 64] |= 1 << (mask % 64);
        } else {
            self.words[mask / 64] &= !(1 << (mask % 64));
        }
    }

    fn full(&self) -> usize {
        (1 << self.n) - 1
    }

    pub fn is_nondecreasing(&self) -> bool {
        (0..=self.full()).all(|s| !self.get(s) || (0..self.n).all(|i| self.get(s | 1 << i)))
    }

    pub fn is_constant(&self) -> bool {
        let v = self.get(0);
        (0..=self.full()).all(|s| self.get(s) == v)
    }

    /// Pointwise order.
    pub fn leq(&self, other: &SetFunction) -> bool {
        self.n == other.n && self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn count_true(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    /// `α^d(S) = 1 - α([n] \ S)`.
    pub fn dual(&self) -> SetFunction {
        let full = self.full();
        Self::from_fn(self.n, |s| !self.get(full & !s)).expect("same arity")
    }

    /// The smallest nondecreasing function above the given one.
    pub fn upward_closure(&self) -> SetFunction {
        let mut out = self.clone();
        for i in 0..self.n {
            for s in 0..=self.full() {
                if out.get(s) {
                    out.set(s | 1 << i, true);
                }
            }
        }
        out
    }

    /// Minimal subsets on which the function is true.
    pub fn min_true_sets(&self) -> Vec<usize> {
        let mut sets: Vec<usize> = (0..=self.full())
            .filter(|&s| self.get(s) && (0..self.n).all(|i| s >> i & 1 == 0 || !self.get(s & !(1 << i))))
            .collect();
        sets.sort_by_key(|&s| (s.count_ones(), mask_items(s)));
        sets
    }

    pub fn from_min_true_sets(n: usize, sets: &[usize]) -> Result<Self> {
        let mut s = Self::zero(n)?;
        for &m in sets {
            if m > s.full() {
                return Err(Error::Precondition(format!("subset outside [{n}]")));
            }
            s.set(m, true);
        }
        Ok(s.upward_closure())
    }
}

fn mask_items(s: usize) -> Vec<usize> {
    (0..usize::BITS as usize).filter(|i| s >> i & 1 == 1).collect()
}

fn format_set(s: usize) -> String {
    let items: Vec<String> = mask_items(s).iter().map(|i| (i + 1).to_string()).collect();
    format!("{{{}}}", items.join(","))
}

impl fmt::Display for SetFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sets: Vec<String> = self.min_true_sets().into_iter().map(format_set).collect();
        write!(f, "min-true: [{}]", sets.join(","))
    }
}

/// Parses the list of minimal true sets, `[{1,2},{3}]`, with or without the
/// `min-true:` prefix. The arity is the largest index mentioned unless given.
pub fn parse_min_true(s: &str, arity: Option<usize>) -> Result<SetFunction> {
    let bad = |m: &str| Error::parse(0, format!("bad set-function text {s:?}: {m}"));
    let body = s.trim().strip_prefix("min-true:").unwrap_or(s.trim()).trim();
    let inner = body
        .strip_prefix('[')
        .and_then(|b| b.strip_suffix(']'))
        .ok_or_else(|| bad("expected [..]"))?;
    let mut sets = Vec::new();
    let mut rest = inner.trim();
    while !rest.is_empty() {
        let open = rest.strip_prefix('{').ok_or_else(|| bad("expected {"))?;
        let close = open.find('}').ok_or_else(|| bad("unclosed {"))?;
        let mut mask = 0usize;
        for tok in open[..close].split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let i: usize = tok.parse().map_err(|_| bad("indices must be positive integers"))?;
            if i == 0 || i > MAX_SET_ARITY {
                return Err(bad("index out of range"));
            }
            mask |= 1 << (i - 1);
        }
        sets.push(mask);
        rest = open[close + 1..].trim_start();
        if let Some(r) = rest.strip_prefix(',') {
            rest = r.trim_start();
        }
    }
    let needed = sets.iter().map(|&m| usize::BITS as usize - m.leading_zeros() as usize).max().unwrap_or(0);
    let n = arity.unwrap_or(needed.max(1));
    if needed > n {
        return Err(bad("index exceeds the arity"));
    }
    SetFunction::from_min_true_sets(n, &sets)
}

impl FromStr for SetFunction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_min_true(s, None)
    }
}

impl Serialize for SetFunction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{}:{}", self.n, self))
    }
}

impl<'de> Deserialize<'de> for SetFunction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        let (n, rest) = s.split_once(':').ok_or_else(|| serde::de::Error::custom("missing arity"))?;
        let n: usize = n.parse().map_err(serde::de::Error::custom)?;
        parse_min_true(rest, Some(n)).map_err(serde::de::Error::custom)
    }
}

/// The lattice polynomial `p_α(x) = ∨_{α(S)=1} ∧_{i∈S} x_i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LatticePolynomial {
    alpha: SetFunction,
}

impl LatticePolynomial {
    /// Wraps a nondecreasing, nonconstant set function.
    pub fn new(alpha: SetFunction) -> Result<Self> {
        if !alpha.is_nondecreasing() {
            return Err(Error::NotMonotone(alpha.to_string()));
        }
        if alpha.is_constant() {
            return Err(Error::ConstantNotAllowed(alpha.to_string()));
        }
        Ok(LatticePolynomial { alpha })
    }

    /// Wraps a nondecreasing set function, allowing the constants that the
    /// interval provides.
    pub fn new_in(alpha: SetFunction, e: IntervalSpec) -> Result<Self> {
        if !alpha.is_nondecreasing() {
            return Err(Error::NotMonotone(alpha.to_string()));
        }
        if alpha.is_constant() {
            let ok = if alpha.get(0) { e.has_sup } else { e.has_inf };
            if !ok {
                return Err(Error::ConstantNotAllowed(format!("{alpha} needs an endpoint that {e} lacks")));
            }
        }
        Ok(LatticePolynomial { alpha })
    }

    /// Canonical form of the polynomial with arbitrary DNF coefficients
    /// `raw`: `α(S) = p_raw(1_S)`.
    pub fn canonicalize(raw: &SetFunction) -> Result<Self> {
        Self::new(raw.upward_closure())
    }

    pub fn canonicalize_in(raw: &SetFunction, e: IntervalSpec) -> Result<Self> {
        Self::new_in(raw.upward_closure(), e)
    }

    pub fn alpha(&self) -> &SetFunction {
        &self.alpha
    }

    pub fn arity(&self) -> usize {
        self.alpha.arity()
    }

    pub fn is_constant(&self) -> bool {
        self.alpha.is_constant()
    }

    /// Disjunctive evaluation over any totally ordered values; `bottom` and
    /// `top` stand for the empty join and the empty meet.
    pub fn eval_dnf_with<T: Ord + Clone>(&self, x: &[T], bottom: &T, top: &T) -> T {
        let mut acc = bottom.clone();
        for s in 0..1usize << self.arity() {
            if self.alpha.get(s) {
                let mut m = top.clone();
                for (i, v) in x.iter().enumerate() {
                    if s >> i & 1 == 1 && v < &m {
                        m = v.clone();
                    }
                }
                if m > acc {
                    acc = m;
                }
            }
        }
        acc
    }

    /// Conjunctive evaluation: `∧_{β(S)=0} ∨_{i∈S} x_i` with
    /// `β(S) = α([n] \ S)`.
    pub fn eval_cnf_with<T: Ord + Clone>(&self, x: &[T], bottom: &T, top: &T) -> T {
        let full = (1usize << self.arity()) - 1;
        let mut acc = top.clone();
        for s in 0..=full {
            if !self.alpha.get(full & !s) {
                let mut m = bottom.clone();
                for (i, v) in x.iter().enumerate() {
                    if s >> i & 1 == 1 && v > &m {
                        m = v.clone();
                    }
                }
                if m < acc {
                    acc = m;
                }
            }
        }
        acc
    }

    fn check_input(&self, x: &[Rational]) -> Result<()> {
        if x.len() != self.arity() {
            return Err(Error::ArityMismatch { expected: self.arity(), found: x.len() });
        }
        Ok(())
    }

    pub fn eval_dnf(&self, x: &[Rational]) -> Result<Rational> {
        self.check_input(x)?;
        Ok(self.eval_dnf_with(x, &Rational::from_integer(0.into()), &Rational::from_integer(1.into())))
    }

    pub fn eval_cnf(&self, x: &[Rational]) -> Result<Rational> {
        self.check_input(x)?;
        Ok(self.eval_cnf_with(x, &Rational::from_integer(0.into()), &Rational::from_integer(1.into())))
    }

    /// Evaluation on ranks of a chain with `k` elements.
    pub fn eval_ranks(&self, a: &[usize], k: usize) -> usize {
        self.eval_dnf_with(a, &0, &(k - 1))
    }

    pub fn projection(n: usize, k: usize) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::Precondition(format!("projection index {k} outside 1..={n}")));
        }
        Self::new(SetFunction::from_fn(n, |s| s >> (k - 1) & 1 == 1)?)
    }

    /// The k-th smallest of n values.
    pub fn order_statistic(n: usize, k: usize) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::Precondition(format!("order statistic index {k} outside 1..={n}")));
        }
        Self::new(SetFunction::from_fn(n, |s| s.count_ones() as usize > n - k)?)
    }

    pub fn median(n: usize) -> Result<Self> {
        if n % 2 == 0 {
            return Err(Error::Precondition(format!("median needs an odd arity, got {n}")));
        }
        Self::order_statistic(n, n.div_ceil(2))
    }

    pub fn min(n: usize) -> Result<Self> {
        Self::order_statistic(n, 1)
    }

    pub fn max(n: usize) -> Result<Self> {
        Self::order_statistic(n, n)
    }

    /// `Some(k)` when the polynomial is the k-th order statistic.
    pub fn is_symmetric(&self) -> Option<usize> {
        let n = self.arity();
        (1..=n).find(|&k| {
            let t = n - k + 1;
            (0..1usize << n).all(|s| self.alpha.get(s) == (s.count_ones() as usize >= t))
        })
    }

    pub fn dual(&self) -> LatticePolynomial {
        LatticePolynomial { alpha: self.alpha.dual() }
    }

    pub fn is_weakly_self_dual(&self) -> bool {
        self.alpha.dual() == self.alpha
    }
}

impl fmt::Display for LatticePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.alpha.fmt(f)
    }
}

/// All nondecreasing nonconstant set functions on [n], ascending by truth table.
pub fn enumerate_cn(n: usize) -> Result<Vec<SetFunction>> {
    enumerate_cn_capped(n, MAX_CN_ARITY)
}

pub fn enumerate_cn_capped(n: usize, cap: usize) -> Result<Vec<SetFunction>> {
    if n == 0 {
        return Err(Error::Precondition("arity must be at least 1".into()));
    }
    if n > cap || n > 6 {
        return Err(Error::SizeLimit(format!("C_n enumeration is capped at n = {}, got {n}", cap.min(6))));
    }
    let mut out: Vec<SetFunction> = if n <= 4 {
        (0..1u64 << (1 << n))
            .map(|i| SetFunction::from_index(n, i).expect("small arity"))
            .filter(|s| s.is_nondecreasing() && !s.is_constant())
            .collect()
    } else {
        monotone_functions(n).into_iter().filter(|s| !s.is_constant()).collect()
    };
    out.sort_by_key(|s| s.words[0]);
    Ok(out)
}

/// Monotone Boolean functions, built from pairs `f0 <= f1` one variable at a time.
fn monotone_functions(n: usize) -> Vec<SetFunction> {
    let mut level: Vec<u64> = vec![0b0, 0b1];
    let mut m = 0;
    while m < n {
        let width = 1u32 << m;
        let mut next = Vec::new();
        for &f0 in &level {
            for &f1 in &level {
                if f0 & !f1 == 0 {
                    next.push(f0 | f1 << width);
                }
            }
        }
        level = next;
        m += 1;
    }
    // at m = 0 the two functions are on the single empty set
    level.sort_unstable();
    level.dedup();
    level.into_iter().map(|w| SetFunction::from_index(n, w).expect("small arity")).collect()
}

/// Set functions of `C_n[E]`: `C_n` plus the constants the interval allows.
pub fn enumerate_cn_in(n: usize, e: IntervalSpec) -> Result<Vec<SetFunction>> {
    let mut out = Vec::new();
    if e.has_inf {
        out.push(SetFunction::zero(n)?);
    }
    out.extend(enumerate_cn(n)?);
    if e.has_sup {
        out.push(SetFunction::from_fn(n, |_| true)?);
    }
    Ok(out)
}

/// The smallest most frequent value.
pub fn mode<T: Ord + Clone>(x: &[T]) -> Option<T> {
    let mut sorted: Vec<&T> = x.iter().collect();
    sorted.sort();
    let mut best: Option<(&T, usize)> = None;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        if best.is_none_or(|(_, c)| j - i > c) {
            best = Some((sorted[i], j - i));
        }
        i = j;
    }
    best.map(|(v, _)| v.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scale::rat;

    #[test]
    fn cn_counts() {
        let counts: Vec<usize> = (1..=5).map(|n| enumerate_cn(n).unwrap().len()).collect();
        assert_eq!(counts, vec![1, 4, 18, 166, 7579]);
    }

    #[test]
    fn absorption_canonicalises_to_projection() {
        let raw = parse_min_true("[{1},{1,2}]", Some(2)).unwrap();
        let p = LatticePolynomial::canonicalize(&raw).unwrap();
        assert_eq!(p, LatticePolynomial::projection(2, 1).unwrap());
    }

    #[test]
    fn order_statistic_values() {
        let x = [rat(1, 5), rat(3, 5), rat(2, 5)];
        let os2 = LatticePolynomial::order_statistic(3, 2).unwrap();
        assert_eq!(os2.eval_dnf(&x).unwrap(), rat(2, 5));
        assert_eq!(os2.eval_cnf(&x).unwrap(), rat(2, 5));
        assert_eq!(os2.is_symmetric(), Some(2));
        assert!(LatticePolynomial::median(3).unwrap().is_weakly_self_dual());
        assert!(LatticePolynomial::median(4).is_err());
    }

    #[test]
    fn constants_need_endpoints() {
        let zero = SetFunction::zero(2).unwrap();
        assert!(LatticePolynomial::new(zero.clone()).is_err());
        assert!(LatticePolynomial::new_in(zero.clone(), IntervalSpec::RIGHT_CLOSED).is_err());
        let p = LatticePolynomial::new_in(zero, IntervalSpec::LEFT_CLOSED).unwrap();
        assert_eq!(p.eval_dnf(&[rat(1, 2), rat(1, 3)]).unwrap(), rat(0, 1));
    }

    #[test]
    fn text_round_trip() {
        let p = LatticePolynomial::min(2).unwrap();
        assert_eq!(p.to_string(), "min-true: [{1,2}]");
        assert_eq!(p.alpha().to_string().parse::<SetFunction>().unwrap(), *p.alpha());
        let top = SetFunction::from_fn(2, |_| true).unwrap();
        assert_eq!(top.to_string(), "min-true: [{}]");
        assert_eq!(parse_min_true("min-true: [{}]", Some(2)).unwrap(), top);
    }

    #[test]
    fn mode_breaks_ties_low() {
        let a = [rat(1, 5), rat(1, 5), rat(3, 10), rat(3, 10), rat(3, 10)];
        let b = [rat(1, 5), rat(1, 5), rat(3, 10), rat(3, 10), rat(2, 5)];
        assert_eq!(mode(&a), Some(rat(3, 10)));
        assert_eq!(mode(&b), Some(rat(1, 5)));
    }
}
