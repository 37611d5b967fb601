//! Counterexamples that can be re-checked against the original function.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::chain::{ChainEmbedding, DiscreteTable, Chain};
use crate::error::{Error, Result};
use crate::functions::Aggregator;
use crate::scale::{serde_rational, IntervalSpec, PlBijection, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessKind {
    Invariance,
    CmSingle,
    CmIndependent,
    Monotonicity,
    Smoothness,
}

impl WitnessKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            WitnessKind::Invariance => "invariance",
            WitnessKind::CmSingle => "cm-single",
            WitnessKind::CmIndependent => "cm-independent",
            WitnessKind::Monotonicity => "monotonicity",
            WitnessKind::Smoothness => "smoothness",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "invariance" => Ok(WitnessKind::Invariance),
            "cm-single" => Ok(WitnessKind::CmSingle),
            "cm-independent" => Ok(WitnessKind::CmIndependent),
            "monotonicity" => Ok(WitnessKind::Monotonicity),
            "smoothness" => Ok(WitnessKind::Smoothness),
            other => Err(Error::parse(0, format!("unknown witness kind {other:?}"))),
        }
    }
}

/// One comparison used by an intransitivity certificate: the pair `points`
/// is evaluated, and `transforms` carry it onto a pair of virtual points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Leg {
    #[serde(with = "serde_rational::tuples")]
    pub points: Vec<Vec<Rational>>,
    pub transforms: Vec<PlBijection>,
    #[serde(with = "serde_rational::tuples")]
    pub images: Vec<Vec<Rational>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Evidence {
    /// Invariance: one point and one bijection with `F(φx) ≠ φ(F(x))`.
    /// Comparison: two points whose comparison flips under the bijection
    /// (one shared bijection, or one per coordinate).
    Transform {
        #[serde(with = "serde_rational::tuples")]
        points: Vec<Vec<Rational>>,
        transforms: Vec<PlBijection>,
    },
    /// Three comparisons between virtual points `x, y, z` (legs for `x:y`,
    /// `y:z` and `x:z`) that no real numbers can satisfy together.
    Intransitive { legs: Vec<Leg> },
    /// `lower <= upper` coordinatewise with `F(lower) > F(upper)`.
    Order {
        #[serde(with = "serde_rational::tuples")]
        points: Vec<Vec<Rational>>,
    },
    /// Two neighbouring cells whose outputs are more than one rank apart.
    Step { cells: Vec<Vec<usize>> },
    /// No definitional certificate; the structural check is re-run instead.
    Structural { reason: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub kind: WitnessKind,
    pub evidence: Evidence,
    /// Table cells involved, when the witness comes from a table.
    pub cells: Vec<Vec<usize>>,
    pub observed: String,
    pub required: String,
}

/// What a witness is replayed against.
pub enum ReplayTarget<'a> {
    Function(&'a dyn Aggregator),
    Table(&'a DiscreteTable),
}

pub(crate) fn sign(a: &Rational, b: &Rational) -> Ordering {
    a.cmp(b)
}

pub(crate) fn sign_str(o: Ordering) -> &'static str {
    match o {
        Ordering::Less => "<",
        Ordering::Equal => "=",
        Ordering::Greater => ">",
    }
}

/// Whether three comparisons `x?y`, `y?z`, `x?z` can hold among reals.
pub(crate) fn consistent(xy: Ordering, yz: Ordering, xz: Ordering) -> bool {
    use Ordering::*;
    match (xy, yz) {
        (Equal, s) | (s, Equal) => xz == s,
        (Less, Less) => xz == Less,
        (Greater, Greater) => xz == Greater,
        _ => true,
    }
}

/// Evaluates a table at embedded points: coordinates are located in the
/// canonical embeddings of the input chains.
pub struct TableFunction<'a> {
    table: &'a DiscreteTable,
    inputs: Vec<ChainEmbedding>,
    output: Option<ChainEmbedding>,
}

impl<'a> TableFunction<'a> {
    /// Outputs are points of the scale, through the embedding of the common chain.
    pub fn embedded(table: &'a DiscreteTable, e: IntervalSpec) -> Result<Self> {
        let k = table
            .uniform_size()
            .ok_or_else(|| Error::ChainMismatch("order invariance needs equal input and output chains".into()))?;
        let emb = ChainEmbedding::canonical(Chain::new(k)?, e);
        Ok(TableFunction { table, inputs: vec![emb.clone(); table.arity()], output: Some(emb) })
    }

    /// Outputs are the output ranks themselves.
    pub fn ranked(table: &'a DiscreteTable, e: IntervalSpec) -> Result<Self> {
        let inputs = table
            .input_sizes()
            .iter()
            .map(|&k| Chain::new(k).map(|c| ChainEmbedding::canonical(c, e)))
            .collect::<Result<Vec<_>>>()?;
        Ok(TableFunction { table, inputs, output: None })
    }

    pub fn embedding(&self, i: usize) -> &ChainEmbedding {
        &self.inputs[i]
    }

    /// The embedded point of a cell.
    pub fn point(&self, a: &[usize]) -> Vec<Rational> {
        a.iter().enumerate().map(|(i, &r)| self.inputs[i].value(r).clone()).collect()
    }

    pub fn cell(&self, x: &[Rational]) -> Result<Vec<usize>> {
        if x.len() != self.table.arity() {
            return Err(Error::ArityMismatch { expected: self.table.arity(), found: x.len() });
        }
        x.iter()
            .enumerate()
            .map(|(i, v)| {
                self.inputs[i]
                    .rank_of(v)
                    .ok_or_else(|| Error::Evaluation(format!("{v} is not a point of input chain {}", i + 1)))
            })
            .collect()
    }
}

impl Aggregator for TableFunction<'_> {
    fn arity(&self) -> usize {
        self.table.arity()
    }

    fn eval(&self, x: &[Rational]) -> Result<Rational> {
        let t = self.table.get(&self.cell(x)?);
        Ok(match &self.output {
            Some(emb) => emb.value(t).clone(),
            None => Rational::from_integer(t.into()),
        })
    }

    fn name(&self) -> String {
        "table".into()
    }
}

fn apply_all(transforms: &[PlBijection], x: &[Rational]) -> Result<Vec<Rational>> {
    match transforms.len() {
        1 => Ok(x.iter().map(|v| transforms[0].apply(v)).collect()),
        n if n == x.len() => Ok(x.iter().zip(transforms).map(|(v, t)| t.apply(v)).collect()),
        n => Err(Error::Precondition(format!("{n} transforms for a point of arity {}", x.len()))),
    }
}

impl Witness {
    /// Re-checks the witness definitionally. `Ok(true)` means the violation is
    /// confirmed.
    pub fn replay(&self, target: ReplayTarget<'_>, e: IntervalSpec) -> Result<bool> {
        match target {
            ReplayTarget::Function(f) => self.replay_function(f, e),
            ReplayTarget::Table(t) => match &self.evidence {
                Evidence::Step { cells } => Ok(replay_step(t, cells, self.kind)),
                Evidence::Structural { .. } => crate::meaningfulness::recheck_structural(t, self.kind, e),
                _ => {
                    let f = if self.kind == WitnessKind::Invariance {
                        TableFunction::embedded(t, e)?
                    } else {
                        TableFunction::ranked(t, e)?
                    };
                    self.replay_function(&f, e)
                }
            },
        }
    }

    fn replay_function(&self, f: &dyn Aggregator, e: IntervalSpec) -> Result<bool> {
        let check = |x: &Vec<Rational>| -> Result<()> {
            if x.len() != f.arity() {
                return Err(Error::ArityMismatch { expected: f.arity(), found: x.len() });
            }
            e.check_tuple(x)
        };
        match &self.evidence {
            Evidence::Transform { points, transforms } => {
                points.iter().try_for_each(check)?;
                if self.kind == WitnessKind::CmIndependent && transforms.len() != f.arity() {
                    return Err(Error::Precondition("independent witnesses need one transform per coordinate".into()));
                }
                if self.kind == WitnessKind::CmSingle && transforms.len() != 1 {
                    return Err(Error::Precondition("single witnesses need one transform".into()));
                }
                match self.kind {
                    WitnessKind::Invariance => {
                        let [x] = points.as_slice() else {
                            return Err(Error::Precondition("invariance witnesses carry one point".into()));
                        };
                        let y = f.eval(x)?;
                        e.check_point(&y)?;
                        let moved = f.eval(&apply_all(transforms, x)?)?;
                        Ok(moved != transforms[0].apply(&y))
                    }
                    WitnessKind::CmSingle | WitnessKind::CmIndependent => {
                        let [x, x2] = points.as_slice() else {
                            return Err(Error::Precondition("comparison witnesses carry two points".into()));
                        };
                        let before = sign(&f.eval(x)?, &f.eval(x2)?);
                        let after = sign(&f.eval(&apply_all(transforms, x)?)?, &f.eval(&apply_all(transforms, x2)?)?);
                        Ok(before != after)
                    }
                    _ => Err(Error::Precondition("transform evidence for a non-transform witness".into())),
                }
            }
            Evidence::Intransitive { legs } => {
                if legs.len() != 3 {
                    return Err(Error::Precondition("intransitivity needs three legs".into()));
                }
                let mut signs = Vec::new();
                for leg in legs {
                    if leg.points.len() != 2 || leg.images.len() != 2 {
                        return Err(Error::Precondition("each leg carries two points and two images".into()));
                    }
                    leg.points.iter().try_for_each(check)?;
                    leg.images.iter().try_for_each(|x| e.check_tuple(x))?;
                    for (p, img) in leg.points.iter().zip(&leg.images) {
                        if &apply_all(&leg.transforms, p)? != img {
                            return Err(Error::Precondition("a leg's transform does not reach its images".into()));
                        }
                    }
                    signs.push(sign(&f.eval(&leg.points[0])?, &f.eval(&leg.points[1])?));
                }
                let (x, y, z) = (&legs[0].images[0], &legs[0].images[1], &legs[1].images[1]);
                if &legs[1].images[0] != y || &legs[2].images[0] != x || &legs[2].images[1] != z {
                    return Err(Error::Precondition("legs do not chain through common virtual points".into()));
                }
                Ok(!consistent(signs[0], signs[1], signs[2]))
            }
            Evidence::Order { points } => {
                let [lo, hi] = points.as_slice() else {
                    return Err(Error::Precondition("order witnesses carry two points".into()));
                };
                check(lo)?;
                check(hi)?;
                if lo.iter().zip(hi).any(|(a, b)| a > b) {
                    return Err(Error::Precondition("order witness points are not comparable".into()));
                }
                Ok(f.eval(lo)? > f.eval(hi)?)
            }
            Evidence::Step { .. } | Evidence::Structural { .. } => {
                Err(Error::Precondition("this witness can only be replayed against a table".into()))
            }
        }
    }
}

fn replay_step(t: &DiscreteTable, cells: &[Vec<usize>], kind: WitnessKind) -> bool {
    let [a, b] = cells else { return false };
    if a.len() != t.arity() || b.len() != t.arity() {
        return false;
    }
    let in_range = |c: &Vec<usize>| c.iter().zip(t.input_sizes()).all(|(&r, &k)| r < k);
    let diff: Vec<usize> = (0..a.len()).filter(|&i| a[i] != b[i]).collect();
    if !in_range(a) || !in_range(b) || diff.len() != 1 || b[diff[0]] != a[diff[0]] + 1 {
        return false;
    }
    match kind {
        WitnessKind::Smoothness => t.get(a).abs_diff(t.get(b)) > 1,
        WitnessKind::Monotonicity => t.get(a) > t.get(b),
        _ => false,
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} witness: {} (required: {})", self.kind.as_str(), self.observed, self.required)
    }
}
