//! Order invariance of tables: on each orbit the output is either a fixed
//! coordinate or a fixed endpoint.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::chain::DiscreteTable;
use crate::error::{Error, Result};
use crate::functions::Aggregator;
use crate::orbits::{pattern_of, Orbit};
use crate::scale::{format_rational, IntervalSpec, PlBijection, Rational};

use super::witness::{Evidence, TableFunction, Witness, WitnessKind};
use super::Verdict;

/// What an order invariant function returns on one orbit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "coordinate")]
pub enum OrbitValue {
    /// The value of a coordinate (0-based).
    Projection(usize),
    Bottom,
    Top,
}

impl fmt::Display for OrbitValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrbitValue::Projection(i) => write!(f, "proj {}", i + 1),
            OrbitValue::Bottom => f.write_str("inf"),
            OrbitValue::Top => f.write_str("sup"),
        }
    }
}

/// An order invariant function given orbit by orbit. Orbits not listed
/// return their smallest block.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderInvariantForm {
    pub arity: usize,
    pub interval: IntervalSpec,
    pub entries: Vec<(Orbit, OrbitValue)>,
}

impl OrderInvariantForm {
    pub fn value_on(&self, o: &Orbit) -> OrbitValue {
        self.entries
            .iter()
            .find(|(p, _)| p == o)
            .map(|(_, v)| *v)
            .unwrap_or(OrbitValue::Projection(o.blocks()[0][0]))
    }
}

impl Aggregator for OrderInvariantForm {
    fn arity(&self) -> usize {
        self.arity
    }

    fn eval(&self, x: &[Rational]) -> Result<Rational> {
        if x.len() != self.arity {
            return Err(Error::ArityMismatch { expected: self.arity, found: x.len() });
        }
        let o = pattern_of(x, self.interval)?;
        Ok(match self.value_on(&o) {
            OrbitValue::Projection(i) => x[i].clone(),
            OrbitValue::Bottom => Rational::from_integer(0.into()),
            OrbitValue::Top => Rational::from_integer(1.into()),
        })
    }

    fn name(&self) -> String {
        "order-invariant-form".into()
    }
}

/// The single option a cell allows: a block's smallest coordinate, an
/// endpoint, or nothing.
fn cell_option(a: &[usize], t: usize, o: &Orbit) -> Option<OrbitValue> {
    for (b, block) in o.blocks().iter().enumerate() {
        if a[block[0]] == t {
            return Some(match o.block_level(b) {
                crate::orbits::Level::Bottom => OrbitValue::Bottom,
                crate::orbits::Level::Top => OrbitValue::Top,
                crate::orbits::Level::Interior => OrbitValue::Projection(block[0]),
            });
        }
    }
    None
}

/// Semantic option of a cell, used to compare cells of one orbit.
fn option_of(a: &[usize], t: usize, k: usize, e: IntervalSpec, o: &Orbit) -> Option<OrbitValue> {
    cell_option(a, t, o).or(if e.has_inf && t == 0 {
        Some(OrbitValue::Bottom)
    } else if e.has_sup && t + 1 == k {
        Some(OrbitValue::Top)
    } else {
        None
    })
}

/// Cells grouped by orbit, in canonical orbit order.
pub(crate) fn orbit_classes(table: &DiscreteTable, k: usize, e: IntervalSpec) -> BTreeMap<Orbit, Vec<usize>> {
    let mut classes: BTreeMap<Orbit, Vec<usize>> = BTreeMap::new();
    for (i, a) in table.cells().enumerate() {
        classes.entry(Orbit::of_ranks(&a, k, e)).or_default().push(i);
    }
    classes
}

/// Decides whether `G: S^n -> S` represents an order invariant function on `E^n`.
pub fn check_order_invariant(table: &DiscreteTable, e: IntervalSpec) -> Result<Verdict<OrderInvariantForm>> {
    let k = table
        .uniform_size()
        .ok_or_else(|| Error::ChainMismatch("order invariance needs equal input and output chains".into()))?;
    let mut entries = Vec::new();
    for (orbit, cells) in orbit_classes(table, k, e) {
        let mut chosen: Option<(usize, OrbitValue)> = None;
        for &i in &cells {
            let a = table.cell_at(i);
            let t = table.entries()[i];
            match option_of(&a, t, k, e, &orbit) {
                None => return Ok(Verdict::Witness(single_cell_witness(table, e, &a)?)),
                Some(v) => match chosen {
                    None => chosen = Some((i, v)),
                    Some((j, w)) if w != v => {
                        return Ok(Verdict::Witness(pair_witness(table, e, &table.cell_at(j), &a)?));
                    }
                    _ => {}
                },
            }
        }
        if let Some((_, v)) = chosen {
            entries.push((orbit, v));
        }
    }
    Ok(Verdict::Member(OrderInvariantForm { arity: table.arity(), interval: e, entries }))
}

/// `G(a)` is neither a coordinate of `a` nor an endpoint: a bijection fixing
/// every coordinate but moving the output exposes it.
fn single_cell_witness(table: &DiscreteTable, e: IntervalSpec, a: &[usize]) -> Result<Witness> {
    let f = TableFunction::embedded(table, e)?;
    let x = f.point(a);
    let t = table.get(a);
    let y = f.embedding(0).value(t).clone();
    let mut fixed: Vec<Rational> = x.clone();
    fixed.sort();
    fixed.dedup();
    let below = fixed.iter().filter(|v| *v < &y).max().cloned().unwrap_or_else(|| Rational::from_integer(0.into()));
    let target = (&below + &y) / Rational::from_integer(2.into());
    let mut pairs: Vec<(Rational, Rational)> = fixed.iter().map(|v| (v.clone(), v.clone())).collect();
    pairs.push((y.clone(), target));
    let phi = PlBijection::through(&pairs)?;
    Ok(Witness {
        kind: WitnessKind::Invariance,
        observed: format!(
            "G{} = {} is neither an input rank nor an included endpoint",
            fmt_cell(a),
            t
        ),
        required: format!("F(phi x) = phi(F x); phi fixes x but sends {} to {}", format_rational(&y), format_rational(&phi.apply(&y))),
        evidence: Evidence::Transform { points: vec![x], transforms: vec![phi] },
        cells: vec![a.to_vec()],
    })
}

/// Two cells of one orbit choose different coordinates or endpoints.
fn pair_witness(table: &DiscreteTable, e: IntervalSpec, a: &[usize], b: &[usize]) -> Result<Witness> {
    let f = TableFunction::embedded(table, e)?;
    let (x, y) = (f.point(a), f.point(b));
    let pairs: Vec<(Rational, Rational)> = x.iter().cloned().zip(y.iter().cloned()).collect();
    let phi = PlBijection::through(&pairs)?;
    Ok(Witness {
        kind: WitnessKind::Invariance,
        observed: format!("G{} = {} but G{} = {} on the same orbit", fmt_cell(a), table.get(a), fmt_cell(b), table.get(b)),
        required: "one coordinate or endpoint per orbit".into(),
        evidence: Evidence::Transform { points: vec![x], transforms: vec![phi] },
        cells: vec![a.to_vec(), b.to_vec()],
    })
}

pub(crate) fn fmt_cell(a: &[usize]) -> String {
    let parts: Vec<String> = a.iter().map(usize::to_string).collect();
    format!("({})", parts.join(","))
}
