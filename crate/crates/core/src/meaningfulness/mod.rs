//! Deciding and certifying meaningfulness: order invariance, comparison
//! meaningfulness on one scale, and on independent scales.

pub mod comparison;
pub mod decompose;
pub mod falsify;
pub mod invariance;
pub mod oracle;
pub mod ranges;
pub mod witness;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::chain::DiscreteTable;
use crate::error::{Error, Result};
use crate::orbits::{Orbit, StrongOrbit};
use crate::scale::IntervalSpec;

pub use comparison::{comparison_witness, comparison_witness_through, PatternIndex};
pub use decompose::{decompose_nondecreasing, Decomposition, XiValue};
pub use falsify::{falsify_cm, falsify_invariance};
pub use invariance::{check_order_invariant, OrbitValue, OrderInvariantForm};
pub use oracle::{oracle_generate_and_match, oracle_match, OracleSpace};
pub use ranges::{ClassForm, ComparisonForm, GShape, GroupForm};
pub use witness::{Evidence, Leg, ReplayTarget, TableFunction, Witness, WitnessKind};

pub type CmSingleForm = ComparisonForm<Orbit>;
pub type CmIndependentForm = ComparisonForm<StrongOrbit>;

/// Result of a membership check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict<F> {
    Member(F),
    Witness(Witness),
}

impl<F> Verdict<F> {
    pub fn is_member(&self) -> bool {
        matches!(self, Verdict::Member(_))
    }

    pub fn form(&self) -> Option<&F> {
        match self {
            Verdict::Member(f) => Some(f),
            Verdict::Witness(_) => None,
        }
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Verdict::Member(_) => None,
            Verdict::Witness(w) => Some(w),
        }
    }
}

/// Which automorphisms act on the inputs of a comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CmMode {
    /// One bijection applied to every coordinate.
    Single,
    /// A separate bijection per coordinate.
    Independent,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    OrderInvariant,
    CmSingle,
    CmIndependent,
}

impl Family {
    pub fn as_str(&self) -> &'static str {
        match self {
            Family::OrderInvariant => "order-invariant",
            Family::CmSingle => "cm-single",
            Family::CmIndependent => "cm-independent",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "order-invariant" | "oi" => Ok(Family::OrderInvariant),
            "cm-single" | "cm1" => Ok(Family::CmSingle),
            "cm-independent" | "cmi" => Ok(Family::CmIndependent),
            other => Err(Error::Precondition(format!("unknown family {other:?}"))),
        }
    }
}

fn interior_rank(r: usize, k: usize, e: IntervalSpec) -> bool {
    !(e.has_inf && r == 0) && !(e.has_sup && r + 1 == k)
}

fn orbit_problem<'a>(table: &'a DiscreteTable, e: IntervalSpec, pin_diagonal: bool) -> Result<(ranges::Problem<'a>, Vec<Orbit>)> {
    let k = table
        .common_input_size()
        .ok_or_else(|| Error::ChainMismatch("single-scale comparisons need equal input chains".into()))?;
    let mut classes: BTreeMap<Orbit, Vec<usize>> = BTreeMap::new();
    for (i, a) in table.cells().enumerate() {
        classes.entry(Orbit::of_ranks(&a, k, e)).or_default().push(i);
    }
    let labels: Vec<Orbit> = classes.keys().cloned().collect();
    let pinned = labels
        .iter()
        .map(|o| pin_diagonal && o.blocks().len() == 1 && !o.anchored_bottom() && !o.anchored_top())
        .collect();
    let problem = ranges::Problem {
        table,
        classes: classes.into_values().map(|cells| ranges::ClassInput { cells }).collect(),
        domain: vec![0; table.arity()],
        interior: Box::new(move |a: &[usize], c: usize| interior_rank(a[c], k, e)),
        pinned,
    };
    Ok((problem, labels))
}

fn strong_problem<'a>(table: &'a DiscreteTable, e: IntervalSpec) -> (ranges::Problem<'a>, Vec<StrongOrbit>) {
    let sizes = table.input_sizes().to_vec();
    let mut classes: BTreeMap<StrongOrbit, Vec<usize>> = BTreeMap::new();
    for (i, a) in table.cells().enumerate() {
        classes.entry(StrongOrbit::of_ranks(&a, &sizes, e)).or_default().push(i);
    }
    let labels: Vec<StrongOrbit> = classes.keys().cloned().collect();
    let n = table.arity();
    let problem = ranges::Problem {
        table,
        pinned: vec![false; labels.len()],
        classes: classes.into_values().map(|cells| ranges::ClassInput { cells }).collect(),
        domain: (0..n).collect(),
        interior: Box::new(move |a: &[usize], c: usize| interior_rank(a[c], sizes[c], e)),
    };
    (problem, labels)
}

fn structural_witness(
    table: &DiscreteTable,
    e: IntervalSpec,
    mode: CmMode,
    failure: &ranges::RangeFailure,
    problem: &ranges::Problem<'_>,
    labels: &[String],
) -> Result<Witness> {
    if table.len() <= comparison::MAX_PATTERN_CELLS {
        if let Some(w) = comparison_witness(table, e, mode)? {
            return Ok(w);
        }
    }
    let cells: Vec<Vec<usize>> = failure
        .classes
        .iter()
        .filter_map(|&c| problem.classes[c].cells.first().map(|&i| table.cell_at(i)))
        .collect();
    let names: Vec<&str> = failure.classes.iter().map(|&c| labels[c].as_str()).collect();
    Ok(Witness {
        kind: if mode == CmMode::Single { WitnessKind::CmSingle } else { WitnessKind::CmIndependent },
        observed: format!("classes {}: {}", names.join(", "), failure.reason),
        required: "one strictly monotone or constant function per class, with equal or separated ranges".into(),
        evidence: witness::Evidence::Structural { reason: failure.reason.clone() },
        cells,
    })
}

fn check_single(table: &DiscreteTable, e: IntervalSpec, pin_diagonal: bool) -> Result<Verdict<CmSingleForm>> {
    let (problem, labels) = orbit_problem(table, e, pin_diagonal)?;
    match ranges::solve(&problem, &labels) {
        Ok(mut form) => {
            let classes: Vec<Vec<usize>> = problem.classes.iter().map(|c| c.cells.clone()).collect();
            form.g_classes = ranges::min_cover(table, &classes);
            Ok(Verdict::Member(form))
        }
        Err(f) => {
            let names: Vec<String> = labels.iter().map(Orbit::to_string).collect();
            Ok(Verdict::Witness(structural_witness(table, e, CmMode::Single, &f, &problem, &names)?))
        }
    }
}

/// Decides whether a table represents a function whose comparisons are
/// meaningful under one common bijection of the scale.
pub fn check_cm_single(table: &DiscreteTable, e: IntervalSpec) -> Result<Verdict<CmSingleForm>> {
    check_single(table, e, false)
}

/// As [`check_cm_single`] for a table read as `S^n -> S` whose diagonal is
/// the identity of the scale, so that diagonal classes count as monotone even
/// when they hold a single cell.
pub fn check_cm_single_idempotent(table: &DiscreteTable, e: IntervalSpec) -> Result<Verdict<CmSingleForm>> {
    if table.uniform_size().is_none() {
        return Err(Error::ChainMismatch("idempotency needs equal input and output chains".into()));
    }
    check_single(table, e, true)
}

/// Decides whether a table represents a function whose comparisons are
/// meaningful under independent bijections of each coordinate.
pub fn check_cm_independent(table: &DiscreteTable, e: IntervalSpec) -> Result<Verdict<CmIndependentForm>> {
    let (problem, labels) = strong_problem(table, e);
    match ranges::solve(&problem, &labels) {
        Ok(form) => Ok(Verdict::Member(form)),
        Err(f) => {
            let names: Vec<String> = labels.iter().map(StrongOrbit::to_string).collect();
            Ok(Verdict::Witness(structural_witness(table, e, CmMode::Independent, &f, &problem, &names)?))
        }
    }
}

/// Re-runs the structural check behind a witness; `true` confirms the failure.
pub(crate) fn recheck_structural(table: &DiscreteTable, kind: WitnessKind, e: IntervalSpec) -> Result<bool> {
    Ok(match kind {
        WitnessKind::Invariance => !check_order_invariant(table, e)?.is_member(),
        WitnessKind::CmSingle => !check_cm_single(table, e)?.is_member(),
        WitnessKind::CmIndependent => !check_cm_independent(table, e)?.is_member(),
        WitnessKind::Monotonicity => crate::chain::nondecreasing_violation(table).is_some(),
        WitnessKind::Smoothness => crate::chain::is_smooth(table).is_some(),
    })
}

/// Membership of a table in a family, as a yes/no with an optional witness.
pub fn classify_family(table: &DiscreteTable, e: IntervalSpec, family: Family) -> Result<Option<Witness>> {
    Ok(match family {
        Family::OrderInvariant => check_order_invariant(table, e)?.witness().cloned(),
        Family::CmSingle => check_cm_single(table, e)?.witness().cloned(),
        Family::CmIndependent => check_cm_independent(table, e)?.witness().cloned(),
    })
}
