//! Normal forms of nondecreasing members: a choice of lattice polynomial (or
//! coordinate) per strong orbit that is itself nondecreasing, and for the
//! comparison families an outer function per strong orbit.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::chain::{nondecreasing_violation, DiscreteTable};
use crate::error::{Error, Result};
use crate::lattice::{enumerate_cn_in, LatticePolynomial, SetFunction};
use crate::orbits::{Level, StrongOrbit};
use crate::scale::IntervalSpec;

use super::{check_cm_independent, check_cm_single, check_order_invariant, Family};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "value")]
pub enum XiValue {
    Polynomial(SetFunction),
    /// A coordinate, 0-based.
    Projection(usize),
}

impl fmt::Display for XiValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            XiValue::Polynomial(a) => a.fmt(f),
            XiValue::Projection(i) => write!(f, "proj {}", i + 1),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionEntry {
    pub class: StrongOrbit,
    pub xi: XiValue,
    /// Outer function as (inner rank, output) samples, for comparison families.
    pub gamma: Option<Vec<(usize, usize)>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    pub family: Family,
    pub entries: Vec<DecompositionEntry>,
    /// Whether the choice on the all-interior strong orbit is nonconstant,
    /// as idempotent functions require.
    pub interior_nonconstant: bool,
    /// Whether one choice serves every strong orbit.
    pub uniform: bool,
}

impl Decomposition {
    pub fn xi_on(&self, class: &StrongOrbit) -> Option<&XiValue> {
        self.entries.iter().find(|d| &d.class == class).map(|d| &d.xi)
    }
}

#[derive(Clone, Debug)]
struct Candidate {
    xi: XiValue,
    samples: BTreeMap<usize, usize>,
    interior_domain: bool,
}

fn increasing_or_constant(map: &BTreeMap<usize, usize>) -> bool {
    let v: Vec<usize> = map.values().copied().collect();
    v.windows(2).all(|w| w[0] < w[1]) || v.windows(2).all(|w| w[0] == w[1])
}

/// `γ(J) ≼ γ(J')` for the outer functions of two strong orbits.
fn gamma_leq(a: &Candidate, b: &Candidate, independent: bool) -> bool {
    let (amax, bmin) = (a.samples.values().max().unwrap(), b.samples.values().min().unwrap());
    if amax < bmin {
        return true;
    }
    let single = |m: &BTreeMap<usize, usize>| m.values().collect::<BTreeSet<_>>().len() == 1;
    if single(&a.samples) && single(&b.samples) && a.samples.values().next() == b.samples.values().next() {
        return true;
    }
    if !(a.interior_domain && b.interior_domain) || (independent && a.xi != b.xi) {
        return false;
    }
    let mut u = a.samples.clone();
    for (&r, &v) in &b.samples {
        if u.insert(r, v).is_some_and(|old| old != v) {
            return false;
        }
    }
    let v: Vec<usize> = u.values().copied().collect();
    v.windows(2).all(|w| w[0] < w[1])
}

/// Decomposes a nondecreasing member of `family` strong orbit by strong orbit.
pub fn decompose_nondecreasing(table: &DiscreteTable, family: Family, e: IntervalSpec) -> Result<Decomposition> {
    let member = match family {
        Family::OrderInvariant => check_order_invariant(table, e)?.is_member(),
        Family::CmSingle => check_cm_single(table, e)?.is_member(),
        Family::CmIndependent => check_cm_independent(table, e)?.is_member(),
    };
    if !member {
        return Err(Error::Precondition(format!("the table is not {family}")));
    }
    if let Some(p) = nondecreasing_violation(table) {
        return Err(Error::Precondition(format!("the table decreases from {:?} to {:?}", p.lower, p.upper)));
    }
    let n = table.arity();
    let sizes = table.input_sizes().to_vec();
    let mut classes: BTreeMap<StrongOrbit, Vec<usize>> = BTreeMap::new();
    for (i, a) in table.cells().enumerate() {
        classes.entry(StrongOrbit::of_ranks(&a, &sizes, e)).or_default().push(i);
    }
    let mut order: Vec<(StrongOrbit, Vec<usize>)> = classes.into_iter().collect();
    order.sort_by_key(|(s, _)| (s.levels().iter().map(|l| *l as usize).sum::<usize>(), s.clone()));

    let polys: Vec<LatticePolynomial> = if family == Family::CmIndependent {
        Vec::new()
    } else {
        let mut v: Vec<SetFunction> = enumerate_cn_in(n, e)?;
        v.sort_by_key(|s| (s.count_true(), s.clone()));
        v.into_iter().map(|s| LatticePolynomial::new_in(s, e)).collect::<Result<_>>()?
    };
    let k = sizes[0];
    let interior = |r: usize, k: usize| !(e.has_inf && r == 0) && !(e.has_sup && r + 1 == k);

    let mut candidates: Vec<Vec<Candidate>> = Vec::new();
    for (_, cells) in &order {
        let mut list = Vec::new();
        match family {
            Family::CmIndependent => {
                for c in 0..n {
                    let mut map = BTreeMap::new();
                    let ok = cells.iter().all(|&i| {
                        let r = table.cell_at(i)[c];
                        map.insert(r, table.entries()[i]).is_none_or(|old| old == table.entries()[i])
                    });
                    if ok && increasing_or_constant(&map) {
                        let interior_domain = interior(table.cell_at(cells[0])[c], sizes[c]);
                        list.push(Candidate { xi: XiValue::Projection(c), samples: map, interior_domain });
                    }
                }
            }
            _ => {
                for p in &polys {
                    let mut map = BTreeMap::new();
                    let ok = cells.iter().all(|&i| {
                        let r = p.eval_ranks(&table.cell_at(i), k);
                        match family {
                            Family::OrderInvariant => r == table.entries()[i],
                            _ => map.insert(r, table.entries()[i]).is_none_or(|old| old == table.entries()[i]),
                        }
                    });
                    if family == Family::OrderInvariant && ok {
                        list.push(Candidate { xi: XiValue::Polynomial(p.alpha().clone()), samples: map, interior_domain: true });
                    } else if ok && increasing_or_constant(&map) {
                        let r = p.eval_ranks(&table.cell_at(cells[0]), k);
                        list.push(Candidate {
                            xi: XiValue::Polynomial(p.alpha().clone()),
                            samples: map,
                            interior_domain: interior(r, k),
                        });
                    }
                }
            }
        }
        if list.is_empty() {
            return Err(Error::Precondition("a strong orbit admits no normal-form piece".into()));
        }
        candidates.push(list);
    }

    let independent = family == Family::CmIndependent;
    // `a` sits on a strong orbit below the one of `b`.
    let fits = |a: &Candidate, b: &Candidate| -> bool {
        match family {
            Family::OrderInvariant => match (&a.xi, &b.xi) {
                (XiValue::Polynomial(x), XiValue::Polynomial(y)) => x.leq(y),
                _ => false,
            },
            _ => gamma_leq(a, b, independent),
        }
    };
    let below: Vec<Vec<usize>> = (0..order.len())
        .map(|j| (0..j).filter(|&i| order[i].0.leq(&order[j].0).unwrap_or(false)).collect())
        .collect();

    let mut chosen: Option<Vec<usize>> = None;
    let mut uniform = false;
    if family != Family::CmIndependent {
        'global: for p in &polys {
            let xi = XiValue::Polynomial(p.alpha().clone());
            let mut pick = Vec::new();
            for list in &candidates {
                match list.iter().position(|c| c.xi == xi) {
                    Some(i) => pick.push(i),
                    None => continue 'global,
                }
            }
            if (0..order.len()).all(|j| below[j].iter().all(|&i| fits(&candidates[i][pick[i]], &candidates[j][pick[j]]))) {
                chosen = Some(pick);
                uniform = true;
                break;
            }
        }
    }
    if chosen.is_none() {
        let mut pick = vec![0usize; order.len()];
        if search(0, &mut pick, &candidates, &below, &fits) {
            chosen = Some(pick);
        }
    }
    let pick = chosen.ok_or_else(|| Error::Precondition("no nondecreasing choice of normal-form pieces exists".into()))?;

    let mut entries = Vec::new();
    let mut interior_nonconstant = true;
    for (j, (class, _)) in order.iter().enumerate() {
        let c = &candidates[j][pick[j]];
        if class.levels().iter().all(|l| *l == Level::Interior) {
            interior_nonconstant = match &c.xi {
                XiValue::Polynomial(a) => !a.is_constant(),
                XiValue::Projection(_) => true,
            };
        }
        entries.push(DecompositionEntry {
            class: class.clone(),
            xi: c.xi.clone(),
            gamma: (family != Family::OrderInvariant).then(|| c.samples.iter().map(|(&r, &v)| (r, v)).collect()),
        });
    }
    entries.sort_by(|a, b| a.class.cmp(&b.class));
    Ok(Decomposition { family, entries, interior_nonconstant, uniform })
}

fn search(
    j: usize,
    pick: &mut Vec<usize>,
    candidates: &[Vec<Candidate>],
    below: &[Vec<usize>],
    fits: &dyn Fn(&Candidate, &Candidate) -> bool,
) -> bool {
    if j == candidates.len() {
        return true;
    }
    for c in 0..candidates[j].len() {
        if below[j].iter().all(|&i| fits(&candidates[i][pick[i]], &candidates[j][c])) {
            pick[j] = c;
            if search(j + 1, pick, candidates, below, fits) {
                return true;
            }
        }
    }
    false
}
