//! The structural route for comparison meaningfulness on tables.
//!
//! Each class (an orbit, or a strong orbit for independent scales) must be
//! described by a function of one coordinate that is strictly monotone or
//! constant, and the ranges of these functions must be equal, equal
//! singletons, or strictly separated. Classes that take one value at a single
//! interior rank are flexible: they may join a monotone group or stay constant.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::chain::DiscreteTable;

/// The function describing one class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GShape {
    Constant { value: usize },
    /// `G(a) = g(a_coordinate)`, with `g` given by its samples (rank, value).
    Monotone { coordinate: usize, increasing: bool, samples: Vec<(usize, usize)> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassForm<K> {
    pub class: K,
    pub shape: GShape,
    /// Index of the monotone group the class belongs to.
    pub group: Option<usize>,
}

/// Classes sharing one strictly monotone function.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupForm {
    /// Coordinate whose chain the function reads (0 for a single scale).
    pub domain: usize,
    pub increasing: bool,
    pub samples: Vec<(usize, usize)>,
    pub members: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComparisonForm<K> {
    pub classes: Vec<ClassForm<K>>,
    pub groups: Vec<GroupForm>,
    /// Fewest functions on the chain covering every class, when small enough to search.
    pub g_classes: Option<Vec<Vec<usize>>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RangeFailure {
    pub classes: Vec<usize>,
    pub reason: String,
}

pub(crate) struct ClassInput {
    pub cells: Vec<usize>,
}

pub(crate) struct Problem<'a> {
    pub table: &'a DiscreteTable,
    pub classes: Vec<ClassInput>,
    /// Domain key of each coordinate: equal keys share a chain.
    pub domain: Vec<usize>,
    /// Whether each coordinate of a cell is interior.
    pub interior: Box<dyn Fn(&[usize], usize) -> bool + 'a>,
    /// Classes forced to be monotone even with one value.
    pub pinned: Vec<bool>,
}

#[derive(Clone, Debug)]
struct Opt {
    key: usize,
    coord: usize,
    samples: BTreeMap<usize, usize>,
}

struct Info {
    value: Option<usize>,
    forced: Vec<Opt>,
    flex: Vec<(usize, usize, usize)>,
}

#[derive(Clone, Debug)]
struct Group {
    key: usize,
    samples: BTreeMap<usize, usize>,
    members: Vec<usize>,
}

impl Group {
    fn hull(&self) -> (usize, usize) {
        let lo = *self.samples.values().min().expect("nonempty");
        let hi = *self.samples.values().max().expect("nonempty");
        (lo, hi)
    }
}

/// Direction of a strictly monotone sample map, `None` if it is not one.
/// A single sample counts as increasing.
fn direction(samples: &BTreeMap<usize, usize>) -> Option<bool> {
    let v: Vec<usize> = samples.values().copied().collect();
    if v.windows(2).all(|w| w[0] < w[1]) {
        Some(true)
    } else if v.windows(2).all(|w| w[0] > w[1]) {
        Some(false)
    } else {
        None
    }
}

fn union(a: &BTreeMap<usize, usize>, b: &BTreeMap<usize, usize>) -> Option<BTreeMap<usize, usize>> {
    let mut out = a.clone();
    for (&r, &v) in b {
        match out.insert(r, v) {
            Some(old) if old != v => return None,
            _ => {}
        }
    }
    direction(&out).map(|_| out)
}

fn analyse(p: &Problem<'_>, class: &ClassInput, pinned: bool) -> Info {
    let t = p.table;
    let values: BTreeSet<usize> = class.cells.iter().map(|&i| t.entries()[i]).collect();
    let first = t.cell_at(class.cells[0]);
    let mut forced = Vec::new();
    let mut flex = Vec::new();
    for c in 0..t.arity() {
        let mut map: BTreeMap<usize, usize> = BTreeMap::new();
        let mut function = true;
        for &i in &class.cells {
            let a = t.cell_at(i);
            if let Some(old) = map.insert(a[c], t.entries()[i]) {
                function &= old == t.entries()[i];
            }
        }
        let interior = (p.interior)(&first, c);
        if values.len() >= 2 || pinned {
            if function && interior && direction(&map).is_some() {
                let opt = Opt { key: p.domain[c], coord: c, samples: map };
                if !forced.iter().any(|o: &Opt| o.key == opt.key && o.samples == opt.samples) {
                    forced.push(opt);
                }
            }
        } else if interior && map.len() == 1 {
            let r = *map.keys().next().expect("one rank");
            if !flex.iter().any(|&(k, rr, _)| k == p.domain[c] && rr == r) {
                flex.push((p.domain[c], r, c));
            }
        }
    }
    let value = (values.len() == 1 && !pinned).then(|| *values.iter().next().expect("one value"));
    Info { value, forced, flex }
}

const MAX_CHOICES: usize = 100_000;

pub(crate) fn solve<K: Clone>(p: &Problem<'_>, labels: &[K]) -> Result<ComparisonForm<K>, RangeFailure> {
    let infos: Vec<Info> = p.classes.iter().enumerate().map(|(i, c)| analyse(p, c, p.pinned[i])).collect();
    for (i, info) in infos.iter().enumerate() {
        if info.value.is_none() && info.forced.is_empty() {
            return Err(RangeFailure {
                classes: vec![i],
                reason: "no single coordinate describes the class by a strictly monotone function".into(),
            });
        }
    }
    let forced: Vec<usize> = (0..infos.len()).filter(|&i| infos[i].value.is_none()).collect();
    let mut choice = vec![0usize; forced.len()];
    let mut first_failure = None;
    for _ in 0..MAX_CHOICES {
        match attempt(p, &infos, &forced, &choice) {
            Ok((groups, flex_pick)) => return Ok(build_form(p, &infos, &forced, &choice, groups, flex_pick, labels)),
            Err(f) => {
                first_failure.get_or_insert(f);
            }
        }
        let mut c = forced.len();
        loop {
            if c == 0 {
                return Err(first_failure.expect("at least one attempt"));
            }
            c -= 1;
            choice[c] += 1;
            if choice[c] < infos[forced[c]].forced.len() {
                break;
            }
            choice[c] = 0;
        }
    }
    Err(first_failure.expect("at least one attempt"))
}

type FlexPick = BTreeMap<usize, (usize, usize)>;

fn attempt(p: &Problem<'_>, infos: &[Info], forced: &[usize], choice: &[usize]) -> Result<(Vec<Group>, FlexPick), RangeFailure> {
    let _ = p;
    let mut groups: Vec<Group> = forced
        .iter()
        .zip(choice)
        .map(|(&i, &c)| {
            let o = &infos[i].forced[c];
            Group { key: o.key, samples: o.samples.clone(), members: vec![i] }
        })
        .collect();
    'merge: loop {
        for a in 0..groups.len() {
            for b in a + 1..groups.len() {
                let (la, ha) = groups[a].hull();
                let (lb, hb) = groups[b].hull();
                if la <= hb && lb <= ha {
                    let mut involved = groups[a].members.clone();
                    involved.extend(&groups[b].members);
                    if groups[a].key != groups[b].key {
                        return Err(RangeFailure {
                            classes: involved,
                            reason: "overlapping ranges read different coordinates".into(),
                        });
                    }
                    let Some(samples) = union(&groups[a].samples, &groups[b].samples) else {
                        return Err(RangeFailure {
                            classes: involved,
                            reason: "overlapping ranges cannot come from one strictly monotone function".into(),
                        });
                    };
                    let gb = groups.remove(b);
                    groups[a].samples = samples;
                    groups[a].members.extend(gb.members);
                    continue 'merge;
                }
            }
        }
        break;
    }

    let mut by_value: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, info) in infos.iter().enumerate() {
        if let Some(v) = info.value {
            by_value.entry(v).or_default().push(i);
        }
    }
    let mut pending: BTreeMap<usize, Vec<(usize, Vec<usize>, Vec<usize>)>> = BTreeMap::new();
    for (&v, members) in &by_value {
        let Some(g) = groups.iter().position(|g| {
            let (lo, hi) = g.hull();
            lo <= v && v <= hi
        }) else {
            continue;
        };
        let key = groups[g].key;
        let mut ranks: Option<BTreeSet<usize>> = None;
        for &m in members {
            let own: BTreeSet<usize> = infos[m].flex.iter().filter(|f| f.0 == key).map(|f| f.1).collect();
            ranks = Some(match ranks {
                None => own,
                Some(r) => r.intersection(&own).copied().collect(),
            });
        }
        let ranks: Vec<usize> = ranks.unwrap_or_default().into_iter().collect();
        if ranks.is_empty() {
            let mut involved = members.clone();
            involved.extend(&groups[g].members);
            return Err(RangeFailure {
                classes: involved,
                reason: format!("value {v} lies inside a monotone range but cannot be placed on it"),
            });
        }
        pending.entry(g).or_default().push((v, ranks, members.clone()));
    }
    let mut pick = FlexPick::new();
    for (g, items) in pending {
        let mut chosen = Vec::new();
        if !place(&groups[g].samples, &items, 0, &mut chosen) {
            let mut involved: Vec<usize> = items.iter().flat_map(|it| it.2.clone()).collect();
            involved.extend(&groups[g].members);
            return Err(RangeFailure {
                classes: involved,
                reason: "values inside a monotone range cannot all be placed on it".into(),
            });
        }
        for (item, r) in items.iter().zip(chosen) {
            groups[g].samples.insert(r, item.0);
            for &m in &item.2 {
                pick.insert(m, (g, r));
                groups[g].members.push(m);
            }
        }
    }
    Ok((groups, pick))
}

fn place(base: &BTreeMap<usize, usize>, items: &[(usize, Vec<usize>, Vec<usize>)], at: usize, chosen: &mut Vec<usize>) -> bool {
    if at == items.len() {
        return true;
    }
    for &r in &items[at].1 {
        let mut extra = BTreeMap::new();
        extra.insert(r, items[at].0);
        if let Some(next) = union(base, &extra) {
            if direction(base).is_some() && base.len() >= 2 && direction(&next) != direction(base) {
                continue;
            }
            chosen.push(r);
            if place(&next, items, at + 1, chosen) {
                return true;
            }
            chosen.pop();
        }
    }
    false
}

fn build_form<K: Clone>(
    p: &Problem<'_>,
    infos: &[Info],
    forced: &[usize],
    choice: &[usize],
    groups: Vec<Group>,
    pick: FlexPick,
    labels: &[K],
) -> ComparisonForm<K> {
    let group_of = |i: usize| groups.iter().position(|g| g.members.contains(&i));
    let mut classes = Vec::with_capacity(infos.len());
    for (i, info) in infos.iter().enumerate() {
        let shape = if let Some(pos) = forced.iter().position(|&f| f == i) {
            let o = &info.forced[choice[pos]];
            let g = &groups[group_of(i).expect("forced classes are grouped")];
            GShape::Monotone {
                coordinate: o.coord,
                increasing: direction(&g.samples).unwrap_or(true),
                samples: o.samples.iter().map(|(&r, &v)| (r, v)).collect(),
            }
        } else if let Some(&(g, r)) = pick.get(&i) {
            let key = groups[g].key;
            let coord = info.flex.iter().find(|f| f.0 == key && f.1 == r).expect("picked option").2;
            GShape::Monotone {
                coordinate: coord,
                increasing: direction(&groups[g].samples).unwrap_or(true),
                samples: vec![(r, info.value.expect("single value"))],
            }
        } else {
            GShape::Constant { value: info.value.expect("single value") }
        };
        classes.push(ClassForm { class: labels[i].clone(), shape, group: group_of(i) });
    }
    let groups = groups
        .into_iter()
        .map(|g| GroupForm {
            domain: g.key,
            increasing: direction(&g.samples).unwrap_or(true),
            samples: g.samples.into_iter().collect(),
            members: g.members,
        })
        .collect();
    let _ = p;
    ComparisonForm { classes, groups, g_classes: None }
}

/// Largest number of classes for the g-class cover search.
pub const MAX_COVER_CLASSES: usize = 16;

/// Fewest partial functions on one chain, each strictly monotone or constant,
/// such that every class reads its values from one of them through some
/// coordinate. Returns class indices per function.
pub(crate) fn min_cover(table: &DiscreteTable, classes: &[Vec<usize>]) -> Option<Vec<Vec<usize>>> {
    if classes.len() > MAX_COVER_CLASSES {
        return None;
    }
    let mut options: Vec<Vec<BTreeMap<usize, usize>>> = Vec::new();
    for cells in classes {
        let mut opts: Vec<BTreeMap<usize, usize>> = Vec::new();
        for c in 0..table.arity() {
            let mut map = BTreeMap::new();
            let mut ok = true;
            for &i in cells {
                let a = table.cell_at(i);
                if let Some(old) = map.insert(a[c], table.entries()[i]) {
                    ok &= old == table.entries()[i];
                }
            }
            if ok && admissible(&map) && !opts.contains(&map) {
                opts.push(map);
            }
        }
        if opts.is_empty() {
            return None;
        }
        options.push(opts);
    }
    let mut order: Vec<usize> = (0..classes.len()).collect();
    order.sort_by_key(|&i| (options[i].len(), i));
    for m in 1..=classes.len() {
        let mut funcs: Vec<BTreeMap<usize, usize>> = Vec::new();
        let mut assign = vec![usize::MAX; classes.len()];
        if cover(&order, 0, m, &options, &mut funcs, &mut assign) {
            let mut out = vec![Vec::new(); funcs.len()];
            for (i, &g) in assign.iter().enumerate() {
                out[g].push(i);
            }
            out.sort();
            return Some(out);
        }
    }
    None
}

fn admissible(map: &BTreeMap<usize, usize>) -> bool {
    let vals: BTreeSet<usize> = map.values().copied().collect();
    vals.len() == 1 || direction(map).is_some()
}

fn merged(a: &BTreeMap<usize, usize>, b: &BTreeMap<usize, usize>) -> Option<BTreeMap<usize, usize>> {
    let mut out = a.clone();
    for (&r, &v) in b {
        match out.insert(r, v) {
            Some(old) if old != v => return None,
            _ => {}
        }
    }
    admissible(&out).then_some(out)
}

fn cover(
    order: &[usize],
    at: usize,
    m: usize,
    options: &[Vec<BTreeMap<usize, usize>>],
    funcs: &mut Vec<BTreeMap<usize, usize>>,
    assign: &mut [usize],
) -> bool {
    if at == order.len() {
        return true;
    }
    let i = order[at];
    for opt in &options[i] {
        for g in 0..funcs.len() {
            if let Some(next) = merged(&funcs[g], opt) {
                let saved = std::mem::replace(&mut funcs[g], next);
                assign[i] = g;
                if cover(order, at + 1, m, options, funcs, assign) {
                    return true;
                }
                funcs[g] = saved;
            }
        }
        if funcs.len() < m {
            funcs.push(opt.clone());
            assign[i] = funcs.len() - 1;
            if cover(order, at + 1, m, options, funcs, assign) {
                return true;
            }
            funcs.pop();
        }
    }
    false
}
