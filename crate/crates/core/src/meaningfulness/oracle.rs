//! Generate-and-match: builds every table of a family from its closed-form
//! description and tests membership in the generated set.

use std::collections::{BTreeMap, HashSet};

use crate::chain::DiscreteTable;
use crate::error::{Error, Result};
use crate::orbits::{fubini, ordered_partitions, Orbit, StrongOrbit};
use crate::scale::IntervalSpec;

use super::Family;

/// Largest number of parametrisations an oracle will visit.
pub const MAX_ORACLE_WORK: u128 = 20_000_000;

/// All tables of one family on fixed chains.
pub struct OracleSpace {
    family: Family,
    input_sizes: Vec<usize>,
    tables: HashSet<Vec<usize>>,
}

fn interior(r: usize, k: usize, e: IntervalSpec) -> bool {
    !(e.has_inf && r == 0) && !(e.has_sup && r + 1 == k)
}

impl OracleSpace {
    /// Tables `S^n -> S` (order invariance) or `S_1 × ... × S_n -> T` up to
    /// re-ranking of outputs (comparison families).
    pub fn generate(family: Family, input_sizes: &[usize], e: IntervalSpec) -> Result<Self> {
        if input_sizes.is_empty() || input_sizes.iter().any(|&k| k < 2) {
            return Err(Error::InvalidChain("oracle chains need at least two ranks".into()));
        }
        let single_scale = input_sizes.iter().all(|&k| k == input_sizes[0]);
        if family != Family::CmIndependent && !single_scale {
            return Err(Error::ChainMismatch(format!("{family} needs equal input chains")));
        }
        let probe = DiscreteTable::new(input_sizes.to_vec(), 1, vec![0; DiscreteTable::cell_count(input_sizes)?])?;
        let tables = match family {
            Family::OrderInvariant => generate_invariant(&probe, e)?,
            Family::CmSingle | Family::CmIndependent => generate_comparison(&probe, e, family)?,
        };
        Ok(OracleSpace { family, input_sizes: input_sizes.to_vec(), tables })
    }

    pub fn len(&self) -> usize {
        self.tables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tables.is_empty()
    }

    pub fn contains(&self, table: &DiscreteTable) -> bool {
        if table.input_sizes() != self.input_sizes.as_slice() {
            return false;
        }
        match self.family {
            Family::OrderInvariant => {
                table.output_size() == self.input_sizes[0] && self.tables.contains(table.entries())
            }
            _ => self.tables.contains(table.normalized().entries()),
        }
    }

    /// Generated tables, as entry vectors.
    pub fn entries(&self) -> impl Iterator<Item = &Vec<usize>> {
        self.tables.iter()
    }
}

/// Membership of `table` in the generated family. Comparison families whose
/// space is too large to generate fall back to [`oracle_match`].
pub fn oracle_generate_and_match(table: &DiscreteTable, family: Family, e: IntervalSpec) -> Result<bool> {
    if family == Family::OrderInvariant && table.uniform_size().is_none() {
        return Err(Error::ChainMismatch("order invariance needs equal input and output chains".into()));
    }
    match OracleSpace::generate(family, table.input_sizes(), e) {
        Ok(space) => Ok(space.contains(table)),
        Err(Error::SizeLimit(_)) if family != Family::OrderInvariant => oracle_match(table, family, e),
        Err(err) => Err(err),
    }
}

/// Searches the parameters of a comparison family for ones reproducing
/// `table`. Each class's function is read off the table, so only the shape
/// of each class is enumerated.
pub fn oracle_match(table: &DiscreteTable, family: Family, e: IntervalSpec) -> Result<bool> {
    if family == Family::OrderInvariant {
        return Err(Error::Precondition("matching is for the comparison families".into()));
    }
    if family == Family::CmSingle && table.common_input_size().is_none() {
        return Err(Error::ChainMismatch(format!("{family} needs equal input chains")));
    }
    let t = table.normalized();
    let (classes, options) = comparison_options(&t, e, family);
    let mut fitted: Vec<Vec<(&Shape, BTreeMap<usize, usize>)>> = Vec::new();
    for (cells, opts) in classes.iter().zip(&options) {
        let mut fits = Vec::new();
        for shape in opts {
            let mut map = BTreeMap::new();
            let ok = cells.iter().enumerate().all(|(j, &i)| {
                let key = match shape {
                    Shape::Constant => usize::MAX,
                    Shape::Monotone { cell_rank, .. } => cell_rank[j],
                };
                *map.entry(key).or_insert(t.entries()[i]) == t.entries()[i]
            });
            if ok && (matches!(shape, Shape::Constant) || strictly_monotone(&map)) {
                fits.push((shape, map));
            }
        }
        if fits.is_empty() {
            return Ok(false);
        }
        fitted.push(fits);
    }
    let mut pick = Vec::with_capacity(fitted.len());
    let mut work = 0u128;
    search(&fitted, &mut pick, &mut work)
}

fn search(fitted: &[Vec<(&Shape, BTreeMap<usize, usize>)>], pick: &mut Vec<usize>, work: &mut u128) -> Result<bool> {
    *work += 1;
    if *work > MAX_ORACLE_WORK {
        return Err(Error::SizeLimit("oracle match exceeded its work limit".into()));
    }
    let c = pick.len();
    if c == fitted.len() {
        let shapes: Vec<&Shape> = pick.iter().enumerate().map(|(c, &p)| fitted[c][p].0).collect();
        let maps: Vec<BTreeMap<usize, usize>> = pick.iter().enumerate().map(|(c, &p)| fitted[c][p].1.clone()).collect();
        return Ok(relations_hold(&shapes, &maps));
    }
    for p in 0..fitted[c].len() {
        let (shape, map) = &fitted[c][p];
        let compatible = pick.iter().enumerate().all(|(d, &q)| {
            let (other, omap) = &fitted[d][q];
            relations_hold(&[*other, *shape], &[omap.clone(), map.clone()])
        });
        if compatible {
            pick.push(p);
            let found = search(fitted, pick, work)?;
            pick.pop();
            if found {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

fn generate_invariant(probe: &DiscreteTable, e: IntervalSpec) -> Result<HashSet<Vec<usize>>> {
    let k = probe.input_sizes()[0];
    let mut classes: BTreeMap<Orbit, Vec<usize>> = BTreeMap::new();
    for (i, a) in probe.cells().enumerate() {
        classes.entry(Orbit::of_ranks(&a, k, e)).or_default().push(i);
    }
    let mut options: Vec<(Vec<usize>, Vec<Vec<usize>>)> = Vec::new();
    let mut work: u128 = 1;
    for (orbit, cells) in classes {
        let mut opts: Vec<Vec<usize>> = Vec::new();
        let mut push = |v: Vec<usize>| {
            if !opts.contains(&v) {
                opts.push(v);
            }
        };
        for block in orbit.blocks() {
            push(cells.iter().map(|&i| probe.cell_at(i)[block[0]]).collect());
        }
        if e.has_inf {
            push(vec![0; cells.len()]);
        }
        if e.has_sup {
            push(vec![k - 1; cells.len()]);
        }
        work = work.saturating_mul(opts.len() as u128);
        options.push((cells, opts));
    }
    if work > MAX_ORACLE_WORK {
        return Err(Error::SizeLimit(format!("{work} order invariant tables exceed the oracle limit")));
    }
    let mut out = HashSet::new();
    let mut pick = vec![0usize; options.len()];
    let mut entries = vec![0usize; probe.len()];
    loop {
        for (c, (cells, opts)) in options.iter().enumerate() {
            for (j, &i) in cells.iter().enumerate() {
                entries[i] = opts[pick[c]][j];
            }
        }
        out.insert(entries.clone());
        let mut c = options.len();
        loop {
            if c == 0 {
                return Ok(out);
            }
            c -= 1;
            pick[c] += 1;
            if pick[c] < options[c].1.len() {
                break;
            }
            pick[c] = 0;
        }
    }
}

/// One way to describe a class: a constant, or a function of one coordinate
/// sampled at the ranks the class uses.
#[derive(Clone, Debug, PartialEq, Eq)]
enum Shape {
    Constant,
    Monotone { key: usize, ranks: Vec<usize>, cell_rank: Vec<usize> },
}

impl Shape {
    fn atoms(&self) -> usize {
        match self {
            Shape::Constant => 1,
            Shape::Monotone { ranks, .. } => ranks.len(),
        }
    }
}

fn strictly_monotone(map: &BTreeMap<usize, usize>) -> bool {
    let v: Vec<usize> = map.values().copied().collect();
    v.windows(2).all(|w| w[0] < w[1]) || v.windows(2).all(|w| w[0] > w[1])
}

/// Classes of cells and the shapes each class may take.
fn comparison_options(probe: &DiscreteTable, e: IntervalSpec, family: Family) -> (Vec<Vec<usize>>, Vec<Vec<Shape>>) {
    let sizes = probe.input_sizes().to_vec();
    let single = family == Family::CmSingle;
    let mut classes: BTreeMap<Vec<u8>, Vec<usize>> = BTreeMap::new();
    for (i, a) in probe.cells().enumerate() {
        let key: Vec<u8> = if single {
            Orbit::of_ranks(&a, sizes[0], e).to_string().into_bytes()
        } else {
            StrongOrbit::of_ranks(&a, &sizes, e).to_string().into_bytes()
        };
        classes.entry(key).or_default().push(i);
    }
    let classes: Vec<Vec<usize>> = classes.into_values().collect();
    let mut options: Vec<Vec<Shape>> = Vec::new();
    for cells in &classes {
        let first = probe.cell_at(cells[0]);
        let mut opts = vec![Shape::Constant];
        for c in 0..probe.arity() {
            if !interior(first[c], sizes[c], e) {
                continue;
            }
            let cell_rank: Vec<usize> = cells.iter().map(|&i| probe.cell_at(i)[c]).collect();
            let mut ranks = cell_rank.clone();
            ranks.sort_unstable();
            ranks.dedup();
            let shape = Shape::Monotone { key: if single { 0 } else { c }, ranks, cell_rank };
            if !opts.contains(&shape) {
                opts.push(shape);
            }
        }
        options.push(opts);
    }
    (classes, options)
}

fn comparison_work(options: &[Vec<Shape>]) -> (usize, u128) {
    let max_atoms: usize = options.iter().map(|o| o.iter().map(Shape::atoms).max().unwrap_or(1)).sum();
    let combos: u128 = options.iter().map(|o| o.len() as u128).product();
    (max_atoms, combos.saturating_mul(fubini(max_atoms.min(30))))
}

fn generate_comparison(probe: &DiscreteTable, e: IntervalSpec, family: Family) -> Result<HashSet<Vec<usize>>> {
    let (classes, options) = comparison_options(probe, e, family);
    let (max_atoms, work) = comparison_work(&options);
    if max_atoms > 12 || work > MAX_ORACLE_WORK {
        return Err(Error::SizeLimit(format!("about {work} comparison parametrisations exceed the oracle limit")));
    }
    let mut partitions: BTreeMap<usize, Vec<Vec<usize>>> = BTreeMap::new();
    let mut out = HashSet::new();
    let mut pick = vec![0usize; options.len()];
    loop {
        let shapes: Vec<&Shape> = pick.iter().enumerate().map(|(c, &p)| &options[c][p]).collect();
        let mut offsets = Vec::with_capacity(shapes.len());
        let mut total = 0;
        for s in &shapes {
            offsets.push(total);
            total += s.atoms();
        }
        let levels = partitions.entry(total).or_insert_with(|| {
            ordered_partitions(total)
                .into_iter()
                .map(|blocks| {
                    let mut v = vec![0; total];
                    for (b, block) in blocks.iter().enumerate() {
                        for &i in block {
                            v[i] = b;
                        }
                    }
                    v
                })
                .collect()
        });
        for values in levels.iter() {
            if let Some(entries) = realise(probe, &classes, &shapes, &offsets, values) {
                out.insert(entries);
            }
        }
        let mut c = options.len();
        loop {
            if c == 0 {
                return Ok(out);
            }
            c -= 1;
            pick[c] += 1;
            if pick[c] < options[c].len() {
                break;
            }
            pick[c] = 0;
        }
    }
}

/// Checks the range relations for one value assignment and builds the table.
fn realise(
    probe: &DiscreteTable,
    classes: &[Vec<usize>],
    shapes: &[&Shape],
    offsets: &[usize],
    values: &[usize],
) -> Option<Vec<usize>> {
    let maps: Vec<BTreeMap<usize, usize>> = shapes
        .iter()
        .zip(offsets)
        .map(|(s, &o)| match s {
            Shape::Constant => BTreeMap::from([(usize::MAX, values[o])]),
            Shape::Monotone { ranks, .. } => ranks.iter().enumerate().map(|(j, &r)| (r, values[o + j])).collect(),
        })
        .collect();
    if !relations_hold(shapes, &maps) {
        return None;
    }
    let mut entries = vec![0; probe.len()];
    for ((cells, s), m) in classes.iter().zip(shapes).zip(&maps) {
        for (j, &i) in cells.iter().enumerate() {
            entries[i] = match s {
                Shape::Constant => m[&usize::MAX],
                Shape::Monotone { cell_rank, .. } => m[&cell_rank[j]],
            };
        }
    }
    Some(entries)
}

/// Strict monotonicity of each function and the four range relations
/// between every two classes, merging functions on shared domains.
fn relations_hold(shapes: &[&Shape], maps: &[BTreeMap<usize, usize>]) -> bool {
    for (s, m) in shapes.iter().zip(maps) {
        if matches!(s, Shape::Monotone { .. }) && !strictly_monotone(m) {
            return false;
        }
    }
    let range = |m: &BTreeMap<usize, usize>| (*m.values().min().unwrap(), *m.values().max().unwrap());
    let mut parent: Vec<usize> = (0..shapes.len()).collect();
    fn root(p: &mut [usize], i: usize) -> usize {
        let mut i = i;
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for i in 0..shapes.len() {
        for j in i + 1..shapes.len() {
            let (li, hi) = range(&maps[i]);
            let (lj, hj) = range(&maps[j]);
            if hi < lj || hj < li {
                continue;
            }
            match (shapes[i], shapes[j]) {
                (Shape::Constant, Shape::Constant) if li == lj => {}
                (Shape::Monotone { key: a, .. }, Shape::Monotone { key: b, .. }) if a == b => {
                    let (ri, rj) = (root(&mut parent, i), root(&mut parent, j));
                    parent[ri] = rj;
                }
                _ => return false,
            }
        }
    }
    let mut merged: BTreeMap<usize, BTreeMap<usize, usize>> = BTreeMap::new();
    for i in 0..shapes.len() {
        if let Shape::Monotone { .. } = shapes[i] {
            let r = root(&mut parent, i);
            let acc = merged.entry(r).or_default();
            for (&rank, &v) in &maps[i] {
                if let Some(old) = acc.insert(rank, v) {
                    if old != v {
                        return false;
                    }
                }
            }
            if !strictly_monotone(acc) {
                return false;
            }
        }
    }
    true
}
