//! The definitional route for comparison meaningfulness on tables.
//!
//! A table passes when the comparison between two cells depends only on the
//! joint order pattern of the two cells, and when no three virtual points
//! inherit comparisons that contradict each other.

use std::cmp::Ordering;
use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use crate::chain::DiscreteTable;
use crate::error::{Error, Result};
use crate::orbits::{enumerate_orbits, orbit_count, Orbit};
use crate::scale::{IntervalSpec, PlBijection, Rational};

use super::invariance::fmt_cell;
use super::witness::{consistent, sign_str, Evidence, Leg, TableFunction, Witness, WitnessKind};
use super::CmMode;

/// Largest number of cells for which pairs are examined.
pub const MAX_PATTERN_CELLS: usize = 4096;
/// Largest number of virtual triple patterns examined for transitivity.
pub const MAX_TRIPLE_PATTERNS: u128 = 200_000;

/// Joint pattern of a pair of cells.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum PairKey {
    Joint(Orbit),
    PerCoordinate(Vec<Orbit>),
}

/// Pair patterns and virtual triples for fixed chains. Nothing here depends
/// on the table's values, so one index serves every table on those chains.
pub struct PatternIndex {
    mode: CmMode,
    input_sizes: Vec<usize>,
    cells: Vec<Vec<usize>>,
    points: Vec<Vec<Rational>>,
    /// Pattern id of the ordered cell pair `(i, j)`, stored at `i * cells + j`.
    pair_id: Vec<usize>,
    /// First cell pair realising each pattern.
    first_pair: Vec<(usize, usize)>,
    /// Pattern ids of `x:y`, `y:z`, `x:z` together with the virtual points.
    triples: Vec<([usize; 3], [Vec<Rational>; 3])>,
    complete: bool,
}

impl PatternIndex {
    pub fn new(input_sizes: &[usize], e: IntervalSpec, mode: CmMode) -> Result<Self> {
        let single = mode == CmMode::Single;
        let n = input_sizes.len();
        if n == 0 {
            return Err(Error::InvalidTable("a table needs at least one input".into()));
        }
        if single && input_sizes.iter().any(|&k| k != input_sizes[0]) {
            return Err(Error::ChainMismatch("single-scale comparisons need equal input chains".into()));
        }
        let count = DiscreteTable::cell_count(input_sizes)?;
        if count > MAX_PATTERN_CELLS {
            return Err(Error::SizeLimit(format!("pattern check is capped at {MAX_PATTERN_CELLS} cells")));
        }
        let probe = DiscreteTable::new(input_sizes.to_vec(), 1, vec![0; count])?;
        let f = TableFunction::ranked(&probe, e)?;
        let cells: Vec<Vec<usize>> = probe.cells().collect();
        let points: Vec<Vec<Rational>> = cells.iter().map(|a| f.point(a)).collect();
        let key_of = |a: &[usize], b: &[usize]| -> PairKey {
            if single {
                let joint: Vec<usize> = a.iter().chain(b).copied().collect();
                PairKey::Joint(Orbit::of_ranks(&joint, input_sizes[0], e))
            } else {
                PairKey::PerCoordinate((0..n).map(|i| Orbit::of_ranks(&[a[i], b[i]], input_sizes[i], e)).collect())
            }
        };
        let mut ids: HashMap<PairKey, usize> = HashMap::new();
        let mut pair_id = Vec::with_capacity(cells.len() * cells.len());
        let mut first_pair = Vec::new();
        for i in 0..cells.len() {
            for j in 0..cells.len() {
                let next = ids.len();
                let id = *ids.entry(key_of(&cells[i], &cells[j])).or_insert(next);
                if id == first_pair.len() {
                    first_pair.push((i, j));
                }
                pair_id.push(id);
            }
        }

        let mut triples = Vec::new();
        let mut complete = true;
        if single {
            if orbit_count(3 * n, e) > MAX_TRIPLE_PATTERNS {
                complete = false;
            } else {
                let xy: Vec<usize> = (0..2 * n).collect();
                let yz: Vec<usize> = (n..3 * n).collect();
                let xz: Vec<usize> = (0..n).chain(2 * n..3 * n).collect();
                for o in enumerate_orbits(3 * n, e)? {
                    let keys = [o.restrict(&xy), o.restrict(&yz), o.restrict(&xz)].map(PairKey::Joint);
                    if let [Some(&a), Some(&b), Some(&c)] = keys.each_ref().map(|k| ids.get(k)) {
                        let rep = o.representative();
                        triples.push(([a, b, c], [rep[..n].to_vec(), rep[n..2 * n].to_vec(), rep[2 * n..].to_vec()]));
                    }
                }
            }
        } else {
            let base = enumerate_orbits(3, e)?;
            let total = (base.len() as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
            if total > MAX_TRIPLE_PATTERNS {
                complete = false;
            } else {
                let parts: Vec<[Orbit; 3]> =
                    base.iter().map(|o| [o.restrict(&[0, 1]), o.restrict(&[1, 2]), o.restrict(&[0, 2])]).collect();
                let reps: Vec<Vec<Rational>> = base.iter().map(Orbit::representative).collect();
                let mut idx = vec![0usize; n];
                'outer: loop {
                    let keys =
                        [0, 1, 2].map(|p| PairKey::PerCoordinate(idx.iter().map(|&t| parts[t][p].clone()).collect()));
                    if let [Some(&a), Some(&b), Some(&c)] = keys.each_ref().map(|k| ids.get(k)) {
                        let coord = |m: usize| idx.iter().map(|&t| reps[t][m].clone()).collect::<Vec<_>>();
                        triples.push(([a, b, c], [coord(0), coord(1), coord(2)]));
                    }
                    let mut c = n;
                    loop {
                        if c == 0 {
                            break 'outer;
                        }
                        c -= 1;
                        idx[c] += 1;
                        if idx[c] < base.len() {
                            break;
                        }
                        idx[c] = 0;
                    }
                }
            }
        }
        Ok(PatternIndex { mode, input_sizes: input_sizes.to_vec(), cells, points, pair_id, first_pair, triples, complete })
    }

    /// False when the virtual triples exceeded the cap and only pair
    /// patterns are checked.
    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn pattern_count(&self) -> usize {
        self.first_pair.len()
    }

    pub fn triple_count(&self) -> usize {
        self.triples.len()
    }

    fn carry(&self, from: &[&[Rational]], to: &[&[Rational]]) -> Result<Vec<PlBijection>> {
        let n = from[0].len();
        if self.mode == CmMode::Single {
            let pairs: Vec<(Rational, Rational)> = from
                .iter()
                .zip(to)
                .flat_map(|(x, y)| x.iter().cloned().zip(y.iter().cloned()))
                .collect();
            Ok(vec![PlBijection::through(&pairs)?])
        } else {
            (0..n)
                .map(|i| {
                    let pairs: Vec<(Rational, Rational)> =
                        from.iter().zip(to).map(|(x, y)| (x[i].clone(), y[i].clone())).collect();
                    PlBijection::through(&pairs)
                })
                .collect()
        }
    }

    fn kind(&self) -> WitnessKind {
        match self.mode {
            CmMode::Single => WitnessKind::CmSingle,
            CmMode::Independent => WitnessKind::CmIndependent,
        }
    }

    fn signs(&self, table: &DiscreteTable) -> Result<std::result::Result<Vec<Ordering>, (usize, usize, usize)>> {
        if table.input_sizes() != self.input_sizes.as_slice() {
            return Err(Error::ChainMismatch("table chains differ from the index".into()));
        }
        let c = self.cells.len();
        let t = table.entries();
        let mut signs: Vec<Option<Ordering>> = vec![None; self.first_pair.len()];
        for i in 0..c {
            for j in 0..c {
                let id = self.pair_id[i * c + j];
                let s = t[i].cmp(&t[j]);
                match signs[id] {
                    None => signs[id] = Some(s),
                    Some(s0) if s0 != s => return Ok(Err((id, i, j))),
                    _ => {}
                }
            }
        }
        Ok(Ok(signs.into_iter().map(|s| s.expect("every pattern is realised")).collect()))
    }

    /// Runs the check on one table. `None` means no violation was found.
    pub fn witness(&self, table: &DiscreteTable) -> Result<Option<Witness>> {
        let t = table.entries();
        let signs = match self.signs(table)? {
            Ok(signs) => signs,
            Err((id, i, j)) => {
                let (i0, j0) = self.first_pair[id];
                return self.flip((i0, j0), t[i0].cmp(&t[j0]), (i, j), t[i].cmp(&t[j])).map(Some);
            }
        };
        for (ids, virt) in &self.triples {
            let s = ids.map(|id| signs[id]);
            if !consistent(s[0], s[1], s[2]) {
                return self.intransitive(ids, virt, s).map(Some);
            }
        }
        Ok(None)
    }

    /// Looks for a violation that involves the joint pattern of the cells
    /// `a` and `b`: another pair with that pattern comparing differently, or
    /// a contradictory triple with that pattern as one of its comparisons.
    pub fn witness_through(&self, table: &DiscreteTable, a: &[usize], b: &[usize]) -> Result<Option<Witness>> {
        if table.input_sizes() != self.input_sizes.as_slice() {
            return Err(Error::ChainMismatch("table chains differ from the index".into()));
        }
        let inside = |x: &[usize]| x.len() == table.arity() && x.iter().zip(table.input_sizes()).all(|(&r, &k)| r < k);
        if !inside(a) || !inside(b) {
            return Err(Error::Precondition("focus cells are not cells of the table".into()));
        }
        let c = self.cells.len();
        let t = table.entries();
        let (i, j) = (table.index_of(a), table.index_of(b));
        let id = self.pair_id[i * c + j];
        let s = t[i].cmp(&t[j]);
        for u in 0..c {
            for v in 0..c {
                if self.pair_id[u * c + v] == id && t[u].cmp(&t[v]) != s {
                    return self.flip((i, j), s, (u, v), t[u].cmp(&t[v])).map(Some);
                }
            }
        }
        // Realised comparisons per pattern, one cell pair for each sign.
        let mut realised: Vec<[Option<(usize, usize)>; 3]> = vec![[None; 3]; self.first_pair.len()];
        for u in 0..c {
            for v in 0..c {
                let slot = &mut realised[self.pair_id[u * c + v]][sign_slot(t[u].cmp(&t[v]))];
                slot.get_or_insert((u, v));
            }
        }
        realised[id] = [None; 3];
        realised[id][sign_slot(s)] = Some((i, j));
        for (ids, virt) in &self.triples {
            if !ids.contains(&id) {
                continue;
            }
            for choice in 0..27 {
                let slots = [choice % 3, choice / 3 % 3, choice / 9];
                let pairs = [0, 1, 2].map(|l| realised[ids[l]][slots[l]]);
                let [Some(p0), Some(p1), Some(p2)] = pairs else { continue };
                let signs = [p0, p1, p2].map(|(u, v)| t[u].cmp(&t[v]));
                if !consistent(signs[0], signs[1], signs[2]) {
                    return self.intransitive_pairs(virt, signs, [p0, p1, p2]).map(Some);
                }
            }
        }
        Ok(None)
    }

    fn flip(&self, (i0, j0): (usize, usize), s0: Ordering, (i, j): (usize, usize), s: Ordering) -> Result<Witness> {
        let p = &self.points;
        let cells = &self.cells;
        let transforms = self.carry(&[&p[i0], &p[j0]], &[&p[i], &p[j]])?;
        Ok(Witness {
            kind: self.kind(),
            observed: format!(
                "G{} {} G{} but G{} {} G{}",
                fmt_cell(&cells[i0]),
                sign_str(s0),
                fmt_cell(&cells[j0]),
                fmt_cell(&cells[i]),
                sign_str(s),
                fmt_cell(&cells[j])
            ),
            required: "pairs with the same joint pattern compare the same way".into(),
            evidence: Evidence::Transform { points: vec![p[i0].clone(), p[j0].clone()], transforms },
            cells: vec![cells[i0].clone(), cells[j0].clone(), cells[i].clone(), cells[j].clone()],
        })
    }

    fn intransitive(&self, ids: &[usize; 3], virt: &[Vec<Rational>; 3], s: [Ordering; 3]) -> Result<Witness> {
        self.intransitive_pairs(virt, s, ids.map(|id| self.first_pair[id]))
    }

    fn intransitive_pairs(&self, virt: &[Vec<Rational>; 3], s: [Ordering; 3], pairs: [(usize, usize); 3]) -> Result<Witness> {
        let ends = [(0, 1), (1, 2), (0, 2)];
        let mut legs = Vec::new();
        let mut involved = Vec::new();
        for (&(i, j), &(u, v)) in pairs.iter().zip(&ends) {
            let transforms = self.carry(&[&self.points[i], &self.points[j]], &[&virt[u], &virt[v]])?;
            legs.push(Leg {
                points: vec![self.points[i].clone(), self.points[j].clone()],
                transforms,
                images: vec![virt[u].clone(), virt[v].clone()],
            });
            involved.push(self.cells[i].clone());
            involved.push(self.cells[j].clone());
        }
        Ok(Witness {
            kind: self.kind(),
            observed: format!(
                "virtual points inherit F(x) {} F(y), F(y) {} F(z), F(x) {} F(z)",
                sign_str(s[0]),
                sign_str(s[1]),
                sign_str(s[2])
            ),
            required: "inherited comparisons must be realisable by real values".into(),
            evidence: Evidence::Intransitive { legs },
            cells: involved,
        })
    }
}

fn sign_slot(s: Ordering) -> usize {
    match s {
        Ordering::Less => 0,
        Ordering::Equal => 1,
        Ordering::Greater => 2,
    }
}

/// Runs the definitional check on one table. `None` means no violation was found.
///
/// Indexes are cached per thread, keyed by chains, interval and mode.
pub fn comparison_witness(table: &DiscreteTable, e: IntervalSpec, mode: CmMode) -> Result<Option<Witness>> {
    cached(table.input_sizes(), e, mode)?.witness(table)
}

const CACHE_SLOTS: usize = 32;

type CacheKey = (Vec<usize>, IntervalSpec, CmMode);

fn cached(input_sizes: &[usize], e: IntervalSpec, mode: CmMode) -> Result<Rc<PatternIndex>> {
    thread_local! {
        static CACHE: RefCell<Vec<(CacheKey, Rc<PatternIndex>)>> = const { RefCell::new(Vec::new()) };
    }
    let key = (input_sizes.to_vec(), e, mode);
    if let Some(index) = CACHE.with(|c| c.borrow().iter().find(|(k, _)| *k == key).map(|(_, v)| v.clone())) {
        return Ok(index);
    }
    let index = Rc::new(PatternIndex::new(input_sizes, e, mode)?);
    CACHE.with(|c| {
        let mut c = c.borrow_mut();
        if c.len() >= CACHE_SLOTS {
            c.remove(0);
        }
        c.push((key, index.clone()));
    });
    Ok(index)
}

/// As [`comparison_witness`], restricted to violations involving the joint
/// pattern of cells `a` and `b`.
pub fn comparison_witness_through(
    table: &DiscreteTable,
    e: IntervalSpec,
    mode: CmMode,
    a: &[usize],
    b: &[usize],
) -> Result<Option<Witness>> {
    cached(table.input_sizes(), e, mode)?.witness_through(table, a, b)
}
