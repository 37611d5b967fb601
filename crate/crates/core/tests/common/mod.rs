//! Helpers and brute-force oracles shared by the integration tests. Nothing
//! here uses the orbit, pattern or range machinery of the library: points are
//! integer grid coordinates and tables are read through explicit chain
//! embeddings.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use ordagg::chain::DiscreteTable;
use ordagg::scale::IntervalSpec;

/// Every table on `sizes` with outputs in `0..m`, in counting order.
pub fn all_tables(sizes: Vec<usize>, m: usize) -> impl Iterator<Item = DiscreteTable> {
    let cells: usize = sizes.iter().product();
    let total = m.pow(cells as u32);
    (0..total).map(move |mut idx| {
        let mut entries = vec![0; cells];
        for c in entries.iter_mut().rev() {
            *c = idx % m;
            idx /= m;
        }
        DiscreteTable::new(sizes.clone(), m, entries).unwrap()
    })
}

/// Weak-order pattern of an integer tuple, with endpoint flags on the
/// smallest and largest values when they sit at `0` or `denom`.
fn grid_pattern(x: &[i64], e: IntervalSpec, denom: i64) -> (Vec<usize>, bool, bool) {
    let distinct: Vec<i64> = x.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    let ranks = x.iter().map(|v| distinct.binary_search(v).unwrap()).collect();
    (ranks, e.has_inf && distinct[0] == 0, e.has_sup && *distinct.last().unwrap() == denom)
}

/// Number of distinct patterns among all grid points of `E^n` with
/// coordinates `i/denom`.
pub fn grid_orbit_census(n: usize, e: IntervalSpec, denom: i64) -> usize {
    let lo = if e.has_inf { 0 } else { 1 };
    let hi = if e.has_sup { denom } else { denom - 1 };
    let mut seen = BTreeSet::new();
    let mut x = vec![lo; n];
    loop {
        seen.insert(grid_pattern(&x, e, denom));
        let mut i = n;
        loop {
            if i == 0 {
                return seen.len();
            }
            i -= 1;
            x[i] += 1;
            if x[i] <= hi {
                break;
            }
            x[i] = lo;
        }
    }
}

/// Number of distinct boundary/interior level vectors on the same grid.
pub fn grid_strong_census(n: usize, e: IntervalSpec, denom: i64) -> usize {
    let lo = if e.has_inf { 0 } else { 1 };
    let hi = if e.has_sup { denom } else { denom - 1 };
    let level = |v: i64| if v == 0 { 0 } else if v == denom { 2 } else { 1 };
    let mut seen = BTreeSet::new();
    let mut x = vec![lo; n];
    loop {
        seen.insert(x.iter().map(|&v| level(v)).collect::<Vec<_>>());
        let mut i = n;
        loop {
            if i == 0 {
                return seen.len();
            }
            i -= 1;
            x[i] += 1;
            if x[i] <= hi {
                break;
            }
            x[i] = lo;
        }
    }
}

/// Nondecreasing nonconstant truth tables on `n <= 4` variables, found by
/// checking every Boolean function.
pub fn filter_cn(n: usize) -> Vec<u64> {
    let sets = 1usize << n;
    let total: u64 = 1 << sets;
    (0..total)
        .filter(|&f| {
            let bit = |s: usize| f >> s & 1 == 1;
            let monotone = (0..sets).all(|s| (0..n).all(|i| !bit(s) || bit(s | 1 << i)));
            monotone && f != 0 && f != total - 1
        })
        .collect()
}

/// Endpoint-preserving increasing maps of a `k`-chain into `{0, ..., denom}`
/// restricted to `E`.
pub fn grid_embeddings(k: usize, e: IntervalSpec, denom: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    fn go(k: usize, e: IntervalSpec, denom: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        let r = cur.len();
        if r == k {
            out.push(cur.clone());
            return;
        }
        let lo = cur.last().map_or(0, |&v| v + 1);
        for v in lo..=denom {
            let bottom_ok = if v == 0 { e.has_inf && r == 0 } else { !(e.has_inf && r == 0) };
            let top_ok = if v == denom { e.has_sup && r + 1 == k } else { !(e.has_sup && r + 1 == k) };
            if bottom_ok && top_ok {
                cur.push(v);
                go(k, e, denom, cur, out);
                cur.pop();
            }
        }
    }
    go(k, e, denom, &mut Vec::new(), &mut out);
    out
}

/// Order invariance by definition: reading the table through every grid
/// embedding must define one function on grid points.
pub fn oi_by_embeddings(t: &DiscreteTable, e: IntervalSpec, denom: i64) -> bool {
    let k = t.uniform_size().expect("uniform table");
    let mut value: HashMap<Vec<i64>, i64> = HashMap::new();
    for f in grid_embeddings(k, e, denom) {
        for (a, &g) in t.cells().zip(t.entries()) {
            let x: Vec<i64> = a.iter().map(|&r| f[r]).collect();
            if *value.entry(x).or_insert(f[g]) != f[g] {
                return false;
            }
        }
    }
    true
}

struct Relation {
    parent: Vec<usize>,
    index: HashMap<Vec<i64>, usize>,
    strict: Vec<(usize, usize)>,
}

impl Relation {
    fn new() -> Self {
        Relation { parent: vec![], index: HashMap::new(), strict: vec![] }
    }

    fn node(&mut self, x: Vec<i64>) -> usize {
        let next = self.parent.len();
        let id = *self.index.entry(x).or_insert(next);
        if id == next {
            self.parent.push(id);
        }
        id
    }

    fn find(&mut self, mut a: usize) -> usize {
        while self.parent[a] != a {
            self.parent[a] = self.parent[self.parent[a]];
            a = self.parent[a];
        }
        a
    }

    fn add(&mut self, x: Vec<i64>, y: Vec<i64>, s: std::cmp::Ordering) {
        let (a, b) = (self.node(x), self.node(y));
        match s {
            std::cmp::Ordering::Equal => {
                let (ra, rb) = (self.find(a), self.find(b));
                self.parent[ra] = rb;
            }
            std::cmp::Ordering::Less => self.strict.push((a, b)),
            std::cmp::Ordering::Greater => self.strict.push((b, a)),
        }
    }

    /// Whether some real-valued function realises all recorded comparisons.
    fn realisable(mut self) -> bool {
        let n = self.parent.len();
        let mut succ = vec![vec![]; n];
        for (a, b) in std::mem::take(&mut self.strict) {
            let (ra, rb) = (self.find(a), self.find(b));
            if ra == rb {
                return false;
            }
            succ[ra].push(rb);
        }
        // Kahn's algorithm on the quotient graph.
        let mut indeg = vec![0; n];
        for s in &succ {
            for &b in s {
                indeg[b] += 1;
            }
        }
        let mut stack: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut seen = 0;
        while let Some(v) = stack.pop() {
            seen += 1;
            for &b in &succ[v] {
                indeg[b] -= 1;
                if indeg[b] == 0 {
                    stack.push(b);
                }
            }
        }
        seen == n
    }
}

/// Comparison meaningfulness by definition: comparisons read through grid
/// embeddings (one common embedding, or one per coordinate) must be realised
/// by a single real-valued function on grid points.
pub fn cm_by_embeddings(t: &DiscreteTable, e: IntervalSpec, denom: i64, independent: bool) -> bool {
    let n = t.arity();
    let per_coord: Vec<Vec<Vec<i64>>> = t.input_sizes().iter().map(|&k| grid_embeddings(k, e, denom)).collect();
    let mut tuples: Vec<Vec<usize>> = vec![vec![]];
    if independent {
        for c in &per_coord {
            tuples = tuples.into_iter().flat_map(|p| (0..c.len()).map(move |i| [p.clone(), vec![i]].concat())).collect();
        }
    } else {
        tuples = (0..per_coord[0].len()).map(|i| vec![i; n]).collect();
    }
    let cells: Vec<Vec<usize>> = t.cells().collect();
    let mut rel = Relation::new();
    for choice in tuples {
        let points: Vec<Vec<i64>> =
            cells.iter().map(|a| (0..n).map(|i| per_coord[i][choice[i]][a[i]]).collect()).collect();
        for (i, x) in points.iter().enumerate() {
            for (j, y) in points.iter().enumerate().skip(i + 1) {
                rel.add(x.clone(), y.clone(), t.entries()[i].cmp(&t.entries()[j]));
            }
        }
    }
    rel.realisable()
}
