//! Finite chains embedded in the scale, and functions between chains stored
//! as dense tables.

use std::collections::BTreeSet;

use num::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functions::Aggregator;
use crate::lattice::LatticePolynomial;
use crate::scale::{rat, IntervalSpec, PlBijection, Rational};

/// Largest number of cells a table may hold.
pub const MAX_TABLE_CELLS: usize = 10_000_000;

/// A chain of `k` ranks `0 < 1 < ... < k-1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Chain {
    size: usize,
}

impl Chain {
    pub fn new(size: usize) -> Result<Self> {
        if size < 2 {
            return Err(Error::InvalidChain(format!("a chain needs at least two ranks, got {size}")));
        }
        Ok(Chain { size })
    }

    pub fn size(&self) -> usize {
        self.size
    }
}

/// A strictly increasing map of a chain into the scale that sends rank 0 to
/// the infimum and the last rank to the supremum whenever those belong to it.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ChainEmbedding {
    chain: Chain,
    interval: IntervalSpec,
    values: Vec<Rational>,
}

impl ChainEmbedding {
    pub fn new(chain: Chain, interval: IntervalSpec, values: Vec<Rational>) -> Result<Self> {
        if values.len() != chain.size() {
            return Err(Error::InvalidChain(format!("{} values for a chain of {}", values.len(), chain.size())));
        }
        interval.check_tuple(&values)?;
        if values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidChain("embedding values must increase strictly".into()));
        }
        if interval.has_inf && !values[0].is_zero() {
            return Err(Error::InvalidChain("rank 0 must map to the infimum".into()));
        }
        if interval.has_sup && !values[values.len() - 1].is_one() {
            return Err(Error::InvalidChain("the top rank must map to the supremum".into()));
        }
        Ok(ChainEmbedding { chain, interval, values })
    }

    /// Ranks spread evenly: `r ↦ (r + off) / (k - 1 + off + off2)`.
    pub fn canonical(chain: Chain, interval: IntervalSpec) -> Self {
        let off = if interval.has_inf { 0 } else { 1 };
        let off2 = if interval.has_sup { 0 } else { 1 };
        let denom = (chain.size() - 1 + off + off2) as i64;
        let values = (0..chain.size()).map(|r| rat((r + off) as i64, denom)).collect();
        ChainEmbedding { chain, interval, values }
    }

    pub fn chain(&self) -> Chain {
        self.chain
    }

    pub fn interval(&self) -> IntervalSpec {
        self.interval
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn value(&self, r: usize) -> &Rational {
        &self.values[r]
    }

    pub fn rank_of(&self, x: &Rational) -> Option<usize> {
        self.values.binary_search(x).ok()
    }

    /// Composition with an automorphism of the scale.
    pub fn transformed(&self, phi: &PlBijection) -> Self {
        ChainEmbedding {
            chain: self.chain,
            interval: self.interval,
            values: self.values.iter().map(|v| phi.apply(v)).collect(),
        }
    }
}

/// Embeddings into the lattice `{ i / grid : 0 <= i <= grid } ∩ E`, in
/// lexicographic order of their values.
pub fn enumerate_embeddings(chain: Chain, grid: usize, interval: IntervalSpec) -> Result<Vec<ChainEmbedding>> {
    if grid < chain.size() {
        return Err(Error::Precondition(format!("grid {grid} is smaller than the chain size {}", chain.size())));
    }
    let k = chain.size();
    let interior: Vec<Rational> = (1..grid).map(|i| rat(i as i64, grid as i64)).collect();
    let free = k - interval.boundary_count();
    let mut out = Vec::new();
    let mut pick = Vec::new();
    fn choose(start: usize, left: usize, pool: &[Rational], pick: &mut Vec<Rational>, out: &mut Vec<Vec<Rational>>) {
        if left == 0 {
            out.push(pick.clone());
            return;
        }
        for i in start..pool.len() {
            if pool.len() - i < left {
                break;
            }
            pick.push(pool[i].clone());
            choose(i + 1, left - 1, pool, pick, out);
            pick.pop();
        }
    }
    let mut middles = Vec::new();
    choose(0, free, &interior, &mut pick, &mut middles);
    for mid in middles {
        let mut values = Vec::with_capacity(k);
        if interval.has_inf {
            values.push(Rational::zero());
        }
        values.extend(mid);
        if interval.has_sup {
            values.push(Rational::one());
        }
        out.push(ChainEmbedding { chain, interval, values });
    }
    if out.is_empty() {
        return Err(Error::Precondition(format!("no embedding of {k} ranks fits a grid of {grid}")));
    }
    Ok(out)
}

/// A function `S_1 × ... × S_n -> T` between finite chains, stored densely in
/// row-major order (the last coordinate varies fastest).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DiscreteTable {
    input_sizes: Vec<usize>,
    output_size: usize,
    entries: Vec<usize>,
}

impl DiscreteTable {
    pub fn new(input_sizes: Vec<usize>, output_size: usize, entries: Vec<usize>) -> Result<Self> {
        if input_sizes.is_empty() {
            return Err(Error::InvalidTable("arity must be at least 1".into()));
        }
        if input_sizes.contains(&0) || output_size == 0 {
            return Err(Error::InvalidTable("chain sizes must be positive".into()));
        }
        let cells = Self::cell_count(&input_sizes)?;
        if entries.len() != cells {
            return Err(Error::InvalidTable(format!("expected {cells} cells, got {}", entries.len())));
        }
        if let Some(bad) = entries.iter().find(|&&t| t >= output_size) {
            return Err(Error::InvalidTable(format!("output {bad} outside a chain of {output_size}")));
        }
        Ok(DiscreteTable { input_sizes, output_size, entries })
    }

    /// A table on `S^n -> S`.
    pub fn uniform(n: usize, k: usize, entries: Vec<usize>) -> Result<Self> {
        Self::new(vec![k; n], k, entries)
    }

    pub fn cell_count(sizes: &[usize]) -> Result<usize> {
        let mut total: usize = 1;
        for &k in sizes {
            total = total
                .checked_mul(k)
                .filter(|&t| t <= MAX_TABLE_CELLS)
                .ok_or_else(|| Error::SizeLimit(format!("tables are capped at {MAX_TABLE_CELLS} cells")))?;
        }
        Ok(total)
    }

    /// Tabulates `f` on every cell.
    pub fn from_fn(input_sizes: Vec<usize>, output_size: usize, mut f: impl FnMut(&[usize]) -> usize) -> Result<Self> {
        let cells = Self::cell_count(&input_sizes)?;
        let mut entries = Vec::with_capacity(cells);
        let mut a = vec![0; input_sizes.len()];
        for _ in 0..cells {
            entries.push(f(&a));
            advance(&mut a, &input_sizes);
        }
        Self::new(input_sizes, output_size, entries)
    }

    pub fn arity(&self) -> usize {
        self.input_sizes.len()
    }

    pub fn input_sizes(&self) -> &[usize] {
        &self.input_sizes
    }

    pub fn output_size(&self) -> usize {
        self.output_size
    }

    pub fn entries(&self) -> &[usize] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The common chain size when every input chain and the output chain agree.
    pub fn uniform_size(&self) -> Option<usize> {
        let k = self.output_size;
        self.input_sizes.iter().all(|&s| s == k).then_some(k)
    }

    /// The common input chain size.
    pub fn common_input_size(&self) -> Option<usize> {
        let k = self.input_sizes[0];
        self.input_sizes.iter().all(|&s| s == k).then_some(k)
    }

    pub fn index_of(&self, a: &[usize]) -> usize {
        a.iter().zip(&self.input_sizes).fold(0, |acc, (&r, &k)| acc * k + r)
    }

    pub fn cell_at(&self, mut index: usize) -> Vec<usize> {
        let mut a = vec![0; self.arity()];
        for i in (0..self.arity()).rev() {
            a[i] = index % self.input_sizes[i];
            index /= self.input_sizes[i];
        }
        a
    }

    pub fn get(&self, a: &[usize]) -> usize {
        self.entries[self.index_of(a)]
    }

    /// All cells in row-major order.
    pub fn cells(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.len()).map(|i| self.cell_at(i))
    }

    /// The same table with outputs re-ranked onto the attained image.
    pub fn normalized(&self) -> DiscreteTable {
        let image: BTreeSet<usize> = self.entries.iter().copied().collect();
        let image: Vec<usize> = image.into_iter().collect();
        let entries = self.entries.iter().map(|t| image.binary_search(t).expect("attained")).collect();
        DiscreteTable { input_sizes: self.input_sizes.clone(), output_size: image.len(), entries }
    }

    pub fn is_surjective(&self) -> bool {
        self.normalized().output_size == self.output_size
    }
}

/// Steps a rank tuple to the next one in row-major order.
pub(crate) fn advance(a: &mut [usize], sizes: &[usize]) {
    for i in (0..a.len()).rev() {
        a[i] += 1;
        if a[i] < sizes[i] {
            return;
        }
        a[i] = 0;
    }
}

/// The table `G` with `f(G(a)) = F(f(a))` for the canonical embedding `f`.
///
/// The result is cross-checked on a second, skewed embedding; a function
/// that is not order invariant fails with [`Error::NotRepresentable`].
pub fn discrete_representative(source: &dyn Aggregator, chain: Chain, interval: IntervalSpec) -> Result<DiscreteTable> {
    let canonical = ChainEmbedding::canonical(chain, interval);
    let table = tabulate_through(source, &canonical)?;
    let skew = PlBijection::through(&[(rat(1, 2), rat(1, 3))]).expect("valid breakpoints");
    let other = tabulate_through(source, &canonical.transformed(&skew))?;
    if other != table {
        return Err(Error::NotRepresentable(format!(
            "{} gives different tables on two embeddings",
            source.name()
        )));
    }
    Ok(table)
}

/// The table of `F` read through one embedding.
pub fn tabulate_through(source: &dyn Aggregator, embedding: &ChainEmbedding) -> Result<DiscreteTable> {
    let k = embedding.chain().size();
    let n = source.arity();
    let mut failure = None;
    let table = DiscreteTable::from_fn(vec![k; n], k, |a| {
        let x: Vec<Rational> = a.iter().map(|&r| embedding.value(r).clone()).collect();
        match source.eval(&x) {
            Ok(y) => embedding.rank_of(&y).unwrap_or_else(|| {
                failure.get_or_insert_with(|| {
                    Error::NotRepresentable(format!("{} leaves the chain at {:?}", source.name(), a))
                });
                0
            }),
            Err(e) => {
                failure.get_or_insert(e);
                0
            }
        }
    })?;
    match failure {
        Some(e) => Err(e),
        None => Ok(table),
    }
}

/// The representative of a lattice polynomial, computed on ranks directly.
pub fn polynomial_table(p: &LatticePolynomial, k: usize) -> Result<DiscreteTable> {
    DiscreteTable::from_fn(vec![k; p.arity()], k, |a| p.eval_ranks(a, k))
}

/// Samples `F` on a product of finite sets and re-ranks its values. Returns
/// the table and the sorted distinct values.
pub fn sample_table(source: &dyn Aggregator, grids: &[Vec<Rational>]) -> Result<(DiscreteTable, Vec<Rational>)> {
    if grids.len() != source.arity() {
        return Err(Error::ArityMismatch { expected: source.arity(), found: grids.len() });
    }
    let sizes: Vec<usize> = grids.iter().map(Vec::len).collect();
    let cells = DiscreteTable::cell_count(&sizes)?;
    let mut raw = Vec::with_capacity(cells);
    let mut a = vec![0; sizes.len()];
    for _ in 0..cells {
        let x: Vec<Rational> = a.iter().zip(grids).map(|(&r, g)| g[r].clone()).collect();
        raw.push(source.eval(&x)?);
        advance(&mut a, &sizes);
    }
    let mut values = raw.clone();
    values.sort();
    values.dedup();
    let entries = raw.iter().map(|v| values.binary_search(v).expect("present")).collect();
    Ok((DiscreteTable::new(sizes, values.len(), entries)?, values))
}

/// A pair of cells differing by one rank in one coordinate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NeighbourPair {
    pub lower: Vec<usize>,
    pub upper: Vec<usize>,
}

/// Pairs `a`, `a + e_j` in row-major order of `a`, then by `j`.
fn neighbour_pairs(table: &DiscreteTable) -> impl Iterator<Item = NeighbourPair> + '_ {
    table.cells().flat_map(move |a| {
        (0..table.arity()).filter_map(move |j| {
            (a[j] + 1 < table.input_sizes()[j]).then(|| {
                let mut b = a.clone();
                b[j] += 1;
                NeighbourPair { lower: a.clone(), upper: b }
            })
        })
    })
}

/// `None` when every one-rank step moves the output by at most one rank;
/// otherwise the first offending pair.
pub fn is_smooth(table: &DiscreteTable) -> Option<NeighbourPair> {
    neighbour_pairs(table).find(|p| table.get(&p.lower).abs_diff(table.get(&p.upper)) > 1)
}

/// `None` when the table is nondecreasing; otherwise the first step down.
pub fn nondecreasing_violation(table: &DiscreteTable) -> Option<NeighbourPair> {
    neighbour_pairs(table).find(|p| table.get(&p.lower) > table.get(&p.upper))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TablePredicates {
    pub nondecreasing: bool,
    pub nondecreasing_witness: Option<NeighbourPair>,
    pub idempotent: bool,
    pub internal: bool,
    pub symmetric: bool,
    pub self_dual: bool,
}

/// Structural predicates of a table on `S^n -> S`.
pub fn table_predicates(table: &DiscreteTable) -> Result<TablePredicates> {
    let k = table
        .uniform_size()
        .ok_or_else(|| Error::ChainMismatch("predicates need equal input and output chains".into()))?;
    let witness = nondecreasing_violation(table);
    let mut idempotent = true;
    let mut internal = true;
    let mut symmetric = true;
    let mut self_dual = true;
    for (i, a) in table.cells().enumerate() {
        let t = table.entries()[i];
        if a.iter().all(|&r| r == a[0]) && t != a[0] {
            idempotent = false;
        }
        let (lo, hi) = (*a.iter().min().unwrap(), *a.iter().max().unwrap());
        if t < lo || t > hi {
            internal = false;
        }
        let mut sorted = a.clone();
        sorted.sort_unstable();
        if table.get(&sorted) != t {
            symmetric = false;
        }
        let flipped: Vec<usize> = a.iter().map(|&r| k - 1 - r).collect();
        if table.get(&flipped) != k - 1 - t {
            self_dual = false;
        }
    }
    Ok(TablePredicates {
        nondecreasing: witness.is_none(),
        nondecreasing_witness: witness,
        idempotent,
        internal,
        symmetric,
        self_dual,
    })
}
