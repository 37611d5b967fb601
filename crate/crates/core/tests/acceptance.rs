//! Acceptance criteria 1-9, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines always reach stdout; exits nonzero on any FAIL.

mod common;

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{all_tables, filter_cn};
use ordagg::chain::{discrete_representative, is_smooth, polynomial_table, sample_table, table_predicates, Chain, DiscreteTable};
use ordagg::functions::{Aggregator, AnchoredMax, Mean, Mode, SumThresholdSwitch, TwoBranch};
use ordagg::lattice::{enumerate_cn, parse_min_true, LatticePolynomial, SetFunction};
use ordagg::meaningfulness::*;
use ordagg::orbits::{enumerate_orbits, enumerate_strong_orbits, pattern_of, Level, StrongOrbit};
use ordagg::scale::{rat, IntervalSpec, PlBijection, Rational};

const SEED: u64 = 7;
const TRIALS: usize = 1000;
const NORMAL_FORM_INPUTS: usize = 1000;
const CM_SAMPLE: usize = 10_000;
const ORBIT_BUDGET: Duration = Duration::from_secs(1);
const CN_BUDGET: Duration = Duration::from_secs(30);
const ORACLE_BUDGET: Duration = Duration::from_secs(120);

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, budget: Duration) -> Result<(), String> {
    let spent = start.elapsed();
    ensure(spent <= budget, || format!("took {spent:.2?}, budget {budget:?}"))
}

fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    let q = rng.gen_range(2..200i64);
    rat(rng.gen_range(1..q), q)
}

fn orbit_counts() -> Outcome {
    let start = Instant::now();
    let eleven = enumerate_orbits(2, IntervalSpec::CLOSED).map_err(|e| e.to_string())?.len();
    let nine = enumerate_strong_orbits(2, IntervalSpec::CLOSED).map_err(|e| e.to_string())?.len();
    let eight = enumerate_strong_orbits(3, IntervalSpec::LEFT_CLOSED).map_err(|e| e.to_string())?.len();
    ensure((eleven, nine, eight) == (11, 9, 8), || format!("got {eleven}, {nine}, {eight}"))?;
    for e in IntervalSpec::all() {
        for n in 1..=6 {
            let got = enumerate_strong_orbits(n, e).map_err(|e| e.to_string())?.len();
            let want = (1 + e.boundary_count()).pow(n as u32);
            ensure(got == want, || format!("strong orbits n={n} {e}: {got} != {want}"))?;
        }
    }
    within(start, ORBIT_BUDGET)?;
    Ok(format!("11, 9, 8 and (1+|B|)^n for n <= 6 in {:.2?}", start.elapsed()))
}

fn cn_counts() -> Outcome {
    let start = Instant::now();
    let want = [1usize, 4, 18, 166, 7579];
    for (i, &w) in want.iter().enumerate() {
        let n = i + 1;
        let cn = enumerate_cn(n).map_err(|e| e.to_string())?;
        ensure(cn.len() == w, || format!("|C_{n}| = {} != {w}", cn.len()))?;
        if n == 3 || n == 4 {
            let listed: Vec<u64> =
                cn.iter().map(|s| (0..1usize << n).filter(|&m| s.get(m)).map(|m| 1u64 << m).sum()).collect();
            ensure(listed == filter_cn(n), || format!("C_{n} differs from the filter oracle"))?;
        }
    }
    within(start, CN_BUDGET)?;
    Ok(format!("1, 4, 18, 166, 7579 in {:.2?}", start.elapsed()))
}

fn normal_forms() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut evaluations = 0;
    for n in 1..=4 {
        for alpha in enumerate_cn(n).map_err(|e| e.to_string())? {
            let p = LatticePolynomial::new(alpha.clone()).map_err(|e| e.to_string())?;
            for _ in 0..NORMAL_FORM_INPUTS {
                let x: Vec<Rational> = (0..n).map(|_| random_rational(&mut rng)).collect();
                let (d, c) = (p.eval_dnf(&x).unwrap(), p.eval_cnf(&x).unwrap());
                ensure(d == c, || format!("{p} at {x:?}: {d} != {c}"))?;
                evaluations += 1;
            }
            let again = LatticePolynomial::canonicalize(p.alpha()).map_err(|e| e.to_string())?;
            ensure(again == p, || format!("canonicalize moved {p}"))?;
        }
    }
    let absorbed = LatticePolynomial::canonicalize(&parse_min_true("[{1},{1,2}]", Some(2)).unwrap()).unwrap();
    ensure(absorbed == LatticePolynomial::projection(2, 1).unwrap(), || format!("x1 v (x1 ^ x2) gave {absorbed}"))?;
    Ok(format!("{evaluations} DNF/CNF evaluations agree; canonical forms fixed; absorption gives P_1"))
}

fn special_families() -> Outcome {
    for n in 1..=4 {
        let stats: Vec<LatticePolynomial> = (1..=n).map(|k| LatticePolynomial::order_statistic(n, k).unwrap()).collect();
        for alpha in enumerate_cn(n).unwrap() {
            let p = LatticePolynomial::new(alpha).unwrap();
            let symmetric = p.is_symmetric().is_some();
            let statistic = stats.contains(&p);
            ensure(symmetric == statistic, || format!("{p}: symmetric {symmetric}, order statistic {statistic}"))?;
        }
    }
    for n in 1..=5 {
        let dual: Vec<usize> = (1..=n).filter(|&k| LatticePolynomial::order_statistic(n, k).unwrap().is_weakly_self_dual()).collect();
        let want = if n % 2 == 1 { vec![(n + 1) / 2] } else { vec![] };
        ensure(dual == want, || format!("n={n}: self-dual order statistics {dual:?}"))?;
        if n % 2 == 1 {
            ensure(LatticePolynomial::median(n).unwrap() == LatticePolynomial::order_statistic(n, (n + 1) / 2).unwrap(), || {
                format!("median({n}) is not the middle order statistic")
            })?;
        }
    }
    Ok("symmetric = order statistics for n <= 4; self-dual order statistic is the median exactly for odd n".into())
}

fn invariance_suites() -> Outcome {
    let mut invariant: Vec<Box<dyn Aggregator>> = vec![
        Box::new(LatticePolynomial::median(3).unwrap()),
        Box::new(LatticePolynomial::min(3).unwrap()),
        Box::new(LatticePolynomial::max(3).unwrap()),
        Box::new(Mode(3)),
        Box::new(Mode(4)),
    ];
    for k in 1..=3 {
        invariant.push(Box::new(LatticePolynomial::projection(3, k).unwrap()));
    }
    let mut runs = 0;
    for e in IntervalSpec::all() {
        for f in &invariant {
            let w = falsify_invariance(f.as_ref(), e, TRIALS, SEED).map_err(|err| err.to_string())?;
            ensure(w.is_none(), || format!("{} violated on {e}", f.name()))?;
            runs += 1;
        }
    }
    let w = falsify_invariance(&Mean(2), IntervalSpec::OPEN, TRIALS, SEED).map_err(|e| e.to_string())?;
    let w = w.ok_or("mean not falsified")?;
    ensure(w.replay(ReplayTarget::Function(&Mean(2)), IntervalSpec::OPEN).unwrap(), || "mean witness does not replay".into())?;
    Ok(format!("{runs} suites of {TRIALS} trials clean; mean falsified and replayed"))
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let open = IntervalSpec::OPEN;
    let space = OracleSpace::generate(Family::OrderInvariant, &[3, 3], open).map_err(|e| e.to_string())?;
    let mut members = 0;
    for t in all_tables(vec![3, 3], 3) {
        let structural = check_order_invariant(&t, open).unwrap().is_member();
        ensure(structural == space.contains(&t), || format!("oi disagreement on {:?}", t.entries()))?;
        members += structural as usize;
    }
    ensure(members == space.len(), || format!("{members} members, oracle holds {}", space.len()))?;

    let agree = |t: &DiscreteTable, e: IntervalSpec| -> Result<bool, String> {
        let ranges = check_cm_single(t, e).unwrap().is_member();
        let patterns = comparison_witness(t, e, CmMode::Single).unwrap().is_none();
        ensure(ranges == patterns, || format!("cm-single disagreement on {e} {:?} {:?}", t.input_sizes(), t.entries()))?;
        Ok(ranges)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let shapes: [(usize, usize); 3] = [(2, 3), (2, 4), (3, 2)];
    let mut cm_members = 0;
    for _ in 0..CM_SAMPLE {
        let e = IntervalSpec::all()[rng.gen_range(0..4)];
        let (n, k) = shapes[rng.gen_range(0..shapes.len())];
        let m = rng.gen_range(2..=k);
        let entries = (0..k.pow(n as u32)).map(|_| rng.gen_range(0..m)).collect();
        cm_members += agree(&DiscreteTable::uniform(n, k, entries).unwrap(), e)? as usize;
    }
    let mut oi_tables = 0;
    for e in IntervalSpec::all() {
        for entries in OracleSpace::generate(Family::OrderInvariant, &[3, 3], e).unwrap().entries() {
            let t = DiscreteTable::uniform(2, 3, entries.clone()).unwrap();
            ensure(agree(&t, e)?, || format!("order invariant table rejected: {e} {entries:?}"))?;
            oi_tables += 1;
        }
    }
    within(start, ORACLE_BUDGET)?;
    Ok(format!(
        "oi: 19683 tables, {members} members; cm-single: {CM_SAMPLE} sampled ({cm_members} members) + {oi_tables} oi tables agree; {:.1?}",
        start.elapsed()
    ))
}

fn worked_examples() -> Outcome {
    let lc = IntervalSpec::LEFT_CLOSED;
    let t = discrete_representative(&AnchoredMax, Chain::new(3).unwrap(), lc).unwrap();
    ensure(check_order_invariant(&t, lc).unwrap().is_member(), || "anchored max not order invariant".into())?;
    ensure(table_predicates(&t).unwrap().nondecreasing, || "anchored max not nondecreasing".into())?;
    let d = decompose_nondecreasing(&t, Family::OrderInvariant, lc).map_err(|e| e.to_string())?;
    let (b, i) = (Level::Bottom, Level::Interior);
    let poly = |p: LatticePolynomial| XiValue::Polynomial(p.alpha().clone());
    let zero = XiValue::Polynomial(SetFunction::zero(3).unwrap());
    for rest in [[b, b], [b, i], [i, b], [i, i]] {
        ensure(d.xi_on(&StrongOrbit::new(vec![b, rest[0], rest[1]])) == Some(&zero), || "xi on x1 = a is not 0".into())?;
    }
    ensure(d.xi_on(&StrongOrbit::new(vec![i, b, i])) == Some(&poly(LatticePolynomial::projection(3, 3).unwrap())), || {
        "xi(I,B,I) is not P_3".into()
    })?;
    ensure(d.xi_on(&StrongOrbit::new(vec![i, i, i])) == Some(&poly(LatticePolynomial::max(3).unwrap())), || "xi(I,I,I) is not max".into())?;

    let closed = IntervalSpec::CLOSED;
    let grid = vec![rat(0, 1), rat(1, 2), rat(1, 1)];
    let (t, _) = sample_table(&TwoBranch, &[grid.clone(), grid]).unwrap();
    let v = check_cm_single(&t, closed).unwrap();
    let classes = v.form().and_then(|f| f.g_classes.as_ref()).map(Vec::len);
    ensure(classes == Some(2), || format!("two-branch g-classes {classes:?}"))?;

    let open = IntervalSpec::OPEN;
    let grid = vec![rat(1, 4), rat(1, 2), rat(3, 4)];
    let (t, values) = sample_table(&SumThresholdSwitch, &[grid.clone(), grid]).unwrap();
    let w = check_order_invariant(&t, open).unwrap().witness().cloned().ok_or("threshold switch accepted")?;
    let increasing = pattern_of(&[rat(1, 4), rat(1, 2)], open).unwrap();
    let in_class = !w.cells.is_empty()
        && w.cells.iter().all(|a| pattern_of(&a.iter().map(|&r| values[r].clone()).collect::<Vec<_>>(), open).unwrap() == increasing);
    ensure(in_class, || format!("threshold witness cells {:?}", w.cells))?;
    ensure(w.replay(ReplayTarget::Table(&t), open).unwrap(), || "threshold witness does not replay".into())?;

    let tenths = |v: [i64; 2]| vec![rat(v[0], 10), rat(v[1], 10)];
    let phi = PlBijection::through(&[(rat(1, 10), rat(1, 10)), (rat(3, 10), rat(4, 10)), (rat(5, 10), rat(7, 10)), (rat(8, 10), rat(8, 10))]).unwrap();
    let quoted = Witness {
        kind: WitnessKind::CmSingle,
        evidence: Evidence::Transform { points: vec![tenths([3, 5]), tenths([1, 8])], transforms: vec![phi] },
        cells: vec![],
        observed: String::new(),
        required: String::new(),
    };
    ensure(quoted.replay(ReplayTarget::Function(&Mean(2)), open).unwrap(), || "mean: quoted pairs do not flip".into())?;
    let points: Vec<Rational> = [1, 3, 5, 8].iter().map(|&p| rat(p, 10)).collect();
    let (t, _) = sample_table(&Mean(2), &[points.clone(), points]).unwrap();
    let w = comparison_witness_through(&t, open, CmMode::Single, &[1, 2], &[0, 3]).unwrap().ok_or("mean table accepted")?;
    ensure(w.cells.contains(&vec![1, 2]) && w.cells.contains(&vec![0, 3]), || format!("mean witness cells {:?}", w.cells))?;
    ensure(w.replay(ReplayTarget::Table(&t), open).unwrap(), || "mean table witness does not replay".into())?;
    Ok("anchored max xi, two-branch g-classes, threshold switch witness, mean (3,5)/(1,8) replay".into())
}

fn is_projection_table(t: &DiscreteTable) -> bool {
    (0..t.arity()).any(|i| t.cells().all(|a| t.get(&a) == a[i]))
}

fn hierarchy() -> Outcome {
    let mut counted = [0usize; 3];
    for e in IntervalSpec::all() {
        for k in 2..=3 {
            for t in all_tables(vec![k, k], k) {
                let oi = check_order_invariant(&t, e).unwrap().is_member();
                let cm1 = check_cm_single(&t, e).unwrap().is_member();
                ensure(!oi || cm1, || format!("oi but not cm-single: {e} {:?}", t.entries()))?;
                if !table_predicates(&t).unwrap().idempotent {
                    continue;
                }
                let pinned = check_cm_single_idempotent(&t, e).unwrap().is_member();
                ensure(!pinned || oi, || format!("idempotent cm-single but not oi: {e} {:?}", t.entries()))?;
                counted[0] += pinned as usize;
                if e == IntervalSpec::OPEN && check_cm_independent(&t, e).unwrap().is_member() {
                    ensure(is_projection_table(&t), || format!("idempotent cm-independent non-projection: {:?}", t.entries()))?;
                    counted[1] += 1;
                }
            }
        }
    }
    for n in 2..=3 {
        for alpha in enumerate_cn(n).unwrap() {
            let p = LatticePolynomial::new(alpha).unwrap();
            if (1..=n).any(|k| LatticePolynomial::projection(n, k).unwrap() == p) {
                continue;
            }
            let w = falsify_cm(&p, IntervalSpec::OPEN, CmMode::Independent, TRIALS, SEED).unwrap();
            let w = w.ok_or_else(|| format!("{p} not falsified in independent mode"))?;
            ensure(w.replay(ReplayTarget::Function(&p), IntervalSpec::OPEN).unwrap(), || format!("{p}: witness does not replay"))?;
            counted[2] += 1;
        }
    }
    Ok(format!(
        "oi => cm-single on all n=2, k<=3 tables; {} idempotent cm-single tables all oi; {} open idempotent cm-independent tables all projections; {} non-projection polynomials falsified",
        counted[0], counted[1], counted[2]
    ))
}

fn smoothness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut checked = 0;
    for n in 1..=3 {
        for alpha in enumerate_cn(n).unwrap() {
            let p = LatticePolynomial::new(alpha).unwrap();
            for k in 2..=4 {
                let t = polynomial_table(&p, k).unwrap();
                ensure(is_smooth(&t).is_none(), || format!("{p} on a {k}-chain is not smooth"))?;
                // g o p with g strictly increasing, sampled on a random chain.
                let mut grid: Vec<Rational> = (0..k).map(|_| random_rational(&mut rng)).collect();
                grid.sort();
                grid.dedup();
                let (s, _) = sample_table(&Squash(&p), &vec![grid; n]).unwrap();
                ensure(check_cm_single(&s, IntervalSpec::OPEN).unwrap().is_member(), || format!("g o {p} not cm-single"))?;
                ensure(is_smooth(&s.normalized()).is_none(), || format!("g o {p} not smooth"))?;
                checked += 2;
            }
        }
    }
    let t = discrete_representative(&Mode(3), Chain::new(3).unwrap(), IntervalSpec::OPEN).unwrap();
    let w = is_smooth(&t).ok_or("mode is smooth")?;
    ensure(w.lower == vec![0, 1, 2] && w.upper == vec![0, 2, 2], || format!("mode witness {w:?}"))?;
    ensure((t.get(&w.lower), t.get(&w.upper)) == (0, 2), || "mode witness values".into())?;
    Ok(format!("{checked} representatives smooth; mode jumps (0,1,2)->0 to (0,2,2)->2"))
}

/// `t / (1 + t)` after the polynomial.
struct Squash<'a>(&'a LatticePolynomial);

impl Aggregator for Squash<'_> {
    fn arity(&self) -> usize {
        self.0.arity()
    }

    fn eval(&self, x: &[Rational]) -> ordagg::Result<Rational> {
        let v = self.0.eval_dnf(x)?;
        Ok(v.clone() / (Rational::from_integer(1.into()) + v))
    }

    fn name(&self) -> String {
        format!("squash {}", self.0)
    }
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("orbit counts", orbit_counts),
        ("C_n counts", cn_counts),
        ("normal-form laws", normal_forms),
        ("special families", special_families),
        ("invariance suites", invariance_suites),
        ("oracle equivalence", oracle_equivalence),
        ("worked examples", worked_examples),
        ("hierarchy and collapse", hierarchy),
        ("smoothness transfer", smoothness),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS {} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {} {name}: {detail}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
