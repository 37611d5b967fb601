use proptest::prelude::*;

use ordagg::chain::{discrete_representative, enumerate_embeddings, polynomial_table, table_predicates, tabulate_through, Chain, DiscreteTable};
use ordagg::cli::{cmd_classify, ClassifyOptions};
use ordagg::document::{ReportDocument, TableDocument};
use ordagg::lattice::{LatticePolynomial, SetFunction};
use ordagg::meaningfulness::*;
use ordagg::orbits::{pattern_of, strong_pattern_of};
use ordagg::scale::{rat, IntervalSpec, PlBijection, Rational};

fn shape() -> impl Strategy<Value = IntervalSpec> {
    (any::<bool>(), any::<bool>()).prop_map(|(a, b)| IntervalSpec::new(a, b))
}

fn interior() -> impl Strategy<Value = Rational> {
    (1i64..1000).prop_map(|p| rat(p, 1000))
}

fn bijection() -> impl Strategy<Value = PlBijection> {
    (any::<u64>(), 0usize..6).prop_map(|(seed, budget)| PlBijection::random(seed, budget))
}

/// A nonconstant nondecreasing set function on `n` variables.
fn alpha(n: usize) -> impl Strategy<Value = SetFunction> {
    prop::collection::vec(0usize..1 << n, 1..4).prop_map(move |sets| {
        let raw = SetFunction::from_fn(n, |m| sets.iter().any(|&s| s & m == s && s != 0)).unwrap();
        if raw.is_constant() {
            SetFunction::from_fn(n, |m| m & 1 == 1).unwrap()
        } else {
            raw.upward_closure()
        }
    })
}

fn table(n: usize, k: usize) -> impl Strategy<Value = DiscreteTable> {
    prop::collection::vec(0..k, k.pow(n as u32)).prop_map(move |v| DiscreteTable::uniform(n, k, v).unwrap())
}

fn small_table() -> impl Strategy<Value = DiscreteTable> {
    prop_oneof![table(1, 4), table(2, 2), table(2, 3), table(3, 2)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn bijection_inverse_and_composition(f in bijection(), g in bijection(), x in interior()) {
        prop_assert_eq!(f.invert().apply(&f.apply(&x)), x.clone());
        prop_assert!(f.compose(&f.invert()).is_identity());
        prop_assert_eq!(f.compose(&g).apply(&x), f.apply(&g.apply(&x)));
    }

    #[test]
    fn bijections_preserve_order(f in bijection(), x in interior(), y in interior()) {
        prop_assert_eq!(x.cmp(&y), f.apply(&x).cmp(&f.apply(&y)));
        prop_assert!(IntervalSpec::OPEN.contains(&f.apply(&x)));
    }

    #[test]
    fn patterns_are_invariant(e in shape(), f in bijection(), g in bijection(),
                              seed in prop::collection::vec(0usize..8, 1..5)) {
        let pool: Vec<Rational> = vec![rat(0, 1), rat(1, 9), rat(1, 4), rat(1, 2), rat(2, 3), rat(7, 8), rat(1, 1), rat(1, 2)];
        let x: Vec<Rational> = seed.iter().map(|&i| pool[i].clone()).filter(|v| e.contains(v)).collect();
        prop_assume!(!x.is_empty());
        let fx: Vec<Rational> = x.iter().map(|v| f.apply(v)).collect();
        prop_assert_eq!(pattern_of(&x, e).unwrap(), pattern_of(&fx, e).unwrap());
        let mixed: Vec<Rational> = x.iter().enumerate().map(|(i, v)| if i % 2 == 0 { f.apply(v) } else { g.apply(v) }).collect();
        prop_assert_eq!(strong_pattern_of(&x, e).unwrap(), strong_pattern_of(&mixed, e).unwrap());
        prop_assert_eq!(pattern_of(&x, e).unwrap().strong(), strong_pattern_of(&x, e).unwrap());
    }

    #[test]
    fn dnf_equals_cnf(a in (1usize..5).prop_flat_map(alpha), xs in prop::collection::vec(interior(), 4)) {
        let p = LatticePolynomial::new(a).unwrap();
        let x = &xs[..p.arity()];
        prop_assert_eq!(p.eval_dnf(x).unwrap(), p.eval_cnf(x).unwrap());
        let v = p.eval_dnf(x).unwrap();
        prop_assert!(x.contains(&v));
    }

    #[test]
    fn canonicalize_is_idempotent(n in 1usize..5, bits in any::<u64>()) {
        let raw = SetFunction::from_fn(n, |m| m != 0 && bits >> m & 1 == 1).unwrap();
        prop_assume!(!raw.is_constant() && !raw.upward_closure().is_constant());
        let once = LatticePolynomial::canonicalize(&raw).unwrap();
        let twice = LatticePolynomial::canonicalize(once.alpha()).unwrap();
        prop_assert_eq!(&once, &twice);
        prop_assert!(once.alpha().is_nondecreasing());
    }

    #[test]
    fn polynomials_commute_with_bijections(a in (1usize..4).prop_flat_map(alpha), f in bijection(),
                                           xs in prop::collection::vec(interior(), 3)) {
        let p = LatticePolynomial::new(a).unwrap();
        let x = &xs[..p.arity()];
        let fx: Vec<Rational> = x.iter().map(|v| f.apply(v)).collect();
        prop_assert_eq!(p.eval_dnf(&fx).unwrap(), f.apply(&p.eval_dnf(x).unwrap()));
    }

    #[test]
    fn polynomial_tables_are_order_invariant(a in (1usize..4).prop_flat_map(alpha), k in 2usize..5, e in shape()) {
        let p = LatticePolynomial::new(a).unwrap();
        let t = polynomial_table(&p, k).unwrap();
        prop_assert!(check_order_invariant(&t, e).unwrap().is_member());
        prop_assert!(check_cm_single(&t, e).unwrap().is_member());
    }

    #[test]
    fn order_invariant_tables_have_meaningful_comparisons(e in shape(), pick in any::<prop::sample::Index>()) {
        let space = OracleSpace::generate(Family::OrderInvariant, &[3, 3], e).unwrap();
        let entries = space.entries().nth(pick.index(space.len())).unwrap().clone();
        let t = DiscreteTable::uniform(2, 3, entries).unwrap();
        prop_assert!(check_order_invariant(&t, e).unwrap().is_member());
        prop_assert!(check_cm_single(&t, e).unwrap().is_member());
    }

    #[test]
    fn table_document_round_trip(t in small_table(), e in prop::option::of(shape()), labelled in any::<bool>()) {
        let mut doc = TableDocument::new(t.clone());
        doc.interval = e;
        if labelled {
            let k = t.input_sizes()[0];
            doc.input_labels = Some(vec![(0..k).map(|r| format!("r{r}")).collect(); t.arity()]);
            doc.output_labels = Some((0..t.output_size()).map(|r| format!("out{r}")).collect());
        }
        let text = doc.to_text();
        let parsed = TableDocument::parse(&text).unwrap();
        prop_assert_eq!(&parsed, &doc);
        prop_assert_eq!(parsed.to_text(), text);
        prop_assert_eq!(TableDocument::parse(&doc.to_json()).unwrap(), doc);
    }

    #[test]
    fn witnesses_replay_and_reports_round_trip(t in small_table(), e in shape()) {
        for family in [Family::OrderInvariant, Family::CmSingle, Family::CmIndependent] {
            if let Some(w) = classify_family(&t, e, family).unwrap() {
                prop_assert!(w.replay(ReplayTarget::Table(&t), e).unwrap(), "{} {:?}", family, t.entries());
            }
        }
        let doc = TableDocument::new(t).with_interval(e);
        let all = vec![Family::OrderInvariant, Family::CmSingle, Family::CmIndependent];
        let (report, _) = cmd_classify(doc, &ClassifyOptions::new(all)).unwrap();
        let text = report.to_text();
        prop_assert_eq!(&ReportDocument::parse(&text).unwrap(), &report);
        prop_assert_eq!(ReportDocument::parse(&text).unwrap().to_text(), text);
        prop_assert_eq!(ReportDocument::parse(&report.to_json()).unwrap(), report);
    }

    #[test]
    fn hierarchy_on_random_tables(t in small_table(), e in shape()) {
        let oi = check_order_invariant(&t, e).unwrap().is_member();
        let cm1 = check_cm_single(&t, e).unwrap().is_member();
        let cmi = check_cm_independent(&t, e).unwrap().is_member();
        prop_assert!(!oi || cm1);
        prop_assert!(!cmi || cm1);
        prop_assert_eq!(cm1, comparison_witness(&t, e, CmMode::Single).unwrap().is_none());
    }

    #[test]
    fn representatives_do_not_depend_on_the_embedding(a in (1usize..4).prop_flat_map(alpha), k in 2usize..4, e in shape()) {
        let p = LatticePolynomial::new(a).unwrap();
        let chain = Chain::new(k).unwrap();
        let canonical = discrete_representative(&p, chain, e).unwrap();
        for emb in enumerate_embeddings(chain, 6, e).unwrap() {
            prop_assert_eq!(&tabulate_through(&p, &emb).unwrap(), &canonical);
        }
    }

    #[test]
    fn idempotent_nondecreasing_tables_are_internal(t in small_table()) {
        let p = table_predicates(&t).unwrap();
        prop_assert!(!(p.idempotent && p.nondecreasing) || p.internal);
    }
}
