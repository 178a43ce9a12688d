use bracketlab::format::{
    lottery_to_json, model_to_json, parse_lottery, parse_model, parse_tree, render, tree_to_json,
};
use bracketlab::{
    build_iid_tree, compare, evaluate, BivariateIndex, JointLottery, MarginalLottery, ModelSpec,
    OutcomeSpace, Source, UtilityIndex, DEFAULT_BAND,
};
use proptest::prelude::*;

const REL: f64 = 1e-10;

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= REL * 1f64.max(a.abs()).max(b.abs())
}

fn index() -> impl Strategy<Value = UtilityIndex> {
    prop_oneof![
        (0.2..3.0f64).prop_map(|g| UtilityIndex::power(g).unwrap()),
        (0.01..0.8f64).prop_map(|a| UtilityIndex::exponential(a).unwrap()),
        (0.01..0.8f64).prop_map(|a| UtilityIndex::exponential(-a).unwrap()),
        (0.5..3.0f64).prop_map(|l| UtilityIndex::loss_averse_sqrt(l).unwrap()),
        Just(UtilityIndex::sqrt()),
    ]
}

/// Up to five weighted outcomes in `[0, 10]`, normalized.
fn atoms() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((0.0..10.0f64, 0.05..1.0f64), 1..=5).prop_map(|v| {
        let total: f64 = v.iter().map(|a| a.1).sum();
        v.into_iter().map(|(x, w)| (x, w / total)).collect()
    })
}

fn marginal(source: Source) -> impl Strategy<Value = MarginalLottery> {
    atoms().prop_map(move |a| MarginalLottery::new(a, source, 0.0, f64::INFINITY).unwrap())
}

fn joint() -> impl Strategy<Value = JointLottery> {
    prop::collection::vec((0.0..10.0f64, 0.0..10.0f64, 0.05..1.0f64), 1..=5).prop_map(|v| {
        let total: f64 = v.iter().map(|a| a.2).sum();
        JointLottery::new(v.into_iter().map(|(x, y, w)| (x, y, w / total)), OutcomeSpace::nonnegative())
            .unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn ce_ignores_positive_affine_rescaling(u in index(), p in marginal(Source::One), a in 0.01..100.0f64, b in -50.0..50.0f64) {
        let t = u.affine(a, b).unwrap();
        prop_assert!(close(u.ce(&p).unwrap(), t.ce(&p).unwrap()));
    }

    #[test]
    fn ce_lies_within_support(u in index(), p in marginal(Source::Two)) {
        let ce = u.ce(&p).unwrap();
        prop_assert!(ce >= p.min() - REL * p.min().abs().max(1.0));
        prop_assert!(ce <= p.max() + REL * p.max().abs().max(1.0));
    }

    #[test]
    fn exponential_ce_shifts_with_outcomes(a in 0.01..0.8f64, p in marginal(Source::One), k in 0.0..5.0f64) {
        let u = UtilityIndex::exponential(a).unwrap();
        let shifted = p.shift_clamped(k).unwrap();
        prop_assert!(close(u.ce(&shifted).unwrap(), u.ce(&p).unwrap() + k));
    }

    #[test]
    fn ce_respects_first_order_dominance(u in index(), p in marginal(Source::One), i in 0usize..5, bump in 0.0..5.0f64) {
        let raw = p.atoms().to_vec();
        let i = i % raw.len();
        let better: Vec<(f64, f64)> = raw.iter().enumerate()
            .map(|(j, &(x, q))| if j == i { (x + bump, q) } else { (x, q) })
            .collect();
        let q = MarginalLottery::new(better, Source::One, 0.0, f64::INFINITY).unwrap();
        prop_assert!(q.fosd_weak(&p));
        let (cp, cq) = (u.ce(&p).unwrap(), u.ce(&q).unwrap());
        prop_assert!(cq >= cp - REL * 1f64.max(cp.abs()), "{cq} < {cp}");
    }

    #[test]
    fn comparison_is_antisymmetric(p in joint(), q in joint(), u in index()) {
        let m = ModelSpec::Nb { w: BivariateIndex::sum(UtilityIndex::identity()), v1: u.clone(), v2: u };
        let ab = compare(&m, &p, &q, DEFAULT_BAND).unwrap().verdict;
        let ba = compare(&m, &q, &p, DEFAULT_BAND).unwrap().verdict;
        prop_assert_eq!(ab, ba.flip());
    }

    #[test]
    fn product_marginals_are_recovered(p in marginal(Source::One), q in marginal(Source::Two)) {
        let j = JointLottery::product(&p, &q).unwrap();
        prop_assert!(j.is_product());
        prop_assert!(j.marginal(Source::One).same_distribution(&p));
        prop_assert!(j.marginal(Source::Two).same_distribution(&q));
    }

    #[test]
    fn correlation_neglect_matches_eu_on_products(p in marginal(Source::One), q in marginal(Source::Two), u in index()) {
        let w = BivariateIndex::sum(u);
        let j = JointLottery::product(&p, &q).unwrap();
        let a = evaluate(&ModelSpec::Eu { w: w.clone() }, &j).unwrap();
        let b = evaluate(&ModelSpec::EuCn { w }, &j).unwrap();
        prop_assert!(close(a, b));
    }

    #[test]
    fn lottery_json_round_trips(p in joint()) {
        let text = render(&lottery_to_json(&p));
        let back = parse_lottery(&text).unwrap();
        prop_assert_eq!(&back, &p);
        prop_assert_eq!(render(&lottery_to_json(&back)), text);
    }

    #[test]
    fn model_json_round_trips(u in index(), v in index(), beta in 0.1..2.0f64) {
        let w = BivariateIndex::additive(UtilityIndex::sqrt(), u.clone(), beta).unwrap();
        for m in [
            ModelSpec::Nb { w: w.clone(), v1: u.clone(), v2: v.clone() },
            ModelSpec::Bib { w: w.clone(), v2: v.clone() },
            ModelSpec::EuCn { w: w.clone() },
        ] {
            let text = render(&model_to_json(&m).unwrap());
            let back = parse_model(&text).unwrap();
            prop_assert_eq!(&back, &m);
        }
    }

    #[test]
    fn tree_json_round_trips(c0 in 0.5..2.0f64, g in 0.8..1.25f64, p in 0.1..0.9f64, steps in 1usize..=3) {
        let t = build_iid_tree(c0, &[(g, p), (1.0, 1.0 - p)], steps).unwrap();
        let back = parse_tree(&render(&tree_to_json(&t))).unwrap();
        prop_assert_eq!(back, t);
    }
}
