use std::hint::black_box;

use bracketlab::experiments::{nb_money, timing_fixture, tk1981_options};
use bracketlab::{
    build_iid_tree, check_axiom, compare, evaluate, timing_premium, value_tree, AxiomId,
    BivariateIndex, JointLottery, ModelOracle, ModelSpec, SamplerConfig, TreeFamily, UtilityIndex,
    DEFAULT_BAND,
};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn lotteries(c: &mut Criterion) {
    let [a, b, cc, d] = tk1981_options();
    let ad = JointLottery::product(&a, &d).unwrap();
    let bc = JointLottery::product(&b, &cc).unwrap();
    let v = UtilityIndex::loss_averse_sqrt(2.0).unwrap();
    let exp = UtilityIndex::exponential(0.1).unwrap();
    let models = [
        ("eu", ModelSpec::Eu { w: BivariateIndex::sum(exp.clone()) }),
        ("nb", nb_money(v.clone())),
        ("bib", ModelSpec::Bib { w: BivariateIndex::sum(exp.clone()), v2: exp }),
    ];

    let mut g = c.benchmark_group("evaluate");
    for (name, m) in &models {
        g.bench_with_input(BenchmarkId::from_parameter(name), m, |bch, m| {
            bch.iter(|| evaluate(black_box(m), black_box(&ad)).unwrap())
        });
    }
    g.finish();

    c.bench_function("compare/nb", |bch| {
        bch.iter(|| compare(&models[1].1, black_box(&ad), black_box(&bc), DEFAULT_BAND).unwrap())
    });
    c.bench_function("ce/loss_sqrt", |bch| bch.iter(|| v.ce(black_box(&b)).unwrap()));
    let power = UtilityIndex::power(0.3).unwrap();
    let positive = b.shift_clamped(1.0).unwrap();
    c.bench_function("ce/power", |bch| bch.iter(|| power.ce(black_box(&positive)).unwrap()));
}

fn axioms(c: &mut Criterion) {
    let oracle = ModelOracle::new(nb_money(UtilityIndex::sqrt()));
    let mut cfg = SamplerConfig::money();
    cfg.lo = 0.0;
    cfg.trials = 1000;
    let mut g = c.benchmark_group("axiom");
    g.sample_size(10);
    for id in [AxiomId::MultilinearIndependence, AxiomId::Monotonicity] {
        g.bench_function(id.name(), |bch| bch.iter(|| check_axiom(&id, &oracle, &cfg).unwrap()));
    }
    g.finish();
}

fn trees(c: &mut Criterion) {
    let (params, fixture) = timing_fixture();
    let mut g = c.benchmark_group("tree");
    for family in [TreeFamily::EpsteinZin, TreeFamily::KmBib] {
        g.bench_function(format!("value/{family}"), |bch| {
            bch.iter(|| value_tree(family, black_box(&fixture), &params).unwrap())
        });
    }
    let deep = build_iid_tree(1.0, &[(1.05, 0.4), (1.0, 0.3), (0.95, 0.3)], 4).unwrap();
    g.bench_function("premium/ez_depth4", |bch| {
        bch.iter(|| timing_premium(TreeFamily::EpsteinZin, black_box(&deep), &params).unwrap())
    });
    g.finish();
}

criterion_group!(benches, lotteries, axioms, trees);
criterion_main!(benches);
