use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ergm_bench::{bernoulli, florentine};
use ergm_core::estimation::fit_mple;
use ergm_core::{change_stat, motif_census, parse_model_terms, sample_stats, DyadToggle, ErgmModel, Init, SamplerConfig};
use std::hint::black_box;

fn change_stats(c: &mut Criterion) {
    let net = bernoulli(60, 0.1, 1);
    let toggle = if net.has_edge(3, 7) { DyadToggle::remove(3, 7) } else { DyadToggle::add(3, 7) }.unwrap();
    let mut group = c.benchmark_group("change_stat");
    for term in ["edges", "triangle", "kstar(3)", "esp(1)", "gwesp,decay=0.5", "gwdegree,decay=0.5"] {
        let spec = term.parse().unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(term), &spec, |b, spec| {
            b.iter(|| change_stat(black_box(&net), spec, toggle).unwrap())
        });
    }
    group.finish();
}

fn sweeps(c: &mut Criterion) {
    let terms = parse_model_terms("edges + triangle + gwesp,decay=0.5").unwrap();
    let model = ErgmModel::new(terms, vec![-2.0, 0.1, 0.2]).unwrap();
    let mut group = c.benchmark_group("sampler_sweep");
    for n in [16usize, 64] {
        let base = bernoulli(n, 0.1, 2);
        let cfg = SamplerConfig {
            burn_in: 0,
            interval: 1,
            draws: 10,
            seed: 3,
            init: Init::Observed,
        };
        group.bench_with_input(BenchmarkId::from_parameter(n), &base, |b, base| {
            b.iter(|| sample_stats(&model, base, &cfg).unwrap())
        });
    }
    group.finish();
}

fn mple(c: &mut Criterion) {
    let net = florentine();
    let terms = parse_model_terms("edges + kstar(2) + triangle").unwrap();
    c.bench_function("mple_florentine", |b| b.iter(|| fit_mple(black_box(&net), &terms).unwrap()));
}

fn census(c: &mut Criterion) {
    let net = bernoulli(200, 0.05, 4);
    c.bench_function("motif_census_200", |b| b.iter(|| motif_census(black_box(&net))));
}

criterion_group!(benches, change_stats, sweeps, mple, census);
criterion_main!(benches);
