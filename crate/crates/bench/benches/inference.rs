use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fairtree::engine::{exact_path_distribution, predict_fair, predict_fair_batch, simulate};
use fairtree::threshold::fit_threshold_policy;
use fairtree::tree::{train_forest, train_tree};
use fairtree::{Aggregation, FairTTTSConfig, FairnessSpec, ForestParams, TreeParams};
use fairtree_bench::dataset;

fn inference(c: &mut Criterion) {
    let data = dataset(3_000, 8, 2);
    let spec = FairnessSpec::new(0);
    let cfg = FairTTTSConfig::default();
    let sample = data.row(0).to_vec();

    let shallow = train_tree(&data, &TreeParams { max_depth: Some(8), ..TreeParams::default() }).unwrap();
    let deep = train_tree(&data, &TreeParams::default()).unwrap();
    let mut group = c.benchmark_group("tree");
    group.bench_function("deterministic", |b| b.iter(|| deep.predict(&sample).unwrap()));
    group.bench_function("simulate_s100", |b| b.iter(|| simulate(&deep, &sample, &spec, &cfg, 0).unwrap()));
    group.bench_function("exact_depth8", |b| b.iter(|| exact_path_distribution(&shallow, &sample, &spec, &cfg).unwrap()));
    group.finish();

    let mut params = ForestParams::default_for(data.n_features());
    params.n_trees = 100;
    let forest = train_forest(&data, &params).unwrap();
    let mut group = c.benchmark_group("forest_100");
    group.bench_function("deterministic", |b| b.iter(|| forest.predict(&sample).unwrap()));
    for aggregation in [Aggregation::Vote, Aggregation::Average] {
        group.bench_with_input(BenchmarkId::new("predict_fair_s100", format!("{aggregation:?}")), &aggregation, |b, &a| {
            b.iter(|| predict_fair(&forest, &sample, &spec, &cfg, 0, a).unwrap())
        });
    }
    let rows: Vec<&[f64]> = data.rows().iter().take(200).map(Vec::as_slice).collect();
    let ids: Vec<u64> = (0..rows.len() as u64).collect();
    group.sample_size(10);
    group.bench_function("batch_200_rows", |b| {
        b.iter(|| predict_fair_batch(&forest, &rows, &ids, &spec, &cfg, Aggregation::Vote).unwrap())
    });
    group.finish();

    let scores: Vec<f64> = data.rows().iter().map(|r| forest.vote_fraction(r).unwrap()).collect();
    let groups: Vec<u8> = data.column(0).iter().map(|&v| u8::from(v == 1.0)).collect();
    c.bench_function("threshold_fit_3000", |b| b.iter(|| fit_threshold_policy(&scores, data.labels(), &groups).unwrap()));
}

criterion_group!(benches, inference);
criterion_main!(benches);
