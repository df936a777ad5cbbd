use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use pcalabi::mesh::check_euclidean_condition_with;
use pcalabi::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Splits face `f` into three around a new vertex.
fn stellate(t: &Triangulation, f: usize) -> Triangulation {
    let n = t.vertex_count();
    let mut faces = t.faces().to_vec();
    let [a, b, c] = faces.swap_remove(f);
    faces.extend([[a, b, n], [b, c, n], [c, a, n]]);
    Triangulation::new(n + 1, faces).unwrap()
}

fn subdivided_icosahedron(n: usize) -> WeightedMesh {
    let mut t = fixtures::icosahedron();
    let mut f = 0;
    while t.vertex_count() < n {
        t = stellate(&t, f);
        f = (f + 7) % t.face_count();
    }
    WeightedMesh::uniform(t, 0.0).unwrap()
}

fn existence_check(c: &mut Criterion) {
    let mut group = c.benchmark_group("euclidean_condition");
    group.sample_size(10);
    for n in [16, 18, 20] {
        let m = subdivided_icosahedron(n);
        for exec in [Execution::Sequential, Execution::Parallel] {
            group.bench_with_input(BenchmarkId::new(format!("{exec:?}"), n), &m, |b, m| {
                b.iter(|| check_euclidean_condition_with(black_box(m), 20, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn flow_batch(c: &mut Criterion) {
    let m = fixtures::weighted(fixtures::icosahedron(), 0.3);
    let spec = FlowSpec::new(FlowKind::PCalabi, 2.0, Background::Euclidean);
    let cfg = IntegratorConfig { t_max: 50.0, ..Default::default() };
    let starts: Vec<UCoordinates> = (0..16u64)
        .map(|seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let radii = (0..m.vertex_count()).map(|_| rng.random_range(0.5..2.0)).collect();
            PackingMetric::new(radii, Background::Euclidean).unwrap().normalized_product().to_u()
        })
        .collect();

    let mut group = c.benchmark_group("flow_batch");
    group.sample_size(10);
    for exec in [Execution::Sequential, Execution::Parallel] {
        group.bench_function(format!("{exec:?}"), |b| {
            b.iter(|| exec.map(&starts, |u0| integrate(&m, u0, &spec, &cfg).unwrap().summary()))
        });
    }
    group.finish();
}

criterion_group!(benches, existence_check, flow_batch);
criterion_main!(benches);
