use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use multicell_core::analytic::{ase_htc, mtc_analytics};
use multicell_core::association::{associate_htc, resolve_conflicts};
use multicell_core::geometry::{sample_hppp, PointKind, Window};
use multicell_core::rng::{Purpose, StreamId};
use multicell_core::simulator::{LinkScope, NetworkRealization, ScenarioConfig};

fn knn(c: &mut Criterion) {
    let stream = StreamId::new(7, 0);
    let window = Window::unit();
    let cells = sample_hppp(5000.0, window, PointKind::SmallCell, &mut stream.rng(Purpose::Cells)).unwrap();
    let users = sample_hppp(500.0, window, PointKind::HtcUser, &mut stream.rng(Purpose::HtcUsers)).unwrap();
    let index = cells.index();
    let mut group = c.benchmark_group("k_nearest");
    for k in [1usize, 5, 10] {
        group.bench_with_input(BenchmarkId::from_parameter(k), &k, |b, &k| {
            b.iter(|| {
                for &p in &users.points {
                    black_box(index.k_nearest(p, k).unwrap());
                }
            })
        });
    }
    group.finish();
    c.bench_function("neighbor_index_build", |b| b.iter(|| black_box(cells.index())));
}

fn association(c: &mut Criterion) {
    let stream = StreamId::new(8, 0);
    let window = Window::unit();
    let cells = sample_hppp(5000.0, window, PointKind::SmallCell, &mut stream.rng(Purpose::Cells)).unwrap();
    let users = sample_hppp(500.0, window, PointKind::HtcUser, &mut stream.rng(Purpose::HtcUsers)).unwrap();
    c.bench_function("associate_and_resolve_m5", |b| {
        b.iter(|| {
            let assoc = associate_htc(&users, &cells, 5).unwrap();
            black_box(resolve_conflicts(assoc, cells.len()))
        })
    });
}

fn analytic(c: &mut Criterion) {
    c.bench_function("ase_htc_m5_rho2", |b| {
        b.iter(|| black_box(ase_htc(black_box(5000.0), 500.0, 5, 4.0, 2.0).unwrap()))
    });
    c.bench_function("ase_htc_m10_rho_inf", |b| {
        b.iter(|| black_box(ase_htc(black_box(5000.0), 500.0, 10, 4.0, f64::INFINITY).unwrap()))
    });
    c.bench_function("mtc_analytics_m5", |b| {
        b.iter(|| black_box(mtc_analytics(black_box(5000.0), 500.0, 1e6, 0.1, 5, 10, 3.0).unwrap()))
    });
}

fn realization(c: &mut Criterion) {
    let downlink = ScenarioConfig {
        links: LinkScope::Downlink,
        ..ScenarioConfig::default()
    };
    let uplink = ScenarioConfig {
        links: LinkScope::Uplink,
        ..ScenarioConfig::default()
    };
    let mut group = c.benchmark_group("realization");
    group.sample_size(10);
    group.bench_function("sample_default", |b| {
        b.iter(|| black_box(NetworkRealization::sample(&downlink, 0).unwrap()))
    });
    let net = NetworkRealization::sample(&downlink, 0).unwrap();
    group.bench_function("downlink_draw", |b| b.iter(|| black_box(net.downlink_draw(0))));
    let net = NetworkRealization::sample(&uplink, 0).unwrap();
    group.bench_function("uplink_draw", |b| b.iter(|| black_box(net.uplink_draw(0))));
    group.finish();
}

criterion_group!(benches, knn, association, analytic, realization);
criterion_main!(benches);
