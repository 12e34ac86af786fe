use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use wishfade::capacity::{capacity_closed, capacity_closed_identity_cov};
use wishfade::oc::ser_closed;
use wishfade::specfun::{appell_psi1, bessel_i_scaled, expint_en_scaled, SeriesControl};
use wishfade::{db_to_linear, CapacityScenario, FadingModel, KappaMuParams, OcScenario};

fn kmu(kappa: f64, mu: f64) -> FadingModel {
    FadingModel::KappaMu(KappaMuParams::unit_power(kappa, mu).unwrap())
}

fn specfun(c: &mut Criterion) {
    let mut g = c.benchmark_group("specfun");
    g.bench_function("expint_en_scaled", |b| b.iter(|| expint_en_scaled(black_box(7), black_box(3.5))));
    g.bench_function("bessel_i_scaled", |b| b.iter(|| bessel_i_scaled(black_box(4.5), black_box(12.0))));
    g.bench_function("appell_psi1", |b| {
        b.iter(|| appell_psi1(black_box(3.0), 0.5, 2.0, 3.0, black_box(0.3), 1.5, SeriesControl::default()))
    });
    g.finish();
}

fn capacity(c: &mut Criterion) {
    let mut g = c.benchmark_group("capacity_closed");
    for n in [2usize, 4, 8] {
        let s = CapacityScenario::new(kmu(4.0, 3.0), n, n, db_to_linear(10.0)).unwrap();
        g.bench_with_input(BenchmarkId::new("kappa_mu", n), &s, |b, s| b.iter(|| capacity_closed(black_box(s))));
        g.bench_with_input(BenchmarkId::new("identity_cov", n), &n, |b, &n| {
            b.iter(|| capacity_closed_identity_cov(1.0, n, n, black_box(10.0)))
        });
    }
    g.finish();
}

fn ser(c: &mut Criterion) {
    let mut g = c.benchmark_group("ser_closed");
    for (nr, ni) in [(2usize, 2usize), (4, 3), (10, 6)] {
        let s = OcScenario::new(nr, ni, db_to_linear(-10.0), db_to_linear(-10.0), 16, kmu(2.0, 2.0)).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(format!("{nr}x{ni}")), &s, |b, s| b.iter(|| ser_closed(black_box(s))));
    }
    g.finish();
}

criterion_group!(benches, specfun, capacity, ser);
criterion_main!(benches);
