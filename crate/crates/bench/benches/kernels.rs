use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use qorder_core::limits::{c_s_surface, commutativity_gap, limit_b, GapOptions};
use qorder_core::qset::{enumerate_q, f_bruteforce, f_closed, QOrdering};
use qorder_core::search::{objective_gap, ObjectiveSpec};
use qorder_core::series::{eta_accel, eta_partial, StripPoint};
use qorder_core::zeros::scan_and_refine;

fn series(c: &mut Criterion) {
    let zero = StripPoint::on_critical_line(14.134725141734693).unwrap();
    c.bench_function("eta_accel/first_zero/1e-12", |b| b.iter(|| eta_accel(black_box(zero), 1e-12).unwrap()));
    c.bench_function("eta_partial/1e5", |b| b.iter(|| eta_partial(black_box(zero), 100_000)));
}

fn qset(c: &mut Criterion) {
    c.bench_function("enumerate_q/1e5", |b| b.iter(|| enumerate_q(black_box(100_000)).unwrap()));
    c.bench_function("f_bruteforce/1..1e4", |b| b.iter(|| (1..=10_000u64).all(|k| f_bruteforce(k) == f_closed(k))));
}

fn limits(c: &mut Criterion) {
    let zero = StripPoint::on_critical_line(14.134725141734693).unwrap();
    let ord = QOrdering::by_value(1000).enumerate().unwrap();
    let n_axis: Vec<u64> = (1..=10_000).step_by(100).collect();
    let h_axis: Vec<usize> = (1..=64).collect();
    c.bench_function("c_s_surface/100x64/n<=1e4", |b| {
        b.iter(|| c_s_surface(black_box(zero), &ord, &n_axis, &h_axis).unwrap())
    });
    c.bench_function("commutativity_gap/h64/no_budget", |b| {
        b.iter(|| commutativity_gap(black_box(zero), &ord, 64, 0, GapOptions::default()).unwrap())
    });
    c.bench_function("limit_b/direct/1e5", |b| b.iter(|| limit_b(black_box(zero), 100_000, 1e-12).unwrap()));
}

fn zeros_and_search(c: &mut Criterion) {
    c.bench_function("scan_and_refine/0..30", |b| b.iter(|| scan_and_refine(0.0, 30.0, 0.01, 0.1, 1e-9).unwrap()));
    let spec = ObjectiveSpec {
        points: vec![StripPoint::on_critical_line(14.134725141734693).unwrap()],
        n_window: (1000, 2000),
        h_max: 32,
        eta_tol: 1e-12,
    };
    let perm: Vec<u64> = enumerate_q(200).unwrap().iter().take(32).map(|q| q.value()).collect();
    c.bench_function("objective_gap/prefix32", |b| b.iter(|| objective_gap(black_box(&perm), &spec).unwrap()));
}

criterion_group!(benches, series, qset, limits, zeros_and_search);
criterion_main!(benches);
