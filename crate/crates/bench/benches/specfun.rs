use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use statmode_core::inference::{fisher_intersection_test, laplace_proportion_test, laplace_two_sample};
use statmode_core::specfun::{log_gamma, reg_inc_beta, student_t_sf, TailSide};

fn special_functions(c: &mut Criterion) {
    c.bench_function("log_gamma", |b| b.iter(|| log_gamma(black_box(123.456))));
    c.bench_function("reg_inc_beta/small", |b| {
        b.iter(|| reg_inc_beta(black_box(0.3), black_box(2.5), black_box(7.0)))
    });
    c.bench_function("reg_inc_beta/large", |b| {
        b.iter(|| reg_inc_beta(black_box(0.5), black_box(251_528.0), black_box(241_946.0)))
    });
    c.bench_function("student_t_sf", |b| b.iter(|| student_t_sf(black_box(2.1), black_box(33.0))));
}

fn tests(c: &mut Criterion) {
    c.bench_function("laplace_proportion", |b| {
        b.iter(|| laplace_proportion_test(black_box(251_527), black_box(241_945), 0.5))
    });
    c.bench_function("laplace_two_sample/300", |b| {
        b.iter(|| laplace_two_sample(black_box(180), 120, black_box(150), 150))
    });
    c.bench_function("fisher/85", |b| {
        b.iter(|| fisher_intersection_test(85, 17, black_box(32), black_box(13), TailSide::Ge))
    });
    c.bench_function("fisher/10000", |b| {
        b.iter(|| fisher_intersection_test(10_000, 2_000, black_box(3_000), black_box(700), TailSide::Ge))
    });
}

criterion_group!(benches, special_functions, tests);
criterion_main!(benches);
