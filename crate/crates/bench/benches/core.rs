use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use symspec::abssep::{self, CheckMode};
use symspec::matricize;
use symspec::oracle::{self, VectorClass};
use symspec::rng;
use symspec::sdp::{self, SolverSettings};

fn abs_ppt(c: &mut Criterion) {
    let mut r = rng::from_seed(1);
    let l3 = abssep::random_spectrum(6, &mut r);
    let l4 = abssep::random_spectrum(10, &mut r);
    let full3 = matricize::enumerate_assignments(3).unwrap();
    let reduced4 = matricize::reduced_assignments_cached(4).unwrap();
    c.bench_function("abs_ppt_3d_single", |b| b.iter(|| abssep::is_abs_sym_ppt_3d(black_box(&l3))));
    c.bench_function("abs_ppt_3d_full_720", |b| {
        b.iter(|| abssep::check_assignments(black_box(&l3), &full3, CheckMode::Full))
    });
    c.bench_function("abs_ppt_4d_reduced_26", |b| {
        b.iter(|| abssep::check_assignments(black_box(&l4), reduced4, CheckMode::Reduced))
    });
}

fn search(c: &mut Criterion) {
    let mut g = c.benchmark_group("search_trial");
    for d in [3, 5] {
        let mut t = 0;
        g.bench_function(format!("complex_full_d{d}"), |b| {
            b.iter(|| {
                t += 1;
                oracle::search_trial(d, VectorClass::ComplexFull, 1, t)
            })
        });
    }
    g.finish();
}

fn spectrum_programs(c: &mut Criterion) {
    let s = SolverSettings::with_tol(1e-8);
    let set2 = matricize::reduced_assignments_cached(2).unwrap();
    let four = matricize::ordering_assignments_3d();
    let mu3 = [1.0, 0.8, 0.5, 0.3, 0.1, -0.2];
    c.bench_function("spectrum_check_2d_sdp", |b| {
        b.iter(|| sdp::decomposable_spectrum_check_with(black_box(&[1.0, 0.5, -0.3]), 2, set2, &s))
    });
    c.bench_function("spectrum_check_3d_single", |b| {
        b.iter(|| sdp::decomposable_spectrum_check_3d_with(black_box(&mu3), &s))
    });
    c.bench_function("spectrum_check_3d_four", |b| {
        b.iter(|| sdp::decomposable_spectrum_check_with(black_box(&mu3), 3, &four, &s))
    });
}

fn max_neg(c: &mut Criterion) {
    let mut g = c.benchmark_group("max_neg_witness");
    g.sample_size(10);
    for d in [2, 3, 4] {
        g.bench_function(format!("d{d}"), |b| b.iter(|| sdp::build_max_neg_witness(black_box(d))));
    }
    g.finish();
}

criterion_group!(benches, abs_ppt, search, spectrum_programs, max_neg);
criterion_main!(benches);
