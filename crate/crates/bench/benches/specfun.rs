use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use ndr_core::dist::{joint_pdf_gamma, ndr_moment, ndr_pdf, Formulation, GammaPairParams};
use ndr_core::specfun::{bessel_i_scaled, hyp2f1, ln_gamma, SeriesControl};

fn special_functions(c: &mut Criterion) {
    let ctl = SeriesControl::default();
    c.bench_function("ln_gamma", |b| b.iter(|| ln_gamma(black_box(12.5))));
    c.bench_function("bessel_i11_scaled_x30", |b| b.iter(|| bessel_i_scaled(11, black_box(30.0))));
    let mut g = c.benchmark_group("hyp2f1");
    for z in [-0.9, 0.3, 0.9] {
        g.bench_function(format!("z={z}"), |b| {
            b.iter(|| hyp2f1(12.0, 12.5, 13.0, black_box(z), &ctl))
        });
    }
    g.finish();
}

fn densities_and_moments(c: &mut Criterion) {
    let p = GammaPairParams::new(2.88, 0.64, 12.0).unwrap();
    c.bench_function("joint_pdf_gamma_k12", |b| {
        b.iter(|| joint_pdf_gamma(&p, black_box(30.0), black_box(36.0)))
    });
    c.bench_function("ndr_pdf_k12", |b| b.iter(|| ndr_pdf(&p, black_box(0.2))));
    let mut g = c.benchmark_group("ndr_moment_k12_rho0.64");
    for form in Formulation::ALL {
        g.bench_function(format!("{form:?}"), |b| b.iter(|| ndr_moment(&p, black_box(3), form)));
    }
    g.finish();
}

criterion_group!(benches, special_functions, densities_and_moments);
criterion_main!(benches);
