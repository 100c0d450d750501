//! Engine throughput: the block-summed driver (data-parallel term
//! evaluation when the `parallel` feature is on, the default) against a
//! plain sequential term loop over the same summand. Run both
//! `cargo bench` and `cargo bench --no-default-features` to compare the
//! two driver configurations directly.

use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use pfx::scalar::C;
use pfx::series::{beta_sym, cdi_term, closed_sym, tve_term, ConvergenceConfig};
use pfx::sum::NeumaierSum;

fn r(x: f64) -> C {
    C::new(x, 0.0)
}

fn fixed_term_cfg(n: u64) -> ConvergenceConfig {
    // pin the work to exactly n terms so both paths sum the same series
    ConvergenceConfig { n_min: n, n_max: n, tail_correction: false, ..Default::default() }
}

fn bench_cdi(c: &mut Criterion) {
    let mut g = c.benchmark_group("cdi_lambda5_4096_terms");
    let cfg = fixed_term_cfg(4096);
    g.bench_function("engine", |b| {
        b.iter(|| beta_sym(r(0.5), r(0.5), r(0.0), r(5.0), black_box(&cfg)).unwrap().value)
    });
    g.bench_function("sequential_loop", |b| {
        b.iter(|| {
            let mut s = NeumaierSum::new();
            for k in 0..4096u64 {
                s.add(cdi_term(r(0.5), r(0.5), r(0.0), r(5.0), black_box(k)).unwrap());
            }
            s.value()
        })
    });
    g.finish();
}

fn bench_tvd(c: &mut Criterion) {
    let third = 1.0 / 3.0;
    let mut g = c.benchmark_group("tvd_ssce_4096_terms");
    let cfg = fixed_term_cfg(4096);
    g.bench_function("engine", |b| {
        b.iter(|| {
            closed_sym(r(third), r(third), r(third), r(1.0), r(third), black_box(&cfg))
                .unwrap()
                .value
        })
    });
    g.bench_function("sequential_loop", |b| {
        b.iter(|| {
            let mut s = NeumaierSum::new();
            for k in 0..4096u64 {
                s.add(tve_term(r(third), r(third), r(third), 0, r(third), black_box(k)).unwrap());
            }
            s.value()
        })
    });
    g.finish();
}

criterion_group!(benches, bench_cdi, bench_tvd);
criterion_main!(benches);
