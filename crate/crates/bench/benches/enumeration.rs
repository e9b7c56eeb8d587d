use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use rclb_core::arith::{sieve_primes, SquarefreeSieve};
use rclb_core::dirichlet::geometric_grid;
use rclb_core::family::{a4_grid, abelian_grid, cubic_base, AbelianGroup, GammaRule};

fn sieves(c: &mut Criterion) {
    c.bench_function("sieve_primes 1e7", |b| b.iter(|| sieve_primes(black_box(10_000_000)).unwrap().count()));
    c.bench_function("squarefree supports 1e6", |b| {
        b.iter(|| SquarefreeSieve::new(black_box(1_000_000)).par_fold(|| 0usize, |a, _, s| *a += s.len(), |a, b| a + b))
    });
}

fn families(c: &mut Criterion) {
    let grid = geometric_grid(1e3, 1e6, 13);
    let rule = GammaRule::default();
    let mut g = c.benchmark_group("family grids");
    g.sample_size(20);
    for group in [AbelianGroup::C2, AbelianGroup::C3, AbelianGroup::C2xC2] {
        g.bench_function(format!("{group} to 1e6"), |b| b.iter(|| abelian_grid(group, &grid, true, &rule, 6).unwrap()));
    }
    let base = cubic_base(7).unwrap();
    let a4 = geometric_grid(1e4, 1e8, 17);
    g.bench_function("A4 over conductor 7 to 1e8", |b| b.iter(|| a4_grid(&base, &a4, Some(6)).unwrap()));
    g.finish();
}

criterion_group!(benches, sieves, families);
criterion_main!(benches);
