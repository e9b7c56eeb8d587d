use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use rclb_bench::discriminants_from;
use rclb_core::dirichlet::{l_series, CoeffSeries, Mode, PrimeClass};
use rclb_core::finabelian::FiniteAbelianGroup;
use rclb_core::permgroup::{a4_ramification_table, cohomology_dim, cyclic_regular, F2GModule};
use rclb_core::quadforms::{class_group, two_rank};

fn class_groups(c: &mut Criterion) {
    let discs = discriminants_from(100_000, 50);
    c.bench_function("class_group x50 near -1e5", |b| {
        b.iter(|| discs.iter().map(|&d| class_group(d).unwrap().order()).sum::<u64>())
    });
    c.bench_function("two_rank x50 near -1e5", |b| {
        b.iter(|| discs.iter().map(|&d| two_rank(d).unwrap()).sum::<u32>())
    });
    c.bench_function("smith form of a 12-term cyclic list", |b| {
        b.iter(|| FiniteAbelianGroup::from_cyclic_list(black_box(&[2, 4, 6, 8, 10, 12, 14, 16, 18, 20, 22, 24])))
    });
}

fn groups(c: &mut Criterion) {
    c.bench_function("table1", |b| b.iter(|| a4_ramification_table().unwrap()));
    let c4 = cyclic_regular(4).unwrap();
    let perm = F2GModule::permutation(&c4).unwrap();
    c.bench_function("H^2(C4, perm)", |b| b.iter(|| cohomology_dim(&c4, &perm, 2).unwrap()));
}

fn series(c: &mut Criterion) {
    let mut g = c.benchmark_group("dirichlet");
    g.sample_size(10);
    let zeta = CoeffSeries::from_fn(1_000_000, Mode::Float, |_| 1).unwrap();
    g.bench_function("zeta^2 to 1e6", |b| b.iter(|| zeta.mul(&zeta).unwrap()));
    let class = PrimeClass::residues(4, &[1]).unwrap();
    g.bench_function("l_3 exact to 1e5", |b| b.iter(|| l_series(&class, 3, 100_000, Mode::Exact).unwrap()));
    g.finish();
}

criterion_group!(benches, class_groups, groups, series);
criterion_main!(benches);
