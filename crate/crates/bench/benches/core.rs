use criterion::{black_box, criterion_group, criterion_main, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use zink_core::witt::exponent_bound;
use zink_core::{torsion_points, BtOptions, DisplaySource, FiniteAlgebra, TestAlgebra, WittGroup, WittVector};

fn witt_mul(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for (name, ring) in [
        ("Z/8", FiniteAlgebra::integers_mod(2, 3).unwrap()),
        ("F2[t]/t^3", FiniteAlgebra::truncated_field_poly(2, 3).unwrap()),
    ] {
        let x = WittVector::random(&ring, 4, &mut rng);
        let y = WittVector::random(&ring, 4, &mut rng);
        c.bench_function(&format!("witt mul len 4 over {name}"), |b| b.iter(|| black_box(&x).mul(black_box(&y)).unwrap()));
    }
}

fn group_coords(c: &mut Criterion) {
    let ring = FiniteAlgebra::integers_mod(2, 4).unwrap();
    let len = 6;
    let g = WittGroup::new(&ring, len, exponent_bound(&ring, len));
    let x = WittVector::random(&ring, len, &mut ChaCha8Rng::seed_from_u64(2));
    c.bench_function("witt group coords Z/16 len 6", |b| b.iter(|| g.coords(black_box(&x))));
}

fn points(c: &mut Criterion) {
    let ring = FiniteAlgebra::integers_mod(2, 3).unwrap();
    let a = TestAlgebra::over_itself(&ring).unwrap();
    let src = DisplaySource::unit(&ring);
    let mut g = c.benchmark_group("torsion points");
    g.sample_size(10);
    g.bench_function("mu_2 over Z/8", |b| b.iter(|| torsion_points(&src, &a, 1, &BtOptions::default()).unwrap()));
    g.finish();
}

criterion_group!(benches, witt_mul, group_coords, points);
criterion_main!(benches);
