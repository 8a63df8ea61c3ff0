use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tgalab::{FuncF, Sampler, Space, SparseVector};

fn gaussian(support: usize, horizon: usize, seed: u64) -> SparseVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Sampler::Gaussian { support, horizon }.draw_vector(&mut rng).unwrap()
}

fn norms(c: &mut Criterion) {
    let spaces = [
        ("l2", Space::lp(2.0).unwrap()),
        ("direct_sum", Space::direct_sum(1.0, 2.0).unwrap()),
        ("schreier_sqrt", Space::schreier(FuncF::sqrt())),
        ("kt", Space::kt()),
        ("haar_d1", Space::haar(3.0, 1, 12).unwrap()),
    ];
    let mut group = c.benchmark_group("norm");
    for support in [16usize, 256, 4096] {
        let x = gaussian(support, 4096, support as u64);
        for (name, space) in &spaces {
            group.bench_with_input(BenchmarkId::new(*name, support), &x, |b, x| b.iter(|| space.norm(black_box(x)).unwrap()));
        }
    }
    group.finish();
}

fn haar_d2(c: &mut Criterion) {
    let space = Space::haar(4.0, 2, 6).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let x = SparseVector::from_pairs((1..=4096).filter(|_| rng.gen_bool(0.05)).map(|n| (n, 1.0))).unwrap();
    c.bench_function("norm/haar_d2", |b| b.iter(|| space.norm(black_box(&x)).unwrap()));
}

criterion_group!(benches, norms, haar_d2);
criterion_main!(benches);
