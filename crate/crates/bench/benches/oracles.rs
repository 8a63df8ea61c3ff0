use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tgalab::greedy::{greedy_sets, is_f_greedy_set};
use tgalab::oracle::{estimate_constant, sigma_profile, sigma_tilde_profile, DEFAULT_TOL};
use tgalab::{ConstantName, FuncF, IndexSet, Sampler, Space, TiePolicy};

fn sigma(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let x = Sampler::Gaussian { support: 8, horizon: 16 }.draw_vector(&mut rng).unwrap();
    let mut group = c.benchmark_group("sigma");
    group.sample_size(10);
    for (name, space) in [("l1", Space::lp(1.0).unwrap()), ("kt", Space::kt())] {
        group.bench_with_input(BenchmarkId::new("tilde", name), &space, |b, s| {
            b.iter(|| sigma_tilde_profile(black_box(&x), 4, s).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("free", name), &space, |b, s| {
            b.iter(|| sigma_profile(black_box(&x), 3, s, DEFAULT_TOL).unwrap())
        });
    }
    group.finish();
}

fn f_greedy(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let x = Sampler::SignComb { support: 12, horizon: 24 }.draw_vector(&mut rng).unwrap();
    let f = FuncF::sqrt();
    let sets = greedy_sets(&x, 6, TiePolicy::EnumerateAll, 24).unwrap();
    c.bench_function("greedy_sets/sign_comb_12", |b| {
        b.iter(|| greedy_sets(black_box(&x), 6, TiePolicy::EnumerateAll, 24).unwrap())
    });
    c.bench_function("f_greedy_test/sqrt", |b| {
        b.iter(|| sets.iter().filter(|s: &&IndexSet| is_f_greedy_set(&x, s, &f).unwrap().is_yes()).count())
    });
}

fn constants(c: &mut Criterion) {
    let mut group = c.benchmark_group("constants");
    group.sample_size(10);
    let kt = Space::kt();
    let id = FuncF::identity();
    group.bench_function("K_su/kt_alternating_2^14", |b| {
        b.iter(|| estimate_constant(ConstantName::KSu, &kt, Some(&id), &Sampler::KtAlternating { dimension: 1 << 14 }, 1, 0).unwrap())
    });
    let schreier = Space::schreier(FuncF::sqrt());
    let f = FuncF::sqrt();
    group.bench_function("Delta_d/schreier_far_block", |b| {
        b.iter(|| {
            estimate_constant(ConstantName::DeltaD, &schreier, Some(&f), &Sampler::FarBlock { max_size: 32, horizon: 128 }, 32, 0)
                .unwrap()
        })
    });
    group.finish();
}

criterion_group!(benches, sigma, f_greedy, constants);
criterion_main!(benches);
