use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use novtor::cubes::{d_squared, derive_cube, expand_special};
use novtor::gen::{random_instance, GenParams};
use novtor::homalg::smith_normal_form;
use novtor::multicomplex::check_torus_by_tot;
use novtor::rings::CoeffRing;
use novtor_bench::derived_cube;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn derive(c: &mut Criterion) {
    let mut g = c.benchmark_group("derive_cube");
    for n in 1..=4 {
        let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
        let inst = random_instance(&mut rng, &GenParams::new(CoeffRing::IntegersMod(5), n));
        let input = inst.input();
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| b.iter(|| derive_cube(&input, 0).unwrap()));
    }
    g.finish();
}

fn totalise(c: &mut Criterion) {
    let mut g = c.benchmark_group("d_squared");
    for n in 1..=4 {
        let cube = expand_special(&derived_cube(CoeffRing::Integers, n, 7));
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| b.iter(|| d_squared(&cube)));
    }
    g.finish();
}

fn torus(c: &mut Criterion) {
    let cube = derived_cube(CoeffRing::IntegersMod(5), 2, 3);
    c.bench_function("torus_by_tot/n=2,r=2", |b| b.iter(|| check_torus_by_tot(&cube, 2).unwrap()));
}

fn snf(c: &mut Criterion) {
    let cube = derived_cube(CoeffRing::Integers, 3, 11);
    let t = cube.totalise().unwrap().complex;
    let (lo, hi) = t.bounds().unwrap();
    let mats: Vec<_> = (lo..hi).map(|l| t.differential(l)).collect();
    c.bench_function("snf/totalised n=3", |b| b.iter(|| mats.iter().map(|m| smith_normal_form(m).unwrap().diag.len()).sum::<usize>()));
}

criterion_group!(benches, derive, totalise, torus, snf);
criterion_main!(benches);
