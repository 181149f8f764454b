//! Benchmarks for decomposition, the objective and the solvers.

use std::f64::consts::PI;
use std::hint::black_box;

use criterion::Criterion;
use nestdisc::discrimination::{build_abc, optimal_probability, SearchOptions};
use nestdisc::optimizer::maximize_f;
use nestdisc::oracle::{brute_force_nested, GridSpec};
use nestdisc::povm::{decompose, recompose};
use nestdisc::qubit::{f_q_bloch, SignInfo};
use nestdisc::{random, OptimizerConfig, QubitQ, WeightedEnsemble};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn trine() -> WeightedEnsemble {
    let v = |t: f64| [t.cos(), t.sin(), 0.0];
    WeightedEnsemble::equiprobable_bloch(&[v(0.0), v(2.0 * PI / 3.0), v(4.0 * PI / 3.0)]).unwrap()
}

pub fn benchmarks(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);

    let mut group = c.benchmark_group("povm");
    for dim in [2, 4, 8] {
        let p = random::povm(&mut rng, 4, dim, dim);
        group.bench_function(format!("decompose/4x{dim}"), |b| {
            b.iter(|| decompose(black_box(&p)).unwrap())
        });
        let tree = decompose(&p).unwrap();
        group.bench_function(format!("recompose/4x{dim}"), |b| {
            b.iter(|| recompose(black_box(&tree)).unwrap())
        });
    }
    group.finish();

    let e = random::ensemble(&mut rng, 4, 2);
    let abc = build_abc(&e, &[0, 1, 2, 3]).unwrap();
    let (a, b_, c_) = (
        abc.a.to_bloch().unwrap(),
        abc.b.to_bloch().unwrap(),
        abc.c.to_bloch().unwrap(),
    );
    let q = QubitQ::new(0.4, [0.1, -0.2, 0.05]).unwrap();
    let signs = SignInfo::classify(&b_, &c_);
    c.bench_function("f_q_bloch", |b| {
        b.iter(|| f_q_bloch(&a, &b_, &c_, black_box(&q), signs))
    });
    let config = OptimizerConfig::default();
    c.bench_function("maximize_f/random4", |b| {
        b.iter(|| maximize_f(&a, &b_, &c_, black_box(&config)))
    });

    let t = trine();
    let options = SearchOptions::default();
    c.bench_function("optimal_probability/trine", |b| {
        b.iter(|| optimal_probability(black_box(&t), &options).unwrap())
    });
    let grid = GridSpec::new(20).unwrap();
    c.bench_function("brute_force_nested/trine/20", |b| {
        b.iter(|| brute_force_nested(black_box(&t), &grid).unwrap())
    });
}
