use std::hint::black_box;

use caromlab::deoraclizer::{capture_trial, compile, DeoraclizerConfig};
use caromlab::oracle::{classical_query, OnTheFlyOracle};
use caromlab::qsim::random::{random_density, random_near_certain_measurement, random_pure_state};
use caromlab::qsim::{gentle_recover, outcome_distribution, trace_distance, Register};
use caromlab::rng::SeededRng;
use caromlab::schemes::{cp, eval, ConjugateScheme, CopyProtectionScheme, CounterScheme, PadScheme};
use criterion::{criterion_group, criterion_main, Criterion};

fn qsim(c: &mut Criterion) {
    let mut rng = SeededRng::new(1);
    let rho = random_density(6, 64, &mut rng);
    let sigma = random_density(6, 3, &mut rng);
    c.bench_function("trace_distance_6q", |b| b.iter(|| trace_distance(black_box(&rho), black_box(&sigma)).unwrap()));

    let rho3 = random_density(3, 8, &mut rng);
    let m = random_near_certain_measurement(&rho3, 0.04, &mut rng);
    let post = outcome_distribution(&rho3, &m).unwrap()[0].post_state.clone().unwrap();
    c.bench_function("gentle_recover_3q", |b| b.iter(|| gentle_recover(black_box(&post), &m, 0).unwrap()));

    let psi = random_pure_state(12, &mut rng);
    c.bench_function("classical_query_12q", |b| {
        b.iter(|| {
            let mut o = OnTheFlyOracle::new(6, 6, rng.fork());
            classical_query(black_box(&psi), Register::new(0, 6), Register::new(6, 6), &mut o, &mut rng).unwrap()
        })
    });
}

fn schemes(c: &mut Criterion) {
    let mut rng = SeededRng::new(2);
    let conj = ConjugateScheme::default();
    let p = conj.params();
    let f = conj.sample_function(&mut rng);
    let mut o = OnTheFlyOracle::new(p.oracle_in_len, p.oracle_out_len, rng.fork());
    let state = cp(&conj, &f, &mut o, &mut rng).unwrap();
    c.bench_function("conjugate_eval", |b| {
        b.iter(|| {
            let x = conj.sample_input(&mut rng);
            eval(&conj, state.clone(), &x, &mut o, &mut rng).unwrap()
        })
    });

    let pad = PadScheme::default();
    let d = pad.sample_function(&mut rng);
    let config = DeoraclizerConfig::new(0.1).unwrap();
    c.bench_function("compile_pad_eps0.1", |b| b.iter(|| compile(&pad, &d, &config, &mut rng).unwrap()));

    let counter = CounterScheme::default();
    c.bench_function("capture_trial_counter_eps0.1", |b| {
        b.iter(|| capture_trial(&counter, &config, &mut rng).unwrap())
    });
}

criterion_group!(benches, qsim, schemes);
criterion_main!(benches);
