use std::hint::black_box;
use std::path::Path;

use criterion::{criterion_group, criterion_main, Criterion};

use paramp_core::config::Config;
use paramp_core::model::{Architecture, JunctionSpec};
use paramp_core::ode::Tolerance;
use paramp_core::oracle::{self, OscillatorParams, Tone};
use paramp_core::{pump, quantizer};

const FF: f64 = 1e-15;

fn config(name: &str) -> Config {
    Config::load(Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)).unwrap()
}

fn modes(c: &mut Criterion) {
    let mut group = c.benchmark_group("modes");
    group.sample_size(10);
    for n in [256, 2048] {
        let arch = Architecture::SeriesArray { n, junction: JunctionSpec::from_circuit(0.3e-9, 40.0 * FF), c_ground: 0.15 * FF, c_out: 30.0 * FF };
        let m = quantizer::build_matrices(&arch).unwrap();
        group.bench_function(format!("chain_{n}"), |b| b.iter(|| quantizer::solve_modes(black_box(&m)).unwrap()));
    }
    group.finish();
}

fn steady_state(c: &mut Criterion) {
    c.bench_function("steady_state_bistable", |b| b.iter(|| pump::steady_state(black_box(-2.0), black_box(-0.8))));
}

fn gain(c: &mut Criterion) {
    let single = config("single_jj.toml").build().unwrap();
    let comb = config("modified_bjpa_cell.toml").build().unwrap();
    let grid = |lo: f64, hi: f64| -> Vec<f64> { (0..=1000).map(|k| lo + (hi - lo) * k as f64 / 1000.0).collect() };
    let (p, k) = (single.pump_freq(), single.kappa());
    let single_freqs = grid(p - 5.0 * k, p + 5.0 * k);
    let two_pi = 2.0 * std::f64::consts::PI;
    let comb_freqs = grid(two_pi * 4e9, two_pi * 8e9);
    c.bench_function("gain_single_jj_1001", |b| b.iter(|| single.gain_spectrum(black_box(&single_freqs)).unwrap()));
    c.bench_function("gain_comb_1001", |b| b.iter(|| comb.gain_spectrum(black_box(&comb_freqs)).unwrap()));
}

fn oracle_run(c: &mut Criterion) {
    let params = OscillatorParams { delta: -0.8, zeta: -0.2 };
    let probe = Tone { amplitude: 1e-4, detuning: 0.2, phase: 0.0 };
    let mut group = c.benchmark_group("oracle");
    group.sample_size(10);
    group.bench_function("two_tone_10_periods", |b| {
        b.iter(|| oracle::two_tone_record(black_box(params), Tone::pump(0.0), probe, 10, Tolerance::default()).unwrap())
    });
    group.finish();
}

criterion_group!(benches, modes, steady_state, gain, oracle_run);
criterion_main!(benches);
