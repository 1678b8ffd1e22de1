//! Sequential vs rayon-parallel execution of the two hot paths: the
//! mismatch scan behind a velocity spectrum, and PDE time steps.
//!
//! Build with `--no-default-features` to measure the fallback path alone
//! (both variants then run sequentially).

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use ndsg::evolution::{make_initial_state, Grid, InitialProfile, Launch, Sponge, Stepper};
use ndsg::operator::NonlocalMethod;
use ndsg::traveling_wave::{find_velocity_spectrum, ScanOptions, ShootControls};
use ndsg::{Execution, ModelParams};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn spectrum_scan(c: &mut Criterion) {
    let params = ModelParams::new(0.3, 0.125).unwrap();
    let mut group = c.benchmark_group("spectrum_scan");
    group.sample_size(10);
    for points in [200, 800] {
        for (name, exec) in MODES {
            let opts = ScanOptions { points, exec, ..Default::default() };
            group.bench_with_input(BenchmarkId::new(name, points), &opts, |b, opts| {
                b.iter(|| find_velocity_spectrum(&params, (0.2, 0.95), 4, &ShootControls::default(), black_box(opts)).unwrap())
            });
        }
    }
    group.finish();
}

fn evolution_steps(c: &mut Criterion) {
    let params = ModelParams::new(0.3, 0.125).unwrap();
    let mut group = c.benchmark_group("evolution_100_steps");
    group.sample_size(10);
    // Default experiment domain and a four times longer one.
    for zeta_max in [250.0, 1300.0] {
        let grid = Grid::open(-100.0, zeta_max, 0.05).unwrap();
        let launch = Launch { v: 0.8, front: -100.0 + 0.15 * (zeta_max + 100.0), tail_tol: 1e-4 };
        let state = make_initial_state(grid, Some(Sponge::default()), &params, &InitialProfile::SgLike { gamma: 0.5 }, &launch).unwrap();
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, grid.n), &state, |b, state| {
                let mut stepper = Stepper::new(state, &params, 0.01, NonlocalMethod::Auto, exec).unwrap();
                b.iter(|| {
                    let mut s = state.clone();
                    for _ in 0..100 {
                        stepper.step(&mut s).unwrap();
                    }
                    black_box(s.phi[0])
                })
            });
        }
    }
    group.finish();
}

criterion_group!(benches, spectrum_scan, evolution_steps);
criterion_main!(benches);
