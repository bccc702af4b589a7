//! Parallel vs sequential fan-out on the two batch workloads: corrector
//! solves across a radius schedule and Monte-Carlo wave paths.
//!
//! `exec::parallel_map` runs on rayon under the default `parallel` feature;
//! `exec::sequential_map` is the plain-loop reference. Building the bench
//! with `--no-default-features` makes both paths sequential.

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use homog::cell::solve_truncated_cell;
use homog::exec;
use homog::field::{LambdaShape, OscillatingMatrixField, ScalarField};
use homog::noise::NoiseModel;
use homog::wave::{QGrid, SpaceTimeForcing, StiffnessOperator, WaveProblem, WaveState};

fn cell_batch(c: &mut Criterion) {
    let a = OscillatingMatrixField::scalar_1d(ScalarField::sum_1d(2.0, &[(1.0, 1.0)]), 1.0)
        .unwrap();
    let radii: Vec<f64> = vec![2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0];
    let solve = |r: f64| {
        let n = (r * 256.0) as usize;
        solve_truncated_cell(&a, &[0.0], 0, r, n, 1e-10).unwrap().gradient_energy
    };

    let mut group = c.benchmark_group("cell_batch");
    group.bench_function("parallel", |b| {
        b.iter_batched(
            || radii.clone(),
            |jobs| exec::parallel_map(jobs, solve),
            BatchSize::SmallInput,
        )
    });
    group.bench_function("sequential", |b| {
        b.iter_batched(
            || radii.clone(),
            |jobs| exec::sequential_map(jobs, solve),
            BatchSize::SmallInput,
        )
    });
    group.finish();
}

fn wave_paths(c: &mut Criterion) {
    let grid = QGrid::new(1, 128).unwrap();
    let dt = 1.0 / 256.0;
    let steps = 64;
    let stiff = StiffnessOperator::identity(grid);
    let g = SpaceTimeForcing::oscillatory(
        grid,
        &ScalarField::constant(1, 1.0),
        &ScalarField::constant(1, 1.0),
        LambdaShape::Linear,
        1.0,
        0.5,
    )
    .unwrap();
    let problem = WaveProblem::new(stiff, None, vec![g], dt).unwrap();
    let noise = NoiseModel::new(1, 99);
    let initial = WaveState::from_profiles(grid, |p| (std::f64::consts::PI * p[0]).sin(), |_| 0.0);

    let run_path = |path: u64| {
        let stream = noise.stream(path, steps, dt);
        let mut state = initial.clone();
        for k in 0..steps {
            state = problem.step(&state, Some((&stream, k))).unwrap();
        }
        state.h1_seminorm()
    };
    let paths: Vec<u64> = (0..32).collect();

    let mut group = c.benchmark_group("wave_paths");
    group.bench_function("parallel", |b| {
        b.iter_batched(
            || paths.clone(),
            |jobs| exec::parallel_map(jobs, run_path),
            BatchSize::SmallInput,
        )
    });
    group.bench_function("sequential", |b| {
        b.iter_batched(
            || paths.clone(),
            |jobs| exec::sequential_map(jobs, run_path),
            BatchSize::SmallInput,
        )
    });
    group.finish();
}

criterion_group!(benches, cell_batch, wave_paths);
criterion_main!(benches);
