//! Acceptance suite: one test per headline requirement, each printing a
//! PASS line with the measured quantities (visible with `--nocapture`).
//!
//! Oracles are computed independently inside this file: harmonic means by
//! direct quadrature of `1/a`, the eigenmode solution in closed form, the
//! deterministic scheme as the reference for ensemble means.

use homog::assembly::Window;
use homog::effective::{
    assemble_effective_periodic, assemble_effective_truncated, convergence_study, Reference,
};
use homog::experiment::{compare_epsilon_sweep, preset_scenario, Preset};
use homog::exec;
use homog::field::{CosTerm, LambdaShape, OscillatingMatrixField, ScalarField, SymMat};
use homog::noise::NoiseModel;
use homog::wave::{QGrid, SpaceTimeForcing, StiffnessOperator, WaveProblem, WaveState};
use std::f64::consts::PI;
use std::time::Instant;

const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Harmonic mean `(mean 1/a)^-1` by midpoint quadrature over `[-r, r]`.
fn harmonic_mean_quadrature(a: impl Fn(f64) -> f64, r: f64, samples: usize) -> f64 {
    let h = 2.0 * r / samples as f64;
    let inv: f64 = (0..samples).map(|i| 1.0 / a(-r + (i as f64 + 0.5) * h)).sum();
    samples as f64 / inv
}

fn cos_field_1d() -> OscillatingMatrixField {
    OscillatingMatrixField::scalar_1d(ScalarField::sum_1d(2.0, &[(1.0, 1.0)]), 1.0).unwrap()
}

#[test]
fn constant_coefficient_identity() {
    let t0 = Instant::now();
    let a = OscillatingMatrixField::constant(2, SymMat::new_2d(2.0, 3.0, 0.0)).unwrap();
    let mut worst: f64 = 0.0;
    for r in [1.0, 2.0, 4.0] {
        let t = assemble_effective_truncated(&a, &[0.5, 0.5], r, 32, 1e-10, Window::Full).unwrap();
        worst = worst
            .max((t.entry(0, 0) - 2.0).abs())
            .max((t.entry(1, 1) - 3.0).abs())
            .max(t.entry(0, 1).abs())
            .max(t.entry(1, 0).abs());
    }
    let elapsed = t0.elapsed();
    assert!(worst <= 1e-10, "constant identity error {worst}");
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}, budget 1 s");
    println!("PASS constant-coefficient identity: max error {worst:.2e} in {elapsed:?}");
}

#[test]
fn periodic_1d_effective_oracle() {
    let t0 = Instant::now();
    let profile = |y: f64| 2.0 + (2.0 * PI * y).cos();
    let oracle = harmonic_mean_quadrature(profile, 0.5, 1 << 16);
    assert!((oracle - SQRT3).abs() < 1e-10, "quadrature oracle {oracle}");
    let t = assemble_effective_periodic(&cos_field_1d(), &[0.5], 1024, 1e-10).unwrap();
    let err = (t.entry(0, 0) - oracle).abs();
    let err_frozen = (t.entry(0, 0) - 1.732_050_8).abs();
    let elapsed = t0.elapsed();
    assert!(err <= 1e-4, "error against quadrature oracle {err}");
    assert!(err_frozen <= 1e-4, "error against frozen value {err_frozen}");
    assert!(elapsed.as_secs_f64() < 5.0, "took {elapsed:?}, budget 5 s");
    println!(
        "PASS periodic 1D oracle: tensor {:.10}, oracle {oracle:.10}, error {err:.2e} in {elapsed:?}",
        t.entry(0, 0)
    );
}

#[test]
fn truncated_tensor_converges_with_radius() {
    let t0 = Instant::now();
    let record = convergence_study(
        &cos_field_1d(),
        &[0.5],
        &[4.0, 8.0, 16.0, 32.0],
        128,
        1e-10,
        Window::Interior,
        Reference::Oracle([[SQRT3, 0.0], [0.0, 0.0]]),
    )
    .unwrap();
    let elapsed = t0.elapsed();
    assert!(
        record.errors_decreasing,
        "errors not strictly decreasing: {:?}",
        record.errors
    );
    let last = *record.errors.last().unwrap();
    assert!(last <= 1e-3, "final error {last}");
    assert!(elapsed.as_secs_f64() < 60.0, "took {elapsed:?}, budget 1 min");
    println!(
        "PASS truncation convergence: errors {:?} (final {last:.2e}) in {elapsed:?}",
        record.errors
    );
}

#[test]
fn quasiperiodic_tensor_converges() {
    let t0 = Instant::now();
    let sqrt2 = std::f64::consts::SQRT_2;
    let a = OscillatingMatrixField::scalar_1d(
        ScalarField::sum_1d(2.5, &[(1.0, 1.0), (1.0, sqrt2)]),
        0.5,
    )
    .unwrap();
    // long-window quadrature of the inverse field
    let profile = |y: f64| 2.5 + (2.0 * PI * y).cos() + (2.0 * PI * sqrt2 * y).cos();
    let oracle = harmonic_mean_quadrature(profile, 2048.0, 1 << 18);
    let record = convergence_study(
        &a,
        &[0.5],
        &[8.0, 16.0, 32.0, 64.0],
        64,
        1e-10,
        Window::Interior,
        Reference::LargestR,
    )
    .unwrap();
    let elapsed = t0.elapsed();
    assert!(record.cauchy_decreasing, "cauchy not decreasing: {:?}", record.cauchy);
    let limit = record.tensors.last().unwrap().entry(0, 0);
    let gap = (limit - oracle).abs();
    assert!(gap <= 1e-2, "limit {limit} vs quadrature oracle {oracle}");
    assert!(elapsed.as_secs_f64() < 300.0, "took {elapsed:?}, budget 5 min");
    println!(
        "PASS quasi-periodic convergence: cauchy {:?}, limit {limit:.6} vs oracle {oracle:.6} (gap {gap:.2e}) in {elapsed:?}",
        record.cauchy
    );
}

#[test]
fn laminate_2d_effective_oracle() {
    let t0 = Instant::now();
    let entry = ScalarField::new(
        2,
        2.0,
        vec![CosTerm { amplitude: 1.0, freq: vec![1.0, 0.0], phase: 0.0 }],
        None,
    )
    .unwrap();
    let a = OscillatingMatrixField::diagonal_2d(entry.clone(), entry, 1.0).unwrap();
    let t = assemble_effective_truncated(&a, &[0.5, 0.5], 16.0, 512, 1e-10, Window::Interior)
        .unwrap();
    let elapsed = t0.elapsed();
    // laminate oracle: harmonic mean along the lamination, arithmetic across
    let e11 = (t.entry(0, 0) - SQRT3).abs();
    let e22 = (t.entry(1, 1) - 2.0).abs();
    let off = t.entry(0, 1).abs().max(t.entry(1, 0).abs());
    assert!(e11 <= 1e-2, "a11 error {e11}");
    assert!(e22 <= 1e-2, "a22 error {e22}");
    assert!(off <= 1e-6, "off-diagonal {off}");
    assert!(elapsed.as_secs_f64() < 600.0, "took {elapsed:?}, budget 10 min");
    println!(
        "PASS 2D laminate oracle: diag error ({e11:.2e}, {e22:.2e}), off-diagonal {off:.2e} in {elapsed:?}"
    );
}

#[test]
fn wave_eigenmode_and_energy() {
    let t0 = Instant::now();
    let n = 256;
    let grid = QGrid::new(1, n).unwrap();
    let problem =
        WaveProblem::new(StiffnessOperator::identity(grid), None, Vec::new(), 1.0 / 1024.0)
            .unwrap();
    let initial = WaveState::from_profiles(grid, |p| (PI * p[0]).sin(), |_| 0.0);
    let rec = problem.run(&initial, 1.0, None, 64, None).unwrap();
    let fin = rec.final_state.as_ref().unwrap();
    let mut err_sq = 0.0;
    for idx in 0..grid.node_count() {
        if grid.is_boundary(idx) {
            continue;
        }
        let x = grid.node_coord(idx)[0];
        let d = fin.u[idx] + (PI * x).sin();
        err_sq += d * d * grid.h();
    }
    let l2_err = err_sq.sqrt();
    let e0 = rec.energies[0];
    let drift = rec
        .energies
        .iter()
        .fold(0.0f64, |m, e| m.max((e - e0).abs() / e0));
    let elapsed = t0.elapsed();
    assert!(l2_err <= 5e-3, "eigenmode L2 error {l2_err}");
    assert!(drift <= 1e-3, "energy drift {drift}");
    println!(
        "PASS wave eigenmode: L2 error {l2_err:.2e}, relative energy drift {drift:.2e} in {elapsed:?}"
    );
}

#[test]
fn multiplicative_noise_ensemble_mean() {
    // g_k = sigma_k u with sigma_k = k^-2, f = 0: the Euler-Maruyama noise
    // term has zero conditional mean, so the ensemble mean follows the
    // deterministic recursion exactly; the oracle is the g = 0 run.
    let t0 = Instant::now();
    let n = 128;
    let grid = QGrid::new(1, n).unwrap();
    let dt = 1.0 / 1024.0;
    let steps = 1024;
    let modes = 4;
    let paths = 512usize;
    let record_steps = [256usize, 512, 1024];

    let make_problem = |with_noise: bool| {
        let diffusion: Vec<SpaceTimeForcing> = if with_noise {
            (1..=modes)
                .map(|k| {
                    SpaceTimeForcing::oscillatory(
                        grid,
                        &ScalarField::constant(1, 1.0),
                        &ScalarField::constant(1, 1.0),
                        LambdaShape::Linear,
                        1.0,
                        1.0 / (k * k) as f64,
                    )
                    .unwrap()
                })
                .collect()
        } else {
            Vec::new()
        };
        WaveProblem::new(StiffnessOperator::identity(grid), None, diffusion, dt).unwrap()
    };
    let initial = WaveState::from_profiles(grid, |p| (PI * p[0]).sin(), |_| 0.0);

    // first-eigenmode projection as the scalar statistic
    let project = |u: &[f64]| -> f64 {
        (0..grid.node_count())
            .map(|i| u[i] * (PI * grid.node_coord(i)[0]).sin() * std::f64::consts::SQRT_2)
            .sum::<f64>()
            * grid.h()
    };

    let det_problem = make_problem(false);
    let mut det_vals = Vec::new();
    {
        let mut state = initial.clone();
        for k in 0..steps {
            state = det_problem.step(&state, None).unwrap();
            if record_steps.contains(&(k + 1)) {
                det_vals.push(project(&state.u));
            }
        }
    }

    let problem = make_problem(true);
    let noise = NoiseModel::new(modes, 2024);
    let samples: Vec<Vec<f64>> = exec::parallel_map((0..paths as u64).collect(), |p| {
        let stream = noise.stream(p, steps, dt);
        let mut state = initial.clone();
        let mut vals = Vec::new();
        for k in 0..steps {
            state = problem.step(&state, Some((&stream, k))).unwrap();
            if record_steps.contains(&(k + 1)) {
                vals.push(project(&state.u));
            }
        }
        vals
    });

    let elapsed = t0.elapsed();
    let mut report = String::new();
    for (ti, &det) in det_vals.iter().enumerate() {
        let vals: Vec<f64> = samples.iter().map(|s| s[ti]).collect();
        let mean = vals.iter().sum::<f64>() / paths as f64;
        let var =
            vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (paths - 1) as f64;
        let stderr = (var / paths as f64).sqrt();
        let dev = (mean - det).abs();
        assert!(
            dev <= 3.0 * stderr,
            "t index {ti}: ensemble mean {mean} vs deterministic {det}, |diff| {dev} > 3 x stderr {stderr}"
        );
        report.push_str(&format!(" t{}={:.1}sigma", ti, dev / stderr.max(1e-300)));
    }
    assert!(elapsed.as_secs_f64() < 600.0, "took {elapsed:?}, budget 10 min");
    println!("PASS noise sanity: {paths} paths, deviations{report} in {elapsed:?}");
}

#[test]
fn coupled_epsilon_sweep_problem1() {
    let t0 = Instant::now();
    let sc = preset_scenario(Preset::Problem1).unwrap();
    assert_eq!(sc.epsilons, vec![0.125, 0.0625, 0.03125]);
    assert_eq!(sc.paths, 64);
    let res = compare_epsilon_sweep(&sc).unwrap();
    let elapsed = t0.elapsed();
    assert!(
        res.mean_sq_decreasing,
        "mean e^2 not strictly decreasing: {:?}",
        res.mean_sq
    );
    for (k, ok) in res.tail_nonincreasing.iter().enumerate() {
        assert!(
            ok,
            "tail probability for delta {} not non-increasing: {:?}",
            res.deltas[k],
            res.tail_prob.iter().map(|row| row[k]).collect::<Vec<_>>()
        );
    }
    assert!(elapsed.as_secs_f64() < 1800.0, "took {elapsed:?}, budget 30 min");
    println!(
        "PASS coupled epsilon sweep: mean e^2 {:?}, tails non-increasing for {} thresholds in {elapsed:?}",
        res.mean_sq,
        res.deltas.len()
    );
}
