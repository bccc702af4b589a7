//! End-to-end homogenization experiments.
//!
//! The centerpiece is the coupled epsilon sweep: for every path, the
//! oscillatory and the homogenized wave equations are driven by bit-for-bit
//! identical Brownian increments on the same grid, so their `L^2(Q_T)`
//! distance isolates the homogenization error. Tail probabilities
//! `P(e > delta)` and mean-square errors are tabulated per epsilon; the
//! acceptance checks are trend-based (monotone decrease over the schedule),
//! no rate is asserted.

use crate::assembly::Window;
use crate::cell::CellSolution;
use crate::effective::{
    self, assemble_effective_periodic, convergence_study, EffectiveNonlinearity, EffectiveTensor,
    Reference,
};
use crate::error::{Error, Result};
use crate::exec;
use crate::field::{
    DecayKind, DiffusionField, DriftField, LambdaShape, OscillatingMatrixField, ScalarField,
    StructureTag, SymMat,
};
use crate::grid::BoundaryKind;
use crate::noise::NoiseModel;
use crate::wave::{
    l2_distance, QGrid, SpaceTimeForcing, StiffnessOperator, WaveProblem, WaveState,
};
use std::f64::consts::SQRT_2;

/// Initial displacement/velocity family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialData {
    /// `u0 = amplitude * prod_d sin(pi x_d)`, `u1 = 0`.
    SineMode { amplitude: f64 },
    Zero,
}

impl InitialData {
    fn build(&self, grid: QGrid) -> WaveState {
        match *self {
            InitialData::Zero => WaveState::zero(grid),
            InitialData::SineMode { amplitude } => WaveState::from_profiles(
                grid,
                |p| amplitude * p.iter().map(|x| (std::f64::consts::PI * x).sin()).product::<f64>(),
                |_| 0.0,
            ),
        }
    }
}

/// Fully-specified experiment: fields, domain, schedules, seeds.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub dim: usize,
    pub matrix: OscillatingMatrixField,
    pub drift: DriftField,
    pub diffusion: DiffusionField,
    pub initial: InitialData,
    pub t_final: f64,
    pub grid_n: usize,
    pub dt: f64,
    pub record_stride: usize,
    /// Strictly decreasing oscillation scales.
    pub epsilons: Vec<f64>,
    /// Monte-Carlo paths per epsilon.
    pub paths: usize,
    /// Explicit thresholds for the tail probabilities; empty selects the
    /// defaults `{0.5, 0.25, 0.1} x median(e at the largest epsilon)`.
    pub deltas: Vec<f64>,
    pub seed: u64,
    /// Cell-solve tolerance for the effective tensor.
    pub tol: f64,
    /// Unit-cell resolution for periodic fields.
    pub cell_n: usize,
    /// Radius schedule for non-periodic effective tensors.
    pub r_schedule: Vec<f64>,
    /// Cells per unit length of truncated solves.
    pub points_per_unit: usize,
    pub window: Window,
}

impl Scenario {
    /// Structural checks mirroring the standing assumptions: ellipticity of
    /// the matrix, vanishing-at-zero and Lipschitz bounds of the
    /// nonlinearities, schedule shapes.
    pub fn validate(&self) -> Result<()> {
        if self.epsilons.is_empty() || self.epsilons.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::argument("epsilon schedule must be strictly decreasing"));
        }
        if self.paths < 8 {
            return Err(Error::argument("at least 8 Monte-Carlo paths required"));
        }
        if self.deltas.iter().any(|&d| d <= 0.0) {
            return Err(Error::argument("delta thresholds must be positive"));
        }
        let probe = self.matrix.ellipticity_probe(
            &vec![0.5; self.dim],
            3.0,
            17,
            16,
        );
        if probe < self.matrix.alpha() * (1.0 - 1e-9) {
            return Err(Error::argument(format!(
                "ellipticity probe {probe} violates the declared floor {}",
                self.matrix.alpha()
            )));
        }
        // f(., ., 0) = 0 and g_k(., ., 0) = 0 on a sample lattice
        for i in 0..7 {
            let y = vec![-2.1 + i as f64 * 0.7; self.dim];
            let tau = -1.3 + i as f64 * 0.45;
            if self.drift.eval(&y, tau, 0.0) != 0.0 {
                return Err(Error::argument("drift does not vanish at lambda = 0"));
            }
            for k in 0..self.diffusion.mode_count() {
                if self.diffusion.eval_mode(k, &y, tau, 0.0) != 0.0 {
                    return Err(Error::argument("noise mode does not vanish at lambda = 0"));
                }
            }
        }
        // Lipschitz probes against the declared constants
        let c1 = self.drift.lipschitz_constant();
        let mut s = self.seed.wrapping_mul(0x9E3779B97F4A7C15).wrapping_add(1);
        let mut next = || {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            (s >> 11) as f64 / (1u64 << 53) as f64 * 4.0 - 2.0
        };
        for _ in 0..64 {
            let y = vec![next(); self.dim];
            let tau = next();
            let (l, m) = (next(), next());
            let df = (self.drift.eval(&y, tau, l) - self.drift.eval(&y, tau, m)).abs();
            if df > c1 * (l - m).abs() * (1.0 + 1e-9) + 1e-12 {
                return Err(Error::argument("drift violates its declared Lipschitz constant"));
            }
        }
        let sums = self.diffusion.weight_partial_sums();
        if sums.windows(2).any(|w| w[1] < w[0])
            || *sums.last().unwrap() > self.diffusion.declared_weight_sq() * (1.0 + 1e-12)
        {
            return Err(Error::argument("noise weights violate the declared square sum"));
        }
        Ok(())
    }

    /// Nodes per oscillation period at scale `eps` on the scenario grid.
    pub fn nodes_per_period(&self, eps: f64) -> f64 {
        self.grid_n as f64 * eps
    }
}

/// Effective tensor for a scenario field: exact periodic solve when the
/// structure allows it, truncated solve with a Cauchy diagnostic otherwise.
pub fn scenario_effective_tensor(sc: &Scenario) -> Result<EffectiveTensor> {
    match sc.matrix.structure() {
        StructureTag::Constant | StructureTag::Periodic => {
            assemble_effective_periodic(&sc.matrix, &vec![0.5; sc.dim], sc.cell_n, sc.tol)
        }
        _ => {
            let record = convergence_study(
                &sc.matrix,
                &vec![0.5; sc.dim],
                &sc.r_schedule,
                sc.points_per_unit,
                sc.tol,
                sc.window,
                Reference::LargestR,
            )?;
            if !record.cauchy_decreasing {
                return Err(Error::Precondition(
                    "truncated effective tensor did not pass the Cauchy diagnostic".into(),
                ));
            }
            Ok(record.tensors.into_iter().last().unwrap())
        }
    }
}

fn tensor_as_symmat(t: &EffectiveTensor) -> SymMat {
    if t.dim == 1 {
        SymMat::new_1d(t.entry(0, 0))
    } else {
        // symmetrize the solver-tolerance-level defect
        let off = 0.5 * (t.entry(0, 1) + t.entry(1, 0));
        SymMat::new_2d(t.entry(0, 0), t.entry(1, 1), off)
    }
}

/// Wave problem with coefficients sampled at scale `eps`.
pub fn oscillatory_problem(sc: &Scenario, grid: QGrid, eps: f64) -> Result<WaveProblem> {
    let stiff = StiffnessOperator::oscillatory(grid, &sc.matrix, eps)?;
    let drift = SpaceTimeForcing::oscillatory(
        grid,
        sc.drift.spatial(),
        sc.drift.temporal(),
        sc.drift.shape(),
        eps,
        1.0,
    )?;
    // zero-weight modes contribute nothing; both problem builders drop them
    // the same way, so coupled runs consume identical increments
    let modes = sc
        .diffusion
        .modes()
        .iter()
        .filter(|m| m.weight != 0.0)
        .map(|m| {
            SpaceTimeForcing::oscillatory(grid, &m.spatial, &m.temporal, m.shape, eps, m.weight)
        })
        .collect::<Result<Vec<_>>>()?;
    WaveProblem::new(stiff, Some(drift), modes, sc.dt)
}

/// Wave problem with the effective tensor and averaged nonlinearities.
pub fn homogenized_problem(
    sc: &Scenario,
    grid: QGrid,
    tensor: &EffectiveTensor,
    eff: &EffectiveNonlinearity,
) -> Result<WaveProblem> {
    let stiff = StiffnessOperator::constant(grid, tensor_as_symmat(tensor))?;
    let drift = SpaceTimeForcing::effective(grid, eff.drift.clone());
    let modes = eff
        .modes
        .iter()
        .zip(sc.diffusion.modes())
        .filter(|(_, m)| m.weight != 0.0)
        .map(|(r, _)| SpaceTimeForcing::effective(grid, r.clone()))
        .collect();
    WaveProblem::new(stiff, Some(drift), modes, sc.dt)
}

/// Per-epsilon statistics of the coupled comparison.
#[derive(Debug, Clone)]
pub struct ComparisonResult {
    pub scenario: String,
    pub epsilons: Vec<f64>,
    /// `e = ||u_eps - u_0||_{L2(Q_T)}` per (epsilon, path).
    pub errors: Vec<Vec<f64>>,
    pub mean_sq: Vec<f64>,
    pub deltas: Vec<f64>,
    /// `P(e > delta)` per epsilon (rows) and delta (columns).
    pub tail_prob: Vec<Vec<f64>>,
    pub tensor: EffectiveTensor,
    pub mean_sq_decreasing: bool,
    pub tail_nonincreasing: Vec<bool>,
}

/// Coupled Monte-Carlo sweep over the epsilon schedule.
pub fn compare_epsilon_sweep(sc: &Scenario) -> Result<ComparisonResult> {
    sc.validate()?;
    let smallest = *sc.epsilons.last().unwrap();
    let per_period = sc.nodes_per_period(smallest);
    if per_period < 16.0 {
        let needed = (16.0 / smallest).ceil() as usize;
        return Err(Error::Precondition(format!(
            "epsilon {smallest} under-resolved: {per_period:.1} nodes per period on n = {}, need n >= {needed}",
            sc.grid_n
        )));
    }
    let grid = QGrid::new(sc.dim, sc.grid_n)?;
    let tensor = scenario_effective_tensor(sc)?;
    let eff = effective::effective_nonlinearity_exact(&sc.drift, &sc.diffusion);
    let homog = homogenized_problem(sc, grid, &tensor, &eff)?;
    let initial = sc.initial.build(grid);
    let steps = (sc.t_final / sc.dt).round() as usize;
    let noise = NoiseModel::new(sc.diffusion.mode_count(), sc.seed);

    // one oscillatory problem per epsilon, shared across paths
    let eps_problems: Vec<WaveProblem> = sc
        .epsilons
        .iter()
        .map(|&eps| oscillatory_problem(sc, grid, eps))
        .collect::<Result<_>>()?;

    let jobs: Vec<(usize, u64)> = (0..sc.epsilons.len())
        .flat_map(|ei| (0..sc.paths as u64).map(move |p| (ei, p)))
        .collect();
    let homog_ref = &homog;
    let eps_ref = &eps_problems;
    let initial_ref = &initial;
    let results: Vec<Result<f64>> = exec::parallel_map(jobs, move |(ei, path)| {
        let stream = noise.stream(ei as u64 * sc.paths as u64 + path, steps, sc.dt);
        coupled_l2_distance(
            &eps_ref[ei],
            homog_ref,
            initial_ref,
            &stream,
            steps,
            sc.record_stride,
        )
    });
    let flat: Vec<f64> = results.into_iter().collect::<Result<_>>()?;
    let errors: Vec<Vec<f64>> =
        flat.chunks(sc.paths).map(|c| c.to_vec()).collect();

    let mean_sq: Vec<f64> = errors
        .iter()
        .map(|es| es.iter().map(|e| e * e).sum::<f64>() / es.len() as f64)
        .collect();

    let deltas = if sc.deltas.is_empty() {
        let mut sorted = errors[0].clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median = sorted[sorted.len() / 2].max(f64::MIN_POSITIVE);
        vec![0.5 * median, 0.25 * median, 0.1 * median]
    } else {
        sc.deltas.clone()
    };
    let tail_prob: Vec<Vec<f64>> = errors
        .iter()
        .map(|es| {
            deltas
                .iter()
                .map(|&d| es.iter().filter(|&&e| e > d).count() as f64 / es.len() as f64)
                .collect()
        })
        .collect();
    let mean_sq_decreasing = mean_sq.windows(2).all(|w| w[1] < w[0]);
    let tail_nonincreasing = (0..deltas.len())
        .map(|k| tail_prob.windows(2).all(|w| w[1][k] <= w[0][k]))
        .collect();
    Ok(ComparisonResult {
        scenario: sc.name.clone(),
        epsilons: sc.epsilons.clone(),
        errors,
        mean_sq,
        deltas,
        tail_prob,
        tensor,
        mean_sq_decreasing,
        tail_nonincreasing,
    })
}

/// Steps both problems in lockstep on shared increments and accumulates the
/// space-time distance `||u_a - u_b||_{L2(Q_T)}` by rectangle quadrature over
/// the recording stride.
pub fn coupled_l2_distance(
    prob_a: &WaveProblem,
    prob_b: &WaveProblem,
    initial: &WaveState,
    stream: &crate::noise::IncrementStream,
    steps: usize,
    stride: usize,
) -> Result<f64> {
    let stride = stride.max(1);
    let grid = prob_a.grid();
    let mut a = initial.clone();
    let mut b = initial.clone();
    let mut acc = 0.0;
    let mut weight_steps = 0usize;
    for k in 0..steps {
        a = prob_a.step(&a, Some((stream, k)))?;
        b = prob_b.step(&b, Some((stream, k)))?;
        if (k + 1) % stride == 0 || k + 1 == steps {
            let d = l2_distance(&grid, &a.u, &b.u);
            let w = ((k + 1) - weight_steps) as f64 * prob_a.dt();
            acc += d * d * w;
            weight_steps = k + 1;
        }
    }
    Ok(acc.sqrt())
}

/// Two-scale reconstruction `u_0 + eps sum_j chi_j(x / eps) d_j u_0` on the
/// wave grid, for every snapshot.
///
/// The correctors are evaluated at `x / eps` by periodic linear
/// interpolation of their cell values (periodic solutions) or by direct
/// interpolation inside the box (truncated solutions).
pub fn corrector_reconstruction(
    snapshots: &[(f64, Vec<f64>)],
    correctors: &[CellSolution],
    epsilon: f64,
    grid: QGrid,
) -> Result<Vec<(f64, Vec<f64>)>> {
    if snapshots.is_empty() {
        return Err(Error::argument("no snapshots supplied for reconstruction"));
    }
    if correctors.len() != grid.dim {
        return Err(Error::argument(format!(
            "need {} correctors for a {}-dimensional reconstruction",
            grid.dim, grid.dim
        )));
    }
    for c in correctors {
        if c.direction_index().is_none() {
            return Err(Error::argument("correctors must be basis-direction solves"));
        }
    }
    let h = grid.h();
    let m = grid.nodes_per_axis();
    let mut out = Vec::with_capacity(snapshots.len());
    for (t, u0) in snapshots {
        if u0.len() != grid.node_count() {
            return Err(Error::argument("snapshot size does not match the grid"));
        }
        let mut rec = u0.clone();
        for idx in 0..grid.node_count() {
            if grid.is_boundary(idx) {
                continue;
            }
            let p = grid.node_coord(idx);
            // centered differences; boundary values are zero so the stencil
            // closes at distance one from the wall
            for (j, chi) in correctors.iter().enumerate() {
                let grad = match j {
                    0 => (u0[idx + 1] - u0[idx - 1]) / (2.0 * h),
                    _ => (u0[idx + m] - u0[idx - m]) / (2.0 * h),
                };
                let y: Vec<f64> = p[..grid.dim].iter().map(|c| c / epsilon).collect();
                rec[idx] += epsilon * eval_corrector(chi, &y) * grad;
            }
        }
        out.push((*t, rec));
    }
    Ok(out)
}

/// Linear interpolation of cell-centered corrector values at a point,
/// periodic wrap for unit-cell solutions.
fn eval_corrector(chi: &CellSolution, y: &[f64]) -> f64 {
    let g = &chi.grid;
    let n = g.n();
    let h = g.spacing();
    let periodic = g.bc() == BoundaryKind::Periodic;
    let locate = |c: f64| -> (usize, usize, f64) {
        // fractional cell-center coordinate
        let mut s = (c - g.lo()) / h - 0.5;
        if periodic {
            s = s.rem_euclid(n as f64);
            let i0 = s.floor() as usize % n;
            let i1 = (i0 + 1) % n;
            (i0, i1, s - s.floor())
        } else {
            let s = s.clamp(0.0, (n - 1) as f64);
            let i0 = (s.floor() as usize).min(n - 2);
            (i0, i0 + 1, s - i0 as f64)
        }
    };
    match g.dim() {
        1 => {
            let (i0, i1, w) = locate(y[0]);
            chi.values[i0] * (1.0 - w) + chi.values[i1] * w
        }
        _ => {
            let (i0, i1, wx) = locate(y[0]);
            let (j0, j1, wy) = locate(y[1]);
            let v00 = chi.values[g.index(i0, j0)];
            let v10 = chi.values[g.index(i1, j0)];
            let v01 = chi.values[g.index(i0, j1)];
            let v11 = chi.values[g.index(i1, j1)];
            v00 * (1.0 - wx) * (1.0 - wy)
                + v10 * wx * (1.0 - wy)
                + v01 * (1.0 - wx) * wy
                + v11 * wx * wy
        }
    }
}

/// Preset experiment families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Constant coefficients; the oscillatory and homogenized runs coincide.
    Constant,
    /// Periodic coefficients of unit period.
    Problem1,
    /// Almost periodic coefficients (incommensurate frequencies).
    Problem2,
    /// Periodic space, temporal factor with a limit at infinity.
    Problem3,
    /// Almost periodic space, temporal factor with a limit at infinity.
    Problem4,
    /// Asymptotically almost periodic space: periodic core plus decay.
    Problem5,
}

impl Preset {
    pub fn parse(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "constant" => Ok(Preset::Constant),
            "problem1" => Ok(Preset::Problem1),
            "problem2" => Ok(Preset::Problem2),
            "problem3" => Ok(Preset::Problem3),
            "problem4" => Ok(Preset::Problem4),
            "problem5" => Ok(Preset::Problem5),
            other => Err(Error::config(format!("unknown preset '{other}'"))),
        }
    }

    pub fn all() -> [Preset; 6] {
        [
            Preset::Constant,
            Preset::Problem1,
            Preset::Problem2,
            Preset::Problem3,
            Preset::Problem4,
            Preset::Problem5,
        ]
    }

    pub fn name(&self) -> &'static str {
        match self {
            Preset::Constant => "constant",
            Preset::Problem1 => "problem1",
            Preset::Problem2 => "problem2",
            Preset::Problem3 => "problem3",
            Preset::Problem4 => "problem4",
            Preset::Problem5 => "problem5",
        }
    }

    pub fn describe(&self) -> &'static str {
        match self {
            Preset::Constant => "constant coefficients, zero homogenization error",
            Preset::Problem1 => "periodic coefficients, exact unit-cell tensor",
            Preset::Problem2 => "almost periodic coefficients, truncated tensor",
            Preset::Problem3 => "periodic space, temporal limit at infinity",
            Preset::Problem4 => "almost periodic space, temporal limit at infinity",
            Preset::Problem5 => "asymptotically almost periodic space",
        }
    }
}

/// Builds the fully-populated scenario of a preset; field invariants are
/// checked on construction.
pub fn preset_scenario(preset: Preset) -> Result<Scenario> {
    let dim = 1usize;
    let periodic_a = || ScalarField::sum_1d(2.0, &[(1.0, 1.0)]);
    let ap_a = || ScalarField::sum_1d(2.5, &[(1.0, 1.0), (1.0, SQRT_2)]);
    let per_time = |base: f64| ScalarField::sum_1d(base, &[(1.0, 1.0)]);
    let ap_time = || ScalarField::sum_1d(1.5, &[(0.5, 1.0), (0.5, 3.0_f64.sqrt())]);
    // temporal factor with a limit at infinity
    let binf_time = || ScalarField::sum_1d(1.5, &[]).with_decay(DecayKind::Gaussian, 2.5, 1.0);
    // spatial factor 2 + sin(2 pi y) for the noise modes. Persistent time
    // oscillation in the noise coefficient would multiply independent
    // Brownian increments and leave an epsilon-independent variance floor in
    // the coupled comparison; spatial oscillation is smoothed away by the
    // propagator, so the noise modes oscillate in space (or decay in time)
    // only.
    let sin_space = || {
        ScalarField::new(
            1,
            2.0,
            vec![crate::field::CosTerm {
                amplitude: 1.0,
                freq: vec![1.0],
                phase: -0.5 * std::f64::consts::PI,
            }],
            None,
        )
        .unwrap()
    };

    let (matrix, drift, diffusion, alpha_name): (
        OscillatingMatrixField,
        DriftField,
        DiffusionField,
        &str,
    ) = match preset {
        Preset::Constant => {
            let a = OscillatingMatrixField::constant(1, SymMat::new_1d(1.0))?;
            let f = DriftField::new(
                ScalarField::constant(1, 0.5),
                ScalarField::constant(1, 1.0),
                LambdaShape::Linear,
            )?;
            let g = DiffusionField::with_power_weights(
                1,
                ScalarField::constant(1, 0.4),
                ScalarField::constant(1, 1.0),
                LambdaShape::Linear,
            )?;
            (a, f, g, "constant")
        }
        Preset::Problem1 => {
            let a = OscillatingMatrixField::scalar_1d(periodic_a(), 1.0)?;
            // f = (2 + cos 2 pi y)(1 + cos 2 pi tau) lambda
            let f = DriftField::new(periodic_a(), per_time(1.0), LambdaShape::Linear)?;
            // g_1 = sigma_1 (2 + sin 2 pi y) lambda
            let g = DiffusionField::with_power_weights(
                1,
                sin_space(),
                ScalarField::constant(1, 1.0),
                LambdaShape::Linear,
            )?;
            (a, f, g, "problem1")
        }
        Preset::Problem2 => {
            let a = OscillatingMatrixField::scalar_1d(ap_a(), 0.5)?;
            let f = DriftField::new(ap_a(), ap_time(), LambdaShape::Linear)?;
            let g = DiffusionField::with_power_weights(
                1,
                ap_a(),
                ScalarField::constant(1, 1.0),
                LambdaShape::Linear,
            )?;
            (a, f, g, "problem2")
        }
        Preset::Problem3 => {
            let a = OscillatingMatrixField::scalar_1d(periodic_a(), 1.0)?;
            let f = DriftField::new(periodic_a(), binf_time(), LambdaShape::Linear)?;
            let g = DiffusionField::with_power_weights(
                1,
                ScalarField::constant(1, 1.0),
                binf_time(),
                LambdaShape::Linear,
            )?;
            (a, f, g, "problem3")
        }
        Preset::Problem4 => {
            let a = OscillatingMatrixField::scalar_1d(ap_a(), 0.5)?;
            let f = DriftField::new(ap_a(), binf_time(), LambdaShape::Linear)?;
            let g = DiffusionField::with_power_weights(
                1,
                ScalarField::constant(1, 1.0),
                binf_time(),
                LambdaShape::Linear,
            )?;
            (a, f, g, "problem4")
        }
        Preset::Problem5 => {
            // periodic core plus a vanishing-at-infinity perturbation
            let a_field = periodic_a().with_decay(DecayKind::Exponential, 0.5, 2.0);
            let a = OscillatingMatrixField::scalar_1d(a_field, 1.0)?;
            let f = DriftField::new(
                periodic_a().with_decay(DecayKind::Exponential, 0.5, 2.0),
                ap_time(),
                LambdaShape::Linear,
            )?;
            let g = DiffusionField::with_power_weights(
                1,
                sin_space().with_decay(DecayKind::Exponential, 0.5, 2.0),
                ScalarField::constant(1, 1.0),
                LambdaShape::Linear,
            )?;
            (a, f, g, "problem5")
        }
    };

    let sc = Scenario {
        name: alpha_name.to_string(),
        dim,
        matrix,
        drift,
        diffusion,
        initial: InitialData::SineMode { amplitude: 1.0 },
        t_final: 0.5,
        grid_n: 512,
        dt: 1.0 / 1024.0,
        record_stride: 8,
        epsilons: vec![1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0],
        paths: 64,
        deltas: Vec::new(),
        seed: 0x5EED_2017,
        tol: 1e-10,
        cell_n: 1024,
        r_schedule: vec![8.0, 16.0, 32.0],
        points_per_unit: 64,
        window: Window::Interior,
    };
    sc.validate()?;
    Ok(sc)
}
