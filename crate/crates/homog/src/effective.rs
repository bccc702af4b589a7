//! Effective tensors and averaged nonlinearities.
//!
//! Column `j` of the effective tensor is the window average of the total
//! flux `A (e_j + grad chi_j)` over the solve domain: the truncated box for
//! Dirichlet correctors, the unit cell for periodic ones. Convergence
//! studies rerun the truncated assembly over a radius schedule and track
//! errors against an analytic oracle, the exact periodic tensor, or the
//! largest-radius value with a Cauchy diagnostic.

use crate::assembly::Window;
use crate::cell::{self, CellSolution};
use crate::error::{Error, Result};
use crate::exec;
use crate::field::{DiffusionField, DriftField, LambdaShape, OscillatingMatrixField};
use crate::mean;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Provenance {
    ExactPeriodic,
    Truncated { half_width: f64 },
}

/// Symmetric positive-definite effective matrix with solve metadata.
#[derive(Debug, Clone)]
pub struct EffectiveTensor {
    pub dim: usize,
    /// `entries[i][j]`; only the top-left `dim x dim` block is meaningful.
    pub entries: [[f64; 2]; 2],
    pub provenance: Provenance,
    pub grid_n: usize,
    /// Largest relative residual among the underlying solves.
    pub residual: f64,
    pub window: Window,
}

impl EffectiveTensor {
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.entries[i][j]
    }

    /// `max_ij |A_ij - A_ji|`.
    pub fn symmetry_defect(&self) -> f64 {
        if self.dim == 1 {
            0.0
        } else {
            (self.entries[0][1] - self.entries[1][0]).abs()
        }
    }

    /// Smallest Rayleigh quotient over `probes` unit directions.
    pub fn min_rayleigh(&self, probes: usize) -> f64 {
        if self.dim == 1 {
            return self.entries[0][0];
        }
        let mut min_q = f64::INFINITY;
        for k in 0..probes {
            let th = std::f64::consts::PI * k as f64 / probes as f64;
            let v = [th.cos(), th.sin()];
            let q = self.entries[0][0] * v[0] * v[0]
                + (self.entries[0][1] + self.entries[1][0]) * v[0] * v[1]
                + self.entries[1][1] * v[1] * v[1];
            min_q = min_q.min(q);
        }
        min_q
    }

    pub fn max_abs_diff(&self, other: &[[f64; 2]; 2]) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                m = m.max((self.entries[i][j] - other[i][j]).abs());
            }
        }
        m
    }
}

fn assemble_columns(
    a: &OscillatingMatrixField,
    x_sample: &[f64],
    solutions: &[CellSolution],
    window: Window,
) -> Result<[[f64; 2]; 2]> {
    let mut entries = [[0.0; 2]; 2];
    for sol in solutions {
        let j = sol
            .direction_index()
            .ok_or_else(|| Error::argument("tensor columns need basis-direction solves"))?;
        let col = cell::flux_average(sol, a, x_sample, window)?;
        entries[0][j] = col[0];
        entries[1][j] = col[1];
    }
    Ok(entries)
}

/// Effective tensor from truncated correctors on `[-R,R]^N`.
pub fn assemble_effective_truncated(
    a: &OscillatingMatrixField,
    x_sample: &[f64],
    half_width: f64,
    n: usize,
    tol: f64,
    window: Window,
) -> Result<EffectiveTensor> {
    let sols: Vec<CellSolution> = (0..a.dim())
        .map(|j| cell::solve_truncated_cell(a, x_sample, j, half_width, n, tol))
        .collect::<Result<_>>()?;
    let entries = assemble_columns(a, x_sample, &sols, window)?;
    let residual = sols.iter().map(|s| s.residual).fold(0.0, f64::max);
    Ok(EffectiveTensor {
        dim: a.dim(),
        entries,
        provenance: Provenance::Truncated { half_width },
        grid_n: n,
        residual,
        window,
    })
}

/// Exact-periodic effective tensor from unit-cell correctors.
pub fn assemble_effective_periodic(
    a: &OscillatingMatrixField,
    x_sample: &[f64],
    n: usize,
    tol: f64,
) -> Result<EffectiveTensor> {
    let sols: Vec<CellSolution> = (0..a.dim())
        .map(|j| cell::solve_periodic_cell(a, x_sample, j, n, tol))
        .collect::<Result<_>>()?;
    let entries = assemble_columns(a, x_sample, &sols, Window::Full)?;
    let residual = sols.iter().map(|s| s.residual).fold(0.0, f64::max);
    Ok(EffectiveTensor {
        dim: a.dim(),
        entries,
        provenance: Provenance::ExactPeriodic,
        grid_n: n,
        residual,
        window: Window::Full,
    })
}

/// Reference a convergence study measures its errors against.
#[derive(Debug, Clone)]
pub enum Reference {
    /// Known analytic tensor.
    Oracle([[f64; 2]; 2]),
    /// Exact periodic tensor computed at the study resolution.
    ExactPeriodic,
    /// The largest-radius tensor of the study itself.
    LargestR,
}

#[derive(Debug, Clone)]
pub struct ConvergenceRecord {
    pub radii: Vec<f64>,
    pub tensors: Vec<EffectiveTensor>,
    /// `max |A_R - A_ref|` per radius.
    pub errors: Vec<f64>,
    /// `max |A_{R_{i+1}} - A_{R_i}|` between consecutive radii.
    pub cauchy: Vec<f64>,
    pub reference: [[f64; 2]; 2],
    /// True when the error sequence decreases strictly.
    pub errors_decreasing: bool,
    /// True when the Cauchy differences decrease strictly.
    pub cauchy_decreasing: bool,
}

/// Truncated-tensor convergence study over a radius schedule.
///
/// `points_per_unit` fixes the spacing, so larger boxes get proportionally
/// more cells. Fan-out across radii is data-parallel.
pub fn convergence_study(
    a: &OscillatingMatrixField,
    x_sample: &[f64],
    radii: &[f64],
    points_per_unit: usize,
    tol: f64,
    window: Window,
    reference: Reference,
) -> Result<ConvergenceRecord> {
    if radii.len() < 3 {
        return Err(Error::argument("convergence study needs at least 3 radii"));
    }
    if radii[0] <= 0.0 || radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::argument("radius schedule must be positive and strictly increasing"));
    }
    if points_per_unit == 0 {
        return Err(Error::argument("points_per_unit must be positive"));
    }
    let jobs: Vec<f64> = radii.to_vec();
    let x_owned = x_sample.to_vec();
    let tensors: Vec<Result<EffectiveTensor>> = exec::parallel_map(jobs, |r| {
        let n = (2.0 * r * points_per_unit as f64).round() as usize;
        assemble_effective_truncated(a, &x_owned, r, n, tol, window)
    });
    let tensors: Vec<EffectiveTensor> = tensors.into_iter().collect::<Result<_>>()?;

    let reference_entries = match reference {
        Reference::Oracle(m) => m,
        Reference::ExactPeriodic => {
            assemble_effective_periodic(a, x_sample, points_per_unit.max(8), tol)?.entries
        }
        Reference::LargestR => tensors.last().unwrap().entries,
    };
    let errors: Vec<f64> = tensors.iter().map(|t| t.max_abs_diff(&reference_entries)).collect();
    let cauchy: Vec<f64> = tensors
        .windows(2)
        .map(|w| {
            let mut m: f64 = 0.0;
            for i in 0..w[0].dim {
                for j in 0..w[0].dim {
                    m = m.max((w[1].entries[i][j] - w[0].entries[i][j]).abs());
                }
            }
            m
        })
        .collect();
    // ignore the trailing zero error when the reference is the study's own last tensor
    let effective_errors: &[f64] = match reference {
        Reference::LargestR => &errors[..errors.len() - 1],
        _ => &errors,
    };
    let errors_decreasing = effective_errors.windows(2).all(|w| w[1] < w[0]);
    let cauchy_decreasing = cauchy.windows(2).all(|w| w[1] < w[0]);
    Ok(ConvergenceRecord {
        radii: radii.to_vec(),
        tensors,
        errors,
        cauchy,
        reference: reference_entries,
        errors_decreasing,
        cauchy_decreasing,
    })
}

/// Effective scalar nonlinearity `lambda -> value`.
#[derive(Debug, Clone)]
pub enum EffectiveRule {
    /// Mean of the space-time profile times the pointwise shape; exact for
    /// the separable families.
    Scaled { factor: f64, shape: LambdaShape },
    /// Piecewise-linear table from box averages at probe values.
    Table { probes: Vec<f64>, values: Vec<f64> },
}

impl EffectiveRule {
    pub fn eval(&self, lambda: f64) -> f64 {
        match self {
            EffectiveRule::Scaled { factor, shape } => factor * shape.eval(lambda),
            EffectiveRule::Table { probes, values } => {
                let n = probes.len();
                if lambda <= probes[0] {
                    let t = (lambda - probes[0]) / (probes[1] - probes[0]);
                    return values[0] + t * (values[1] - values[0]);
                }
                if lambda >= probes[n - 1] {
                    let t = (lambda - probes[n - 2]) / (probes[n - 1] - probes[n - 2]);
                    return values[n - 2] + t * (values[n - 1] - values[n - 2]);
                }
                let k = probes.partition_point(|&p| p <= lambda).min(n - 1);
                let (p0, p1) = (probes[k - 1], probes[k]);
                let t = (lambda - p0) / (p1 - p0);
                values[k - 1] + t * (values[k] - values[k - 1])
            }
        }
    }
}

/// Averaged drift and noise modes for the homogenized equation.
#[derive(Debug, Clone)]
pub struct EffectiveNonlinearity {
    pub drift: EffectiveRule,
    pub modes: Vec<EffectiveRule>,
    /// Lipschitz constant inherited from the unaveraged drift.
    pub drift_lipschitz: f64,
    /// Hilbert-Schmidt style Lipschitz constant over the averaged modes.
    pub diffusion_lipschitz: f64,
}

impl EffectiveNonlinearity {
    pub fn drift(&self, lambda: f64) -> f64 {
        self.drift.eval(lambda)
    }

    pub fn mode(&self, k: usize, lambda: f64) -> f64 {
        self.modes[k].eval(lambda)
    }
}

/// Exact mean-value route for the separable families: the averaged rule is
/// the profile mean times the shape.
pub fn effective_nonlinearity_exact(f: &DriftField, g: &DiffusionField) -> EffectiveNonlinearity {
    EffectiveNonlinearity {
        drift: EffectiveRule::Scaled { factor: f.mean_profile(), shape: f.shape() },
        modes: g
            .modes()
            .iter()
            .map(|m| EffectiveRule::Scaled { factor: m.mean_profile(), shape: m.shape })
            .collect(),
        drift_lipschitz: f.lipschitz_constant(),
        diffusion_lipschitz: g.lipschitz_constant(),
    }
}

pub const DEFAULT_LAMBDA_PROBES: [f64; 7] = [-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0];

/// Finite-box averages of the nonlinearities over `[-R,R]^{N+1}` in `(y, tau)`,
/// tabulated on the probe set.
pub fn average_nonlinearities(
    f: &DriftField,
    g: &DiffusionField,
    half_width: f64,
    points_per_unit: f64,
    extra_probes: &[f64],
) -> Result<EffectiveNonlinearity> {
    let mut probes: Vec<f64> = DEFAULT_LAMBDA_PROBES.to_vec();
    probes.extend_from_slice(extra_probes);
    probes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    probes.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    if probes.iter().any(|p| !p.is_finite()) {
        return Err(Error::argument("lambda probes must be finite"));
    }

    let dim_joint = f.spatial().dim() + 1;
    let drift_values: Vec<f64> = probes
        .iter()
        .map(|&l| {
            mean::box_average(
                dim_joint,
                |p| {
                    let (y, tau) = p.split_at(dim_joint - 1);
                    f.eval(y, tau[0], l)
                },
                half_width,
                points_per_unit,
            )
        })
        .collect::<Result<_>>()?;
    let mut modes = Vec::with_capacity(g.mode_count());
    for m in g.modes() {
        let values: Vec<f64> = probes
            .iter()
            .map(|&l| {
                mean::box_average(
                    dim_joint,
                    |p| {
                        let (y, tau) = p.split_at(dim_joint - 1);
                        m.eval(y, tau[0], l)
                    },
                    half_width,
                    points_per_unit,
                )
            })
            .collect::<Result<_>>()?;
        modes.push(EffectiveRule::Table { probes: probes.clone(), values });
    }
    Ok(EffectiveNonlinearity {
        drift: EffectiveRule::Table { probes, values: drift_values },
        modes,
        drift_lipschitz: f.lipschitz_constant(),
        diffusion_lipschitz: g.lipschitz_constant(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{CosTerm, ScalarField, SymMat};

    const SQRT3: f64 = 1.732_050_807_568_877_2;

    /// Independent oracle: harmonic and arithmetic means of a scalar profile
    /// by direct quadrature over one period.
    fn harmonic_mean_1d(f: impl Fn(f64) -> f64, samples: usize) -> f64 {
        let mut inv = 0.0;
        for i in 0..samples {
            let y = (i as f64 + 0.5) / samples as f64;
            inv += 1.0 / f(y);
        }
        samples as f64 / inv
    }

    fn arithmetic_mean_1d(f: impl Fn(f64) -> f64, samples: usize) -> f64 {
        (0..samples).map(|i| f((i as f64 + 0.5) / samples as f64)).sum::<f64>() / samples as f64
    }

    #[test]
    fn constant_diagonal_tensor_is_exact() {
        let a = OscillatingMatrixField::constant(2, SymMat::new_2d(2.0, 3.0, 0.0)).unwrap();
        for r in [1.0, 2.0, 4.0] {
            let t =
                assemble_effective_truncated(&a, &[0.0, 0.0], r, 16, 1e-10, Window::Full).unwrap();
            assert!((t.entry(0, 0) - 2.0).abs() < 1e-12);
            assert!((t.entry(1, 1) - 3.0).abs() < 1e-12);
            assert!(t.entry(0, 1).abs() < 1e-12);
        }
    }

    #[test]
    fn periodic_1d_tensor_is_harmonic_mean() {
        let profile = |y: f64| 2.0 + (2.0 * std::f64::consts::PI * y).cos();
        let a =
            OscillatingMatrixField::scalar_1d(ScalarField::sum_1d(2.0, &[(1.0, 1.0)]), 1.0).unwrap();
        let t = assemble_effective_periodic(&a, &[0.0], 1024, 1e-10).unwrap();
        let oracle = harmonic_mean_1d(profile, 1 << 16);
        assert!((oracle - SQRT3).abs() < 1e-10, "quadrature oracle {oracle}");
        assert!((t.entry(0, 0) - oracle).abs() < 1e-4, "tensor {}", t.entry(0, 0));
    }

    #[test]
    fn voigt_reuss_sandwich_1d() {
        let profile = |y: f64| 2.0 + (2.0 * std::f64::consts::PI * y).cos();
        let a =
            OscillatingMatrixField::scalar_1d(ScalarField::sum_1d(2.0, &[(1.0, 1.0)]), 1.0).unwrap();
        let t = assemble_effective_periodic(&a, &[0.0], 512, 1e-10).unwrap();
        let harm = harmonic_mean_1d(profile, 1 << 16);
        let arith = arithmetic_mean_1d(profile, 1 << 16);
        assert!(harm - 1e-6 <= t.entry(0, 0) && t.entry(0, 0) <= arith + 1e-6);
        assert!(harm < arith); // strict for a non-constant profile
    }

    #[test]
    fn truncated_1d_converges_to_harmonic_mean() {
        let a =
            OscillatingMatrixField::scalar_1d(ScalarField::sum_1d(2.0, &[(1.0, 1.0)]), 1.0).unwrap();
        let record = convergence_study(
            &a,
            &[0.0],
            &[4.0, 8.0, 16.0, 32.0],
            128,
            1e-11,
            Window::Interior,
            Reference::Oracle([[SQRT3, 0.0], [0.0, 0.0]]),
        )
        .unwrap();
        assert!(record.errors_decreasing, "errors {:?}", record.errors);
        assert!(*record.errors.last().unwrap() < 1e-3);
    }

    #[test]
    fn laminate_tensor_matches_oracle() {
        // harmonic mean along the lamination, arithmetic mean transverse
        let entry = ScalarField::new(
            2,
            2.0,
            vec![CosTerm { amplitude: 1.0, freq: vec![1.0, 0.0], phase: 0.0 }],
            None,
        )
        .unwrap();
        let a = OscillatingMatrixField::diagonal_2d(entry.clone(), entry, 1.0).unwrap();
        let t =
            assemble_effective_truncated(&a, &[0.0, 0.0], 4.0, 128, 1e-10, Window::Interior)
                .unwrap();
        assert!((t.entry(0, 0) - SQRT3).abs() < 2e-2, "a11 {}", t.entry(0, 0));
        assert!((t.entry(1, 1) - 2.0).abs() < 2e-2, "a22 {}", t.entry(1, 1));
        assert!(t.entry(0, 1).abs() < 1e-6 && t.entry(1, 0).abs() < 1e-6);
    }

    #[test]
    fn full_box_tensor_is_symmetric_to_solver_tolerance() {
        let a11 = ScalarField::new(
            2,
            2.0,
            vec![CosTerm { amplitude: 0.6, freq: vec![1.0, 1.0], phase: 0.0 }],
            None,
        )
        .unwrap();
        let a22 = ScalarField::new(
            2,
            3.0,
            vec![CosTerm { amplitude: 0.7, freq: vec![1.0, 2.0], phase: 0.3 }],
            None,
        )
        .unwrap();
        let a12 = ScalarField::new(
            2,
            0.2,
            vec![CosTerm { amplitude: 0.3, freq: vec![2.0, 1.0], phase: 0.9 }],
            None,
        )
        .unwrap();
        let a = OscillatingMatrixField::full_2d(a11, a22, a12, 0.5).unwrap();
        let tol = 1e-11;
        let t = assemble_effective_periodic(&a, &[0.0, 0.0], 32, tol).unwrap();
        assert!(t.symmetry_defect() <= 10.0 * tol * 100.0, "defect {}", t.symmetry_defect());
        assert!(t.min_rayleigh(64) >= a.alpha() * (1.0 - 1e-6));
    }

    #[test]
    fn separable_drift_averages_to_product_of_means() {
        // f(y,tau,l) = (2 + cos 2 pi y)(1 + cos 2 pi tau) l -> 2 l
        let f = DriftField::new(
            ScalarField::sum_1d(2.0, &[(1.0, 1.0)]),
            ScalarField::sum_1d(1.0, &[(1.0, 1.0)]),
            LambdaShape::Linear,
        )
        .unwrap();
        let g = DiffusionField::with_power_weights(
            2,
            ScalarField::constant(1, 1.0),
            ScalarField::new(
                1,
                2.0,
                vec![CosTerm { amplitude: 1.0, freq: vec![1.0], phase: 0.5 * std::f64::consts::PI }],
                None,
            )
            .unwrap(),
            LambdaShape::Linear,
        )
        .unwrap();

        let exact = effective_nonlinearity_exact(&f, &g);
        assert!((exact.drift(1.0) - 2.0).abs() < 1e-14);
        assert!((exact.drift(-0.5) + 1.0).abs() < 1e-14);
        assert_eq!(exact.drift(0.0), 0.0);

        // cross-check by joint quadrature on an aligned box
        let table = average_nonlinearities(&f, &g, 4.0, 64.0, &[]).unwrap();
        for l in [-2.0, -0.3, 0.0, 0.7, 2.0] {
            assert!((table.drift.eval(l) - 2.0 * l).abs() < 1e-8, "drift at {l}");
        }
        // g_1 = sigma_1 (2 - sin 2 pi tau + phase shift) l averages to 2 sigma_1 l
        for l in [-1.0, 0.5] {
            assert!((table.mode(0, l) - 2.0 * l).abs() < 1e-8);
            assert!((table.mode(1, l) - 0.5 * l).abs() < 1e-8);
        }
        assert_eq!(table.drift.eval(0.0), 0.0);
    }

    #[test]
    fn averaged_drift_keeps_lipschitz_constant() {
        let f = DriftField::new(
            ScalarField::sum_1d(2.0, &[(1.0, 1.0)]),
            ScalarField::sum_1d(1.0, &[(1.0, 1.0)]),
            LambdaShape::Tanh,
        )
        .unwrap();
        let g = DiffusionField::zero(1);
        let table = average_nonlinearities(&f, &g, 2.0, 48.0, &[]).unwrap();
        let c1 = f.lipschitz_constant();
        if let EffectiveRule::Table { probes, values } = &table.drift {
            for w in probes.windows(2).zip(values.windows(2)) {
                let slope = (w.1[1] - w.1[0]) / (w.0[1] - w.0[0]);
                assert!(slope.abs() <= c1 * (1.0 + 1e-9), "slope {slope} vs c1 {c1}");
            }
        } else {
            panic!("expected table rule");
        }
    }

    #[test]
    fn quasiperiodic_cauchy_differences_decrease() {
        let a = OscillatingMatrixField::scalar_1d(
            ScalarField::sum_1d(2.5, &[(1.0, 1.0), (1.0, std::f64::consts::SQRT_2)]),
            0.5,
        )
        .unwrap();
        let record = convergence_study(
            &a,
            &[0.0],
            &[4.0, 8.0, 16.0, 32.0],
            64,
            1e-11,
            Window::Interior,
            Reference::LargestR,
        )
        .unwrap();
        assert!(record.cauchy_decreasing, "cauchy {:?}", record.cauchy);
    }
}
