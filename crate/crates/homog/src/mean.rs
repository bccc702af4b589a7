//! Volume averages over growing boxes and Besicovitch seminorms.
//!
//! The mean value of an oscillating coefficient is estimated by midpoint
//! quadrature of the evaluation rule over boxes `[-R,R]^d` for an increasing
//! radius schedule; the successive differences between consecutive radii are
//! recorded as a convergence diagnostic. For periodic fields probed on
//! period-commensurate boxes the estimate matches the single-cell average up
//! to quadrature error.

use crate::error::{Error, Result};

/// Estimate of a mean value together with its radius-schedule diagnostics.
#[derive(Debug, Clone)]
pub struct MeanValueEstimate {
    /// Estimate over the largest box of the schedule.
    pub value: f64,
    pub radii: Vec<f64>,
    /// Estimate per radius, aligned with `radii`.
    pub estimates: Vec<f64>,
    /// `|estimates[i+1] - estimates[i]|`.
    pub successive_diffs: Vec<f64>,
}

impl MeanValueEstimate {
    fn from_series(radii: &[f64], estimates: Vec<f64>) -> Self {
        let successive_diffs =
            estimates.windows(2).map(|w| (w[1] - w[0]).abs()).collect::<Vec<_>>();
        MeanValueEstimate {
            value: *estimates.last().unwrap(),
            radii: radii.to_vec(),
            estimates,
            successive_diffs,
        }
    }
}

fn check_schedule(radii: &[f64]) -> Result<()> {
    if radii.len() < 2 {
        return Err(Error::argument("radius schedule needs at least 2 entries"));
    }
    if radii[0] <= 0.0 || radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::argument("radius schedule must be positive and strictly increasing"));
    }
    Ok(())
}

/// Midpoint average of `f` over the box `[-r, r]^dim`.
///
/// `points_per_unit` fixes the quadrature density; the per-axis point count
/// is `ceil(2 r * points_per_unit)`, at least 8.
pub fn box_average<F>(dim: usize, f: F, r: f64, points_per_unit: f64) -> Result<f64>
where
    F: Fn(&[f64]) -> f64,
{
    if dim == 0 || dim > 3 {
        return Err(Error::argument("box average supports dimensions 1..=3"));
    }
    if !(r > 0.0) || !(points_per_unit > 0.0) {
        return Err(Error::argument("box average needs positive radius and resolution"));
    }
    let n = ((2.0 * r * points_per_unit).ceil() as usize).max(8);
    if (n as f64).powi(dim as i32) > 4.0e8 {
        return Err(Error::argument(format!(
            "quadrature of {n}^{dim} points is too large; lower the resolution"
        )));
    }
    let h = 2.0 * r / n as f64;
    let coord = |i: usize| -r + (i as f64 + 0.5) * h;
    let mut sum = 0.0;
    let mut count = 0usize;
    let mut push = |v: f64| -> Result<()> {
        if !v.is_finite() {
            return Err(Error::Evaluation(format!("non-finite value in box average (r = {r})")));
        }
        sum += v;
        count += 1;
        Ok(())
    };
    match dim {
        1 => {
            for i in 0..n {
                push(f(&[coord(i)]))?;
            }
        }
        2 => {
            for j in 0..n {
                for i in 0..n {
                    push(f(&[coord(i), coord(j)]))?;
                }
            }
        }
        _ => {
            for k in 0..n {
                for j in 0..n {
                    for i in 0..n {
                        push(f(&[coord(i), coord(j), coord(k)]))?;
                    }
                }
            }
        }
    }
    Ok(sum / count as f64)
}

/// Mean value estimate of a scalar rule over a radius schedule.
pub fn mean_value<F>(
    dim: usize,
    f: F,
    radii: &[f64],
    points_per_unit: f64,
) -> Result<MeanValueEstimate>
where
    F: Fn(&[f64]) -> f64,
{
    check_schedule(radii)?;
    let estimates = radii
        .iter()
        .map(|&r| box_average(dim, &f, r, points_per_unit))
        .collect::<Result<Vec<_>>>()?;
    Ok(MeanValueEstimate::from_series(radii, estimates))
}

/// Besicovitch seminorm estimate `(mean |u|^p)^(1/p)` for `p` in {1, 2}.
pub fn besicovitch_seminorm<F>(
    dim: usize,
    f: F,
    p: u32,
    radii: &[f64],
    points_per_unit: f64,
) -> Result<MeanValueEstimate>
where
    F: Fn(&[f64]) -> f64,
{
    if p != 1 && p != 2 {
        return Err(Error::argument(format!("seminorm exponent must be 1 or 2, got {p}")));
    }
    check_schedule(radii)?;
    let estimates = radii
        .iter()
        .map(|&r| {
            let m = box_average(dim, |y| f(y).abs().powi(p as i32), r, points_per_unit)?;
            Ok(m.powf(1.0 / p as f64))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MeanValueEstimate::from_series(radii, estimates))
}

/// Quadrature density giving at least 64 points per shortest wavelength.
pub fn default_resolution(min_wavelength: Option<f64>) -> f64 {
    match min_wavelength {
        Some(w) if w.is_finite() && w > 0.0 => (64.0 / w).max(16.0),
        _ => 16.0,
    }
}
