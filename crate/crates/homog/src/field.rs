//! Structured oscillating coefficient families.
//!
//! Every scalar profile is a finite trigonometric sum (constant term plus
//! cosines with explicit frequency vectors) with an optional decaying
//! envelope. This closed form covers constants, unit-periodic fields,
//! quasi-periodic sums with incommensurate frequencies, and asymptotically
//! almost periodic fields (almost periodic part plus a vanishing-at-infinity
//! perturbation). The mean value of the almost periodic part is its constant
//! term; quadrature over growing boxes is kept as an independent cross-check
//! (see [`crate::mean`]).
//!
//! All field objects are immutable after construction and evaluation is
//! pure, so they can be shared freely across threads.

use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Structural class of a coefficient, ordered from most to least rigid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum StructureTag {
    Constant,
    /// Unit period in each coordinate (all frequencies integer).
    Periodic,
    /// Finite trigonometric sum with at least one non-integer frequency.
    QuasiPeriodic,
    /// Almost periodic part plus a decaying perturbation.
    Asymptotic,
}

/// `amplitude * cos(2*pi*(freq . y) + phase)`.
#[derive(Debug, Clone)]
pub struct CosTerm {
    pub amplitude: f64,
    pub freq: Vec<f64>,
    pub phase: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecayKind {
    /// `amplitude * exp(-rate * |y|^2)`
    Gaussian,
    /// `amplitude * exp(-rate * |y|)`
    Exponential,
}

/// Vanishing-at-infinity perturbation with a declared decay envelope.
#[derive(Debug, Clone)]
pub struct DecayTerm {
    pub kind: DecayKind,
    pub amplitude: f64,
    pub rate: f64,
}

impl DecayTerm {
    pub fn eval(&self, y: &[f64]) -> f64 {
        let r2: f64 = y.iter().map(|c| c * c).sum();
        match self.kind {
            DecayKind::Gaussian => self.amplitude * (-self.rate * r2).exp(),
            DecayKind::Exponential => self.amplitude * (-self.rate * r2.sqrt()).exp(),
        }
    }
}

/// Scalar coefficient on `R^dim`: constant + cosine sum + optional decay.
#[derive(Debug, Clone)]
pub struct ScalarField {
    dim: usize,
    constant: f64,
    cosines: Vec<CosTerm>,
    decay: Option<DecayTerm>,
}

impl ScalarField {
    pub fn constant(dim: usize, value: f64) -> Self {
        ScalarField { dim, constant: value, cosines: Vec::new(), decay: None }
    }

    pub fn new(
        dim: usize,
        constant: f64,
        cosines: Vec<CosTerm>,
        decay: Option<DecayTerm>,
    ) -> Result<Self> {
        if dim == 0 || dim > 2 {
            return Err(Error::argument(format!("scalar field dimension must be 1 or 2, got {dim}")));
        }
        for t in &cosines {
            if t.freq.len() != dim {
                return Err(Error::argument(format!(
                    "cosine frequency vector has {} components, field dimension is {dim}",
                    t.freq.len()
                )));
            }
            if !t.amplitude.is_finite() || t.freq.iter().any(|f| !f.is_finite()) {
                return Err(Error::argument("cosine term coefficients must be finite"));
            }
        }
        if let Some(d) = &decay {
            if !(d.rate > 0.0) {
                return Err(Error::argument("decay rate must be positive"));
            }
        }
        Ok(ScalarField { dim, constant, cosines, decay })
    }

    /// Convenience builder for one-dimensional sums `c + sum a_i cos(2 pi f_i y)`.
    pub fn sum_1d(constant: f64, terms: &[(f64, f64)]) -> Self {
        let cosines = terms
            .iter()
            .map(|&(amp, f)| CosTerm { amplitude: amp, freq: vec![f], phase: 0.0 })
            .collect();
        ScalarField { dim: 1, constant, cosines, decay: None }
    }

    pub fn with_decay(mut self, kind: DecayKind, amplitude: f64, rate: f64) -> Self {
        self.decay = Some(DecayTerm { kind, amplitude, rate });
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn eval(&self, y: &[f64]) -> f64 {
        debug_assert_eq!(y.len(), self.dim);
        let mut v = self.constant;
        for t in &self.cosines {
            let mut arg = t.phase;
            for (f, c) in t.freq.iter().zip(y) {
                arg += 2.0 * PI * f * c;
            }
            v += t.amplitude * arg.cos();
        }
        if let Some(d) = &self.decay {
            v += d.eval(y);
        }
        v
    }

    /// Mean value over growing boxes: the constant term. Oscillations and
    /// the decaying part average to zero (integer frequencies exactly,
    /// non-resonant ones in the limit, the decay by its vanishing mass).
    pub fn mean(&self) -> f64 {
        self.constant
    }

    /// Upper bound for `|u|`: triangle inequality over all parts.
    pub fn sup_bound(&self) -> f64 {
        let mut s = self.constant.abs();
        for t in &self.cosines {
            s += t.amplitude.abs();
        }
        if let Some(d) = &self.decay {
            s += d.amplitude.abs();
        }
        s
    }

    /// Lower bound for `u` (may be negative).
    pub fn lower_bound(&self) -> f64 {
        let mut s = self.constant;
        for t in &self.cosines {
            s -= t.amplitude.abs();
        }
        if let Some(d) = &self.decay {
            // envelope values lie between 0 and the amplitude
            s += d.amplitude.min(0.0);
        }
        s
    }

    pub fn structure(&self) -> StructureTag {
        if self.decay.is_some() {
            return StructureTag::Asymptotic;
        }
        let live: Vec<&CosTerm> = self.cosines.iter().filter(|t| t.amplitude != 0.0).collect();
        if live.is_empty() {
            return StructureTag::Constant;
        }
        let integer = |f: f64| (f - f.round()).abs() < 1e-9;
        if live.iter().all(|t| t.freq.iter().all(|&f| integer(f))) {
            StructureTag::Periodic
        } else {
            StructureTag::QuasiPeriodic
        }
    }

    /// Shortest oscillation wavelength, `None` for constants.
    pub fn min_wavelength(&self) -> Option<f64> {
        self.cosines
            .iter()
            .filter(|t| t.amplitude != 0.0)
            .map(|t| 1.0 / t.freq.iter().map(|f| f * f).sum::<f64>().sqrt())
            .fold(None, |acc, w| Some(acc.map_or(w, |a: f64| a.min(w))))
    }
}

/// Small symmetric matrix used for coefficient values (top-left `dim x dim`).
#[derive(Debug, Clone, Copy)]
pub struct SymMat {
    pub dim: usize,
    m: [[f64; 2]; 2],
}

impl SymMat {
    pub fn new_1d(a: f64) -> Self {
        SymMat { dim: 1, m: [[a, 0.0], [0.0, 0.0]] }
    }

    pub fn new_2d(a11: f64, a22: f64, a12: f64) -> Self {
        SymMat { dim: 2, m: [[a11, a12], [a12, a22]] }
    }

    pub fn identity(dim: usize) -> Self {
        SymMat { dim, m: [[1.0, 0.0], [0.0, 1.0]] }
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.m[i][j]
    }

    pub fn mul(&self, v: [f64; 2]) -> [f64; 2] {
        [
            self.m[0][0] * v[0] + self.m[0][1] * v[1],
            self.m[1][0] * v[0] + self.m[1][1] * v[1],
        ]
    }

    pub fn quad(&self, v: [f64; 2]) -> f64 {
        let av = self.mul(v);
        av[0] * v[0] + av[1] * v[1]
    }
}

/// Symmetric oscillating matrix coefficient `A(x, y)`.
///
/// The entries oscillate in the fast variable `y`; an optional strictly
/// positive scalar factor modulates the whole matrix in the slow variable
/// `x`. Symmetry is structural: only the upper triangle is stored.
#[derive(Debug, Clone)]
pub struct OscillatingMatrixField {
    dim: usize,
    a11: ScalarField,
    a22: Option<ScalarField>,
    a12: Option<ScalarField>,
    x_factor: Option<ScalarField>,
    alpha: f64,
}

impl OscillatingMatrixField {
    pub fn scalar_1d(a: ScalarField, alpha: f64) -> Result<Self> {
        if a.dim() != 1 {
            return Err(Error::argument("1d matrix field needs a 1d entry"));
        }
        let field =
            OscillatingMatrixField { dim: 1, a11: a, a22: None, a12: None, x_factor: None, alpha };
        field.check_floor()?;
        Ok(field)
    }

    pub fn diagonal_2d(a11: ScalarField, a22: ScalarField, alpha: f64) -> Result<Self> {
        if a11.dim() != 2 || a22.dim() != 2 {
            return Err(Error::argument("2d matrix field needs 2d entries"));
        }
        let field = OscillatingMatrixField {
            dim: 2,
            a11,
            a22: Some(a22),
            a12: None,
            x_factor: None,
            alpha,
        };
        field.check_floor()?;
        Ok(field)
    }

    pub fn full_2d(a11: ScalarField, a22: ScalarField, a12: ScalarField, alpha: f64) -> Result<Self> {
        if a11.dim() != 2 || a22.dim() != 2 || a12.dim() != 2 {
            return Err(Error::argument("2d matrix field needs 2d entries"));
        }
        let field = OscillatingMatrixField {
            dim: 2,
            a11,
            a22: Some(a22),
            a12: Some(a12),
            x_factor: None,
            alpha,
        };
        field.check_floor()?;
        Ok(field)
    }

    pub fn constant(dim: usize, m: SymMat) -> Result<Self> {
        match dim {
            1 => {
                let alpha = m.entry(0, 0);
                Self::scalar_1d(ScalarField::constant(1, m.entry(0, 0)), alpha)
            }
            2 => {
                // Gershgorin floor, consistent with the structural check
                let alpha = m.entry(0, 0).min(m.entry(1, 1)) - m.entry(0, 1).abs();
                Self::full_2d(
                    ScalarField::constant(2, m.entry(0, 0)),
                    ScalarField::constant(2, m.entry(1, 1)),
                    ScalarField::constant(2, m.entry(0, 1)),
                    alpha,
                )
            }
            _ => Err(Error::argument("matrix field dimension must be 1 or 2")),
        }
    }

    /// Adds a slow scalar modulation `x -> m(x)`; it must stay positive on Q.
    pub fn with_x_modulation(mut self, factor: ScalarField) -> Result<Self> {
        if factor.dim() != self.dim {
            return Err(Error::argument("x-modulation dimension mismatch"));
        }
        if factor.lower_bound() <= 0.0 {
            return Err(Error::argument("x-modulation must be strictly positive"));
        }
        self.alpha *= factor.lower_bound();
        self.x_factor = Some(factor);
        Ok(self)
    }

    fn check_floor(&self) -> Result<()> {
        if !(self.alpha > 0.0) {
            return Err(Error::argument("ellipticity floor alpha must be positive"));
        }
        // Structural lower bound on the smallest eigenvalue via Gershgorin.
        let lo11 = self.a11.lower_bound();
        let structural = match self.dim {
            1 => lo11,
            _ => {
                let lo22 = self.a22.as_ref().unwrap().lower_bound();
                let off = self.a12.as_ref().map_or(0.0, |f| f.sup_bound());
                lo11.min(lo22) - off
            }
        };
        if structural < self.alpha - 1e-12 {
            return Err(Error::argument(format!(
                "declared floor alpha={} exceeds structural bound {}",
                self.alpha, structural
            )));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn is_diagonal(&self) -> bool {
        self.a12.is_none()
    }

    pub fn structure(&self) -> StructureTag {
        let mut tag = self.a11.structure();
        if let Some(f) = &self.a22 {
            tag = tag.max(f.structure());
        }
        if let Some(f) = &self.a12 {
            tag = tag.max(f.structure());
        }
        tag
    }

    /// Shortest oscillation wavelength across all entries.
    pub fn min_wavelength(&self) -> Option<f64> {
        let mut w = self.a11.min_wavelength();
        for f in [self.a22.as_ref(), self.a12.as_ref()].into_iter().flatten() {
            w = match (w, f.min_wavelength()) {
                (Some(a), Some(b)) => Some(a.min(b)),
                (a, b) => a.or(b),
            };
        }
        w
    }

    /// Evaluates `A(x, y)`; output is symmetric by construction.
    pub fn evaluate(&self, x: &[f64], y: &[f64]) -> Result<SymMat> {
        if x.len() != self.dim || y.len() != self.dim {
            return Err(Error::argument(format!(
                "matrix field of dimension {} evaluated with x len {} / y len {}",
                self.dim,
                x.len(),
                y.len()
            )));
        }
        Ok(self.eval_unchecked(x, y))
    }

    #[inline]
    pub(crate) fn eval_unchecked(&self, x: &[f64], y: &[f64]) -> SymMat {
        let s = self.x_factor.as_ref().map_or(1.0, |f| f.eval(x));
        match self.dim {
            1 => SymMat::new_1d(s * self.a11.eval(y)),
            _ => {
                let a11 = s * self.a11.eval(y);
                let a22 = s * self.a22.as_ref().unwrap().eval(y);
                let a12 = s * self.a12.as_ref().map_or(0.0, |f| f.eval(y));
                SymMat::new_2d(a11, a22, a12)
            }
        }
    }

    /// Smallest Rayleigh quotient over a lattice of sample points and a set
    /// of unit directions; ellipticity probe for construction-time checks.
    pub fn ellipticity_probe(&self, x: &[f64], y_extent: f64, samples: usize, dirs: usize) -> f64 {
        let mut min_q = f64::INFINITY;
        let probe = |y: &[f64], min_q: &mut f64| {
            let m = self.eval_unchecked(x, y);
            for k in 0..dirs {
                let th = PI * k as f64 / dirs as f64;
                let v = if self.dim == 1 { [1.0, 0.0] } else { [th.cos(), th.sin()] };
                let q = m.quad(v);
                if q < *min_q {
                    *min_q = q;
                }
            }
        };
        if self.dim == 1 {
            for i in 0..samples {
                let y = -y_extent + 2.0 * y_extent * (i as f64 + 0.5) / samples as f64;
                probe(&[y, 0.0][..1], &mut min_q);
            }
        } else {
            for i in 0..samples {
                for j in 0..samples {
                    let y1 = -y_extent + 2.0 * y_extent * (i as f64 + 0.5) / samples as f64;
                    let y2 = -y_extent + 2.0 * y_extent * (j as f64 + 0.5) / samples as f64;
                    probe(&[y1, y2], &mut min_q);
                }
            }
        }
        min_q
    }
}

/// Pointwise nonlinearity shape with `s(0) = 0` and Lipschitz constant 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LambdaShape {
    Linear,
    Sine,
    Tanh,
}

impl LambdaShape {
    #[inline]
    pub fn eval(&self, lambda: f64) -> f64 {
        match self {
            LambdaShape::Linear => lambda,
            LambdaShape::Sine => lambda.sin(),
            LambdaShape::Tanh => lambda.tanh(),
        }
    }

    pub fn lipschitz(&self) -> f64 {
        1.0
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(LambdaShape::Linear),
            "sine" => Ok(LambdaShape::Sine),
            "tanh" => Ok(LambdaShape::Tanh),
            other => Err(Error::config(format!("unknown nonlinearity shape '{other}'"))),
        }
    }
}

/// Drift nonlinearity `f(y, tau, lambda) = p(y) q(tau) s(lambda)`.
///
/// The separable form gives `f(.,.,0) = 0` structurally and the Lipschitz
/// constant `c1 = sup|p| sup|q|` in the third argument.
#[derive(Debug, Clone)]
pub struct DriftField {
    spatial: ScalarField,
    temporal: ScalarField,
    shape: LambdaShape,
}

impl DriftField {
    pub fn new(spatial: ScalarField, temporal: ScalarField, shape: LambdaShape) -> Result<Self> {
        if temporal.dim() != 1 {
            return Err(Error::argument("drift temporal profile must be one-dimensional"));
        }
        Ok(DriftField { spatial, temporal, shape })
    }

    /// Identically zero drift.
    pub fn zero(dim: usize) -> Self {
        DriftField {
            spatial: ScalarField::constant(dim, 0.0),
            temporal: ScalarField::constant(1, 1.0),
            shape: LambdaShape::Linear,
        }
    }

    #[inline]
    pub fn eval(&self, y: &[f64], tau: f64, lambda: f64) -> f64 {
        self.spatial.eval(y) * self.temporal.eval(&[tau]) * self.shape.eval(lambda)
    }

    /// Lipschitz constant in the third argument.
    pub fn lipschitz_constant(&self) -> f64 {
        self.spatial.sup_bound() * self.temporal.sup_bound() * self.shape.lipschitz()
    }

    /// Growth constant: `|f| <= c2 (1 + |lambda|)` with `c2 = c1`.
    pub fn growth_constant(&self) -> f64 {
        self.lipschitz_constant()
    }

    /// Mean of the space-time profile (product of part means).
    pub fn mean_profile(&self) -> f64 {
        self.spatial.mean() * self.temporal.mean()
    }

    pub fn spatial(&self) -> &ScalarField {
        &self.spatial
    }

    pub fn temporal(&self) -> &ScalarField {
        &self.temporal
    }

    pub fn shape(&self) -> LambdaShape {
        self.shape
    }

    pub fn structure(&self) -> StructureTag {
        self.spatial.structure().max(self.temporal.structure())
    }
}

/// One noise mode `g_k(y, tau, lambda) = sigma_k p_k(y) q_k(tau) s(lambda)`.
#[derive(Debug, Clone)]
pub struct DiffusionMode {
    pub weight: f64,
    pub spatial: ScalarField,
    pub temporal: ScalarField,
    pub shape: LambdaShape,
}

impl DiffusionMode {
    #[inline]
    pub fn eval(&self, y: &[f64], tau: f64, lambda: f64) -> f64 {
        self.weight * self.spatial.eval(y) * self.temporal.eval(&[tau]) * self.shape.eval(lambda)
    }

    pub fn mean_profile(&self) -> f64 {
        self.weight * self.spatial.mean() * self.temporal.mean()
    }
}

/// Truncated multiplicative noise coefficient: finitely many modes with
/// square-summable weights.
#[derive(Debug, Clone)]
pub struct DiffusionField {
    modes: Vec<DiffusionMode>,
    declared_weight_sq: f64,
}

impl DiffusionField {
    /// `m` modes sharing one profile, weights `sigma_k = k^-2`.
    ///
    /// The declared square sum is `pi^4 / 90`, the full series total, so the
    /// partial sums stay below it for every truncation level.
    pub fn with_power_weights(
        m: usize,
        spatial: ScalarField,
        temporal: ScalarField,
        shape: LambdaShape,
    ) -> Result<Self> {
        if temporal.dim() != 1 {
            return Err(Error::argument("diffusion temporal profile must be one-dimensional"));
        }
        if m == 0 {
            return Err(Error::argument("diffusion needs at least one mode"));
        }
        let modes = (1..=m)
            .map(|k| DiffusionMode {
                weight: 1.0 / (k * k) as f64,
                spatial: spatial.clone(),
                temporal: temporal.clone(),
                shape,
            })
            .collect();
        Ok(DiffusionField { modes, declared_weight_sq: PI.powi(4) / 90.0 })
    }

    pub fn from_modes(modes: Vec<DiffusionMode>, declared_weight_sq: f64) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::argument("diffusion needs at least one mode"));
        }
        let sum: f64 = modes.iter().map(|m| m.weight * m.weight).sum();
        if sum > declared_weight_sq * (1.0 + 1e-12) {
            return Err(Error::argument(format!(
                "mode weight square sum {sum} exceeds declared bound {declared_weight_sq}"
            )));
        }
        Ok(DiffusionField { modes, declared_weight_sq })
    }

    /// Identically zero noise (single zero-weight mode).
    pub fn zero(dim: usize) -> Self {
        DiffusionField {
            modes: vec![DiffusionMode {
                weight: 0.0,
                spatial: ScalarField::constant(dim, 0.0),
                temporal: ScalarField::constant(1, 1.0),
                shape: LambdaShape::Linear,
            }],
            declared_weight_sq: 1.0,
        }
    }

    pub fn mode_count(&self) -> usize {
        self.modes.len()
    }

    pub fn modes(&self) -> &[DiffusionMode] {
        &self.modes
    }

    pub fn eval_mode(&self, k: usize, y: &[f64], tau: f64, lambda: f64) -> f64 {
        self.modes[k].eval(y, tau, lambda)
    }

    /// Hilbert-Schmidt style Lipschitz constant over all modes.
    pub fn lipschitz_constant(&self) -> f64 {
        self.modes
            .iter()
            .map(|m| {
                let s = m.weight * m.spatial.sup_bound() * m.temporal.sup_bound();
                s * s
            })
            .sum::<f64>()
            .sqrt()
    }

    /// Partial sums of squared weights; monotone and bounded by the declared total.
    pub fn weight_partial_sums(&self) -> Vec<f64> {
        let mut acc = 0.0;
        self.modes
            .iter()
            .map(|m| {
                acc += m.weight * m.weight;
                acc
            })
            .collect()
    }

    pub fn declared_weight_sq(&self) -> f64 {
        self.declared_weight_sq
    }

    pub fn structure(&self) -> StructureTag {
        self.modes
            .iter()
            .map(|m| m.spatial.structure().max(m.temporal.structure()))
            .max()
            .unwrap_or(StructureTag::Constant)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_matrix_is_identity_everywhere() {
        let a = OscillatingMatrixField::constant(2, SymMat::identity(2)).unwrap();
        let m = a.evaluate(&[0.3, 0.7], &[12.0, -4.5]).unwrap();
        assert_eq!(m.entry(0, 0), 1.0);
        assert_eq!(m.entry(1, 1), 1.0);
        assert_eq!(m.entry(0, 1), 0.0);
        assert_eq!(a.structure(), StructureTag::Constant);
    }

    #[test]
    fn periodic_1d_value_at_origin() {
        // a(y) = 2 + cos(2 pi y), a(0) = 3
        let a = ScalarField::sum_1d(2.0, &[(1.0, 1.0)]);
        assert!((a.eval(&[0.0]) - 3.0).abs() < 1e-15);
        assert_eq!(a.structure(), StructureTag::Periodic);
        assert_eq!(a.min_wavelength(), Some(1.0));
    }

    #[test]
    fn quasiperiodic_value_at_origin() {
        // a(y) = 2.5 + cos(2 pi y) + cos(2 sqrt2 pi y), a(0) = 4.5
        let a = ScalarField::sum_1d(2.5, &[(1.0, 1.0), (1.0, std::f64::consts::SQRT_2)]);
        assert!((a.eval(&[0.0]) - 4.5).abs() < 1e-15);
        assert_eq!(a.structure(), StructureTag::QuasiPeriodic);
    }

    #[test]
    fn asymptotic_tag_and_mean() {
        let a = ScalarField::sum_1d(1.5, &[]).with_decay(DecayKind::Gaussian, 2.5, 1.0);
        assert_eq!(a.structure(), StructureTag::Asymptotic);
        assert_eq!(a.mean(), 1.5);
        assert!((a.eval(&[0.0]) - 4.0).abs() < 1e-15);
    }

    #[test]
    fn matrix_symmetry_is_structural() {
        let a11 = ScalarField::new(
            2,
            2.0,
            vec![CosTerm { amplitude: 0.5, freq: vec![1.0, 2.0], phase: 0.3 }],
            None,
        )
        .unwrap();
        let a22 = ScalarField::constant(2, 3.0);
        let a12 = ScalarField::new(
            2,
            0.0,
            vec![CosTerm { amplitude: 0.25, freq: vec![1.0, 1.0], phase: 0.0 }],
            None,
        )
        .unwrap();
        let a = OscillatingMatrixField::full_2d(a11, a22, a12, 1.0).unwrap();
        let m = a.evaluate(&[0.5, 0.5], &[0.17, 0.93]).unwrap();
        assert_eq!(m.entry(0, 1), m.entry(1, 0));
        assert!(a.ellipticity_probe(&[0.5, 0.5], 3.0, 17, 16) >= a.alpha());
    }

    #[test]
    fn dimension_mismatch_is_an_argument_error() {
        let a = OscillatingMatrixField::constant(2, SymMat::identity(2)).unwrap();
        assert!(matches!(a.evaluate(&[0.1], &[0.2, 0.3]), Err(crate::Error::Argument(_))));
        assert!(matches!(a.evaluate(&[0.1, 0.2], &[0.3]), Err(crate::Error::Argument(_))));
    }

    #[test]
    fn rejects_floor_above_structural_bound() {
        let a = ScalarField::sum_1d(2.0, &[(1.5, 1.0)]); // min = 0.5
        assert!(OscillatingMatrixField::scalar_1d(a, 1.0).is_err());
    }

    #[test]
    fn drift_vanishes_at_zero_and_respects_lipschitz() {
        let f = DriftField::new(
            ScalarField::sum_1d(2.0, &[(1.0, 1.0)]),
            ScalarField::sum_1d(1.0, &[(1.0, 1.0)]),
            LambdaShape::Linear,
        )
        .unwrap();
        assert_eq!(f.eval(&[0.37], 0.21, 0.0), 0.0);
        assert!((f.lipschitz_constant() - 6.0).abs() < 1e-14);
        let (l, m) = (0.7, -0.4);
        let d = (f.eval(&[0.1], 0.2, l) - f.eval(&[0.1], 0.2, m)).abs();
        assert!(d <= f.lipschitz_constant() * (l - m).abs() + 1e-14);
    }

    #[test]
    fn diffusion_partial_sums_bounded() {
        let g = DiffusionField::with_power_weights(
            16,
            ScalarField::constant(1, 1.0),
            ScalarField::sum_1d(2.0, &[]),
            LambdaShape::Linear,
        )
        .unwrap();
        let sums = g.weight_partial_sums();
        for w in sums.windows(2) {
            assert!(w[1] >= w[0]);
        }
        assert!(*sums.last().unwrap() <= g.declared_weight_sq());
        assert_eq!(g.eval_mode(0, &[0.5], 0.0, 0.0), 0.0);
    }
}
