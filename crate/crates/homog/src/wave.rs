//! Semi-implicit time stepper for the semilinear stochastic wave equation
//! on `Q = (0,1)^N` with homogeneous Dirichlet data.
//!
//! One step advances displacement `u` and velocity `v = u'` by a trapezoidal
//! (centered) treatment of the stiffness combined with explicit drift and an
//! Euler-Maruyama noise increment:
//!
//! ```text
//! (I + dt^2/4 S) v+ = (I - dt^2/4 S) v - dt S u + dt f(u) + sum_k g_k(u) dW^k
//! u+ = u + dt (v + v+) / 2
//! ```
//!
//! The centered stiffness keeps the linear part unconditionally stable for
//! any `dt` independent of the oscillation scale, conserves the discrete
//! energy exactly when drift and noise vanish, and is time-reversible. Fast
//! arguments `t / eps` are sampled at the step midpoint.

use crate::effective::EffectiveRule;
use crate::error::{Error, Result};
use crate::field::{LambdaShape, OscillatingMatrixField, ScalarField, SymMat};
use crate::linsolve;
use crate::noise::IncrementStream;

/// Vertex-centered grid on `(0,1)^dim`: nodes `i h` for `i = 0..=n`, `h = 1/n`.
#[derive(Debug, Clone, Copy)]
pub struct QGrid {
    pub dim: usize,
    pub n: usize,
}

impl QGrid {
    pub fn new(dim: usize, n: usize) -> Result<Self> {
        if dim == 0 || dim > 2 {
            return Err(Error::argument("wave grid dimension must be 1 or 2"));
        }
        if n < 4 {
            return Err(Error::argument("wave grid needs at least 4 cells per axis"));
        }
        Ok(QGrid { dim, n })
    }

    pub fn h(&self) -> f64 {
        1.0 / self.n as f64
    }

    pub fn nodes_per_axis(&self) -> usize {
        self.n + 1
    }

    pub fn node_count(&self) -> usize {
        self.nodes_per_axis().pow(self.dim as u32)
    }

    #[inline]
    pub fn index(&self, ix: usize, iy: usize) -> usize {
        ix + iy * self.nodes_per_axis()
    }

    pub fn node_coord(&self, idx: usize) -> [f64; 2] {
        let m = self.nodes_per_axis();
        let h = self.h();
        [(idx % m) as f64 * h, if self.dim == 2 { (idx / m) as f64 * h } else { 0.0 }]
    }

    pub fn is_boundary(&self, idx: usize) -> bool {
        let m = self.nodes_per_axis();
        let ix = idx % m;
        let iy = idx / m;
        ix == 0 || ix == self.n || (self.dim == 2 && (iy == 0 || iy == self.n))
    }
}

/// Displacement/velocity pair on the full nodal grid; boundary nodes stay 0.
#[derive(Debug, Clone)]
pub struct WaveState {
    pub grid: QGrid,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub t: f64,
}

impl WaveState {
    pub fn zero(grid: QGrid) -> Self {
        let m = grid.node_count();
        WaveState { grid, u: vec![0.0; m], v: vec![0.0; m], t: 0.0 }
    }

    /// Initial data from nodal profiles; boundary values are forced to zero.
    pub fn from_profiles<F, G>(grid: QGrid, u0: F, v0: G) -> Self
    where
        F: Fn(&[f64]) -> f64,
        G: Fn(&[f64]) -> f64,
    {
        let m = grid.node_count();
        let mut u = vec![0.0; m];
        let mut v = vec![0.0; m];
        for idx in 0..m {
            if grid.is_boundary(idx) {
                continue;
            }
            let p = grid.node_coord(idx);
            u[idx] = u0(&p[..grid.dim]);
            v[idx] = v0(&p[..grid.dim]);
        }
        WaveState { grid, u, v, t: 0.0 }
    }

    pub fn check_valid(&self) -> Result<()> {
        for idx in 0..self.grid.node_count() {
            if !self.u[idx].is_finite() || !self.v[idx].is_finite() {
                return Err(Error::BlowUp {
                    t: self.t,
                    detail: format!("non-finite state at node {idx}"),
                });
            }
            if self.grid.is_boundary(idx) && (self.u[idx] != 0.0 || self.v[idx] != 0.0) {
                return Err(Error::argument(format!("nonzero boundary value at node {idx}")));
            }
        }
        Ok(())
    }

    /// `H^1_0` seminorm via face differences.
    pub fn h1_seminorm(&self) -> f64 {
        grad_norm_sq(&self.grid, &self.u).sqrt()
    }

    /// `L^2` norm of the velocity.
    pub fn velocity_l2(&self) -> f64 {
        l2_norm(&self.grid, &self.v)
    }
}

pub fn l2_norm(grid: &QGrid, w: &[f64]) -> f64 {
    let vol = grid.h().powi(grid.dim as i32);
    (w.iter().map(|x| x * x).sum::<f64>() * vol).sqrt()
}

pub fn l2_distance(grid: &QGrid, a: &[f64], b: &[f64]) -> f64 {
    let vol = grid.h().powi(grid.dim as i32);
    (a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() * vol).sqrt()
}

fn grad_norm_sq(grid: &QGrid, u: &[f64]) -> f64 {
    let n = grid.n;
    let h = grid.h();
    let w = h.powi(grid.dim as i32);
    let mut acc = 0.0;
    if grid.dim == 1 {
        for i in 0..n {
            let d = (u[i + 1] - u[i]) / h;
            acc += w * d * d;
        }
    } else {
        for iy in 0..=n {
            for ix in 0..n {
                let d = (u[grid.index(ix + 1, iy)] - u[grid.index(ix, iy)]) / h;
                acc += w * d * d;
            }
        }
        for iy in 0..n {
            for ix in 0..=n {
                let d = (u[grid.index(ix, iy + 1)] - u[grid.index(ix, iy)]) / h;
                acc += w * d * d;
            }
        }
    }
    acc
}

/// Stiffness `S u = -div(A grad u)` on the nodal grid, assembled once from
/// face coefficients (harmonic averages of the diagonal entries at adjacent
/// nodes; off-diagonal entries sampled at cell centers).
#[derive(Debug, Clone)]
pub struct StiffnessOperator {
    grid: QGrid,
    /// x-edge coefficients, length `n * (n+1)` in 2D (`n` in 1D).
    ax: Vec<f64>,
    /// y-edge coefficients, length `(n+1) * n`; empty in 1D.
    ay: Vec<f64>,
    /// Off-diagonal entry at cell centers, length `n * n`; empty if zero.
    cross: Vec<f64>,
}

fn harmonic(a: f64, b: f64) -> f64 {
    2.0 * a * b / (a + b)
}

impl StiffnessOperator {
    /// Oscillatory coefficients: the matrix is sampled at `(x, x / eps)`.
    pub fn oscillatory(grid: QGrid, a: &OscillatingMatrixField, epsilon: f64) -> Result<Self> {
        if a.dim() != grid.dim {
            return Err(Error::argument("matrix field and wave grid dimensions differ"));
        }
        if !(epsilon > 0.0) {
            return Err(Error::argument("epsilon must be positive"));
        }
        let sample = |p: [f64; 2]| -> Result<SymMat> {
            let x = &p[..grid.dim];
            let y: Vec<f64> = x.iter().map(|c| c / epsilon).collect();
            a.evaluate(x, &y)
        };
        Self::from_samples(grid, sample)
    }

    /// Constant (e.g. homogenized) coefficient matrix.
    pub fn constant(grid: QGrid, m: SymMat) -> Result<Self> {
        if m.dim != grid.dim {
            return Err(Error::argument("tensor and wave grid dimensions differ"));
        }
        Self::from_samples(grid, |_| Ok(m))
    }

    pub fn identity(grid: QGrid) -> Self {
        Self::from_samples(grid, |_| Ok(SymMat::identity(grid.dim))).unwrap()
    }

    fn from_samples<F>(grid: QGrid, sample: F) -> Result<Self>
    where
        F: Fn([f64; 2]) -> Result<SymMat>,
    {
        let n = grid.n;
        let h = grid.h();
        let m = grid.nodes_per_axis();
        // nodal samples of the diagonal entries
        let mut d11 = vec![0.0; grid.node_count()];
        let mut d22 = vec![0.0; if grid.dim == 2 { grid.node_count() } else { 0 }];
        for idx in 0..grid.node_count() {
            let p = grid.node_coord(idx);
            let mat = sample(p)?;
            d11[idx] = mat.entry(0, 0);
            if grid.dim == 2 {
                d22[idx] = mat.entry(1, 1);
            }
        }
        if d11.iter().chain(d22.iter()).any(|&c| !(c > 0.0) || !c.is_finite()) {
            return Err(Error::argument("stiffness needs positive finite diagonal entries"));
        }
        let mut ax;
        let mut ay = Vec::new();
        let mut cross = Vec::new();
        if grid.dim == 1 {
            ax = vec![0.0; n];
            for i in 0..n {
                ax[i] = harmonic(d11[i], d11[i + 1]);
            }
        } else {
            ax = vec![0.0; n * m];
            for iy in 0..m {
                for ix in 0..n {
                    ax[ix + iy * n] =
                        harmonic(d11[grid.index(ix, iy)], d11[grid.index(ix + 1, iy)]);
                }
            }
            ay = vec![0.0; m * n];
            for iy in 0..n {
                for ix in 0..m {
                    ay[ix + iy * m] =
                        harmonic(d22[grid.index(ix, iy)], d22[grid.index(ix, iy + 1)]);
                }
            }
            let mut has_cross = false;
            let mut cr = vec![0.0; n * n];
            for cy in 0..n {
                for cx in 0..n {
                    let p = [(cx as f64 + 0.5) * h, (cy as f64 + 0.5) * h];
                    let v = sample(p)?.entry(0, 1);
                    cr[cx + cy * n] = v;
                    has_cross |= v != 0.0;
                }
            }
            if has_cross {
                cross = cr;
            }
        }
        Ok(StiffnessOperator { grid, ax, ay, cross })
    }

    pub fn grid(&self) -> QGrid {
        self.grid
    }

    /// `out = S u`; boundary rows are zero.
    pub fn apply(&self, u: &[f64], out: &mut [f64]) {
        let n = self.grid.n;
        let h = self.grid.h();
        let h2 = h * h;
        out.fill(0.0);
        if self.grid.dim == 1 {
            for i in 1..n {
                out[i] = (-self.ax[i] * (u[i + 1] - u[i]) + self.ax[i - 1] * (u[i] - u[i - 1])) / h2;
            }
        } else {
            let m = self.grid.nodes_per_axis();
            for iy in 1..n {
                for ix in 1..n {
                    let idx = self.grid.index(ix, iy);
                    let fxr = self.ax[ix + iy * n] * (u[idx + 1] - u[idx]);
                    let fxl = self.ax[ix - 1 + iy * n] * (u[idx] - u[idx - 1]);
                    let fyu = self.ay[ix + iy * m] * (u[idx + m] - u[idx]);
                    let fyd = self.ay[ix + (iy - 1) * m] * (u[idx] - u[idx - m]);
                    out[idx] = (-fxr + fxl - fyu + fyd) / h2;
                }
            }
            if !self.cross.is_empty() {
                for cy in 0..n {
                    for cx in 0..n {
                        let b2 = self.cross[cx + cy * n] / (2.0 * h2);
                        let sw = self.grid.index(cx, cy);
                        let se = self.grid.index(cx + 1, cy);
                        let nw = self.grid.index(cx, cy + 1);
                        let ne = self.grid.index(cx + 1, cy + 1);
                        if !self.grid.is_boundary(sw) {
                            out[sw] += b2 * (u[sw] - u[ne]);
                        }
                        if !self.grid.is_boundary(ne) {
                            out[ne] += b2 * (u[ne] - u[sw]);
                        }
                        if !self.grid.is_boundary(se) {
                            out[se] += b2 * (u[nw] - u[se]);
                        }
                        if !self.grid.is_boundary(nw) {
                            out[nw] += b2 * (u[se] - u[nw]);
                        }
                    }
                }
            }
        }
    }

    /// Elastic part `(A grad u, grad u)` of the energy, consistent with the
    /// assembled face coefficients.
    pub fn elastic_form(&self, u: &[f64]) -> f64 {
        let n = self.grid.n;
        let h = self.grid.h();
        let w = h.powi(self.grid.dim as i32);
        let mut acc = 0.0;
        if self.grid.dim == 1 {
            for i in 0..n {
                let d = (u[i + 1] - u[i]) / h;
                acc += w * self.ax[i] * d * d;
            }
        } else {
            let m = self.grid.nodes_per_axis();
            for iy in 0..m {
                for ix in 0..n {
                    let d = (u[self.grid.index(ix + 1, iy)] - u[self.grid.index(ix, iy)]) / h;
                    acc += w * self.ax[ix + iy * n] * d * d;
                }
            }
            for iy in 0..n {
                for ix in 0..m {
                    let d = (u[self.grid.index(ix, iy + 1)] - u[self.grid.index(ix, iy)]) / h;
                    acc += w * self.ay[ix + iy * m] * d * d;
                }
            }
            if !self.cross.is_empty() {
                for cy in 0..n {
                    for cx in 0..n {
                        let sw = u[self.grid.index(cx, cy)];
                        let se = u[self.grid.index(cx + 1, cy)];
                        let nw = u[self.grid.index(cx, cy + 1)];
                        let ne = u[self.grid.index(cx + 1, cy + 1)];
                        let gx = ((se + ne) - (sw + nw)) / (2.0 * h);
                        let gy = ((nw + ne) - (sw + se)) / (2.0 * h);
                        acc += 2.0 * w * self.cross[cx + cy * n] * gx * gy;
                    }
                }
            }
        }
        acc
    }

    /// Diagonal of `S` restricted to interior rows (1 elsewhere), for the
    /// Jacobi preconditioner of the implicit solve.
    fn diagonal(&self) -> Vec<f64> {
        let n = self.grid.n;
        let h2 = self.grid.h() * self.grid.h();
        let mut diag = vec![0.0; self.grid.node_count()];
        if self.grid.dim == 1 {
            for i in 1..n {
                diag[i] = (self.ax[i - 1] + self.ax[i]) / h2;
            }
        } else {
            let m = self.grid.nodes_per_axis();
            for iy in 1..n {
                for ix in 1..n {
                    diag[self.grid.index(ix, iy)] = (self.ax[ix - 1 + iy * n]
                        + self.ax[ix + iy * n]
                        + self.ay[ix + (iy - 1) * m]
                        + self.ay[ix + iy * m])
                        / h2;
                }
            }
            if !self.cross.is_empty() {
                for cy in 0..n {
                    for cx in 0..n {
                        let b2 = self.cross[cx + cy * n] / (2.0 * h2);
                        for (node, sign) in [
                            (self.grid.index(cx, cy), 1.0),
                            (self.grid.index(cx + 1, cy), -1.0),
                            (self.grid.index(cx, cy + 1), -1.0),
                            (self.grid.index(cx + 1, cy + 1), 1.0),
                        ] {
                            if !self.grid.is_boundary(node) {
                                diag[node] += sign * b2;
                            }
                        }
                    }
                }
            }
        }
        diag
    }
}

/// Temporal factor of a forcing term.
#[derive(Debug, Clone)]
pub enum TemporalRule {
    /// Fast oscillation `q(t / eps)`.
    Oscillating { profile: ScalarField, epsilon: f64 },
    Constant(f64),
}

impl TemporalRule {
    fn eval(&self, t: f64) -> f64 {
        match self {
            TemporalRule::Oscillating { profile, epsilon } => profile.eval(&[t / epsilon]),
            TemporalRule::Constant(c) => *c,
        }
    }
}

/// Prepared forcing: per-node spatial factor, temporal rule, and pointwise
/// nonlinearity. Value at node `i`: `spatial[i] * temporal(t) * rule(u_i)`.
#[derive(Debug, Clone)]
pub struct SpaceTimeForcing {
    spatial: Vec<f64>,
    temporal: TemporalRule,
    rule: EffectiveRule,
}

impl SpaceTimeForcing {
    /// Oscillatory forcing sampled at `y = x / eps`, with an overall weight
    /// (the mode weight for noise terms, 1 for the drift).
    pub fn oscillatory(
        grid: QGrid,
        spatial: &ScalarField,
        temporal: &ScalarField,
        shape: LambdaShape,
        epsilon: f64,
        weight: f64,
    ) -> Result<Self> {
        if spatial.dim() != grid.dim {
            return Err(Error::argument("forcing profile and grid dimensions differ"));
        }
        let values = (0..grid.node_count())
            .map(|idx| {
                let p = grid.node_coord(idx);
                let y: Vec<f64> = p[..grid.dim].iter().map(|c| c / epsilon).collect();
                weight * spatial.eval(&y)
            })
            .collect();
        Ok(SpaceTimeForcing {
            spatial: values,
            temporal: TemporalRule::Oscillating { profile: temporal.clone(), epsilon },
            rule: EffectiveRule::Scaled { factor: 1.0, shape },
        })
    }

    /// Space-time-homogeneous forcing from an averaged rule.
    pub fn effective(grid: QGrid, rule: EffectiveRule) -> Self {
        SpaceTimeForcing {
            spatial: vec![1.0; grid.node_count()],
            temporal: TemporalRule::Constant(1.0),
            rule,
        }
    }

    #[inline]
    fn accumulate(&self, grid: &QGrid, t: f64, u: &[f64], scale: f64, out: &mut [f64]) {
        let q = self.temporal.eval(t);
        if q == 0.0 {
            return;
        }
        for idx in 0..u.len() {
            if self.spatial[idx] != 0.0 && !grid.is_boundary(idx) {
                out[idx] += scale * self.spatial[idx] * q * self.rule.eval(u[idx]);
            }
        }
    }
}

enum ImplicitSolver {
    /// 1D interior system, solved directly.
    Tridiag { lower: Vec<f64>, diag: Vec<f64>, upper: Vec<f64> },
    /// 2D system `(I + c S)` solved by Jacobi-preconditioned CG.
    Cg { diag: Vec<f64> },
}

/// Time stepper for one combination of stiffness, drift, and noise modes.
pub struct WaveProblem {
    grid: QGrid,
    stiffness: StiffnessOperator,
    drift: Option<SpaceTimeForcing>,
    diffusion: Vec<SpaceTimeForcing>,
    dt: f64,
    c_impl: f64,
    solver: ImplicitSolver,
}

impl WaveProblem {
    pub fn new(
        stiffness: StiffnessOperator,
        drift: Option<SpaceTimeForcing>,
        diffusion: Vec<SpaceTimeForcing>,
        dt: f64,
    ) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(Error::argument("time step must be positive"));
        }
        let grid = stiffness.grid();
        let c = dt * dt / 4.0;
        let solver = if grid.dim == 1 {
            let n = grid.n;
            let h2 = grid.h() * grid.h();
            // interior rows i = 1..n-1 of I + c S
            let mm = n - 1;
            let mut lower = vec![0.0; mm];
            let mut diag = vec![0.0; mm];
            let mut upper = vec![0.0; mm];
            for k in 0..mm {
                let i = k + 1;
                diag[k] = 1.0 + c * (stiffness.ax[i - 1] + stiffness.ax[i]) / h2;
                if k > 0 {
                    lower[k] = -c * stiffness.ax[i - 1] / h2;
                }
                if k + 1 < mm {
                    upper[k] = -c * stiffness.ax[i] / h2;
                }
            }
            ImplicitSolver::Tridiag { lower, diag, upper }
        } else {
            let mut diag = stiffness.diagonal();
            for (idx, d) in diag.iter_mut().enumerate() {
                *d = if grid.is_boundary(idx) { 1.0 } else { 1.0 + c * *d };
            }
            ImplicitSolver::Cg { diag }
        };
        Ok(WaveProblem { grid, stiffness, drift, diffusion, dt, c_impl: c, solver })
    }

    pub fn grid(&self) -> QGrid {
        self.grid
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn stiffness(&self) -> &StiffnessOperator {
        &self.stiffness
    }

    pub fn mode_count(&self) -> usize {
        self.diffusion.len()
    }

    /// Total discrete energy `1/2 |v|^2 + 1/2 (A grad u, grad u)`.
    pub fn discrete_energy(&self, state: &WaveState) -> f64 {
        let vol = self.grid.h().powi(self.grid.dim as i32);
        let kinetic: f64 = state.v.iter().map(|x| x * x).sum::<f64>() * vol;
        0.5 * kinetic + 0.5 * self.stiffness.elastic_form(&state.u)
    }

    fn solve_implicit(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        match &self.solver {
            ImplicitSolver::Tridiag { lower, diag, upper } => {
                let n = self.grid.n;
                let reduced: Vec<f64> = rhs[1..n].to_vec();
                let x = linsolve::thomas(lower, diag, upper, &reduced);
                let mut full = vec![0.0; self.grid.node_count()];
                full[1..n].copy_from_slice(&x);
                Ok(full)
            }
            ImplicitSolver::Cg { diag } => {
                let c = self.c_impl;
                let apply = |u: &[f64], out: &mut [f64]| {
                    self.stiffness.apply(u, out);
                    for idx in 0..u.len() {
                        out[idx] = if self.grid.is_boundary(idx) {
                            0.0
                        } else {
                            u[idx] + c * out[idx]
                        };
                    }
                };
                let out = linsolve::pcg(apply, rhs, diag, 1e-12, 4000, false);
                if !out.converged && out.residual > 1e-9 {
                    return Err(Error::SolverDiverged {
                        residual: out.residual,
                        iterations: out.iterations,
                    });
                }
                Ok(out.x)
            }
        }
    }

    /// One step; `noise` supplies this step's Brownian increments.
    pub fn step(
        &self,
        state: &WaveState,
        noise: Option<(&IncrementStream, usize)>,
    ) -> Result<WaveState> {
        let dt = self.dt;
        let m = self.grid.node_count();
        let t_mid = state.t + 0.5 * dt;

        let mut su = vec![0.0; m];
        self.stiffness.apply(&state.u, &mut su);
        let mut sv = vec![0.0; m];
        self.stiffness.apply(&state.v, &mut sv);

        let mut rhs = vec![0.0; m];
        for idx in 0..m {
            if !self.grid.is_boundary(idx) {
                rhs[idx] = state.v[idx] - self.c_impl * sv[idx] - dt * su[idx];
            }
        }
        if let Some(fr) = &self.drift {
            fr.accumulate(&self.grid, t_mid, &state.u, dt, &mut rhs);
        }
        if let Some((stream, step_idx)) = noise {
            if stream.modes < self.diffusion.len() {
                return Err(Error::argument(format!(
                    "increment stream carries {} modes, problem needs {}",
                    stream.modes,
                    self.diffusion.len()
                )));
            }
            for (k, mode) in self.diffusion.iter().enumerate() {
                let dw = stream.increment(step_idx, k);
                if dw != 0.0 {
                    mode.accumulate(&self.grid, t_mid, &state.u, dw, &mut rhs);
                }
            }
        } else if !self.diffusion.is_empty() {
            return Err(Error::argument("problem has noise modes but no increment stream"));
        }

        let v_new = self.solve_implicit(&rhs)?;
        let mut u_new = vec![0.0; m];
        for idx in 0..m {
            if !self.grid.is_boundary(idx) {
                u_new[idx] = state.u[idx] + 0.5 * dt * (state.v[idx] + v_new[idx]);
            }
        }
        let next = WaveState { grid: state.grid, u: u_new, v: v_new, t: state.t + dt };
        for idx in 0..m {
            if !next.u[idx].is_finite() || !next.v[idx].is_finite() {
                return Err(Error::BlowUp {
                    t: next.t,
                    detail: format!("non-finite value at node {idx} after step"),
                });
            }
        }
        Ok(next)
    }

    /// Full trajectory with moment monitors; deterministic given the stream.
    pub fn run(
        &self,
        initial: &WaveState,
        t_final: f64,
        noise: Option<&IncrementStream>,
        record_stride: usize,
        snapshot_stride: Option<usize>,
    ) -> Result<TrajectoryRecord> {
        if !(t_final > 0.0) {
            return Err(Error::argument("final time must be positive"));
        }
        let steps_f = t_final / self.dt;
        let steps = steps_f.round() as usize;
        if steps == 0 || (steps_f - steps as f64).abs() > 1e-9 * steps_f.max(1.0) {
            return Err(Error::argument(format!(
                "dt {} does not divide the horizon {t_final}",
                self.dt
            )));
        }
        if let Some(stream) = noise {
            if stream.steps < steps {
                return Err(Error::argument("increment stream shorter than the run"));
            }
        }
        initial.check_valid()?;
        let stride = record_stride.max(1);

        let mut rec = TrajectoryRecord::default();
        let mut state = initial.clone();
        rec.observe(self, &state, snapshot_stride.is_some());
        for k in 0..steps {
            state = self.step(&state, noise.map(|s| (s, k)))?;
            let record = (k + 1) % stride == 0 || k + 1 == steps;
            let snap = snapshot_stride
                .is_some_and(|s| (k + 1) % s.max(1) == 0 || k + 1 == steps);
            rec.update_sups(&state);
            if record || snap {
                rec.observe(self, &state, snap);
            }
        }
        rec.final_state = Some(state);
        Ok(rec)
    }
}

/// Norm monitors and optional field snapshots along a trajectory.
#[derive(Debug, Clone, Default)]
pub struct TrajectoryRecord {
    pub times: Vec<f64>,
    pub h1_norms: Vec<f64>,
    pub velocity_l2: Vec<f64>,
    pub energies: Vec<f64>,
    /// Running `sup_s ||u(s)||_{H1}^4`, recorded alongside `times`.
    pub sup_h1_pow4: Vec<f64>,
    /// Running `sup_s ||u'(s)||_{L2}^4`.
    pub sup_v_pow4: Vec<f64>,
    pub snapshots: Vec<(f64, Vec<f64>)>,
    pub final_state: Option<WaveState>,
    cur_sup_h1: f64,
    cur_sup_v: f64,
}

impl TrajectoryRecord {
    fn update_sups(&mut self, state: &WaveState) {
        self.cur_sup_h1 = self.cur_sup_h1.max(state.h1_seminorm());
        self.cur_sup_v = self.cur_sup_v.max(state.velocity_l2());
    }

    fn observe(&mut self, problem: &WaveProblem, state: &WaveState, snapshot: bool) {
        self.update_sups(state);
        self.times.push(state.t);
        self.h1_norms.push(state.h1_seminorm());
        self.velocity_l2.push(state.velocity_l2());
        self.energies.push(problem.discrete_energy(state));
        self.sup_h1_pow4.push(self.cur_sup_h1.powi(4));
        self.sup_v_pow4.push(self.cur_sup_v.powi(4));
        if snapshot {
            self.snapshots.push((state.t, state.u.clone()));
        }
    }
}
