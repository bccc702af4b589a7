//! Divergence-form stencil assembly for the corrector problems.
//!
//! Cell-centered finite differences: 3-point stencil in one dimension,
//! 5-point in two. Face coefficients come from harmonic averaging of the
//! matching diagonal entry at the adjacent cell centers; Dirichlet wall
//! faces sample the coefficient at the wall and see the unknown across half
//! a cell. Off-diagonal entries of full 2D tensors are assembled at interior
//! cell corners with a symmetric cross-gradient stencil, which keeps the
//! operator exactly symmetric for conjugate gradients.
//!
//! The same face/corner data later evaluates fluxes, window averages for
//! effective tensors, and Dirichlet energies, so every derived quantity is
//! consistent with the operator that was solved.

use crate::error::{Error, Result};
use crate::field::OscillatingMatrixField;
use crate::grid::{BoundaryKind, Grid};

/// Averaging window for flux averages.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Window {
    /// The whole box (faithful to the defining average).
    Full,
    /// Inner 50% per axis; discards Dirichlet boundary layers.
    Interior,
}

impl Window {
    fn fraction(self) -> f64 {
        match self {
            Window::Full => 1.0,
            Window::Interior => 0.5,
        }
    }
}

fn harmonic(a: f64, b: f64) -> f64 {
    2.0 * a * b / (a + b)
}

/// Sparse symmetric positive-definite operator in stencil form.
#[derive(Debug, Clone)]
pub struct EllipticOperatorAssembly {
    grid: Grid,
    /// Coefficients on x-normal faces (from `a11`).
    ax: Vec<f64>,
    /// Coefficients on y-normal faces (from `a22`), empty in 1D.
    ay: Vec<f64>,
    /// Off-diagonal entry sampled at cell corners, empty for diagonal tensors.
    cross: Vec<f64>,
    /// Row diagonal, used as Jacobi preconditioner.
    diag: Vec<f64>,
}

impl EllipticOperatorAssembly {
    pub fn build(a: &OscillatingMatrixField, x_sample: &[f64], grid: Grid) -> Result<Self> {
        if a.dim() != grid.dim() {
            return Err(Error::argument("matrix field and grid dimensions differ"));
        }
        let n = grid.n();
        let h = grid.spacing();
        let dim = grid.dim();
        let entry_at = |p: usize, q: usize, y: [f64; 2]| -> Result<f64> {
            let v = a.evaluate(x_sample, &y[..dim])?.entry(p, q);
            if !v.is_finite() {
                return Err(Error::Evaluation(format!("non-finite coefficient at y = {y:?}")));
            }
            Ok(v)
        };
        // cell-center samples of the diagonal entries
        let mut c11 = vec![0.0; grid.cell_count()];
        let mut c22 = vec![0.0; if dim == 2 { grid.cell_count() } else { 0 }];
        for idx in 0..grid.cell_count() {
            let y = grid.cell_center(idx);
            c11[idx] = entry_at(0, 0, y)?;
            if dim == 2 {
                c22[idx] = entry_at(1, 1, y)?;
            }
        }
        if c11.iter().chain(c22.iter()).any(|&v| v <= 0.0) {
            return Err(Error::argument("diagonal coefficient entries must stay positive"));
        }

        let dirichlet = grid.bc() == BoundaryKind::Dirichlet;
        let mut ax;
        let mut ay = Vec::new();
        let mut cross = Vec::new();
        match dim {
            1 => {
                if dirichlet {
                    ax = vec![0.0; n + 1];
                    ax[0] = entry_at(0, 0, [grid.lo(), 0.0])?;
                    ax[n] = entry_at(0, 0, [grid.hi(), 0.0])?;
                    for f in 1..n {
                        ax[f] = harmonic(c11[f - 1], c11[f]);
                    }
                } else {
                    ax = vec![0.0; n];
                    for f in 0..n {
                        ax[f] = harmonic(c11[(f + n - 1) % n], c11[f]);
                    }
                }
            }
            _ => {
                if dirichlet {
                    ax = vec![0.0; (n + 1) * n];
                    for j in 0..n {
                        let yc = grid.cell_center(grid.index(0, j))[1];
                        ax[j * (n + 1)] = entry_at(0, 0, [grid.lo(), yc])?;
                        ax[n + j * (n + 1)] = entry_at(0, 0, [grid.hi(), yc])?;
                        for i in 1..n {
                            ax[i + j * (n + 1)] =
                                harmonic(c11[grid.index(i - 1, j)], c11[grid.index(i, j)]);
                        }
                    }
                    ay = vec![0.0; n * (n + 1)];
                    for i in 0..n {
                        let xc = grid.cell_center(grid.index(i, 0))[0];
                        ay[i] = entry_at(1, 1, [xc, grid.lo()])?;
                        ay[i + n * n] = entry_at(1, 1, [xc, grid.hi()])?;
                        for j in 1..n {
                            ay[i + j * n] =
                                harmonic(c22[grid.index(i, j - 1)], c22[grid.index(i, j)]);
                        }
                    }
                    if !a.is_diagonal() {
                        // all lattice corners; cells outside the box enter as
                        // ghost zeros, the Dirichlet extension of the unknown
                        cross = vec![0.0; (n + 1) * (n + 1)];
                        for cj in 0..=n {
                            for ci in 0..=n {
                                let y = [grid.lo() + ci as f64 * h, grid.lo() + cj as f64 * h];
                                cross[ci + cj * (n + 1)] = entry_at(0, 1, y)?;
                            }
                        }
                    }
                } else {
                    ax = vec![0.0; n * n];
                    ay = vec![0.0; n * n];
                    for j in 0..n {
                        for i in 0..n {
                            ax[grid.index(i, j)] =
                                harmonic(c11[grid.index((i + n - 1) % n, j)], c11[grid.index(i, j)]);
                            ay[grid.index(i, j)] =
                                harmonic(c22[grid.index(i, (j + n - 1) % n)], c22[grid.index(i, j)]);
                        }
                    }
                    if !a.is_diagonal() {
                        cross = vec![0.0; n * n];
                        for cj in 0..n {
                            for ci in 0..n {
                                let y = [grid.lo() + ci as f64 * h, grid.lo() + cj as f64 * h];
                                cross[ci + cj * n] = entry_at(0, 1, y)?;
                            }
                        }
                    }
                }
            }
        }

        let mut asm = EllipticOperatorAssembly { grid, ax, ay, cross, diag: Vec::new() };
        asm.diag = asm.compute_diag();
        Ok(asm)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    fn compute_diag(&self) -> Vec<f64> {
        let n = self.grid.n();
        let h = self.grid.spacing();
        let h2 = h * h;
        let mut diag = vec![0.0; self.grid.cell_count()];
        match (self.grid.dim(), self.grid.bc()) {
            (1, BoundaryKind::Dirichlet) => {
                for i in 0..n {
                    let left = if i == 0 { 2.0 * self.ax[0] } else { self.ax[i] };
                    let right = if i == n - 1 { 2.0 * self.ax[n] } else { self.ax[i + 1] };
                    diag[i] = (left + right) / h2;
                }
            }
            (1, BoundaryKind::Periodic) => {
                for i in 0..n {
                    diag[i] = (self.ax[i] + self.ax[(i + 1) % n]) / h2;
                }
            }
            (_, BoundaryKind::Dirichlet) => {
                for j in 0..n {
                    for i in 0..n {
                        let lx = if i == 0 { 2.0 * self.ax[j * (n + 1)] } else { self.ax[i + j * (n + 1)] };
                        let rx = if i == n - 1 {
                            2.0 * self.ax[n + j * (n + 1)]
                        } else {
                            self.ax[i + 1 + j * (n + 1)]
                        };
                        let ly = if j == 0 { 2.0 * self.ay[i] } else { self.ay[i + j * n] };
                        let uy = if j == n - 1 {
                            2.0 * self.ay[i + n * n]
                        } else {
                            self.ay[i + (j + 1) * n]
                        };
                        diag[self.grid.index(i, j)] = (lx + rx + ly + uy) / h2;
                    }
                }
                if !self.cross.is_empty() {
                    for cj in 0..=n {
                        for ci in 0..=n {
                            let b2 = self.cross[ci + cj * (n + 1)] / (2.0 * h2);
                            let [sw, se, nw, ne] = self.dirichlet_corner_cells(ci, cj);
                            if let Some(k) = sw {
                                diag[k] += b2;
                            }
                            if let Some(k) = se {
                                diag[k] -= b2;
                            }
                            if let Some(k) = nw {
                                diag[k] -= b2;
                            }
                            if let Some(k) = ne {
                                diag[k] += b2;
                            }
                        }
                    }
                }
            }
            (_, BoundaryKind::Periodic) => {
                for j in 0..n {
                    for i in 0..n {
                        diag[self.grid.index(i, j)] = (self.ax[self.grid.index(i, j)]
                            + self.ax[self.grid.index((i + 1) % n, j)]
                            + self.ay[self.grid.index(i, j)]
                            + self.ay[self.grid.index(i, (j + 1) % n)])
                            / h2;
                    }
                }
                if !self.cross.is_empty() {
                    for cj in 0..n {
                        for ci in 0..n {
                            let b2 = self.cross[ci + cj * n] / (2.0 * h2);
                            let im = (ci + n - 1) % n;
                            let jm = (cj + n - 1) % n;
                            diag[self.grid.index(im, jm)] += b2;
                            diag[self.grid.index(ci, jm)] -= b2;
                            diag[self.grid.index(im, cj)] -= b2;
                            diag[self.grid.index(ci, cj)] += b2;
                        }
                    }
                }
            }
        }
        diag
    }

    /// `out = L u` with `L = -div(A grad .)` in per-volume form.
    pub fn apply(&self, u: &[f64], out: &mut [f64]) {
        let n = self.grid.n();
        let h = self.grid.spacing();
        out.fill(0.0);
        match (self.grid.dim(), self.grid.bc()) {
            (1, BoundaryKind::Dirichlet) => {
                for f in 0..=n {
                    let flux = if f == 0 {
                        2.0 * self.ax[0] * u[0] / h
                    } else if f == n {
                        -2.0 * self.ax[n] * u[n - 1] / h
                    } else {
                        self.ax[f] * (u[f] - u[f - 1]) / h
                    };
                    if f > 0 {
                        out[f - 1] -= flux / h;
                    }
                    if f < n {
                        out[f] += flux / h;
                    }
                }
            }
            (1, BoundaryKind::Periodic) => {
                for f in 0..n {
                    let prev = (f + n - 1) % n;
                    let flux = self.ax[f] * (u[f] - u[prev]) / h;
                    out[prev] -= flux / h;
                    out[f] += flux / h;
                }
            }
            (_, BoundaryKind::Dirichlet) => {
                for j in 0..n {
                    for i in 0..=n {
                        let c = self.ax[i + j * (n + 1)];
                        let flux = if i == 0 {
                            2.0 * c * u[self.grid.index(0, j)] / h
                        } else if i == n {
                            -2.0 * c * u[self.grid.index(n - 1, j)] / h
                        } else {
                            c * (u[self.grid.index(i, j)] - u[self.grid.index(i - 1, j)]) / h
                        };
                        if i > 0 {
                            out[self.grid.index(i - 1, j)] -= flux / h;
                        }
                        if i < n {
                            out[self.grid.index(i, j)] += flux / h;
                        }
                    }
                }
                for j in 0..=n {
                    for i in 0..n {
                        let c = self.ay[i + j * n];
                        let flux = if j == 0 {
                            2.0 * c * u[self.grid.index(i, 0)] / h
                        } else if j == n {
                            -2.0 * c * u[self.grid.index(i, n - 1)] / h
                        } else {
                            c * (u[self.grid.index(i, j)] - u[self.grid.index(i, j - 1)]) / h
                        };
                        if j > 0 {
                            out[self.grid.index(i, j - 1)] -= flux / h;
                        }
                        if j < n {
                            out[self.grid.index(i, j)] += flux / h;
                        }
                    }
                }
                if !self.cross.is_empty() {
                    let h2 = h * h;
                    for cj in 0..=n {
                        for ci in 0..=n {
                            let b2 = self.cross[ci + cj * (n + 1)] / (2.0 * h2);
                            let [sw, se, nw, ne] = self.dirichlet_corner_cells(ci, cj);
                            let val = |c: Option<usize>| c.map_or(0.0, |k| u[k]);
                            let (usw, use_, unw, une) = (val(sw), val(se), val(nw), val(ne));
                            if let Some(k) = sw {
                                out[k] += b2 * (usw - une);
                            }
                            if let Some(k) = ne {
                                out[k] += b2 * (une - usw);
                            }
                            if let Some(k) = se {
                                out[k] += b2 * (unw - use_);
                            }
                            if let Some(k) = nw {
                                out[k] += b2 * (use_ - unw);
                            }
                        }
                    }
                }
            }
            (_, BoundaryKind::Periodic) => {
                for j in 0..n {
                    for i in 0..n {
                        let prev = self.grid.index((i + n - 1) % n, j);
                        let here = self.grid.index(i, j);
                        let flux = self.ax[here] * (u[here] - u[prev]) / h;
                        out[prev] -= flux / h;
                        out[here] += flux / h;
                    }
                }
                for j in 0..n {
                    for i in 0..n {
                        let prev = self.grid.index(i, (j + n - 1) % n);
                        let here = self.grid.index(i, j);
                        let flux = self.ay[here] * (u[here] - u[prev]) / h;
                        out[prev] -= flux / h;
                        out[here] += flux / h;
                    }
                }
                if !self.cross.is_empty() {
                    let h2 = h * h;
                    for cj in 0..n {
                        for ci in 0..n {
                            let b2 = self.cross[ci + cj * n] / (2.0 * h2);
                            let im = (ci + n - 1) % n;
                            let jm = (cj + n - 1) % n;
                            let sw = self.grid.index(im, jm);
                            let se = self.grid.index(ci, jm);
                            let nw = self.grid.index(im, cj);
                            let ne = self.grid.index(ci, cj);
                            out[sw] += b2 * (u[sw] - u[ne]);
                            out[ne] += b2 * (u[ne] - u[sw]);
                            out[se] += b2 * (u[nw] - u[se]);
                            out[nw] += b2 * (u[se] - u[nw]);
                        }
                    }
                }
            }
        }
    }

    /// Right-hand side `b = div(A xi)` so that `L chi = b` makes the total
    /// flux `A (xi + grad chi)` discretely divergence-free.
    pub fn rhs_for_direction(&self, xi: [f64; 2]) -> Vec<f64> {
        let n = self.grid.n();
        let h = self.grid.spacing();
        let mut b = vec![0.0; self.grid.cell_count()];
        match (self.grid.dim(), self.grid.bc()) {
            (1, BoundaryKind::Dirichlet) => {
                for f in 0..=n {
                    let flux = self.ax[f] * xi[0];
                    if f > 0 {
                        b[f - 1] += flux / h;
                    }
                    if f < n {
                        b[f] -= flux / h;
                    }
                }
            }
            (1, BoundaryKind::Periodic) => {
                for f in 0..n {
                    let prev = (f + n - 1) % n;
                    let flux = self.ax[f] * xi[0];
                    b[prev] += flux / h;
                    b[f] -= flux / h;
                }
            }
            (_, BoundaryKind::Dirichlet) => {
                for j in 0..n {
                    for i in 0..=n {
                        let flux = self.ax[i + j * (n + 1)] * xi[0];
                        if i > 0 {
                            b[self.grid.index(i - 1, j)] += flux / h;
                        }
                        if i < n {
                            b[self.grid.index(i, j)] -= flux / h;
                        }
                    }
                }
                for j in 0..=n {
                    for i in 0..n {
                        let flux = self.ay[i + j * n] * xi[1];
                        if j > 0 {
                            b[self.grid.index(i, j - 1)] += flux / h;
                        }
                        if j < n {
                            b[self.grid.index(i, j)] -= flux / h;
                        }
                    }
                }
                if !self.cross.is_empty() {
                    for cj in 0..=n {
                        for ci in 0..=n {
                            let c = self.cross[ci + cj * (n + 1)];
                            let s = c * (xi[0] + xi[1]) / (2.0 * h);
                            let t = c * (xi[1] - xi[0]) / (2.0 * h);
                            let [sw, se, nw, ne] = self.dirichlet_corner_cells(ci, cj);
                            if let Some(k) = sw {
                                b[k] += s;
                            }
                            if let Some(k) = ne {
                                b[k] -= s;
                            }
                            if let Some(k) = se {
                                b[k] -= t;
                            }
                            if let Some(k) = nw {
                                b[k] += t;
                            }
                        }
                    }
                }
            }
            (_, BoundaryKind::Periodic) => {
                for j in 0..n {
                    for i in 0..n {
                        let here = self.grid.index(i, j);
                        let prev = self.grid.index((i + n - 1) % n, j);
                        let flux = self.ax[here] * xi[0];
                        b[prev] += flux / h;
                        b[here] -= flux / h;
                        let prev_y = self.grid.index(i, (j + n - 1) % n);
                        let flux_y = self.ay[here] * xi[1];
                        b[prev_y] += flux_y / h;
                        b[here] -= flux_y / h;
                    }
                }
                if !self.cross.is_empty() {
                    for cj in 0..n {
                        for ci in 0..n {
                            let c = self.cross[ci + cj * n];
                            let s = c * (xi[0] + xi[1]) / (2.0 * h);
                            let t = c * (xi[1] - xi[0]) / (2.0 * h);
                            let im = (ci + n - 1) % n;
                            let jm = (cj + n - 1) % n;
                            b[self.grid.index(im, jm)] += s;
                            b[self.grid.index(ci, cj)] -= s;
                            b[self.grid.index(ci, jm)] -= t;
                            b[self.grid.index(im, cj)] += t;
                        }
                    }
                }
            }
        }
        b
    }

    /// Relative residual `|b - L x| / |b|` (absolute when `b = 0`).
    pub fn residual_norm(&self, x: &[f64], b: &[f64]) -> f64 {
        let mut lx = vec![0.0; x.len()];
        self.apply(x, &mut lx);
        let r: f64 = lx.iter().zip(b).map(|(a, b)| (b - a) * (b - a)).sum::<f64>().sqrt();
        let bn: f64 = b.iter().map(|v| v * v).sum::<f64>().sqrt();
        if bn > 0.0 {
            r / bn
        } else {
            r
        }
    }

    /// Tridiagonal form of the 1D Dirichlet system.
    pub fn tridiagonal(&self) -> Option<(Vec<f64>, Vec<f64>, Vec<f64>)> {
        if self.grid.dim() != 1 || self.grid.bc() != BoundaryKind::Dirichlet {
            return None;
        }
        let n = self.grid.n();
        let h2 = self.grid.spacing() * self.grid.spacing();
        let mut lower = vec![0.0; n];
        let mut upper = vec![0.0; n];
        for i in 1..n {
            lower[i] = -self.ax[i] / h2;
        }
        for i in 0..n - 1 {
            upper[i] = -self.ax[i + 1] / h2;
        }
        Some((lower, self.diag.clone(), upper))
    }

    /// Reduced tridiagonal form of the 1D periodic system with cell 0 pinned
    /// to zero; the dropped row is implied by the consistency of the
    /// right-hand side.
    pub fn pinned_periodic_tridiagonal(&self) -> Option<(Vec<f64>, Vec<f64>, Vec<f64>)> {
        if self.grid.dim() != 1 || self.grid.bc() != BoundaryKind::Periodic {
            return None;
        }
        let n = self.grid.n();
        let h2 = self.grid.spacing() * self.grid.spacing();
        let m = n - 1; // unknowns: cells 1..n-1
        let mut lower = vec![0.0; m];
        let mut upper = vec![0.0; m];
        let diag: Vec<f64> = (1..n).map(|i| self.diag[i]).collect();
        for k in 1..m {
            lower[k] = -self.ax[k + 1] / h2;
        }
        for k in 0..m - 1 {
            upper[k] = -self.ax[k + 2] / h2;
        }
        Some((lower, diag, upper))
    }

    /// Window average of the total flux `A (xi + grad chi)`, one component
    /// per axis. With `Window::Full` the average is the discrete bilinear
    /// pairing over the whole box, which makes the assembled effective
    /// tensor symmetric up to solver tolerance.
    pub fn flux_average(&self, chi: &[f64], xi: [f64; 2], window: Window) -> [f64; 2] {
        let n = self.grid.n();
        let h = self.grid.spacing();
        let dim = self.grid.dim();
        let frac = window.fraction();
        let mid = 0.5 * (self.grid.lo() + self.grid.hi());
        let half = 0.5 * frac * self.grid.side() + 1e-12 * self.grid.side();
        let inside = |p: f64| (p - mid).abs() <= half;
        let full = window == Window::Full;
        let volume = self.grid.volume();

        let mut acc = [0.0; 2];
        let mut wsum = [0.0; 2];
        let mut acc_cross = [0.0; 2];
        let mut wsum_cross = 0.0;

        let dirichlet = self.grid.bc() == BoundaryKind::Dirichlet;
        // x-faces
        if dim == 1 {
            let faces = if dirichlet { n + 1 } else { n };
            for f in 0..faces {
                let pos = self.grid.lo() + f as f64 * h;
                if !inside(pos) {
                    continue;
                }
                let (grad, w) = self.face_gradient_x(chi, f, 0);
                acc[0] += w * self.ax[f] * (xi[0] + grad);
                wsum[0] += w;
            }
        } else {
            for j in 0..n {
                let yc = self.grid.cell_center(self.grid.index(0, j))[1];
                let faces = if dirichlet { n + 1 } else { n };
                for i in 0..faces {
                    let pos = self.grid.lo() + i as f64 * h;
                    if !inside(pos) || !inside(yc) {
                        continue;
                    }
                    let (grad, w) = self.face_gradient_x(chi, i, j);
                    let c = if dirichlet { self.ax[i + j * (n + 1)] } else { self.ax[self.grid.index(i, j)] };
                    acc[0] += w * c * (xi[0] + grad);
                    wsum[0] += w;
                }
            }
            for i in 0..n {
                let xc = self.grid.cell_center(self.grid.index(i, 0))[0];
                let faces = if dirichlet { n + 1 } else { n };
                for j in 0..faces {
                    let pos = self.grid.lo() + j as f64 * h;
                    if !inside(pos) || !inside(xc) {
                        continue;
                    }
                    let (grad, w) = self.face_gradient_y(chi, i, j);
                    let c = if dirichlet { self.ay[i + j * n] } else { self.ay[self.grid.index(i, j)] };
                    acc[1] += w * c * (xi[1] + grad);
                    wsum[1] += w;
                }
            }
            if !self.cross.is_empty() {
                let w = h * h;
                let corner_max = if dirichlet { n + 1 } else { n };
                for cj in 0..corner_max {
                    for ci in 0..corner_max {
                        let px = self.grid.lo() + ci as f64 * h;
                        let py = self.grid.lo() + cj as f64 * h;
                        if !inside(px) || !inside(py) {
                            continue;
                        }
                        let c = self.cross_value(ci, cj).unwrap();
                        let (gx, gy) = self.corner_gradient(chi, ci, cj);
                        acc_cross[0] += w * c * (xi[1] + gy);
                        acc_cross[1] += w * c * (xi[0] + gx);
                        wsum_cross += w;
                    }
                }
            }
        }

        let mut out = [0.0; 2];
        for axis in 0..dim {
            let axis_part = if full {
                acc[axis] / volume
            } else if wsum[axis] > 0.0 {
                acc[axis] / wsum[axis]
            } else {
                0.0
            };
            let cross_part = if self.cross.is_empty() {
                0.0
            } else if full {
                acc_cross[axis] / volume
            } else if wsum_cross > 0.0 {
                acc_cross[axis] / wsum_cross
            } else {
                0.0
            };
            out[axis] = axis_part + cross_part;
        }
        out
    }

    /// Gradient across x-face `f` of row `j`, with its dual volume weight.
    fn face_gradient_x(&self, chi: &[f64], f: usize, j: usize) -> (f64, f64) {
        let n = self.grid.n();
        let h = self.grid.spacing();
        let wbase = h.powi(self.grid.dim() as i32);
        match self.grid.bc() {
            BoundaryKind::Dirichlet => {
                if f == 0 {
                    (2.0 * chi[self.grid.index(0, j)] / h, 0.5 * wbase)
                } else if f == n {
                    (-2.0 * chi[self.grid.index(n - 1, j)] / h, 0.5 * wbase)
                } else {
                    (
                        (chi[self.grid.index(f, j)] - chi[self.grid.index(f - 1, j)]) / h,
                        wbase,
                    )
                }
            }
            BoundaryKind::Periodic => {
                let prev = self.grid.index((f + n - 1) % n, j);
                ((chi[self.grid.index(f, j)] - chi[prev]) / h, wbase)
            }
        }
    }

    fn face_gradient_y(&self, chi: &[f64], i: usize, f: usize) -> (f64, f64) {
        let n = self.grid.n();
        let h = self.grid.spacing();
        let wbase = h * h;
        match self.grid.bc() {
            BoundaryKind::Dirichlet => {
                if f == 0 {
                    (2.0 * chi[self.grid.index(i, 0)] / h, 0.5 * wbase)
                } else if f == n {
                    (-2.0 * chi[self.grid.index(i, n - 1)] / h, 0.5 * wbase)
                } else {
                    (
                        (chi[self.grid.index(i, f)] - chi[self.grid.index(i, f - 1)]) / h,
                        wbase,
                    )
                }
            }
            BoundaryKind::Periodic => {
                let prev = self.grid.index(i, (f + n - 1) % n);
                ((chi[self.grid.index(i, f)] - chi[prev]) / h, wbase)
            }
        }
    }

    /// Cells around lattice corner `(ci, cj)`: `[sw, se, nw, ne]`, `None`
    /// outside the box (Dirichlet ghost zeros).
    fn dirichlet_corner_cells(&self, ci: usize, cj: usize) -> [Option<usize>; 4] {
        let n = self.grid.n();
        let cell = |i: usize, j: usize, valid: bool| -> Option<usize> {
            if valid && i < n && j < n {
                Some(self.grid.index(i, j))
            } else {
                None
            }
        };
        [
            cell(ci.wrapping_sub(1), cj.wrapping_sub(1), ci >= 1 && cj >= 1),
            cell(ci, cj.wrapping_sub(1), cj >= 1),
            cell(ci.wrapping_sub(1), cj, ci >= 1),
            cell(ci, cj, true),
        ]
    }

    /// Averaged gradient at corner `(ci, cj)`; missing Dirichlet cells enter
    /// as ghost zeros.
    fn corner_gradient(&self, chi: &[f64], ci: usize, cj: usize) -> (f64, f64) {
        let n = self.grid.n();
        let h = self.grid.spacing();
        let (sw, se, nw, ne) = match self.grid.bc() {
            BoundaryKind::Dirichlet => {
                let [sw, se, nw, ne] = self.dirichlet_corner_cells(ci, cj);
                let val = |c: Option<usize>| c.map_or(0.0, |k| chi[k]);
                (val(sw), val(se), val(nw), val(ne))
            }
            BoundaryKind::Periodic => {
                let im = (ci + n - 1) % n;
                let jm = (cj + n - 1) % n;
                (
                    chi[self.grid.index(im, jm)],
                    chi[self.grid.index(ci, jm)],
                    chi[self.grid.index(im, cj)],
                    chi[self.grid.index(ci, cj)],
                )
            }
        };
        (((se + ne) - (sw + nw)) / (2.0 * h), ((nw + ne) - (sw + se)) / (2.0 * h))
    }

    /// Normalized Dirichlet energy `(1/|box|) sum |grad chi|^2` from face
    /// differences.
    pub fn gradient_energy(&self, chi: &[f64]) -> f64 {
        let n = self.grid.n();
        let dim = self.grid.dim();
        let dirichlet = self.grid.bc() == BoundaryKind::Dirichlet;
        let mut acc = 0.0;
        if dim == 1 {
            let faces = if dirichlet { n + 1 } else { n };
            for f in 0..faces {
                let (g, w) = self.face_gradient_x(chi, f, 0);
                acc += w * g * g;
            }
        } else {
            let faces = if dirichlet { n + 1 } else { n };
            for j in 0..n {
                for i in 0..faces {
                    let (g, w) = self.face_gradient_x(chi, i, j);
                    acc += w * g * g;
                }
            }
            for i in 0..n {
                for j in 0..faces {
                    let (g, w) = self.face_gradient_y(chi, i, j);
                    acc += w * g * g;
                }
            }
        }
        acc / self.grid.volume()
    }

    /// Face fluxes of the total field `A (xi + grad chi)`.
    ///
    /// For diagonal tensors the discrete divergence of these fluxes is
    /// exactly the solver residual. Off-diagonal contributions of full 2D
    /// tensors are reconstructed on faces from the adjacent corner values,
    /// which is a consistent but not identity-exact attribution.
    pub fn face_flux(&self, chi: &[f64], xi: [f64; 2]) -> (Vec<f64>, Vec<f64>) {
        let n = self.grid.n();
        let dim = self.grid.dim();
        let dirichlet = self.grid.bc() == BoundaryKind::Dirichlet;
        let faces = if dirichlet { n + 1 } else { n };
        let mut fx;
        let mut fy = Vec::new();
        if dim == 1 {
            fx = vec![0.0; faces];
            for f in 0..faces {
                let (g, _) = self.face_gradient_x(chi, f, 0);
                fx[f] = self.ax[f] * (xi[0] + g);
            }
        } else {
            fx = vec![0.0; faces * n];
            for j in 0..n {
                for i in 0..faces {
                    let (g, _) = self.face_gradient_x(chi, i, j);
                    let c = if dirichlet { self.ax[i + j * (n + 1)] } else { self.ax[self.grid.index(i, j)] };
                    let mut v = c * (xi[0] + g);
                    if !self.cross.is_empty() {
                        v += self.cross_on_x_face(chi, i, j, xi);
                    }
                    fx[i + j * faces] = v;
                }
            }
            fy = vec![0.0; n * faces];
            for j in 0..faces {
                for i in 0..n {
                    let (g, _) = self.face_gradient_y(chi, i, j);
                    let c = if dirichlet { self.ay[i + j * n] } else { self.ay[self.grid.index(i, j)] };
                    let mut v = c * (xi[1] + g);
                    if !self.cross.is_empty() {
                        v += self.cross_on_y_face(chi, i, j, xi);
                    }
                    fy[i + j * n] = v;
                }
            }
        }
        (fx, fy)
    }

    fn cross_value(&self, ci: usize, cj: usize) -> Option<f64> {
        let n = self.grid.n();
        match self.grid.bc() {
            BoundaryKind::Dirichlet => {
                if ci <= n && cj <= n {
                    Some(self.cross[ci + cj * (n + 1)])
                } else {
                    None
                }
            }
            BoundaryKind::Periodic => Some(self.cross[(ci % n) + (cj % n) * n]),
        }
    }

    fn cross_on_x_face(&self, chi: &[f64], i: usize, j: usize, xi: [f64; 2]) -> f64 {
        // corners above and below the face midpoint
        let mut acc = 0.0;
        let mut cnt = 0.0;
        for cj in [j, j + 1] {
            if let Some(c) = self.cross_value(i, cj) {
                let (_, gy) = self.corner_gradient_or_zero(chi, i, cj);
                acc += c * (xi[1] + gy);
                cnt += 1.0;
            }
        }
        if cnt > 0.0 {
            acc / cnt
        } else {
            0.0
        }
    }

    fn cross_on_y_face(&self, chi: &[f64], i: usize, j: usize, xi: [f64; 2]) -> f64 {
        let mut acc = 0.0;
        let mut cnt = 0.0;
        for ci in [i, i + 1] {
            if let Some(c) = self.cross_value(ci, j) {
                let (gx, _) = self.corner_gradient_or_zero(chi, ci, j);
                acc += c * (xi[0] + gx);
                cnt += 1.0;
            }
        }
        if cnt > 0.0 {
            acc / cnt
        } else {
            0.0
        }
    }

    fn corner_gradient_or_zero(&self, chi: &[f64], ci: usize, cj: usize) -> (f64, f64) {
        let n = self.grid.n();
        match self.grid.bc() {
            BoundaryKind::Dirichlet => {
                if ci <= n && cj <= n {
                    self.corner_gradient(chi, ci, cj)
                } else {
                    (0.0, 0.0)
                }
            }
            BoundaryKind::Periodic => self.corner_gradient(chi, ci % n, cj % n),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{CosTerm, ScalarField, SymMat};

    fn laminate() -> OscillatingMatrixField {
        let a = ScalarField::new(
            2,
            2.0,
            vec![CosTerm { amplitude: 1.0, freq: vec![1.0, 0.0], phase: 0.0 }],
            None,
        )
        .unwrap();
        OscillatingMatrixField::diagonal_2d(a.clone(), a, 1.0).unwrap()
    }

    fn full_tensor() -> OscillatingMatrixField {
        let a11 = ScalarField::new(
            2,
            2.0,
            vec![CosTerm { amplitude: 0.6, freq: vec![1.0, 1.0], phase: 0.4 }],
            None,
        )
        .unwrap();
        let a22 = ScalarField::new(
            2,
            3.0,
            vec![CosTerm { amplitude: 0.5, freq: vec![2.0, 1.0], phase: 0.0 }],
            None,
        )
        .unwrap();
        let a12 = ScalarField::new(
            2,
            0.1,
            vec![CosTerm { amplitude: 0.3, freq: vec![1.0, 2.0], phase: 1.1 }],
            None,
        )
        .unwrap();
        OscillatingMatrixField::full_2d(a11, a22, a12, 0.5).unwrap()
    }

    fn symmetry_defect(asm: &EllipticOperatorAssembly) -> f64 {
        // <L u, v> vs <u, L v> on pseudo-random vectors
        let m = asm.grid().cell_count();
        let mut u = vec![0.0; m];
        let mut v = vec![0.0; m];
        let mut s = 123456789u64;
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        for i in 0..m {
            u[i] = next();
            v[i] = next();
        }
        let mut lu = vec![0.0; m];
        let mut lv = vec![0.0; m];
        asm.apply(&u, &mut lu);
        asm.apply(&v, &mut lv);
        let a: f64 = lu.iter().zip(&v).map(|(x, y)| x * y).sum();
        let b: f64 = u.iter().zip(&lv).map(|(x, y)| x * y).sum();
        (a - b).abs() / a.abs().max(1.0)
    }

    #[test]
    fn constant_coefficients_give_zero_rhs() {
        let a = OscillatingMatrixField::constant(2, SymMat::new_2d(2.0, 3.0, 0.5)).unwrap();
        for grid in [Grid::truncated(2, 1.0, 8).unwrap(), Grid::unit_cell(2, 8).unwrap()] {
            let asm = EllipticOperatorAssembly::build(&a, &[0.0, 0.0], grid).unwrap();
            for xi in [[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]] {
                let b = asm.rhs_for_direction(xi);
                let norm: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
                assert!(norm < 1e-12, "rhs norm {norm} for xi {xi:?}");
            }
        }
    }

    #[test]
    fn operator_is_symmetric() {
        for grid in [Grid::truncated(2, 1.0, 12).unwrap(), Grid::unit_cell(2, 12).unwrap()] {
            let asm = EllipticOperatorAssembly::build(&full_tensor(), &[0.0, 0.0], grid).unwrap();
            assert!(symmetry_defect(&asm) < 1e-12);
        }
        let a1 = OscillatingMatrixField::scalar_1d(ScalarField::sum_1d(2.0, &[(1.0, 1.0)]), 1.0).unwrap();
        let asm = EllipticOperatorAssembly::build(&a1, &[0.0], Grid::truncated(1, 2.0, 32).unwrap()).unwrap();
        assert!(symmetry_defect(&asm) < 1e-12);
    }

    #[test]
    fn diagonal_rows_dominate_for_five_point_stencil() {
        let asm =
            EllipticOperatorAssembly::build(&laminate(), &[0.0, 0.0], Grid::truncated(2, 1.0, 8).unwrap())
                .unwrap();
        // row extraction by unit vectors
        let m = asm.grid().cell_count();
        let mut e = vec![0.0; m];
        let mut row = vec![0.0; m];
        for i in (0..m).step_by(7) {
            e.fill(0.0);
            e[i] = 1.0;
            asm.apply(&e, &mut row);
            let diag = row[i];
            let off: f64 = row.iter().enumerate().filter(|(k, _)| *k != i).map(|(_, v)| v.abs()).sum();
            assert!(diag > 0.0);
            assert!(diag + 1e-12 >= off, "row {i}: diag {diag} off {off}");
            assert!((diag - asm.diag()[i]).abs() < 1e-12 * diag.max(1.0));
        }
    }

    #[test]
    fn rhs_consistency_periodic() {
        let asm =
            EllipticOperatorAssembly::build(&full_tensor(), &[0.0, 0.0], Grid::unit_cell(2, 16).unwrap())
                .unwrap();
        for xi in [[1.0, 0.0], [0.0, 1.0]] {
            let b = asm.rhs_for_direction(xi);
            let sum: f64 = b.iter().sum();
            assert!(sum.abs() < 1e-10, "rhs sum {sum}");
        }
    }
}
