//! Uniform tensor grids for the cell problems.
//!
//! Unknowns live at cell centers. Dirichlet grids cover the truncation box
//! `[-R,R]^N` with the corrector pinned to zero on the walls (the wall sits
//! half a cell away from the first center). Periodic grids cover the unit
//! cell `[0,1]^N` and identify opposite faces.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryKind {
    Dirichlet,
    Periodic,
}

#[derive(Debug, Clone, Copy)]
pub struct Grid {
    dim: usize,
    lo: f64,
    hi: f64,
    n: usize,
    bc: BoundaryKind,
}

impl Grid {
    /// Dirichlet grid on the box `[-half_width, half_width]^dim`.
    pub fn truncated(dim: usize, half_width: f64, n: usize) -> Result<Self> {
        Self::validate(dim, n)?;
        if !(half_width > 0.0) {
            return Err(Error::argument("grid half-width must be positive"));
        }
        Ok(Grid { dim, lo: -half_width, hi: half_width, n, bc: BoundaryKind::Dirichlet })
    }

    /// Periodic grid on the unit cell `[0,1]^dim`.
    pub fn unit_cell(dim: usize, n: usize) -> Result<Self> {
        Self::validate(dim, n)?;
        Ok(Grid { dim, lo: 0.0, hi: 1.0, n, bc: BoundaryKind::Periodic })
    }

    fn validate(dim: usize, n: usize) -> Result<()> {
        if dim == 0 || dim > 2 {
            return Err(Error::argument(format!("grid dimension must be 1 or 2, got {dim}")));
        }
        if n < 4 {
            return Err(Error::argument(format!("grid needs at least 4 cells per axis, got {n}")));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bc(&self) -> BoundaryKind {
        self.bc
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn side(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn spacing(&self) -> f64 {
        self.side() / self.n as f64
    }

    /// Box half-width for truncated grids, `None` for the unit cell.
    pub fn half_width(&self) -> Option<f64> {
        match self.bc {
            BoundaryKind::Dirichlet => Some(self.hi),
            BoundaryKind::Periodic => None,
        }
    }

    pub fn volume(&self) -> f64 {
        self.side().powi(self.dim as i32)
    }

    pub fn cell_count(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    #[inline]
    pub fn index(&self, ix: usize, iy: usize) -> usize {
        debug_assert!(ix < self.n && (self.dim == 1 || iy < self.n));
        ix + iy * self.n
    }

    /// Center of cell `idx`; the second coordinate is 0 in one dimension.
    pub fn cell_center(&self, idx: usize) -> [f64; 2] {
        let h = self.spacing();
        let ix = idx % self.n;
        let iy = idx / self.n;
        [
            self.lo + (ix as f64 + 0.5) * h,
            if self.dim == 2 { self.lo + (iy as f64 + 0.5) * h } else { 0.0 },
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn truncated_grid_geometry() {
        let g = Grid::truncated(1, 4.0, 16).unwrap();
        assert_eq!(g.spacing(), 0.5);
        assert_eq!(g.cell_count(), 16);
        assert_eq!(g.cell_center(0)[0], -3.75);
        assert_eq!(g.cell_center(15)[0], 3.75);
        assert_eq!(g.half_width(), Some(4.0));
    }

    #[test]
    fn unit_cell_geometry() {
        let g = Grid::unit_cell(2, 8).unwrap();
        assert_eq!(g.cell_count(), 64);
        assert!((g.cell_center(g.index(0, 7))[1] - 0.9375).abs() < 1e-15);
        assert_eq!(g.half_width(), None);
    }

    #[test]
    fn rejects_tiny_grids() {
        assert!(Grid::truncated(1, 1.0, 3).is_err());
        assert!(Grid::truncated(3, 1.0, 8).is_err());
        assert!(Grid::truncated(1, 0.0, 8).is_err());
    }
}
