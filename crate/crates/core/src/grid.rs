//! Collocation grid on the torus `T_α = {0 < y < 2π, 0 < x < 2π/α}`.

use alloc::format;
use alloc::vec::Vec;

use crate::{Error, Result};

pub const TWO_PI: f64 = core::f64::consts::TAU;

/// Uniform collocation grid with `nx × ny` points and x-period `2π/α`.
///
/// Wavenumbers are `kx = α·k` for integer `k ∈ [−nx/2, nx/2)` and `ky = m`
/// for `m ∈ [−ny/2, ny/2)`. The `(0,0)` mode carries the mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusGrid {
    alpha: f64,
    nx: usize,
    ny: usize,
}

impl TorusGrid {
    pub fn new(alpha: f64, nx: usize, ny: usize) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::Grid(format!("alpha must be positive, got {alpha}")));
        }
        if nx < 4 || nx % 2 != 0 {
            return Err(Error::Grid(format!("nx must be even and >= 4, got {nx}")));
        }
        if ny < 4 || ny % 2 != 0 {
            return Err(Error::Grid(format!("ny must be even and >= 4, got {ny}")));
        }
        Ok(Self { alpha, nx, ny })
    }

    #[inline]
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    #[inline]
    pub fn nx(&self) -> usize {
        self.nx
    }

    #[inline]
    pub fn ny(&self) -> usize {
        self.ny
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Domain area `(2π)²/α`.
    #[inline]
    pub fn area(&self) -> f64 {
        TWO_PI * TWO_PI / self.alpha
    }

    /// x-period `2π/α`.
    #[inline]
    pub fn lx(&self) -> f64 {
        TWO_PI / self.alpha
    }

    /// Grid spacings `(Δx, Δy)`.
    #[inline]
    pub fn spacing(&self) -> (f64, f64) {
        (self.lx() / self.nx as f64, TWO_PI / self.ny as f64)
    }

    /// Signed integer x-wavenumber of storage column `ix`.
    #[inline]
    pub fn k_int(&self, ix: usize) -> i64 {
        if ix <= self.nx / 2 - 1 {
            ix as i64
        } else {
            ix as i64 - self.nx as i64
        }
    }

    /// Signed integer y-wavenumber of storage row `iy`.
    #[inline]
    pub fn m_int(&self, iy: usize) -> i64 {
        if iy <= self.ny / 2 - 1 {
            iy as i64
        } else {
            iy as i64 - self.ny as i64
        }
    }

    /// Physical x-wavenumber `α·k` of storage column `ix`.
    #[inline]
    pub fn kx(&self, ix: usize) -> f64 {
        self.alpha * self.k_int(ix) as f64
    }

    /// Physical y-wavenumber of storage row `iy`.
    #[inline]
    pub fn ky(&self, iy: usize) -> f64 {
        self.m_int(iy) as f64
    }

    /// Storage column for the signed integer x-wavenumber `k`, if retained.
    #[inline]
    pub fn col_of_k(&self, k: i64) -> Option<usize> {
        let half = self.nx as i64 / 2;
        if k >= 0 && k < half {
            Some(k as usize)
        } else if k >= -half && k < 0 {
            Some((k + self.nx as i64) as usize)
        } else {
            None
        }
    }

    /// Storage row for the signed integer y-wavenumber `m`, if retained.
    #[inline]
    pub fn row_of_m(&self, m: i64) -> Option<usize> {
        let half = self.ny as i64 / 2;
        if m >= 0 && m < half {
            Some(m as usize)
        } else if m >= -half && m < 0 {
            Some((m + self.ny as i64) as usize)
        } else {
            None
        }
    }

    /// Flat index of the `(row, col)` coefficient.
    #[inline]
    pub fn idx(&self, iy: usize, ix: usize) -> usize {
        iy * self.nx + ix
    }

    /// Eigenvalue of `−Δ` for the mode at `(iy, ix)`: `k²α² + m²`.
    #[inline]
    pub fn neg_lap(&self, iy: usize, ix: usize) -> f64 {
        let kx = self.kx(ix);
        let ky = self.ky(iy);
        kx * kx + ky * ky
    }

    /// 2/3-rule dealiasing cutoffs `(k_max, m_max)` in integer wavenumbers.
    #[inline]
    pub fn dealias_cut(&self) -> (i64, i64) {
        ((self.nx as i64 - 1) / 3, (self.ny as i64 - 1) / 3)
    }

    /// Collocation node `(x_i, y_j)`.
    #[inline]
    pub fn node(&self, iy: usize, ix: usize) -> (f64, f64) {
        let (dx, dy) = self.spacing();
        (ix as f64 * dx, iy as f64 * dy)
    }

    /// y collocation values (row-major physical rows).
    pub fn y_nodes(&self) -> Vec<f64> {
        let dy = TWO_PI / self.ny as f64;
        (0..self.ny).map(|j| j as f64 * dy).collect()
    }

    /// x collocation values.
    pub fn x_nodes(&self) -> Vec<f64> {
        let dx = self.lx() / self.nx as f64;
        (0..self.nx).map(|i| i as f64 * dx).collect()
    }
}
