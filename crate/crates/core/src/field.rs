//! Real scalar fields on the torus stored as full complex Fourier
//! coefficient arrays with Hermitian symmetry.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::fft::{fft2_with, Fft};
use crate::grid::TorusGrid;
use crate::{Error, Result};

/// Relative tolerance for the mean-zero precondition of `Δ⁻¹`.
pub const MEAN_ZERO_TOL: f64 = 1e-12;

/// Cached FFT plans for one grid size.
pub struct SpectralCtx {
    fx: Fft,
    fy: Fft,
    nx: usize,
    ny: usize,
}

impl SpectralCtx {
    pub fn new(grid: &TorusGrid) -> Self {
        Self {
            fx: Fft::new(grid.nx()),
            fy: Fft::new(grid.ny()),
            nx: grid.nx(),
            ny: grid.ny(),
        }
    }

    fn fft2(&self, data: &mut [Complex64], inverse: bool) {
        fft2_with(&self.fx, &self.fy, data, self.nx, self.ny, inverse);
    }
}

/// Fourier coefficients of a real scalar on a [`TorusGrid`].
///
/// Coefficients are Fourier-series coefficients: the physical value is
/// `f(x, y) = Σ c(k, m) e^{i(kαx + my)}`, stored row-major with the y-mode
/// as the row. Real-valued fields satisfy `c(−k, −m) = conj(c(k, m))`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: TorusGrid,
    c: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(grid: TorusGrid) -> Self {
        let n = grid.len();
        Self {
            grid,
            c: vec![Complex64::ZERO; n],
        }
    }

    pub fn from_coeffs(grid: TorusGrid, c: Vec<Complex64>) -> Result<Self> {
        if c.len() != grid.len() {
            return Err(Error::GridMismatch);
        }
        Ok(Self { grid, c })
    }

    /// Build from physical samples in row-major `ny × nx` order.
    pub fn from_physical(grid: TorusGrid, values: &[f64]) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch);
        }
        let ctx = SpectralCtx::new(&grid);
        Ok(Self::from_physical_with(&ctx, grid, values))
    }

    pub fn from_physical_with(ctx: &SpectralCtx, grid: TorusGrid, values: &[f64]) -> Self {
        let mut c: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        ctx.fft2(&mut c, false);
        let scale = 1.0 / grid.len() as f64;
        for z in c.iter_mut() {
            *z *= scale;
        }
        Self { grid, c }
    }

    /// Build from a closure over physical nodes `(x, y)`.
    pub fn from_fn(grid: TorusGrid, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut values = vec![0.0; grid.len()];
        for iy in 0..grid.ny() {
            for ix in 0..grid.nx() {
                let (x, y) = grid.node(iy, ix);
                values[grid.idx(iy, ix)] = f(x, y);
            }
        }
        Self::from_physical(grid, &values).expect("sizes match by construction")
    }

    /// A single real mode `amp·cos(kαx + my + phase)`, exact in spectral space.
    pub fn harmonic(grid: TorusGrid, k: i64, m: i64, amp: f64, phase: f64) -> Self {
        let mut f = Self::zeros(grid);
        let half = Complex64::from_polar(amp / 2.0, phase);
        f.add_mode(k, m, half);
        f.add_mode(-k, -m, half.conj());
        f
    }

    #[inline]
    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    #[inline]
    pub fn coeffs(&self) -> &[Complex64] {
        &self.c
    }

    #[inline]
    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.c
    }

    /// Coefficient at signed wavenumbers `(k, m)`; zero if not retained.
    pub fn get(&self, k: i64, m: i64) -> Complex64 {
        match (self.grid.col_of_k(k), self.grid.row_of_m(m)) {
            (Some(ix), Some(iy)) => self.c[self.grid.idx(iy, ix)],
            _ => Complex64::ZERO,
        }
    }

    pub fn set_mode(&mut self, k: i64, m: i64, v: Complex64) {
        if let (Some(ix), Some(iy)) = (self.grid.col_of_k(k), self.grid.row_of_m(m)) {
            let i = self.grid.idx(iy, ix);
            self.c[i] = v;
        }
    }

    pub fn add_mode(&mut self, k: i64, m: i64, v: Complex64) {
        if let (Some(ix), Some(iy)) = (self.grid.col_of_k(k), self.grid.row_of_m(m)) {
            let i = self.grid.idx(iy, ix);
            self.c[i] += v;
        }
    }

    /// Physical samples, row-major `ny × nx`.
    pub fn to_physical(&self) -> Vec<f64> {
        let ctx = SpectralCtx::new(&self.grid);
        self.to_physical_with(&ctx)
    }

    pub fn to_physical_with(&self, ctx: &SpectralCtx) -> Vec<f64> {
        let mut buf = self.c.clone();
        ctx.fft2(&mut buf, true);
        let scale = self.grid.len() as f64;
        buf.iter().map(|z| z.re * scale).collect()
    }

    #[inline]
    pub fn mean(&self) -> Complex64 {
        self.c[0]
    }

    pub fn zero_mean(&mut self) {
        self.c[0] = Complex64::ZERO;
    }

    /// Errors if the mean exceeds `MEAN_ZERO_TOL` relative to the field norm.
    pub fn require_mean_zero(&self) -> Result<()> {
        let scale = self.max_coeff().max(f64::MIN_POSITIVE);
        let mean = self.c[0].norm();
        if mean > MEAN_ZERO_TOL * scale {
            return Err(Error::MeanNotZero {
                mean,
                tol: MEAN_ZERO_TOL * scale,
            });
        }
        Ok(())
    }

    pub fn max_coeff(&self) -> f64 {
        libm::sqrt(self.c.iter().fold(0.0, |a, z| a.max(z.norm_sqr())))
    }

    /// 2/3-rule truncation; also clears the unmatched Nyquist modes.
    pub fn dealias(&mut self) {
        let (kcut, mcut) = self.grid.dealias_cut();
        for iy in 0..self.grid.ny() {
            let m = self.grid.m_int(iy);
            for ix in 0..self.grid.nx() {
                let k = self.grid.k_int(ix);
                if k.abs() > kcut || m.abs() > mcut {
                    self.c[self.grid.idx(iy, ix)] = Complex64::ZERO;
                }
            }
        }
    }

    /// Max deviation from `c(−k,−m) = conj(c(k,m))`, relative to the largest
    /// coefficient.
    pub fn hermitian_residual(&self) -> f64 {
        let scale = self.max_coeff();
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst = 0.0f64;
        for iy in 0..self.grid.ny() {
            let m = self.grid.m_int(iy);
            for ix in 0..self.grid.nx() {
                let k = self.grid.k_int(ix);
                let partner = self.get(-k, -m);
                let dev = (self.get(k, m) - partner.conj()).norm();
                worst = worst.max(dev);
            }
        }
        worst / scale
    }

    /// Enforce Hermitian symmetry by averaging conjugate pairs.
    pub fn symmetrize(&mut self) {
        let g = self.grid;
        for iy in 0..g.ny() {
            let m = g.m_int(iy);
            for ix in 0..g.nx() {
                let k = g.k_int(ix);
                match (g.col_of_k(-k), g.row_of_m(-m)) {
                    (Some(jx), Some(jy)) => {
                        if (iy, ix) <= (jy, jx) {
                            let a = self.c[g.idx(iy, ix)];
                            let b = self.c[g.idx(jy, jx)];
                            let avg = (a + b.conj()) * 0.5;
                            self.c[g.idx(iy, ix)] = avg;
                            self.c[g.idx(jy, jx)] = avg.conj();
                        }
                    }
                    // Unpaired Nyquist modes cannot be represented in a real
                    // field with a general phase; drop them.
                    _ => self.c[g.idx(iy, ix)] = Complex64::ZERO,
                }
            }
        }
    }

    /// New field `∂f/∂x` (spectral).
    pub fn x_deriv(&self) -> Self {
        let mut out = self.clone();
        for iy in 0..self.grid.ny() {
            for ix in 0..self.grid.nx() {
                let i = self.grid.idx(iy, ix);
                out.c[i] = Complex64::new(0.0, self.grid.kx(ix)) * self.c[i];
            }
        }
        out.clear_nyquist();
        out
    }

    /// New field `∂f/∂y` (spectral).
    pub fn y_deriv(&self) -> Self {
        let mut out = self.clone();
        for iy in 0..self.grid.ny() {
            for ix in 0..self.grid.nx() {
                let i = self.grid.idx(iy, ix);
                out.c[i] = Complex64::new(0.0, self.grid.ky(iy)) * self.c[i];
            }
        }
        out.clear_nyquist();
        out
    }

    fn clear_nyquist(&mut self) {
        let g = self.grid;
        let ny_col = g.nx() / 2;
        let ny_row = g.ny() / 2;
        for iy in 0..g.ny() {
            self.c[g.idx(iy, ny_col)] = Complex64::ZERO;
        }
        for ix in 0..g.nx() {
            self.c[g.idx(ny_row, ix)] = Complex64::ZERO;
        }
    }

    /// Product with `sin y` via the exact coefficient shift
    /// `(sin y·f)(k, m) = (f(k, m−1) − f(k, m+1))/(2i)`, then dealiased.
    /// Identical to the pseudo-spectral product for band-limited input.
    pub fn shift_mul_sin_y(&self) -> Self {
        let g = *self.grid();
        let mut out = Self::zeros(g);
        let half = Complex64::new(0.0, -0.5); // 1/(2i)
        for iy in 0..g.ny() {
            let m = g.m_int(iy);
            for ix in 0..g.nx() {
                let k = g.k_int(ix);
                let v = (self.get(k, m - 1) - self.get(k, m + 1)) * half;
                out.coeffs_mut()[g.idx(iy, ix)] = v;
            }
        }
        out.dealias();
        out
    }

    /// Product with `sin x` (square torus) via the k-shift.
    pub fn shift_mul_sin_x(&self) -> Self {
        let g = *self.grid();
        let mut out = Self::zeros(g);
        let half = Complex64::new(0.0, -0.5);
        for iy in 0..g.ny() {
            let m = g.m_int(iy);
            for ix in 0..g.nx() {
                let k = g.k_int(ix);
                let v = (self.get(k - 1, m) - self.get(k + 1, m)) * half;
                out.coeffs_mut()[g.idx(iy, ix)] = v;
            }
        }
        out.dealias();
        out
    }

    /// Map coefficients by `(k_int, m_int, c) -> c'`.
    pub fn map_modes(&self, f: impl Fn(i64, i64, Complex64) -> Complex64) -> Self {
        let mut out = self.clone();
        for iy in 0..self.grid.ny() {
            let m = self.grid.m_int(iy);
            for ix in 0..self.grid.nx() {
                let k = self.grid.k_int(ix);
                let i = self.grid.idx(iy, ix);
                out.c[i] = f(k, m, self.c[i]);
            }
        }
        out
    }

    /// L² inner product `∫ f g dx dy` (real fields).
    pub fn inner(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.grid, other.grid);
        let s: f64 = self
            .c
            .iter()
            .zip(other.c.iter())
            .map(|(a, b)| (a * b.conj()).re)
            .sum();
        s * self.grid.area()
    }

    pub fn norm_sq(&self) -> f64 {
        self.inner(self)
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.norm_sq().max(0.0))
    }

    /// `∫ |∇f|² dx dy` as a mode sum.
    pub fn grad_norm_sq(&self) -> f64 {
        let mut s = 0.0;
        for iy in 0..self.grid.ny() {
            for ix in 0..self.grid.nx() {
                let lam = self.grid.neg_lap(iy, ix);
                s += lam * self.c[self.grid.idx(iy, ix)].norm_sqr();
            }
        }
        s * self.grid.area()
    }

    /// `‖f‖² + ‖∇f‖²`.
    pub fn h1_norm_sq(&self) -> f64 {
        self.norm_sq() + self.grad_norm_sq()
    }

    /// Pointwise product of two real fields, dealiased.
    pub fn mul_pointwise(&self, other: &Self) -> Self {
        let ctx = SpectralCtx::new(&self.grid);
        self.mul_pointwise_with(&ctx, other)
    }

    pub fn mul_pointwise_with(&self, ctx: &SpectralCtx, other: &Self) -> Self {
        debug_assert_eq!(self.grid, other.grid);
        let a = self.to_physical_with(ctx);
        let b = other.to_physical_with(ctx);
        let prod: Vec<f64> = a.iter().zip(b.iter()).map(|(x, y)| x * y).collect();
        let mut out = Self::from_physical_with(ctx, self.grid, &prod);
        out.dealias();
        out
    }

    /// Pointwise product with a profile `w(y)` given at the y-nodes, dealiased.
    pub fn mul_profile_with(&self, ctx: &SpectralCtx, w: &[f64]) -> Self {
        debug_assert_eq!(w.len(), self.grid.ny());
        let a = self.to_physical_with(ctx);
        let nx = self.grid.nx();
        let prod: Vec<f64> = a
            .iter()
            .enumerate()
            .map(|(i, v)| v * w[i / nx])
            .collect();
        let mut out = Self::from_physical_with(ctx, self.grid, &prod);
        out.dealias();
        out
    }

    // In-place linear algebra used by the time stepper.

    pub fn scale(&mut self, s: f64) {
        for z in self.c.iter_mut() {
            *z *= s;
        }
    }

    pub fn axpy(&mut self, a: f64, x: &Self) {
        debug_assert_eq!(self.grid, x.grid);
        for (z, w) in self.c.iter_mut().zip(x.c.iter()) {
            *z += a * w;
        }
    }

    pub fn is_finite(&self) -> bool {
        self.c.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl core::ops::Add<&SpectralField> for &SpectralField {
    type Output = SpectralField;
    fn add(self, rhs: &SpectralField) -> SpectralField {
        let mut out = self.clone();
        out.axpy(1.0, rhs);
        out
    }
}

impl core::ops::Sub<&SpectralField> for &SpectralField {
    type Output = SpectralField;
    fn sub(self, rhs: &SpectralField) -> SpectralField {
        let mut out = self.clone();
        out.axpy(-1.0, rhs);
        out
    }
}

impl core::ops::Mul<f64> for &SpectralField {
    type Output = SpectralField;
    fn mul(self, rhs: f64) -> SpectralField {
        let mut out = self.clone();
        out.scale(rhs);
        out
    }
}

/// Velocity components recovered from a stream function.
#[derive(Debug, Clone)]
pub struct VelocityField {
    pub u: SpectralField,
    pub v: SpectralField,
}

impl VelocityField {
    /// Max modewise divergence `|i kx û + i ky v̂|` relative to the velocity scale.
    pub fn divergence_residual(&self) -> f64 {
        let g = *self.u.grid();
        let scale = self.u.max_coeff().max(self.v.max_coeff());
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst = 0.0f64;
        for iy in 0..g.ny() {
            for ix in 0..g.nx() {
                let i = g.idx(iy, ix);
                let div = Complex64::new(0.0, g.kx(ix)) * self.u.coeffs()[i]
                    + Complex64::new(0.0, g.ky(iy)) * self.v.coeffs()[i];
                worst = worst.max(div.norm());
            }
        }
        worst / scale
    }

    /// `∫ (u² + v²) dx dy`.
    pub fn energy(&self) -> f64 {
        self.u.norm_sq() + self.v.norm_sq()
    }
}
