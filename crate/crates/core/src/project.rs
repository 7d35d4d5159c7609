//! Orthogonal L² projections used throughout: shear/non-shear splits, the
//! low-mode kernels on the square torus, and the leading eigenmodes of `−Δ`
//! on the non-shear space.

use alloc::vec::Vec;
use num_complex::Complex64;

use crate::field::SpectralField;
use crate::grid::TorusGrid;
use crate::{Error, Result};

/// Tags for the orthogonal projections of the theory.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProjectionTag {
    /// x-average (shear part, `k = 0`).
    P0,
    /// Non-shear part, `ω − (α/2π)∫ω dx`.
    Pneq0,
    /// span{cos x, sin x}: the non-shear modes with `k²α² + m² = 1` (the
    /// kernel of `1 + Δ⁻¹` inside the non-shear space; empty when `1/α` is
    /// not an integer).
    P1,
    /// span{cos y, sin y} — the `(0, ±1)` modes.
    P2,
    /// span{cos x, sin x, cos y, sin y}.
    P3,
    /// First `N` eigenmodes of `−Δ` restricted to the non-shear space.
    PN(usize),
    /// Same, skipping the span{cos x, sin x} kernel modes (the non-shear
    /// space with anomalous modes removed).
    PNonX1(usize),
}

/// Whether `(k, m)` spans the physical `cos x / sin x` plane on this grid.
#[inline]
fn is_anomalous(grid: &TorusGrid, k: i64, m: i64) -> bool {
    k != 0 && m == 0 && ((k.abs() as f64) * grid.alpha() - 1.0).abs() < 1e-9
}

/// Apply the orthogonal projection `tag` to `omega`.
pub fn project(omega: &SpectralField, tag: ProjectionTag) -> Result<SpectralField> {
    let g = *omega.grid();
    match tag {
        ProjectionTag::P0 => Ok(omega.map_modes(|k, _, c| if k == 0 { c } else { Complex64::ZERO })),
        ProjectionTag::Pneq0 => {
            Ok(omega.map_modes(|k, _, c| if k != 0 { c } else { Complex64::ZERO }))
        }
        ProjectionTag::P1 => Ok(omega.map_modes(|k, m, c| {
            if is_anomalous(&g, k, m) {
                c
            } else {
                Complex64::ZERO
            }
        })),
        ProjectionTag::P2 => Ok(omega.map_modes(|k, m, c| {
            if k == 0 && m.abs() == 1 {
                c
            } else {
                Complex64::ZERO
            }
        })),
        ProjectionTag::P3 => Ok(omega.map_modes(|k, m, c| {
            if is_anomalous(&g, k, m) || (k == 0 && m.abs() == 1) {
                c
            } else {
                Complex64::ZERO
            }
        })),
        ProjectionTag::PN(n) => {
            let modes = low_modes(&g, n, false)?;
            Ok(keep_modes(omega, &modes))
        }
        ProjectionTag::PNonX1(n) => {
            let modes = low_modes(&g, n, true)?;
            Ok(keep_modes(omega, &modes))
        }
    }
}

fn keep_modes(omega: &SpectralField, modes: &[(i64, i64)]) -> SpectralField {
    let mut out = SpectralField::zeros(*omega.grid());
    for &(k, m) in modes {
        out.set_mode(k, m, omega.get(k, m));
    }
    out
}

/// The first `n` eigenmodes of `−Δ` on the non-shear space, ordered by
/// eigenvalue `k²α² + m²` with deterministic lexicographic tie-breaking on
/// `(|k|, |m|, sign m)` of the `k > 0` pair representative. Conjugate pairs
/// `(k, m), (−k, −m)` are enumerated adjacently so that for even `n` the
/// projection maps real fields to real fields. With `skip_anomalous`, the
/// `(±1, 0)` pair is excluded (projection built on `X₁`).
pub fn low_modes(grid: &TorusGrid, n: usize, skip_anomalous: bool) -> Result<Vec<(i64, i64)>> {
    let mut reps: Vec<(i64, i64)> = Vec::new();
    let half_x = grid.nx() as i64 / 2;
    let half_y = grid.ny() as i64 / 2;
    for k in 1..half_x {
        for m in -(half_y - 1)..half_y {
            if skip_anomalous && is_anomalous(grid, k, m) {
                continue;
            }
            reps.push((k, m));
        }
    }
    reps.sort_by(|&(k1, m1), &(k2, m2)| {
        let lam1 = (k1 * k1) as f64 * grid.alpha() * grid.alpha() + (m1 * m1) as f64;
        let lam2 = (k2 * k2) as f64 * grid.alpha() * grid.alpha() + (m2 * m2) as f64;
        lam1.partial_cmp(&lam2)
            .unwrap()
            .then((k1, m1.abs(), m1.signum()).cmp(&(k2, m2.abs(), m2.signum())))
    });
    let mut modes: Vec<(i64, i64)> = Vec::with_capacity(n);
    for (k, m) in reps {
        if modes.len() >= n {
            break;
        }
        modes.push((k, m));
        if modes.len() < n {
            modes.push((-k, -m));
        }
    }
    if n > modes.len() {
        return Err(Error::ProjectionOutOfRange {
            requested: n,
            available: modes.len(),
        });
    }
    Ok(modes)
}

/// Eigenvalue of `−Δ` for the `n`-th retained mode (1-based ordering as in
/// [`low_modes`]).
pub fn low_mode_eigenvalue(grid: &TorusGrid, n: usize, skip_anomalous: bool) -> Result<f64> {
    let modes = low_modes(grid, n, skip_anomalous)?;
    let (k, m) = modes[n - 1];
    Ok((k * k) as f64 * grid.alpha() * grid.alpha() + (m * m) as f64)
}
