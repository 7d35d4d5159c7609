//! The Hamiltonian pair of the linearized Euler equation at a background
//! flow: the anti-selfadjoint advection operator `J` and the selfadjoint
//! energy operator `L`, with the evolution written as `ω_t = JLω`.
//!
//! Per flow family:
//!
//! * bar state: `J = −sin y ∂x`, `L = 1 + Δ⁻¹`;
//! * dipole:    `J = sin y ∂x − sin x ∂y`, `L = 1 + Δ⁻¹`;
//! * class K⁺:  `J = U'' ∂x`, `L = 1/K₂ − (−Δ)⁻¹`;
//! * class 1:   `J = −U'' ∂x`, `L = 1/K₁ + (−Δ)⁻¹`.

use alloc::format;
use alloc::vec::Vec;

use crate::field::{SpectralCtx, SpectralField};
use crate::flow::{BaseFlow, FlowKind, Profile};
use crate::spectral::poisson_solve;
use crate::{Error, Result};

/// Apply the energy operator `L` of the flow.
pub fn apply_l(flow: &BaseFlow, omega: &SpectralField) -> Result<SpectralField> {
    let ctx = SpectralCtx::new(omega.grid());
    apply_l_with(&ctx, flow, omega)
}

pub fn apply_l_with(
    ctx: &SpectralCtx,
    flow: &BaseFlow,
    omega: &SpectralField,
) -> Result<SpectralField> {
    omega.require_mean_zero()?;
    match flow.kind {
        FlowKind::KolmogorovBar | FlowKind::Dipole => {
            // Lω = ω + Δ⁻¹ω = (1 − 1/(k²α² + m²)) ω̂ modewise.
            Ok(omega.map_modes_with_grid(|lam, c| {
                if lam > 0.0 {
                    c * (1.0 - 1.0 / lam)
                } else {
                    c * 0.0
                }
            }))
        }
        FlowKind::ShearKPlus | FlowKind::ShearNoInflection => {
            let inv_kernel = kernel_reciprocal(flow, omega)?;
            let weighted = omega.mul_profile_with(ctx, &inv_kernel);
            let psi = poisson_solve(omega)?;
            let mut out = weighted;
            if flow.kind == FlowKind::ShearKPlus {
                out.axpy(-1.0, &psi);
            } else {
                out.axpy(1.0, &psi);
            }
            out.zero_mean();
            Ok(out)
        }
    }
}

fn kernel_reciprocal(flow: &BaseFlow, omega: &SpectralField) -> Result<Vec<f64>> {
    let kv = flow.kernel_values(&omega.grid().y_nodes())?;
    if let Some(&bad) = kv.iter().find(|&&k| !(k > 0.0) || !k.is_finite()) {
        return Err(Error::KernelNotPositive(format!(
            "kernel value {bad:e} at a collocation point; class K+ needs K2 > 0 and bounded"
        )));
    }
    Ok(kv.iter().map(|&k| 1.0 / k).collect())
}

/// Apply the advection operator `J` of the flow (pseudo-spectral, dealiased,
/// mean re-zeroed).
pub fn apply_j(flow: &BaseFlow, omega: &SpectralField) -> Result<SpectralField> {
    let ctx = SpectralCtx::new(omega.grid());
    apply_j_with(&ctx, flow, omega)
}

pub fn apply_j_with(
    ctx: &SpectralCtx,
    flow: &BaseFlow,
    omega: &SpectralField,
) -> Result<SpectralField> {
    omega.require_mean_zero()?;
    let g = *omega.grid();
    let ys = g.y_nodes();
    // sin-profile products are exact single-mode shifts; they coincide with
    // the dealiased pseudo-spectral product and skip the transforms.
    let mut out = match flow.kind {
        FlowKind::KolmogorovBar => &omega.x_deriv().shift_mul_sin_y() * -1.0,
        FlowKind::Dipole => {
            require_square_torus(&g)?;
            let term_x = omega.x_deriv().shift_mul_sin_y();
            let term_y = omega.y_deriv().shift_mul_sin_x();
            &term_x - &term_y
        }
        FlowKind::ShearKPlus | FlowKind::ShearNoInflection => {
            let sign = if flow.kind == FlowKind::ShearKPlus {
                1.0
            } else {
                -1.0
            };
            if flow.profile == Profile::SinY && flow.domain.is_periodic() {
                // U'' = −sin y
                &omega.x_deriv().shift_mul_sin_y() * -sign
            } else {
                let w: Vec<f64> = ys.iter().map(|&y| sign * flow.profile.d2u(y)).collect();
                omega.x_deriv().mul_profile_with(ctx, &w)
            }
        }
    };
    out.zero_mean();
    Ok(out)
}

/// `JLω`, the inviscid linearized evolution operator.
pub fn apply_jl(flow: &BaseFlow, omega: &SpectralField) -> Result<SpectralField> {
    let ctx = SpectralCtx::new(omega.grid());
    apply_jl_with(&ctx, flow, omega)
}

pub fn apply_jl_with(
    ctx: &SpectralCtx,
    flow: &BaseFlow,
    omega: &SpectralField,
) -> Result<SpectralField> {
    match flow.kind {
        // For the shear classes, JL collapses to the advective frame form
        // −(U − U_s)∂xω − U''∂xψ, which avoids dividing by the kernel at
        // critical points. One fused physical pass: 3 transforms.
        FlowKind::ShearKPlus | FlowKind::ShearNoInflection => {
            omega.require_mean_zero()?;
            if flow.kind == FlowKind::ShearKPlus
                && flow.profile == Profile::SinY
                && flow.domain.is_periodic()
            {
                // U − U_s = sin y, U'' = −sin y: JL = −sin y ∂x(ω − ψ)
                let psi = poisson_solve(omega)?;
                let mut out = &(omega - &psi).x_deriv().shift_mul_sin_y() * -1.0;
                out.zero_mean();
                return Ok(out);
            }
            let g = *omega.grid();
            let ys = g.y_nodes();
            let adv: Vec<f64> = ys.iter().map(|&y| -(flow.profile.u(y) - flow.u_s)).collect();
            let curv: Vec<f64> = ys.iter().map(|&y| -flow.profile.d2u(y)).collect();
            let psi = poisson_solve(omega)?;
            let dxo = omega.x_deriv().to_physical_with(ctx);
            let dxp = psi.x_deriv().to_physical_with(ctx);
            let nx = g.nx();
            let combined: Vec<f64> = dxo
                .iter()
                .zip(dxp.iter())
                .enumerate()
                .map(|(i, (a, b))| adv[i / nx] * a + curv[i / nx] * b)
                .collect();
            let mut out = SpectralField::from_physical_with(ctx, g, &combined);
            out.dealias();
            out.zero_mean();
            Ok(out)
        }
        FlowKind::KolmogorovBar => {
            omega.require_mean_zero()?;
            Ok(bar_jl_fused(omega))
        }
        FlowKind::Dipole => {
            let l = apply_l_with(ctx, flow, omega)?;
            apply_j_with(ctx, flow, &l)
        }
    }
}

/// Fused `−sin y ∂x (1 + Δ⁻¹) ω` for the bar state: the diagonal energy
/// operator and x-derivative in one pass, then the exact sin-y shift.
fn bar_jl_fused(omega: &SpectralField) -> SpectralField {
    let g = *omega.grid();
    let (nx, ny) = (g.nx(), g.ny());
    let mut d = SpectralField::zeros(g);
    for iy in 0..ny {
        for ix in 0..nx {
            let i = g.idx(iy, ix);
            let lam = g.neg_lap(iy, ix);
            if lam > 0.0 {
                let weight = (1.0 - 1.0 / lam) * g.kx(ix);
                // i·kx·(1 − 1/λ)·ω
                let c = omega.coeffs()[i];
                d.coeffs_mut()[i] = num_complex::Complex64::new(-weight * c.im, weight * c.re);
            }
        }
    }
    // −(sin y · d): −(d(k, m−1) − d(k, m+1))/(2i)
    let (kcut, mcut) = g.dealias_cut();
    let mut out = SpectralField::zeros(g);
    let scale = num_complex::Complex64::new(0.0, 0.5); // −1/(2i)
    for iy in 0..ny {
        let m = g.m_int(iy);
        if m.abs() > mcut {
            continue;
        }
        let row_dn = g.row_of_m(m - 1);
        let row_up = g.row_of_m(m + 1);
        for ix in 0..nx {
            if g.k_int(ix).abs() > kcut {
                continue;
            }
            let lo = row_dn.map_or(num_complex::Complex64::ZERO, |r| d.coeffs()[g.idx(r, ix)]);
            let hi = row_up.map_or(num_complex::Complex64::ZERO, |r| d.coeffs()[g.idx(r, ix)]);
            out.coeffs_mut()[g.idx(iy, ix)] = (lo - hi) * scale;
        }
    }
    out.zero_mean();
    out
}

fn require_square_torus(g: &crate::grid::TorusGrid) -> Result<()> {
    if (g.alpha() - 1.0).abs() > 1e-12 {
        return Err(Error::Grid(format!(
            "dipole flow requires the square torus (alpha = 1), got alpha = {}",
            g.alpha()
        )));
    }
    Ok(())
}

impl SpectralField {
    /// Map coefficients by the `−Δ` eigenvalue: `c' = f(k²α² + m², c)`.
    fn map_modes_with_grid(
        &self,
        f: impl Fn(f64, num_complex::Complex64) -> num_complex::Complex64,
    ) -> SpectralField {
        let g = *self.grid();
        let mut out = self.clone();
        for iy in 0..g.ny() {
            for ix in 0..g.nx() {
                let i = g.idx(iy, ix);
                out.coeffs_mut()[i] = f(g.neg_lap(iy, ix), self.coeffs()[i]);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::{dipole_flow, kolmogorov_flow, shear_flow, Domain, Profile};
    use crate::grid::TorusGrid;

    #[test]
    fn bar_l_annihilates_anomalous_modes() {
        let g = TorusGrid::new(1.0, 32, 32).unwrap();
        let flow = kolmogorov_flow(1.0);
        let w = SpectralField::harmonic(g, 1, 0, 1.0, 0.0); // cos x
        let lw = apply_l(&flow, &w).unwrap();
        assert!(lw.norm() < 1e-14);
        let s = SpectralField::harmonic(g, 1, 0, 1.0, -core::f64::consts::FRAC_PI_2); // sin x
        assert!(apply_l(&flow, &s).unwrap().norm() < 1e-14);
    }

    #[test]
    fn bar_l_is_diagonal_with_mode_weight() {
        let g = TorusGrid::new(1.0, 32, 32).unwrap();
        let flow = kolmogorov_flow(1.0);
        let w = SpectralField::harmonic(g, 2, 1, 1.3, 0.4);
        let lw = apply_l(&flow, &w).unwrap();
        let expect = &w * (1.0 - 1.0 / 5.0);
        assert!((&lw - &expect).norm() < 1e-13);
    }

    #[test]
    fn shear_l_diagonalizes_on_constant_kernel() {
        // U = sin y as class K⁺ (K₂ ≡ 1): L = 1 − (−Δ)⁻¹ on mode (1,1), α = 2
        // is (1 − 1/5)·ω.
        let g = TorusGrid::new(2.0, 32, 32).unwrap();
        let flow = shear_flow(Profile::SinY, Domain::Torus, None).unwrap();
        let w = SpectralField::harmonic(g, 1, 1, 1.0, 0.2);
        let lw = apply_l(&flow, &w).unwrap();
        let expect = &w * (1.0 - 1.0 / 5.0);
        assert!((&lw - &expect).norm() < 1e-10);
    }

    #[test]
    fn bar_j_of_cos_ax() {
        // J(cos αx) = α sin y sin(αx)
        let g = TorusGrid::new(1.5, 48, 48).unwrap();
        let flow = kolmogorov_flow(1.5);
        let w = SpectralField::harmonic(g, 1, 0, 1.0, 0.0);
        let jw = apply_j(&flow, &w).unwrap();
        let expect = SpectralField::from_fn(g, |x, y| {
            1.5 * crate::fmath::sin(y) * crate::fmath::sin(1.5 * x)
        });
        assert!((&jw - &expect).norm() < 1e-12);
    }

    #[test]
    fn bar_j_kills_shear_fields() {
        let g = TorusGrid::new(1.0, 32, 32).unwrap();
        let flow = kolmogorov_flow(1.0);
        let w = SpectralField::from_fn(g, |_, y| crate::fmath::cos(2.0 * y) - crate::fmath::sin(y));
        assert!(apply_j(&flow, &w).unwrap().norm() < 1e-13);
    }

    #[test]
    fn dipole_j_annihilates_its_stream_function() {
        let g = TorusGrid::new(1.0, 32, 32).unwrap();
        let flow = dipole_flow();
        let w = SpectralField::from_fn(g, |x, y| crate::fmath::cos(x) + crate::fmath::cos(y));
        let jw = apply_j(&flow, &w).unwrap();
        assert!(jw.norm() < 1e-13);
    }

    #[test]
    fn dipole_l_kernel_is_four_dimensional() {
        // ker L = span{cos x, sin x, cos y, sin y}; everything else survives.
        let g = TorusGrid::new(1.0, 32, 32).unwrap();
        let flow = dipole_flow();
        let kernel = SpectralField::from_fn(g, |x, y| {
            crate::fmath::cos(x) + crate::fmath::sin(x) + crate::fmath::cos(y)
                + crate::fmath::sin(y)
        });
        assert!(apply_l(&flow, &kernel).unwrap().norm() < 1e-13);
        let outside = SpectralField::harmonic(g, 1, 1, 1.0, 0.0);
        assert!(apply_l(&flow, &outside).unwrap().norm() > 0.4);
    }

    #[test]
    fn dipole_velocity_vanishes_at_origin() {
        // ∇⊥ψ₀ = (−sin y, sin x) is zero at (0, 0).
        let g = TorusGrid::new(1.0, 32, 32).unwrap();
        let w = SpectralField::from_fn(g, |x, y| crate::fmath::cos(x) + crate::fmath::cos(y));
        let vel = crate::spectral::velocity_from_vorticity(&w).unwrap();
        let u = vel.u.to_physical();
        let v = vel.v.to_physical();
        assert!(u[0].abs() < 1e-12 && v[0].abs() < 1e-12);
    }

    #[test]
    fn dipole_requires_square_torus() {
        let g = TorusGrid::new(2.0, 16, 16).unwrap();
        let flow = dipole_flow();
        let w = SpectralField::harmonic(g, 1, 1, 1.0, 0.0);
        assert!(apply_j(&flow, &w).is_err());
    }

    #[test]
    fn shear_jl_matches_j_of_l() {
        let g = TorusGrid::new(2.0, 32, 32).unwrap();
        let flow = shear_flow(Profile::SinY, Domain::Torus, None).unwrap();
        let w = SpectralField::from_fn(g, |x, y| {
            crate::fmath::sin(2.0 * x + y) + 0.3 * crate::fmath::cos(4.0 * x - 2.0 * y)
        });
        let direct = apply_jl(&flow, &w).unwrap();
        let composed = apply_j(&flow, &apply_l(&flow, &w).unwrap()).unwrap();
        assert!((&direct - &composed).norm() < 1e-9 * w.norm().max(1.0));
    }

    #[test]
    fn bar_jl_agrees_with_shear_frame_form() {
        // The bar state is the K⁺ flow U = sin y; both code paths must agree.
        let g = TorusGrid::new(2.0, 32, 32).unwrap();
        let bar = kolmogorov_flow(2.0);
        let shear = shear_flow(Profile::SinY, Domain::Torus, None).unwrap();
        let w = SpectralField::from_fn(g, |x, y| crate::fmath::sin(2.0 * x) * crate::fmath::cos(y));
        let a = apply_jl(&bar, &w).unwrap();
        let b = apply_jl(&shear, &w).unwrap();
        assert!((&a - &b).norm() < 1e-10);
    }
}
