//! Spectral calculus: Laplacian inversion, velocity recovery, and the energy
//! norms attached to each background flow.

use num_complex::Complex64;

use crate::field::{SpectralCtx, SpectralField, VelocityField};
use crate::flow::{BaseFlow, FlowKind};
use crate::fmath;
use crate::Result;

/// Stream function `ψ` with `ω = −Δψ`: `ψ̂ = ω̂/(k²α² + m²)`, `ψ̂(0,0) = 0`.
pub fn poisson_solve(omega: &SpectralField) -> Result<SpectralField> {
    omega.require_mean_zero()?;
    let g = *omega.grid();
    let mut psi = omega.clone();
    for iy in 0..g.ny() {
        for ix in 0..g.nx() {
            let i = g.idx(iy, ix);
            let lam = g.neg_lap(iy, ix);
            psi.coeffs_mut()[i] = if lam > 0.0 {
                omega.coeffs()[i] / lam
            } else {
                Complex64::ZERO
            };
        }
    }
    Ok(psi)
}

/// Velocity `U = ∇⊥ψ = (ψ_y, −ψ_x)` of a mean-zero vorticity.
pub fn velocity_from_vorticity(omega: &SpectralField) -> Result<VelocityField> {
    let psi = poisson_solve(omega)?;
    Ok(VelocityField {
        u: psi.y_deriv(),
        v: &psi.x_deriv() * -1.0,
    })
}

/// The quadratic forms attached to a flow, evaluated on one field.
///
/// For the bar state and the dipole, `x_sq = ⟨(1 + Δ⁻¹)ω, ω⟩` and
/// `x1_sq = ⟨(−Δ − 1)ω, ω⟩`; both can be negative outside the subspace
/// where they are definite, in which case `indefinite` is set. For shear
/// classes `x_sq` is the weighted norm `‖ω/√K‖²` and `inner_l` the energy
/// form of the corresponding operator `L`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormBundle {
    pub l2: f64,
    pub h1: f64,
    pub x_sq: f64,
    pub x1_sq: f64,
    pub inner_l: f64,
    pub indefinite: bool,
}

impl NormBundle {
    /// `‖ω‖_X` when the form is nonnegative.
    pub fn x(&self) -> Option<f64> {
        (self.x_sq >= 0.0).then(|| fmath::sqrt(self.x_sq))
    }

    pub fn x1(&self) -> Option<f64> {
        (self.x1_sq >= 0.0).then(|| fmath::sqrt(self.x1_sq))
    }
}

pub fn norms(flow: &BaseFlow, omega: &SpectralField) -> Result<NormBundle> {
    let ctx = SpectralCtx::new(omega.grid());
    norms_with(&ctx, flow, omega)
}

pub fn norms_with(ctx: &SpectralCtx, flow: &BaseFlow, omega: &SpectralField) -> Result<NormBundle> {
    let g = *omega.grid();
    let l2_sq = omega.norm_sq();
    let h1_sq = l2_sq + omega.grad_norm_sq();

    // Bar-state forms as mode sums, exact on the retained modes.
    let mut x_form = 0.0;
    let mut x1_form = 0.0;
    let mut x_neg = 0.0;
    let mut x1_neg = 0.0;
    for iy in 0..g.ny() {
        for ix in 0..g.nx() {
            let lam = g.neg_lap(iy, ix);
            if lam == 0.0 {
                continue;
            }
            let p = omega.coeffs()[g.idx(iy, ix)].norm_sqr() * g.area();
            let wx = 1.0 - 1.0 / lam;
            let wx1 = lam - 1.0;
            x_form += wx * p;
            x1_form += wx1 * p;
            if wx < 0.0 {
                x_neg += wx * p;
            }
            if wx1 < 0.0 {
                x1_neg += wx1 * p;
            }
        }
    }

    match flow.kind {
        FlowKind::KolmogorovBar | FlowKind::Dipole => {
            let indefinite = x_neg < -1e-14 * l2_sq.max(1.0) || x1_neg < -1e-14 * h1_sq.max(1.0);
            Ok(NormBundle {
                l2: fmath::sqrt(l2_sq),
                h1: fmath::sqrt(h1_sq),
                x_sq: x_form,
                x1_sq: x1_form,
                inner_l: x_form,
                indefinite,
            })
        }
        FlowKind::ShearKPlus | FlowKind::ShearNoInflection => {
            let kv = flow.kernel_values(&g.y_nodes())?;
            let phys = omega.to_physical_with(ctx);
            let (dx, dy) = g.spacing();
            let nx = g.nx();
            let weighted: f64 = phys
                .iter()
                .enumerate()
                .map(|(i, &v)| v * v / kv[i / nx])
                .sum::<f64>()
                * dx
                * dy;
            let psi = poisson_solve(omega)?;
            let psi_omega = psi.inner(omega);
            let inner_l = if flow.kind == FlowKind::ShearKPlus {
                weighted - psi_omega
            } else {
                weighted + psi_omega
            };
            Ok(NormBundle {
                l2: fmath::sqrt(l2_sq),
                h1: fmath::sqrt(h1_sq),
                x_sq: weighted,
                x1_sq: x1_form,
                inner_l,
                indefinite: inner_l < -1e-12 * h1_sq.max(1.0),
            })
        }
    }
}

/// `∫ f² dxdy` by physical-space quadrature (exact for band-limited data on
/// the periodic grid); cross-checks the mode sums.
pub fn quadrature_norm_sq(omega: &SpectralField) -> f64 {
    let g = omega.grid();
    let (dx, dy) = g.spacing();
    omega.to_physical().iter().map(|v| v * v).sum::<f64>() * dx * dy
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::kolmogorov_flow;
    use crate::grid::TorusGrid;

    #[test]
    fn poisson_single_modes() {
        let g = TorusGrid::new(1.0, 32, 32).unwrap();
        // ω = cos y → ψ = cos y
        let w = SpectralField::harmonic(g, 0, 1, 1.0, 0.0);
        let psi = poisson_solve(&w).unwrap();
        assert!((&psi - &w).norm() < 1e-13);
        // ω = cos 2y → ψ = cos 2y / 4
        let w2 = SpectralField::harmonic(g, 0, 2, 1.0, 0.0);
        let psi2 = poisson_solve(&w2).unwrap();
        assert!((&psi2 - &(&w2 * 0.25)).norm() < 1e-13);
        // mode (k, m): ψ = ω/(k²α² + m²)
        let g2 = TorusGrid::new(2.0, 32, 32).unwrap();
        let w3 = SpectralField::harmonic(g2, 1, 1, 1.0, 0.3);
        let psi3 = poisson_solve(&w3).unwrap();
        assert!((&psi3 - &(&w3 * (1.0 / 5.0))).norm() < 1e-13);
    }

    #[test]
    fn poisson_rejects_nonzero_mean() {
        let g = TorusGrid::new(1.0, 16, 16).unwrap();
        let mut w = SpectralField::harmonic(g, 0, 1, 1.0, 0.0);
        w.add_mode(0, 0, Complex64::new(0.5, 0.0));
        assert!(poisson_solve(&w).is_err());
    }

    #[test]
    fn poisson_inverts_negative_laplacian() {
        let g = TorusGrid::new(1.5, 24, 24).unwrap();
        let w = SpectralField::from_fn(g, |x, y| {
            crate::fmath::sin(1.5 * x) * crate::fmath::cos(2.0 * y) + crate::fmath::cos(3.0 * y)
        });
        let psi = poisson_solve(&w).unwrap();
        // −Δψ = ω mode-exact
        let g2 = *w.grid();
        for iy in 0..g2.ny() {
            for ix in 0..g2.nx() {
                let lam = g2.neg_lap(iy, ix);
                let i = g2.idx(iy, ix);
                let lhs = psi.coeffs()[i] * lam;
                assert!((lhs - w.coeffs()[i]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn velocity_of_cos_y_is_minus_sin_y() {
        let g = TorusGrid::new(1.0, 32, 32).unwrap();
        let w = SpectralField::harmonic(g, 0, 1, 1.0, 0.0);
        let vel = velocity_from_vorticity(&w).unwrap();
        let expect_u = SpectralField::from_fn(g, |_, y| -crate::fmath::sin(y));
        assert!((&vel.u - &expect_u).norm() < 1e-13);
        assert!(vel.v.norm() < 1e-13);
        assert!(vel.divergence_residual() < 1e-13);
    }

    #[test]
    fn velocity_of_cos_x_is_sin_x_vertical() {
        let g = TorusGrid::new(1.0, 32, 32).unwrap();
        let w = SpectralField::harmonic(g, 1, 0, 1.0, 0.0);
        let vel = velocity_from_vorticity(&w).unwrap();
        let expect_v = SpectralField::from_fn(g, |x, _| crate::fmath::sin(x));
        assert!((&vel.v - &expect_v).norm() < 1e-13);
        assert!(vel.u.norm() < 1e-13);
    }

    #[test]
    fn zero_vorticity_gives_zero_velocity() {
        let g = TorusGrid::new(1.0, 16, 16).unwrap();
        let vel = velocity_from_vorticity(&SpectralField::zeros(g)).unwrap();
        assert_eq!(vel.energy(), 0.0);
    }

    #[test]
    fn single_mode_x_norm_weight() {
        // α = 2, ω = e^{i(αx + y)} + c.c.: ‖ω‖²_X = (1 − 1/5)‖ω‖²
        let g = TorusGrid::new(2.0, 32, 32).unwrap();
        let flow = kolmogorov_flow(2.0);
        let w = SpectralField::harmonic(g, 1, 1, 1.0, 0.0);
        let nb = norms(&flow, &w).unwrap();
        assert!((nb.x_sq - 0.8 * nb.l2 * nb.l2).abs() < 1e-12 * nb.l2 * nb.l2);
        assert!(!nb.indefinite);
        assert!((nb.x().unwrap().powi(2) - nb.inner_l).abs() < 1e-12);
    }
}
