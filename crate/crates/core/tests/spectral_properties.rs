//! Property suites over random fields: transform round trips, projection
//! algebra, operator symmetries, and the quadratic-form bounds behind the
//! energy method.

use num_complex::Complex64;
use proptest::prelude::*;
use shearlab_core::field::SpectralField;
use shearlab_core::flow::{dipole_flow, kolmogorov_flow, shear_flow, Domain, Profile};
use shearlab_core::grid::TorusGrid;
use shearlab_core::op::{apply_j, apply_l};
use shearlab_core::project::{project, ProjectionTag};
use shearlab_core::randfield::{random_field, Subspace};
use shearlab_core::spectral::{norms, quadrature_norm_sq, velocity_from_vorticity};

fn any_alpha() -> impl Strategy<Value = f64> {
    prop::sample::select(vec![1.0, 1.5, 2.0])
}

fn field(grid: TorusGrid, seed: u64, subspace: Subspace) -> SpectralField {
    random_field(grid, seed, 2.5, subspace).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn transform_round_trip(seed in any::<u64>(), alpha in any_alpha()) {
        let g = TorusGrid::new(alpha, 32, 32).unwrap();
        let f = field(g, seed, Subspace::MeanZero);
        let phys = f.to_physical();
        let back = SpectralField::from_physical(g, &phys).unwrap();
        prop_assert!((&back - &f).norm() <= 1e-12 * f.norm().max(1e-30));
    }

    #[test]
    fn parseval_mode_sum_matches_quadrature(seed in any::<u64>(), alpha in any_alpha()) {
        let g = TorusGrid::new(alpha, 32, 32).unwrap();
        let f = field(g, seed, Subspace::MeanZero);
        let quad = quadrature_norm_sq(&f);
        prop_assert!((quad - f.norm_sq()).abs() <= 1e-10 * f.norm_sq().max(1e-30));
    }

    #[test]
    fn projections_idempotent_orthogonal(seed in any::<u64>(), alpha in any_alpha()) {
        let g = TorusGrid::new(alpha, 32, 32).unwrap();
        let f = field(g, seed, Subspace::MeanZero);
        for tag in [
            ProjectionTag::P0,
            ProjectionTag::Pneq0,
            ProjectionTag::P1,
            ProjectionTag::P2,
            ProjectionTag::P3,
            ProjectionTag::PN(12),
            ProjectionTag::PNonX1(12),
        ] {
            let p = project(&f, tag).unwrap();
            let pp = project(&p, tag).unwrap();
            prop_assert!((&pp - &p).norm() <= 1e-12 * f.norm().max(1e-30));
            let q = &f - &p;
            prop_assert!(p.inner(&q).abs() <= 1e-12 * f.norm_sq().max(1e-30));
        }
    }

    #[test]
    fn bar_energy_form_positive_above_critical(seed in any::<u64>()) {
        // ⟨Lω, ω⟩ ≥ (1 − α⁻²)‖ω‖² on non-shear data for α = 2.
        let g = TorusGrid::new(2.0, 32, 32).unwrap();
        let flow = kolmogorov_flow(2.0);
        let f = field(g, seed, Subspace::NonShear);
        let lf = apply_l(&flow, &f).unwrap();
        let inner = lf.inner(&f);
        prop_assert!(inner >= (1.0 - 0.25) * f.norm_sq() - 1e-12);
        let nb = norms(&flow, &f).unwrap();
        prop_assert!((nb.inner_l - inner).abs() <= 1e-10 * inner.abs().max(1e-30));
        prop_assert!(!nb.indefinite);
    }

    #[test]
    fn x1_form_controls_y_h1(seed in any::<u64>()) {
        // ∫|∇ω|² − |ω|² ≥ min{1, α²−1}·(‖ω‖² + ‖∂_yω‖²) on non-shear data
        // (the H¹ norm in the per-mode y-variable).
        let g = TorusGrid::new(2.0, 32, 32).unwrap();
        let flow = kolmogorov_flow(2.0);
        let f = field(g, seed, Subspace::NonShear);
        let nb = norms(&flow, &f).unwrap();
        let y_h1 = f.norm_sq() + f.y_deriv().norm_sq();
        prop_assert!(nb.x1_sq >= 1.0 * y_h1 - 1e-10 * y_h1.max(1e-30));
    }

    #[test]
    fn advection_operators_are_anti_selfadjoint(seed in any::<u64>()) {
        let g1 = TorusGrid::new(1.0, 32, 32).unwrap();
        let g2 = TorusGrid::new(2.0, 32, 32).unwrap();
        let shear = shear_flow(Profile::SinY, Domain::Torus, None).unwrap();
        for (grid, flow) in [
            (g1, kolmogorov_flow(1.0)),
            (g1, dipole_flow()),
            (g2, shear),
        ] {
            let f = field(grid, seed, Subspace::NonShear);
            let h = field(grid, seed.wrapping_add(101), Subspace::NonShear);
            let jf = apply_j(&flow, &f).unwrap();
            let jh = apply_j(&flow, &h).unwrap();
            let skew = jf.inner(&h) + f.inner(&jh);
            prop_assert!(
                skew.abs() <= 1e-10 * f.norm() * h.norm(),
                "skew residual {skew:e}"
            );
        }
    }

    #[test]
    fn recovered_velocity_is_incompressible(seed in any::<u64>(), alpha in any_alpha()) {
        let g = TorusGrid::new(alpha, 32, 32).unwrap();
        let f = field(g, seed, Subspace::MeanZero);
        let vel = velocity_from_vorticity(&f).unwrap();
        prop_assert!(vel.divergence_residual() <= 1e-12);
    }

    #[test]
    fn bar_advection_matches_mode_shift_formula(seed in any::<u64>()) {
        // J = −sin y ∂x computed pseudo-spectrally must agree with the exact
        // coefficient recursion: (sin y·g)(k,m) = (g(k,m−1) − g(k,m+1))/(2i).
        let g = TorusGrid::new(1.5, 32, 32).unwrap();
        let flow = kolmogorov_flow(1.5);
        let f = field(g, seed, Subspace::NonShear);
        let jf = apply_j(&flow, &f).unwrap();
        let dx = f.x_deriv();
        let mut expect = SpectralField::zeros(g);
        let (kcut, mcut) = g.dealias_cut();
        for k in -kcut..=kcut {
            for m in -mcut..=mcut {
                let shift = (dx.get(k, m - 1) - dx.get(k, m + 1)) / Complex64::new(0.0, 2.0);
                expect.set_mode(k, m, -shift);
            }
        }
        prop_assert!((&jf - &expect).norm() <= 1e-12 * f.norm().max(1e-30));
    }

    #[test]
    fn bar_l_annihilates_anomalous_plane(seed in any::<u64>()) {
        // On the square torus, L kills exactly the span of cos x, sin x.
        let g = TorusGrid::new(1.0, 32, 32).unwrap();
        let flow = kolmogorov_flow(1.0);
        let f = field(g, seed, Subspace::NonShear);
        let p1 = project(&f, ProjectionTag::P1).unwrap();
        let lp = apply_l(&flow, &p1).unwrap();
        prop_assert!(lp.norm() <= 1e-13 * f.norm().max(1e-30));
    }
}

#[test]
fn inflection_value_is_in_reported_set_for_k_plus_flows() {
    for flow in [
        shear_flow(Profile::SinY, Domain::Torus, None).unwrap(),
        shear_flow(Profile::Tanh, Domain::Channel { y1: -3.0, y2: 3.0 }, None).unwrap(),
    ] {
        let rep = flow.find_inflection_values();
        assert!(
            rep.distinct_values
                .iter()
                .any(|&v| (v - flow.u_s).abs() < 1e-7),
            "U_s = {} not among {:?}",
            flow.u_s,
            rep.distinct_values
        );
    }
}
