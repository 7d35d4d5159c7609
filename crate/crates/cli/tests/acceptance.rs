//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the measured numbers. Tolerances are fixed here, not tuned at runtime.
//!
//! The heavy criteria integrate the PDEs at desk scale (64² grids); the
//! whole suite is expected to finish in a few minutes.

use std::time::Instant;

use shearlab_core::diagnostics::{
    component_split, dissipation_residual, enhanced_damping_metric, fit_exponential_decay,
    fit_loglog_slope, rage_average, time_average, z_norm, Probe, TimeSeriesRecord,
};
use shearlab_core::dynamics::{
    cfl_bound, evolve, evolve_with_hook, EvolutionModel, ModelTag, SimState, Stepper,
};
use shearlab_core::field::SpectralField;
use shearlab_core::flow::{kolmogorov_flow, shear_flow, Domain, Profile};
use shearlab_core::grid::TorusGrid;
use shearlab_core::op::{apply_j, apply_l};
use shearlab_core::project::{project, ProjectionTag};
use shearlab_core::randfield::{random_field, Subspace};
use shearlab_core::spectral::{quadrature_norm_sq, velocity_from_vorticity};
use shearlab_core::stability::{
    apply_block_projector, center_space, embedded_eigenvalue_scan, index_check, unstable_modes,
    Bc,
};

fn grid(alpha: f64) -> TorusGrid {
    TorusGrid::new(alpha, 64, 64).unwrap()
}

fn run(
    tag: ModelTag,
    alpha: f64,
    nu: f64,
    omega: SpectralField,
    t_end: f64,
    cadence: f64,
    probes: &[Probe],
) -> (SimState, TimeSeriesRecord) {
    let model = EvolutionModel::new(tag, nu, kolmogorov_flow(alpha)).unwrap();
    let state = SimState::new(model, omega);
    let dt = 0.9 * cfl_bound(&state);
    evolve(state, t_end, dt, cadence, probes).unwrap()
}

fn subsample(record: &TimeSeriesRecord, stride: usize) -> TimeSeriesRecord {
    TimeSeriesRecord {
        times: record.times.iter().copied().step_by(stride).collect(),
        names: record.names.clone(),
        columns: record
            .columns
            .iter()
            .map(|c| c.iter().copied().step_by(stride).collect())
            .collect(),
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |a, x| a.max(x.abs()))
}

// ---------------------------------------------------------------------------

#[test]
fn criterion_01_dissipation_identity() {
    let probes = [Probe::InnerL, Probe::GradForm, Probe::H1];
    let fine_cadence = 5e-3;
    let mut lines = Vec::new();
    for (tag, alpha, amp) in [
        (ModelTag::LnsBar, 1.0, 1.0),
        (ModelTag::LnsBar, 1.5, 1.0),
        (ModelTag::Nse, 1.0, 1e-2),
        (ModelTag::Nse, 1.5, 1e-2),
    ] {
        let started = Instant::now();
        let nu = 1e-2;
        let mut w = random_field(grid(alpha), 11, 2.0, Subspace::NonShear).unwrap();
        w.scale(amp / w.norm());
        let (_, record) = run(tag, alpha, nu, w, 10.0, fine_cadence, &probes);
        let coarse = subsample(&record, 2);
        let res_coarse = dissipation_residual(&coarse, nu).unwrap();
        let res_fine = dissipation_residual(&record, nu).unwrap();
        let max_coarse = max_abs(&res_coarse.relative);
        let max_fine = max_abs(&res_fine.relative);
        let order_ratio = max_coarse / max_fine.max(1e-300);
        let elapsed = started.elapsed().as_secs_f64();
        assert!(
            max_coarse <= 1e-3,
            "{tag:?} alpha={alpha}: relative residual {max_coarse:e} exceeds 1e-3"
        );
        assert!(
            order_ratio > 2.0,
            "{tag:?} alpha={alpha}: cadence halving gave ratio {order_ratio}, expected ~4 (2nd order)"
        );
        assert!(elapsed <= 60.0, "run exceeded 1 minute: {elapsed}s");
        lines.push(format!(
            "{:?} alpha={alpha}: max|r|_rel = {max_coarse:.2e} at cadence 1e-2, halving ratio {order_ratio:.2}, {elapsed:.1}s",
            tag
        ));
    }
    println!("criterion 01 (dissipation identity): PASS");
    for l in lines {
        println!("    {l}");
    }
}

#[test]
fn criterion_02_energy_form_conserved_inviscid() {
    let g = grid(2.0);
    let w = random_field(g, 7, 2.0, Subspace::NonShear).unwrap();
    let model = EvolutionModel::new(ModelTag::LinEulerBar, 0.0, kolmogorov_flow(2.0)).unwrap();
    let state = SimState::new(model, w);
    let (_, record) = evolve(state, 50.0, 1e-3, 0.5, &[Probe::InnerL]).unwrap();
    let col = record.column("inner_l").unwrap();
    let drift = col
        .iter()
        .fold(0.0f64, |a, &v| a.max((v - col[0]).abs() / col[0].abs()));
    assert!(drift <= 1e-6, "relative drift {drift:e} over t in [0,50]");
    println!(
        "criterion 02 (inviscid conservation): PASS — max relative drift {drift:.2e} at dt=1e-3"
    );
}

#[test]
fn criterion_03_heat_reduction() {
    let g = grid(1.0);
    let nu = 1e-2;
    let t_end = 1.0;
    let mut errs = Vec::new();
    for m in 1..=3i64 {
        let w = SpectralField::harmonic(g, 0, m, 1.0, 0.0);
        let model = EvolutionModel::new(ModelTag::LnsBar, nu, kolmogorov_flow(1.0)).unwrap();
        let mut state = SimState::new(model, w.clone());
        let mut stepper = Stepper::new(&state);
        let steps = 100usize;
        for _ in 0..steps {
            stepper.step(&mut state, t_end / steps as f64).unwrap();
        }
        let expect = &w * (-nu * (m * m) as f64 * t_end).exp();
        let err = (&state.omega - &expect).norm();
        assert!(err <= 1e-8, "m={m}: heat error {err:e}");
        errs.push(format!("m={m}: {err:.1e}"));
    }
    println!(
        "criterion 03 (heat reduction): PASS — terminal errors {}",
        errs.join(", ")
    );
}

#[test]
fn criterion_04_index_formula_exact() {
    let flow = kolmogorov_flow(1.0);
    let closed_form = |alpha: f64, l: i64| -> usize {
        if (l as f64 * alpha).abs() < 1.0 {
            1
        } else {
            0
        }
    };
    let started = Instant::now();
    for &n in &[128usize, 256] {
        for &alpha in &[0.3, 0.5, 0.7, 0.9, 1.2] {
            let rep = index_check(&flow, alpha, 3, n, Bc::PeriodicTorus).unwrap();
            assert!(
                rep.identity_holds,
                "n={n} alpha={alpha}: mismatched rows {:?}",
                rep.mismatched_rows
            );
            for row in &rep.rows {
                assert_eq!(
                    row.k_ul,
                    row.n_neg,
                    "n={n} alpha={alpha} l={}: k_ul != n_neg",
                    row.l
                );
                assert_eq!(
                    row.k_ul,
                    closed_form(alpha, row.l),
                    "n={n} alpha={alpha} l={}: count differs from the closed form",
                    row.l
                );
            }
        }
    }
    println!(
        "criterion 04 (index formula k_u,l = n^-(L0 + l^2 a^2)): PASS — exact integer equality on 5x3 pairs at n=128 and n=256 ({:.1}s)",
        started.elapsed().as_secs_f64()
    );
}

#[test]
fn criterion_05_stability_above_alpha_max() {
    let flow = kolmogorov_flow(2.0);
    let scan =
        embedded_eigenvalue_scan(&flow, 2.0, 1, &[32, 64, 128], Bc::PeriodicTorus).unwrap();
    assert!(
        scan.decreasing,
        "max|Re λ| not monotone under refinement: {:?}",
        scan.rows
    );
    assert!(
        scan.final_max_re <= 1e-3,
        "final max|Re λ| = {:e}",
        scan.final_max_re
    );
    let rows: Vec<String> = scan
        .rows
        .iter()
        .map(|r| format!("n={}: {:.2e}", r.n, r.max_re))
        .collect();
    println!(
        "criterion 05 (stability above alpha_max): PASS — {}",
        rows.join(", ")
    );
}

#[test]
fn criterion_06_center_space_positivity() {
    let flow = kolmogorov_flow(0.5);
    let cs = center_space(&flow, 0.5, 1, 128, Bc::PeriodicTorus).unwrap();
    assert_eq!(cs.dim_u, 2, "dim E^u");
    assert_eq!(cs.dim_s, 2, "dim E^s");
    assert!(
        cs.min_l_quadratic_on_ec >= -1e-8,
        "min <Lw,w> on E^c = {:e}",
        cs.min_l_quadratic_on_ec
    );
    println!(
        "criterion 06 (center-space positivity): PASS — dim E^u = dim E^s = 2, min <Lw,w>|Ec = {:.3e} (n_neg on E^s+E^u = {})",
        cs.min_l_quadratic_on_ec, cs.n_neg_su
    );
}

#[test]
fn criterion_07_enhanced_damping_trend() {
    let started = Instant::now();
    let tau = 0.5;
    let nus = [1e-2, 3e-3, 1e-3];
    let mut summary = Vec::new();

    // rectangular torus, alpha = 1.5
    let mut rect = Vec::new();
    for &nu in &nus {
        let w = random_field(grid(1.5), 23, 2.0, Subspace::NonShear).unwrap();
        let horizon = tau / nu;
        let (_, record) = run(
            ModelTag::LnsBar,
            1.5,
            nu,
            w,
            horizon,
            horizon / 100.0,
            &[Probe::L2, Probe::PneqL2],
        );
        let rep = enhanced_damping_metric(&record, nu, tau, false).unwrap();
        rect.push(rep.delta_achieved);
    }
    for (i, &nu) in nus.iter().enumerate() {
        assert!(rect[i] < 1.0, "alpha=1.5 nu={nu}: ratio {} not < 1", rect[i]);
    }
    assert!(
        rect[0] > rect[1] && rect[1] > rect[2],
        "alpha=1.5 ratios not strictly decreasing in nu: {rect:?}"
    );
    summary.push(format!("alpha=1.5 ratios {rect:?}"));

    // square torus, infimum metric after removing the anomalous modes
    let mut square = Vec::new();
    for &nu in &nus {
        let w = random_field(grid(1.0), 29, 2.0, Subspace::NonShear).unwrap();
        let horizon = tau / nu;
        let (_, record) = run(
            ModelTag::LnsBar,
            1.0,
            nu,
            w,
            horizon,
            horizon / 100.0,
            &[Probe::L2, Probe::PneqL2, Probe::X1DeflL2],
        );
        let rep = enhanced_damping_metric(&record, nu, tau, true).unwrap();
        square.push(rep.delta_achieved);
    }
    for (i, &nu) in nus.iter().enumerate() {
        assert!(
            square[i] < 1.0,
            "alpha=1 nu={nu}: infimum ratio {} not < 1",
            square[i]
        );
    }
    assert!(
        square[0] > square[1] && square[1] > square[2],
        "alpha=1 ratios not strictly decreasing in nu: {square:?}"
    );
    summary.push(format!("alpha=1.0 infimum ratios {square:?}"));

    let elapsed = started.elapsed().as_secs_f64();
    assert!(elapsed <= 600.0, "criterion 7 exceeded 10 minutes: {elapsed}s");
    println!(
        "criterion 07 (enhanced damping trend): PASS — {} ({elapsed:.0}s total)",
        summary.join("; ")
    );
}

#[test]
fn criterion_08_nonlinear_metastability() {
    let alpha = 1.5;
    let nu = 3e-3;
    let tau = 0.5;
    let d = 1.0;
    let mut w = random_field(grid(alpha), 41, 2.0, Subspace::NonShear).unwrap();
    w.scale(d * nu / w.norm());
    let initial_full = w.norm();
    let horizon = tau / nu;
    let (_, record) = run(
        ModelTag::Nse,
        alpha,
        nu,
        w,
        horizon,
        horizon / 100.0,
        &[Probe::L2, Probe::PneqL2, Probe::CompE],
    );
    let pneq = record.column("pneq_l2").unwrap();
    let ratio = pneq[pneq.len() - 1] / pneq[0];
    assert!(ratio <= 0.5, "non-shear ratio at tau/nu = {ratio}");
    // Liapunov bound: the initial data is non-shear, so (I−P₂)ω(0) = ω(0).
    let l2 = record.column("l2").unwrap();
    let max_l2 = max_abs(l2);
    assert!(
        max_l2 <= 10.0 * initial_full,
        "Liapunov bound violated: max ||ω|| = {max_l2:e} vs 10·{initial_full:e}"
    );
    // fitted constant in e(t) ≤ C·d·ν (reported, not asserted)
    let fitted_c = max_abs(record.column("comp_e").unwrap()) / (d * nu);
    println!(
        "criterion 08 (nonlinear metastability): PASS — ||P≠0 ω(τ/ν)||/||P≠0 ω(0)|| = {ratio:.3}, max ||ω(t)|| = {:.2}·||(I−P₂)ω(0)||, fitted C in e(t) ≤ C·dν: {fitted_c:.2}",
        max_l2 / initial_full
    );
}

fn averaged_ratio(avg: &[(f64, f64)], t_ref: f64) -> f64 {
    let a_ref = avg
        .iter()
        .find(|(t, _)| (*t - t_ref).abs() < 1e-6)
        .expect("reference sample present")
        .1;
    avg.last().unwrap().1 / a_ref
}

#[test]
fn criterion_09_rage_decay() {
    // Rectangular torus, data in range(P_N), N = 8, alpha = 2. Filaments
    // must stay resolved over [0, 200]: the un-mixing echo of a coarse
    // y-grid floors the average, so the ratio is tracked under refinement
    // and asserted on the resolved grid.
    let mut trend = Vec::new();
    for ny in [64usize, 128, 256] {
        let g = TorusGrid::new(2.0, 64, ny).unwrap();
        let seedfield = random_field(g, 3, 3.0, Subspace::NonShear).unwrap();
        let mut w = project(&seedfield, ProjectionTag::PN(8)).unwrap();
        w.scale(1.0 / w.norm());
        let model = EvolutionModel::new(ModelTag::LinEulerBar, 0.0, kolmogorov_flow(2.0)).unwrap();
        let state = SimState::new(model, w);
        let dt = 0.9 * cfl_bound(&state);
        let (_, record) = evolve(
            state,
            200.0,
            dt,
            1.0,
            &[Probe::PnXSq { n: 8, on_x1: false }],
        )
        .unwrap();
        let avg = rage_average(&record, 8, false).unwrap();
        trend.push(averaged_ratio(&avg, 10.0));
    }
    assert!(
        trend[0] > trend[1] && trend[1] > trend[2],
        "echo-limited ratios should drop under y-refinement: {trend:?}"
    );
    let ratio = trend[2];
    assert!(ratio <= 0.2, "A(200)/A(10) = {ratio} at 64x256");

    // square torus: projected dynamics, P_N built on X₁
    let g = TorusGrid::new(1.0, 64, 256).unwrap();
    let seedfield = random_field(g, 5, 3.0, Subspace::X1).unwrap();
    let mut w = project(&seedfield, ProjectionTag::PNonX1(8)).unwrap();
    w.scale(1.0 / w.norm());
    let model =
        EvolutionModel::new(ModelTag::LinEulerProjected, 0.0, kolmogorov_flow(1.0)).unwrap();
    let state = SimState::new(model, w);
    let dt = 0.9 * cfl_bound(&state);
    let (_, record) = evolve(
        state,
        200.0,
        dt,
        1.0,
        &[Probe::PnXSq { n: 8, on_x1: true }],
    )
    .unwrap();
    let avg = rage_average(&record, 8, true).unwrap();
    let sq_ratio = averaged_ratio(&avg, 10.0);
    assert!(sq_ratio <= 0.2, "square torus: A(200)/A(10) = {sq_ratio}");

    println!(
        "criterion 09 (RAGE decay): PASS — A(200)/A(10) refinement trend {trend:?}, square/X1 {sq_ratio:.3}"
    );
}

#[test]
fn criterion_10_inviscid_velocity_damping() {
    // stable case: U = sin y as a class-K+ shear flow, alpha = 2
    let flow = shear_flow(Profile::SinY, Domain::Torus, None).unwrap();
    let g = TorusGrid::new(2.0, 64, 256).unwrap();
    let w = random_field(g, 17, 2.0, Subspace::NonShear).unwrap();
    let model = EvolutionModel::new(ModelTag::LinEulerShear, 0.0, flow.clone()).unwrap();
    let state = SimState::new(model, w);
    let dt = 0.9 * cfl_bound(&state);
    let (_, record) = evolve(state, 200.0, dt, 1.0, &[Probe::VelSq]).unwrap();
    let avg = time_average(&record.times, record.column("vel_sq").unwrap());
    let stable_ratio = averaged_ratio(&avg, 10.0);
    assert!(stable_ratio <= 0.25, "stable avg ratio {stable_ratio}");

    // critical case alpha = 1: same decay after removing the kernel modes
    let g = TorusGrid::new(1.0, 64, 256).unwrap();
    let w = random_field(g, 17, 2.0, Subspace::NonShear).unwrap();
    let model = EvolutionModel::new(ModelTag::LinEulerShear, 0.0, flow.clone()).unwrap();
    let state = SimState::new(model, w);
    let dt = 0.9 * cfl_bound(&state);
    let (_, record) = evolve(state, 200.0, dt, 1.0, &[Probe::VelSqDefl]).unwrap();
    let avg = time_average(&record.times, record.column("vel_sq_defl").unwrap());
    let critical_ratio = averaged_ratio(&avg, 10.0);
    assert!(critical_ratio <= 0.25, "critical avg ratio {critical_ratio}");

    // Unstable case alpha = 0.5: center-space data decays, unprojected
    // grows. The kernel of L (the frozen cos x/sin x content at k_int = ±2)
    // lies inside E^c, so the damped quantity is the velocity of (I−P₁)ω.
    let alpha = 0.5;
    let g = TorusGrid::new(alpha, 64, 256).unwrap();
    let cs = center_space(&flow, alpha, 1, g.ny(), Bc::PeriodicTorus).unwrap();
    let seed_field = random_field(g, 19, 2.0, Subspace::NonShear).unwrap();

    let mut projected = apply_block_projector(&seed_field, 1, &cs.projector_ec);
    projected.scale(1.0 / projected.norm());
    let model = EvolutionModel::new(ModelTag::LinEulerShear, 0.0, flow.clone()).unwrap();
    let state = SimState::new(model, projected);
    let dt = 0.9 * cfl_bound(&state);
    let proj = cs.projector_ec.clone();
    let (_, record) = evolve_with_hook(state, 200.0, dt, 1.0, &[Probe::VelSqDefl], |s| {
        // E^c is invariant; re-projection only removes round-off drift that
        // the unstable mode would amplify over the long horizon.
        s.omega = apply_block_projector(&s.omega, 1, &proj);
        Ok(())
    })
    .unwrap();
    let avg = time_average(&record.times, record.column("vel_sq_defl").unwrap());
    let center_ratio = averaged_ratio(&avg, 10.0);
    assert!(center_ratio <= 0.25, "center-space avg ratio {center_ratio}");

    // unprojected growth at the computed unstable rate
    let sigma = unstable_modes(&flow, alpha, 1, 64, Bc::PeriodicTorus)
        .unwrap()
        .unstable[0]
        .re;
    let g_growth = grid(alpha);
    let seed_small = random_field(g_growth, 19, 2.0, Subspace::NonShear).unwrap();
    let model = EvolutionModel::new(ModelTag::LinEulerShear, 0.0, flow).unwrap();
    let state = SimState::new(model, seed_small);
    let dt = 0.9 * cfl_bound(&state);
    let (_, record) = evolve(state, 60.0, dt, 0.5, &[Probe::L2]).unwrap();
    let (rate, r2) =
        fit_exponential_decay(&record.times, record.column("l2").unwrap(), 20.0, 60.0).unwrap();
    let growth = -rate;
    assert!(
        (growth - sigma).abs() <= 0.1 * sigma,
        "fitted growth {growth} vs eigenvalue {sigma} (r2 = {r2})"
    );
    println!(
        "criterion 10 (inviscid velocity damping): PASS — stable ratio {stable_ratio:.3}, critical (I−P₁) ratio {critical_ratio:.3}, center-space ratio {center_ratio:.3}, growth {growth:.4} vs λ = {sigma:.4}"
    );
}

#[test]
fn criterion_11_weighted_norm_scaling() {
    let nus: [f64; 3] = [1e-2, 4e-3, 1e-3];
    let mut rates = Vec::new();
    let mut fit_quality = Vec::new();
    for &nu in &nus {
        let g = TorusGrid::new(1.0, 64, 256).unwrap();
        let w = random_field(g, 13, 2.0, Subspace::NonShear).unwrap();
        let t_end = 5.0 / nu.sqrt();
        let (_, record) = run(
            ModelTag::LnsApprox,
            1.0,
            nu,
            w,
            t_end,
            t_end / 200.0,
            &[Probe::ZNorm],
        );
        let z = record.column("z_norm").unwrap();
        let (rate, r2) = fit_exponential_decay(&record.times, z, 5.0, t_end).unwrap();
        rates.push(rate);
        fit_quality.push(r2);
    }
    let (slope, r2) = fit_loglog_slope(&nus, &rates).unwrap();
    assert!(
        (slope - 0.5).abs() <= 0.15,
        "log-log slope {slope} outside 0.5 ± 0.15 (rates {rates:?})"
    );
    assert!(r2 >= 0.9, "scaling fit r2 = {r2}");
    println!(
        "criterion 11 (weighted-norm decay ~ sqrt(nu)): PASS — rates {rates:?} (per-run fit r² {fit_quality:?}), log-log slope {slope:.3} (r² = {r2:.3})"
    );
}

#[test]
fn criterion_12_property_suites() {
    // projection idempotence and orthogonality
    let g = grid(1.0);
    let f = random_field(g, 2, 2.5, Subspace::MeanZero).unwrap();
    for tag in [
        ProjectionTag::P0,
        ProjectionTag::Pneq0,
        ProjectionTag::P1,
        ProjectionTag::P2,
        ProjectionTag::P3,
        ProjectionTag::PN(8),
        ProjectionTag::PNonX1(8),
    ] {
        let p = project(&f, tag).unwrap();
        let pp = project(&p, tag).unwrap();
        assert!((&pp - &p).norm() <= 1e-12 * f.norm());
        assert!(p.inner(&(&f - &p)).abs() <= 1e-12 * f.norm_sq());
    }

    // anti-selfadjointness of the advection operators
    for (alpha, flow) in [
        (1.0, kolmogorov_flow(1.0)),
        (1.0, shearlab_core::flow::dipole_flow()),
        (2.0, shear_flow(Profile::SinY, Domain::Torus, None).unwrap()),
    ] {
        let gg = grid(alpha);
        let a = random_field(gg, 3, 2.0, Subspace::NonShear).unwrap();
        let b = random_field(gg, 4, 2.0, Subspace::NonShear).unwrap();
        let skew = apply_j(&flow, &a).unwrap().inner(&b) + a.inner(&apply_j(&flow, &b).unwrap());
        assert!(skew.abs() <= 1e-10 * a.norm() * b.norm());
    }

    // Parseval: mode sums against physical quadrature
    let q = quadrature_norm_sq(&f);
    assert!((q - f.norm_sq()).abs() <= 1e-10 * f.norm_sq());

    // four-way decomposition: orthogonality and exact reassembly
    let s = component_split(&f).unwrap();
    assert!((&s.sum() - &f).norm() <= 1e-12 * f.norm());
    let parts = [&s.s1, &s.s2, &s.n1, &s.n2];
    for i in 0..4 {
        for j in 0..i {
            assert!(parts[i].inner(parts[j]).abs() <= 1e-12 * f.norm_sq());
        }
    }

    // energy-form positivity constant (1 − α⁻²) on non-shear data, α = 2
    let g2 = grid(2.0);
    let flow2 = kolmogorov_flow(2.0);
    let h = random_field(g2, 5, 2.0, Subspace::NonShear).unwrap();
    let inner = apply_l(&flow2, &h).unwrap().inner(&h);
    assert!(inner >= 0.75 * h.norm_sq() - 1e-12);

    // velocity recovery stays incompressible
    assert!(velocity_from_vorticity(&f).unwrap().divergence_residual() <= 1e-12);

    // z-norm rejects nu = 0
    assert!(z_norm(&f, 0.0, 0.0).is_err());

    // sweep determinism: identical bytes regardless of the parallelism degree
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("sweep.toml");
    std::fs::write(
        &cfg_path,
        r#"
kind = "sweep"
[model]
tag = "lns-bar"
alpha = 1.5
nx = 32
ny = 32
nus = [3e-3, 1e-2]
tau = 0.05
sample_every = 0.5
[initial]
kind = "random"
seed = 9
"#,
    )
    .unwrap();
    let bin = env!("CARGO_BIN_EXE_shearlab");
    let out1 = dir.path().join("out1");
    let out2 = dir.path().join("out2");
    for (out, par) in [(&out1, "1"), (&out2, "3")] {
        let status = std::process::Command::new(bin)
            .args([
                "sweep",
                "--config",
                cfg_path.to_str().unwrap(),
                "--out",
                out.to_str().unwrap(),
                "--parallel",
                par,
            ])
            .status()
            .unwrap();
        assert!(status.success());
    }
    let csv1 = std::fs::read(out1.join("sweep.csv")).unwrap();
    let csv2 = std::fs::read(out2.join("sweep.csv")).unwrap();
    assert_eq!(csv1, csv2, "sweep output depends on the parallelism degree");

    println!("criterion 12 (property suites, sweep determinism): PASS");
}
