//! Time integration of the evolution equations around a background flow:
//! the nonlinear vorticity equation in perturbation form, the linearized
//! viscous equations with their decaying base-flow factor `e^{−νt}`, the
//! advection-only approximation, and the inviscid linearized equations.
//!
//! The stepper is an integrating-factor RK4: the viscous symbol is applied
//! exactly in Fourier space, the advection terms are explicit, and the
//! nonautonomous `e^{−νt}` factor is evaluated at the stage times.

use alloc::string::String;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::field::{SpectralCtx, SpectralField};
use crate::flow::{BaseFlow, FlowKind};
use crate::fmath;
use crate::op::{apply_j_with, apply_jl_with};
use crate::project::{project, ProjectionTag};
use crate::spectral::{poisson_solve, velocity_from_vorticity};
use crate::{Error, Result};

/// Which evolution equation a step applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelTag {
    /// Nonlinear Navier-Stokes for the perturbation vorticity around the
    /// decaying bar state `e^{−νt}(sin y, 0)`.
    Nse,
    /// Linearized NS at the bar state.
    LnsBar,
    /// Advection-diffusion approximation (nonlocal term dropped).
    LnsApprox,
    /// Linearized Euler at the bar state, `ω_t = JLω`.
    LinEulerBar,
    /// Kernel-projected linearized Euler on the square torus.
    LinEulerProjected,
    /// Linearized NS at the dipole.
    LnsDipole,
    /// Linearized Euler at a general shear flow, in the `U_s` frame.
    LinEulerShear,
}

impl ModelTag {
    /// Whether the advection operator carries the decaying factor `e^{−νt}`.
    pub fn decaying_base(&self) -> bool {
        matches!(
            self,
            ModelTag::Nse | ModelTag::LnsBar | ModelTag::LnsApprox | ModelTag::LnsDipole
        )
    }

    pub fn is_inviscid(&self) -> bool {
        matches!(
            self,
            ModelTag::LinEulerBar | ModelTag::LinEulerProjected | ModelTag::LinEulerShear
        )
    }

    pub fn name(&self) -> &'static str {
        match self {
            ModelTag::Nse => "nse",
            ModelTag::LnsBar => "lns-bar",
            ModelTag::LnsApprox => "lns-approx",
            ModelTag::LinEulerBar => "lin-euler-bar",
            ModelTag::LinEulerProjected => "lin-euler-projected",
            ModelTag::LnsDipole => "lns-dipole",
            ModelTag::LinEulerShear => "lin-euler-shear",
        }
    }
}

/// Evolution equation plus its parameters.
#[derive(Debug, Clone)]
pub struct EvolutionModel {
    pub tag: ModelTag,
    pub nu: f64,
    pub flow: BaseFlow,
}

impl EvolutionModel {
    pub fn new(tag: ModelTag, nu: f64, flow: BaseFlow) -> Result<Self> {
        if nu < 0.0 || !nu.is_finite() {
            return Err(Error::Grid(String::from("viscosity must be nonnegative")));
        }
        if tag.is_inviscid() && nu != 0.0 {
            return Err(Error::Grid(String::from(
                "inviscid models must have nu = 0",
            )));
        }
        let flow_ok = match tag {
            ModelTag::LnsDipole => flow.kind == FlowKind::Dipole,
            ModelTag::LinEulerShear => matches!(
                flow.kind,
                FlowKind::ShearKPlus | FlowKind::ShearNoInflection | FlowKind::KolmogorovBar
            ),
            _ => matches!(flow.kind, FlowKind::KolmogorovBar),
        };
        if !flow_ok {
            return Err(Error::Grid(String::from(
                "flow kind does not match the evolution model",
            )));
        }
        Ok(Self { tag, nu, flow })
    }
}

/// Owned state of one run.
#[derive(Debug, Clone)]
pub struct SimState {
    pub omega: SpectralField,
    pub time: f64,
    pub model: EvolutionModel,
}

impl SimState {
    pub fn new(model: EvolutionModel, mut omega: SpectralField) -> Self {
        omega.zero_mean();
        omega.dealias();
        Self {
            omega,
            time: 0.0,
            model,
        }
    }
}

/// Advective CFL bound `0.4·min(Δx, Δy)/max|U|` for the model at this state.
pub fn cfl_bound(state: &SimState) -> f64 {
    let g = state.omega.grid();
    let (dx, dy) = g.spacing();
    let mut speed = state.model.flow.advective_speed();
    if state.model.tag == ModelTag::Nse {
        speed += perturbation_speed(&state.omega);
    }
    0.4 * dx.min(dy) / speed.max(1e-12)
}

fn perturbation_speed(omega: &SpectralField) -> f64 {
    match velocity_from_vorticity(omega) {
        Ok(vel) => {
            let u = vel.u.to_physical();
            let v = vel.v.to_physical();
            u.iter()
                .zip(v.iter())
                .map(|(a, b)| fmath::hypot(*a, *b))
                .fold(0.0, f64::max)
        }
        Err(_) => 0.0,
    }
}

/// Reusable stepping workspace for one run.
pub struct Stepper {
    ctx: SpectralCtx,
    /// exp(−ν λ dt/2) per mode, rebuilt when dt changes.
    half_decay: Vec<f64>,
    dt_cached: f64,
    /// CFL bound cache; the NSE perturbation speed drifts slowly, so it is
    /// refreshed every few steps rather than at every stage.
    cfl_cached: f64,
    cfl_age: u32,
}

const CFL_REFRESH: u32 = 16;

impl Stepper {
    pub fn new(state: &SimState) -> Self {
        Self {
            ctx: SpectralCtx::new(state.omega.grid()),
            half_decay: Vec::new(),
            dt_cached: f64::NAN,
            cfl_cached: cfl_bound(state),
            cfl_age: 0,
        }
    }

    fn prepare(&mut self, state: &SimState, dt: f64) {
        if dt == self.dt_cached && !self.half_decay.is_empty() {
            return;
        }
        let g = state.omega.grid();
        let nu = state.model.nu;
        self.half_decay = (0..g.len())
            .map(|i| {
                let (iy, ix) = (i / g.nx(), i % g.nx());
                fmath::exp(-nu * g.neg_lap(iy, ix) * dt / 2.0)
            })
            .collect();
        self.dt_cached = dt;
    }

    /// Advection part of the right-hand side (everything except `νΔ`).
    pub fn advection(&self, model: &EvolutionModel, omega: &SpectralField, t: f64) -> Result<SpectralField> {
        let base_amp = if model.tag.decaying_base() {
            fmath::exp(-model.nu * t)
        } else {
            1.0
        };
        let mut out = match model.tag {
            ModelTag::LnsBar | ModelTag::LinEulerBar | ModelTag::LnsDipole
            | ModelTag::LinEulerShear => apply_jl_with(&self.ctx, &model.flow, omega)?,
            ModelTag::LnsApprox => apply_j_with(&self.ctx, &model.flow, omega)?,
            ModelTag::LinEulerProjected => {
                let jl = apply_jl_with(&self.ctx, &model.flow, omega)?;
                &jl - &project(&jl, ProjectionTag::P1)?
            }
            ModelTag::Nse => {
                let jl = apply_jl_with(&self.ctx, &model.flow, omega)?;
                let nonlin = self.advection_nonlinear(omega)?;
                &jl - &nonlin
            }
        };
        if base_amp != 1.0 {
            out.scale(base_amp);
        }
        out.zero_mean();
        Ok(out)
    }

    /// `U·∇ω` for the perturbation field, dealiased (5 transforms).
    fn advection_nonlinear(&self, omega: &SpectralField) -> Result<SpectralField> {
        let vel = velocity_from_vorticity(omega)?;
        let u = vel.u.to_physical_with(&self.ctx);
        let v = vel.v.to_physical_with(&self.ctx);
        let wx = omega.x_deriv().to_physical_with(&self.ctx);
        let wy = omega.y_deriv().to_physical_with(&self.ctx);
        let prod: Vec<f64> = (0..u.len()).map(|i| u[i] * wx[i] + v[i] * wy[i]).collect();
        let mut out = SpectralField::from_physical_with(&self.ctx, *omega.grid(), &prod);
        out.dealias();
        out.zero_mean();
        Ok(out)
    }

    /// Full instantaneous right-hand side, including the viscous term.
    pub fn rhs(&self, state: &SimState) -> Result<SpectralField> {
        let adv = self.advection(&state.model, &state.omega, state.time)?;
        if state.model.nu == 0.0 {
            return Ok(adv);
        }
        let g = state.omega.grid();
        let nu = state.model.nu;
        let mut out = adv;
        for iy in 0..g.ny() {
            for ix in 0..g.nx() {
                let i = g.idx(iy, ix);
                out.coeffs_mut()[i] -= nu * g.neg_lap(iy, ix) * state.omega.coeffs()[i];
            }
        }
        Ok(out)
    }

    /// One integrating-factor RK4 step of size `dt`.
    pub fn step(&mut self, state: &mut SimState, dt: f64) -> Result<()> {
        if self.cfl_age == 0 {
            self.cfl_cached = cfl_bound(state);
        }
        self.cfl_age = (self.cfl_age + 1) % CFL_REFRESH;
        let bound = self.cfl_cached;
        if dt > bound {
            return Err(Error::CflViolation { dt, bound });
        }
        self.prepare(state, dt);
        let model = state.model.clone();
        let t = state.time;
        let w = &state.omega;

        let k1 = self.advection(&model, w, t)?;

        // u2 = E1 (w + dt/2 k1)
        let mut u2 = w.clone();
        u2.axpy(dt / 2.0, &k1);
        self.apply_half_decay(&mut u2, 1);
        let k2 = self.advection(&model, &u2, t + dt / 2.0)?;

        // u3 = E1 w + dt/2 k2
        let mut u3 = w.clone();
        self.apply_half_decay(&mut u3, 1);
        u3.axpy(dt / 2.0, &k2);
        let k3 = self.advection(&model, &u3, t + dt / 2.0)?;

        // u4 = E2 w + dt E1 k3
        let mut u4 = w.clone();
        self.apply_half_decay(&mut u4, 2);
        let mut e1k3 = k3.clone();
        self.apply_half_decay(&mut e1k3, 1);
        u4.axpy(dt, &e1k3);
        let k4 = self.advection(&model, &u4, t + dt)?;

        // w' = E2 w + dt/6 (E2 k1 + 2 E1 (k2 + k3) + k4)
        let mut acc = k1;
        self.apply_half_decay(&mut acc, 2);
        let mut mid = k2;
        mid.axpy(1.0, &k3);
        self.apply_half_decay(&mut mid, 1);
        acc.axpy(2.0, &mid);
        acc.axpy(1.0, &k4);

        let mut next = w.clone();
        self.apply_half_decay(&mut next, 2);
        next.axpy(dt / 6.0, &acc);
        next.zero_mean();

        state.omega = next;
        state.time = t + dt;
        Ok(())
    }

    fn apply_half_decay(&self, f: &mut SpectralField, times: u32) {
        let coeffs = f.coeffs_mut();
        match times {
            1 => {
                for (c, &d) in coeffs.iter_mut().zip(self.half_decay.iter()) {
                    *c *= d;
                }
            }
            2 => {
                for (c, &d) in coeffs.iter_mut().zip(self.half_decay.iter()) {
                    *c *= d * d;
                }
            }
            _ => unreachable!(),
        }
    }
}

/// Convenience single step (builds a fresh workspace).
pub fn step(state: &mut SimState, dt: f64) -> Result<()> {
    Stepper::new(state).step(state, dt)
}

/// Shrink `dt` so the sampling cadence is an exact multiple of the step:
/// returns `(dt_eff, substeps_per_sample)`.
pub fn sampling_plan(dt: f64, sample_every: f64) -> Result<(f64, usize)> {
    if !(sample_every > 0.0) || !(dt > 0.0) {
        return Err(Error::Diagnostic(String::from(
            "dt and sample_every must be positive",
        )));
    }
    let substeps = fmath::ceil(sample_every / dt).max(1.0);
    Ok((sample_every / substeps, substeps as usize))
}

/// Run to `t_end`, sampling the probes every `sample_every` time units.
///
/// `after_sample` runs on the state at each sample point (projection hooks
/// and the like). Aborts with the offending timestamp if the solution loses
/// finiteness.
pub fn evolve_with_hook(
    mut state: SimState,
    t_end: f64,
    dt: f64,
    sample_every: f64,
    probes: &[crate::diagnostics::Probe],
    mut after_sample: impl FnMut(&mut SimState) -> Result<()>,
) -> Result<(SimState, crate::diagnostics::TimeSeriesRecord)> {
    if t_end <= state.time {
        return Err(Error::Diagnostic(String::from("t_end must exceed state.time")));
    }
    let (dt_eff, substeps) = sampling_plan(dt, sample_every)?;
    let mut stepper = Stepper::new(&state);
    let mut record = crate::diagnostics::TimeSeriesRecord::new(probes);

    let n_samples = fmath::round((t_end - state.time) / sample_every) as usize;
    crate::diagnostics::sample(&mut record, probes, &state)?;
    for _ in 0..n_samples {
        for _ in 0..substeps {
            stepper.step(&mut state, dt_eff)?;
        }
        if !state.omega.is_finite() {
            return Err(Error::NanAbort { time: state.time });
        }
        after_sample(&mut state)?;
        crate::diagnostics::sample(&mut record, probes, &state)?;
    }
    Ok((state, record))
}

/// [`evolve_with_hook`] without a hook.
pub fn evolve(
    state: SimState,
    t_end: f64,
    dt: f64,
    sample_every: f64,
    probes: &[crate::diagnostics::Probe],
) -> Result<(SimState, crate::diagnostics::TimeSeriesRecord)> {
    evolve_with_hook(state, t_end, dt, sample_every, probes, |_| Ok(()))
}

/// Energy `⟨ψ, ω⟩` and enstrophy `‖ω‖²` of the total flow (base + perturbation).
pub fn total_invariants(state: &SimState) -> Result<(f64, f64)> {
    let g = *state.omega.grid();
    let base_amp = if state.model.tag.decaying_base() || state.model.tag.is_inviscid() {
        fmath::exp(-state.model.nu * state.time)
    } else {
        1.0
    };
    let mut total = state.omega.clone();
    match state.model.flow.kind {
        FlowKind::KolmogorovBar => {
            // ω_base = −cos y
            total.add_mode(0, 1, Complex64::new(-0.5 * base_amp, 0.0));
            total.add_mode(0, -1, Complex64::new(-0.5 * base_amp, 0.0));
        }
        FlowKind::Dipole => {
            for (k, m) in [(1i64, 0i64), (-1, 0), (0, 1), (0, -1)] {
                total.add_mode(k, m, Complex64::new(0.5 * base_amp, 0.0));
            }
        }
        _ => {}
    }
    let _ = g;
    let psi = poisson_solve(&total)?;
    Ok((psi.inner(&total), total.norm_sq()))
}
