//! Measurable quantities along runs: probe sampling into time series, the
//! dissipation-law residual, time-averaged decay metrics, the four-way
//! component decomposition, the weighted Z-norm, and decay-rate fits.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::dynamics::SimState;
use crate::field::SpectralField;
use crate::fmath;
use crate::project::{project, ProjectionTag};
use crate::spectral::{norms, velocity_from_vorticity};
use crate::{Error, Result};

/// Sampled quantity along a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Probe {
    /// `‖ω‖_{L²}`
    L2,
    /// `‖ω‖_{H¹}`
    H1,
    /// `⟨Lω, ω⟩` for the run's flow.
    InnerL,
    /// `∫ |∇ω|² − |ω|²`
    GradForm,
    /// `‖P_{≠0}ω‖`
    PneqL2,
    /// `‖(I−P₁)P_{≠0}ω‖`
    X1DeflL2,
    /// `‖P₀ω‖`
    ShearL2,
    /// `a = ‖ω_{s1}‖`
    CompA,
    /// `b = ‖ω_{n1}‖`
    CompB,
    /// `e = a + b`
    CompE,
    /// `‖ω_{s2}‖`
    CompS2,
    /// `‖ω_{n2}‖`
    CompN2,
    /// The ν-weighted H¹-type norm of the non-shear modes (needs ν > 0).
    ZNorm,
    /// `‖P_N ω‖²_X`; `on_x1` skips the anomalous modes.
    PnXSq { n: usize, on_x1: bool },
    /// `‖u‖²_{L²}` of the recovered velocity.
    VelSq,
    /// Same after removing the `(±1,0)` vorticity modes.
    VelSqDefl,
    /// Energy `⟨ψ_tot, ω_tot⟩` of the total flow (base + perturbation).
    TotalEnergy,
    /// Enstrophy `‖ω_tot‖²` of the total flow.
    TotalEnstrophy,
}

impl Probe {
    pub fn name(&self) -> String {
        match self {
            Probe::L2 => "l2".into(),
            Probe::H1 => "h1".into(),
            Probe::InnerL => "inner_l".into(),
            Probe::GradForm => "grad_form".into(),
            Probe::PneqL2 => "pneq_l2".into(),
            Probe::X1DeflL2 => "x1_defl_l2".into(),
            Probe::ShearL2 => "shear_l2".into(),
            Probe::CompA => "comp_a".into(),
            Probe::CompB => "comp_b".into(),
            Probe::CompE => "comp_e".into(),
            Probe::CompS2 => "comp_s2".into(),
            Probe::CompN2 => "comp_n2".into(),
            Probe::ZNorm => "z_norm".into(),
            Probe::PnXSq { n, on_x1 } => {
                if *on_x1 {
                    format!("pn{n}_x1_x_sq")
                } else {
                    format!("pn{n}_x_sq")
                }
            }
            Probe::VelSq => "vel_sq".into(),
            Probe::VelSqDefl => "vel_sq_defl".into(),
            Probe::TotalEnergy => "energy_tot".into(),
            Probe::TotalEnstrophy => "enstrophy_tot".into(),
        }
    }

    pub fn parse(name: &str) -> Option<Probe> {
        Some(match name {
            "l2" => Probe::L2,
            "h1" => Probe::H1,
            "inner_l" => Probe::InnerL,
            "grad_form" => Probe::GradForm,
            "pneq_l2" => Probe::PneqL2,
            "x1_defl_l2" => Probe::X1DeflL2,
            "shear_l2" => Probe::ShearL2,
            "comp_a" => Probe::CompA,
            "comp_b" => Probe::CompB,
            "comp_e" => Probe::CompE,
            "comp_s2" => Probe::CompS2,
            "comp_n2" => Probe::CompN2,
            "z_norm" => Probe::ZNorm,
            "vel_sq" => Probe::VelSq,
            "vel_sq_defl" => Probe::VelSqDefl,
            "energy_tot" => Probe::TotalEnergy,
            "enstrophy_tot" => Probe::TotalEnstrophy,
            _ => {
                // pnN_x_sq / pnN_x1_x_sq
                let rest = name.strip_prefix("pn")?;
                if let Some(idx) = rest.strip_suffix("_x1_x_sq") {
                    return Some(Probe::PnXSq {
                        n: idx.parse().ok()?,
                        on_x1: true,
                    });
                }
                let idx = rest.strip_suffix("_x_sq")?;
                Probe::PnXSq {
                    n: idx.parse().ok()?,
                    on_x1: false,
                }
            }
        })
    }

    fn eval(&self, state: &SimState) -> Result<f64> {
        let flow = &state.model.flow;
        let omega = &state.omega;
        Ok(match self {
            Probe::L2 => omega.norm(),
            Probe::H1 => fmath::sqrt(omega.h1_norm_sq()),
            Probe::InnerL => norms(flow, omega)?.inner_l,
            Probe::GradForm => omega.grad_norm_sq() - omega.norm_sq(),
            Probe::PneqL2 => project(omega, ProjectionTag::Pneq0)?.norm(),
            Probe::X1DeflL2 => {
                let p = project(omega, ProjectionTag::Pneq0)?;
                (&p - &project(&p, ProjectionTag::P1)?).norm()
            }
            Probe::ShearL2 => project(omega, ProjectionTag::P0)?.norm(),
            Probe::CompA => component_split(omega)?.a(),
            Probe::CompB => component_split(omega)?.b(),
            Probe::CompE => {
                let s = component_split(omega)?;
                s.a() + s.b()
            }
            Probe::CompS2 => component_split(omega)?.s2.norm(),
            Probe::CompN2 => component_split(omega)?.n2.norm(),
            Probe::ZNorm => z_norm(omega, state.model.nu, state.time)?,
            Probe::PnXSq { n, on_x1 } => {
                let tag = if *on_x1 {
                    ProjectionTag::PNonX1(*n)
                } else {
                    ProjectionTag::PN(*n)
                };
                let p = project(omega, tag)?;
                norms(flow, &p)?.x_sq
            }
            Probe::VelSq => velocity_from_vorticity(omega)?.energy(),
            Probe::VelSqDefl => {
                let p1 = project(omega, ProjectionTag::P1)?;
                velocity_from_vorticity(&(omega - &p1))?.energy()
            }
            Probe::TotalEnergy => crate::dynamics::total_invariants(state)?.0,
            Probe::TotalEnstrophy => crate::dynamics::total_invariants(state)?.1,
        })
    }
}

/// Sampled diagnostics along a run: strictly increasing times, one named
/// column per probe.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeriesRecord {
    pub times: Vec<f64>,
    pub names: Vec<String>,
    pub columns: Vec<Vec<f64>>,
}

impl TimeSeriesRecord {
    pub fn new(probes: &[Probe]) -> Self {
        Self {
            times: Vec::new(),
            names: probes.iter().map(|p| p.name()).collect(),
            columns: vec![Vec::new(); probes.len()],
        }
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.columns[i].as_slice())
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Evaluate all probes at the current state and append one row.
pub fn sample(record: &mut TimeSeriesRecord, probes: &[Probe], state: &SimState) -> Result<()> {
    if let Some(&last) = record.times.last() {
        if state.time <= last {
            return Err(Error::Diagnostic(String::from(
                "sample times must increase strictly",
            )));
        }
    }
    record.times.push(state.time);
    for (probe, col) in probes.iter().zip(record.columns.iter_mut()) {
        let v = probe.eval(state)?;
        if !v.is_finite() {
            return Err(Error::NanAbort { time: state.time });
        }
        col.push(v);
    }
    Ok(())
}

/// The dissipation-law residual along a sampled run:
/// `r(t) = d/dt⟨Lω,ω⟩ + 2ν(‖∇ω‖² − ‖ω‖²)`, with the derivative taken by
/// centered differences on the sampling cadence. `relative` is normalized
/// by `ν‖ω‖²_{H¹}` (by `‖ω‖²_{H¹}` alone when ν = 0).
#[derive(Debug, Clone)]
pub struct ResidualSeries {
    pub times: Vec<f64>,
    pub raw: Vec<f64>,
    pub relative: Vec<f64>,
}

pub fn dissipation_residual(record: &TimeSeriesRecord, nu: f64) -> Result<ResidualSeries> {
    let inner = record
        .column("inner_l")
        .ok_or_else(|| Error::Diagnostic(String::from("missing inner_l column")))?;
    let grad = record
        .column("grad_form")
        .ok_or_else(|| Error::Diagnostic(String::from("missing grad_form column")))?;
    let h1 = record
        .column("h1")
        .ok_or_else(|| Error::Diagnostic(String::from("missing h1 column")))?;
    if record.times.len() < 3 {
        return Err(Error::Diagnostic(String::from(
            "need at least 3 snapshots for centered differences",
        )));
    }
    let mut times = Vec::new();
    let mut raw = Vec::new();
    let mut relative = Vec::new();
    for i in 1..record.times.len() - 1 {
        let dt_f = record.times[i + 1] - record.times[i];
        let dt_b = record.times[i] - record.times[i - 1];
        // centered difference on (possibly uneven) cadence
        let ddt = (inner[i + 1] - inner[i - 1]) / (dt_f + dt_b);
        let r = ddt + 2.0 * nu * grad[i];
        let h1_sq = h1[i] * h1[i];
        let denom = if nu > 0.0 { nu * h1_sq } else { h1_sq };
        times.push(record.times[i]);
        raw.push(r);
        relative.push(r / denom.max(f64::MIN_POSITIVE));
    }
    Ok(ResidualSeries {
        times,
        raw,
        relative,
    })
}

/// Running time average `A(T) = (1/T)∫₀ᵀ f dt` by the trapezoid rule; the
/// first entry is the instantaneous value.
pub fn time_average(times: &[f64], values: &[f64]) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(times.len());
    if times.is_empty() {
        return out;
    }
    out.push((times[0], values[0]));
    let t0 = times[0];
    let mut integral = 0.0;
    for i in 1..times.len() {
        let dt = times[i] - times[i - 1];
        integral += 0.5 * dt * (values[i] + values[i - 1]);
        let span = times[i] - t0;
        out.push((times[i], integral / span));
    }
    out
}

/// Time-averaged `‖P_N ω‖²_X` series from a recorded run.
pub fn rage_average(record: &TimeSeriesRecord, n: usize, on_x1: bool) -> Result<Vec<(f64, f64)>> {
    let name = Probe::PnXSq { n, on_x1 }.name();
    let col = record
        .column(&name)
        .ok_or_else(|| Error::Diagnostic(format!("missing {name} column")))?;
    Ok(time_average(&record.times, col))
}

/// Time-averaged velocity energy `(1/T)∫‖u‖² dt`.
pub fn velocity_damping_average(record: &TimeSeriesRecord, deflated: bool) -> Result<Vec<(f64, f64)>> {
    let name = if deflated { "vel_sq_defl" } else { "vel_sq" };
    let col = record
        .column(name)
        .ok_or_else(|| Error::Diagnostic(format!("missing {name} column")))?;
    Ok(time_average(&record.times, col))
}

/// Four-way decomposition on the square torus:
/// `ω = ω_{s1} + ω_{s2} + ω_{n1} + ω_{n2}` with `ω_{s1} = P₂P₀ω`,
/// `ω_{s2} = (I−P₂)P₀ω`, `ω_{n1} = P₁P_{≠0}ω`, `ω_{n2} = (I−P₁)P_{≠0}ω`.
/// On rectangular tori the split degenerates to shear/non-shear with the
/// `P₂` piece still meaningful and `ω_{n1} = P₁ω` the `(±1,0)` modes.
#[derive(Debug, Clone)]
pub struct ComponentSplit {
    pub s1: SpectralField,
    pub s2: SpectralField,
    pub n1: SpectralField,
    pub n2: SpectralField,
}

impl ComponentSplit {
    pub fn a(&self) -> f64 {
        self.s1.norm()
    }

    pub fn b(&self) -> f64 {
        self.n1.norm()
    }

    pub fn e(&self) -> f64 {
        self.a() + self.b()
    }

    pub fn sum(&self) -> SpectralField {
        let mut s = self.s1.clone();
        s.axpy(1.0, &self.s2);
        s.axpy(1.0, &self.n1);
        s.axpy(1.0, &self.n2);
        s
    }
}

pub fn component_split(omega: &SpectralField) -> Result<ComponentSplit> {
    let shear = project(omega, ProjectionTag::P0)?;
    let nonshear = project(omega, ProjectionTag::Pneq0)?;
    let s1 = project(&shear, ProjectionTag::P2)?;
    let s2 = &shear - &s1;
    let n1 = project(&nonshear, ProjectionTag::P1)?;
    let n2 = &nonshear - &n1;
    Ok(ComponentSplit { s1, s2, n1, n2 })
}

/// Which ratio a damping report carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DampingMetric {
    /// `‖P_{≠0}ω(τ/ν)‖ / ‖P_{≠0}ω(0)‖`
    Rectangular,
    /// `inf_{0≤t≤τ/ν} ‖(1−P₁)P_{≠0}ω(t)‖ / ‖P_{≠0}ω(0)‖`
    SquareInfimum,
    /// Shear-only data: full-field ratio (pure heat decay).
    ShearHeat,
}

/// Enhanced-damping measurement over one run.
#[derive(Debug, Clone)]
pub struct DampingReport {
    pub nu: f64,
    pub tau: f64,
    pub metric: DampingMetric,
    pub delta_achieved: f64,
}

/// Evaluate the theorem-specific damping ratio from a recorded run covering
/// `[0, τ/ν]`. `square_torus` selects the infimum metric.
pub fn enhanced_damping_metric(
    record: &TimeSeriesRecord,
    nu: f64,
    tau: f64,
    square_torus: bool,
) -> Result<DampingReport> {
    if nu <= 0.0 {
        return Err(Error::Diagnostic(String::from("damping metric needs nu > 0")));
    }
    let horizon = tau / nu;
    let t_last = *record
        .times
        .last()
        .ok_or_else(|| Error::Diagnostic(String::from("empty record")))?;
    if t_last < horizon - 1e-9 {
        return Err(Error::Diagnostic(format!(
            "run too short: covers {t_last}, needs {horizon}"
        )));
    }
    let pneq = record
        .column("pneq_l2")
        .ok_or_else(|| Error::Diagnostic(String::from("missing pneq_l2 column")))?;
    let l2 = record
        .column("l2")
        .ok_or_else(|| Error::Diagnostic(String::from("missing l2 column")))?;
    let initial_pneq = pneq[0];
    let initial_l2 = l2[0];

    // Shear-only data has no non-shear reference; fall back to the heat ratio.
    if initial_pneq <= 1e-12 * initial_l2.max(f64::MIN_POSITIVE) {
        let idx = index_at_time(&record.times, horizon);
        return Ok(DampingReport {
            nu,
            tau,
            metric: DampingMetric::ShearHeat,
            delta_achieved: l2[idx] / initial_l2.max(f64::MIN_POSITIVE),
        });
    }

    if square_torus {
        let defl = record
            .column("x1_defl_l2")
            .ok_or_else(|| Error::Diagnostic(String::from("missing x1_defl_l2 column")))?;
        let inf = record
            .times
            .iter()
            .zip(defl.iter())
            .filter(|(t, _)| **t <= horizon + 1e-9)
            .map(|(_, v)| *v)
            .fold(f64::INFINITY, f64::min);
        Ok(DampingReport {
            nu,
            tau,
            metric: DampingMetric::SquareInfimum,
            delta_achieved: inf / initial_pneq,
        })
    } else {
        let idx = index_at_time(&record.times, horizon);
        Ok(DampingReport {
            nu,
            tau,
            metric: DampingMetric::Rectangular,
            delta_achieved: pneq[idx] / initial_pneq,
        })
    }
}

fn index_at_time(times: &[f64], t: f64) -> usize {
    let mut best = 0;
    let mut dist = f64::INFINITY;
    for (i, &ti) in times.iter().enumerate() {
        let d = fmath::abs(ti - t);
        if d < dist {
            dist = d;
            best = i;
        }
    }
    best
}

/// Weighted H¹-type norm squared
/// `Σ_{k≠0} [‖ω_k‖² + √(ν/κ)‖∂_yω_k‖² + κ^{−3/2}ν^{−1/2}‖C^kω_k‖²]`
/// with `κ = |k|α` and `C^kω_k = −ikα e^{νt} cos y · ω_k`, as a mode sum.
pub fn z_norm(omega: &SpectralField, nu: f64, t: f64) -> Result<f64> {
    if nu <= 0.0 {
        return Err(Error::Diagnostic(String::from("z-norm weight needs nu > 0")));
    }
    let g = omega.grid();
    let area = g.area();
    let e_nu_t = fmath::exp(nu * t);
    let mut total = 0.0;
    let half_x = g.nx() as i64 / 2;
    let half_y = g.ny() as i64 / 2;
    for k in -half_x..half_x {
        if k == 0 {
            continue;
        }
        let kappa = fmath::abs(k as f64 * g.alpha());
        let mut l2 = 0.0;
        let mut dy = 0.0;
        let mut ck = 0.0;
        for m in -half_y..half_y {
            let c = omega.get(k, m);
            let p = c.norm_sqr();
            l2 += p;
            dy += (m * m) as f64 * p;
            // (cos y · ω_k)(m) = (ω_k(m−1) + ω_k(m+1))/2
            let shifted = (omega.get(k, m - 1) + omega.get(k, m + 1)) * 0.5;
            let amp = kappa * e_nu_t * shifted.norm();
            ck += amp * amp;
        }
        total += area
            * (l2 + fmath::sqrt(nu / kappa) * dy
                + ck / (fmath::sqrt(nu) * kappa * fmath::sqrt(kappa)));
    }
    Ok(total)
}

/// Least-squares fit of `log v = c − rate·t` over `t ∈ [t0, t1]`.
/// Returns `(rate, r²)`.
pub fn fit_exponential_decay(times: &[f64], values: &[f64], t0: f64, t1: f64) -> Result<(f64, f64)> {
    let pts: Vec<(f64, f64)> = times
        .iter()
        .zip(values.iter())
        .filter(|(t, v)| **t >= t0 && **t <= t1 && **v > 0.0)
        .map(|(t, v)| (*t, fmath::ln(*v)))
        .collect();
    linear_fit(&pts).map(|(slope, r2)| (-slope, r2))
}

/// Slope of `log y` against `log x` (scaling-exponent fits).
pub fn fit_loglog_slope(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys.iter())
        .filter(|(x, y)| **x > 0.0 && **y > 0.0)
        .map(|(x, y)| (fmath::ln(*x), fmath::ln(*y)))
        .collect();
    linear_fit(&pts)
}

/// Growth exponent p in `v ~ (1 + t)^p`.
pub fn fit_power_growth(times: &[f64], values: &[f64]) -> Result<(f64, f64)> {
    let pts: Vec<(f64, f64)> = times
        .iter()
        .zip(values.iter())
        .filter(|(_, v)| **v > 0.0)
        .map(|(t, v)| (fmath::ln(1.0 + *t), fmath::ln(*v)))
        .collect();
    linear_fit(&pts)
}

fn linear_fit(pts: &[(f64, f64)]) -> Result<(f64, f64)> {
    let n = pts.len();
    if n < 3 {
        return Err(Error::Diagnostic(format!(
            "fit needs at least 3 points, got {n}"
        )));
    }
    let nf = n as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = nf * sxx - sx * sx;
    if fmath::abs(denom) < 1e-300 {
        return Err(Error::Diagnostic(String::from("degenerate abscissae in fit")));
    }
    let slope = (nf * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / nf;
    let mean_y = sy / nf;
    let mut ss_res = 0.0;
    let mut ss_tot = 0.0;
    for &(x, y) in pts {
        let fit = intercept + slope * x;
        ss_res += (y - fit) * (y - fit);
        ss_tot += (y - mean_y) * (y - mean_y);
    }
    let r2 = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    Ok((slope, r2))
}
