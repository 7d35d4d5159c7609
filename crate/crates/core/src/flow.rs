//! Background flows: the Kolmogorov bar state, the dipole, and general shear
//! profiles `U(y)` with their kernels `K₁ = U''/(U−U_s)` (no inflection
//! points) and `K₂ = −U''/(U−U_s)` (one inflection value, class K⁺).

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::fmath;
use crate::grid::TWO_PI;
use crate::{Error, Result};

/// y-domain of a profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    /// Periodic, `y ∈ [0, 2π)`.
    Torus,
    /// Wall-bounded channel `y ∈ [y1, y2]`.
    Channel { y1: f64, y2: f64 },
}

impl Domain {
    pub fn bounds(&self) -> (f64, f64) {
        match *self {
            Domain::Torus => (0.0, TWO_PI),
            Domain::Channel { y1, y2 } => (y1, y2),
        }
    }

    pub fn is_periodic(&self) -> bool {
        matches!(self, Domain::Torus)
    }
}

/// Velocity profile `U(y)` with analytic or spline-backed derivatives.
#[derive(Debug, Clone, PartialEq)]
pub enum Profile {
    /// `U = sin y`.
    SinY,
    /// `U = tanh y`.
    Tanh,
    /// `U = y` (Couette; degenerate for both kernel classes).
    Couette,
    /// `U = cosh y` (no inflection points).
    Cosh,
    /// Cubic-spline interpolant of samples; derivatives come from the spline.
    Spline(CubicSpline),
}

impl Profile {
    pub fn u(&self, y: f64) -> f64 {
        match self {
            Profile::SinY => fmath::sin(y),
            Profile::Tanh => fmath::tanh(y),
            Profile::Couette => y,
            Profile::Cosh => fmath::cosh(y),
            Profile::Spline(s) => s.eval(y),
        }
    }

    pub fn du(&self, y: f64) -> f64 {
        match self {
            Profile::SinY => fmath::cos(y),
            Profile::Tanh => {
                let t = fmath::tanh(y);
                1.0 - t * t
            }
            Profile::Couette => 1.0,
            Profile::Cosh => libm::sinh(y),
            Profile::Spline(s) => s.d1(y),
        }
    }

    pub fn d2u(&self, y: f64) -> f64 {
        match self {
            Profile::SinY => -fmath::sin(y),
            Profile::Tanh => {
                let t = fmath::tanh(y);
                -2.0 * t * (1.0 - t * t)
            }
            Profile::Couette => 0.0,
            Profile::Cosh => fmath::cosh(y),
            Profile::Spline(s) => s.d2(y),
        }
    }

    pub fn d3u(&self, y: f64) -> f64 {
        match self {
            Profile::SinY => -fmath::cos(y),
            Profile::Tanh => {
                let t = fmath::tanh(y);
                let s = 1.0 - t * t;
                s * (4.0 * t * t - 2.0 * s)
            }
            Profile::Couette => 0.0,
            Profile::Cosh => libm::sinh(y),
            Profile::Spline(s) => s.d3(y),
        }
    }
}

/// Flow family; selects the energy operator variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlowKind {
    KolmogorovBar,
    Dipole,
    /// `U'' ≠ 0`, kernel `K₁ > 0`; channel only.
    ShearNoInflection,
    /// One inflection value, kernel `K₂ > 0` bounded.
    ShearKPlus,
}

/// Immutable background-flow descriptor.
#[derive(Debug, Clone, PartialEq)]
pub struct BaseFlow {
    pub kind: FlowKind,
    pub profile: Profile,
    pub domain: Domain,
    /// Reference value: the inflection value for class K⁺, a constant below
    /// (or above) the range of `U` for class 1, zero for the bar state.
    pub u_s: f64,
    /// x-wavenumber the flow was requested for, when fixed by construction.
    pub alpha: Option<f64>,
    kernel_bounds: Option<(f64, f64)>,
}

const SCAN_POINTS: usize = 4096;
const ROOT_TOL: f64 = 1e-10;

/// The Kolmogorov flow `u₀ = (sin y, 0)` on the torus: `U_s = 0`, `K₂ ≡ 1`.
/// The spectrally stable regime is `α ≥ 1`.
pub fn kolmogorov_flow(alpha: f64) -> BaseFlow {
    BaseFlow {
        kind: FlowKind::KolmogorovBar,
        profile: Profile::SinY,
        domain: Domain::Torus,
        u_s: 0.0,
        alpha: Some(alpha),
        kernel_bounds: Some((1.0, 1.0)),
    }
}

/// The dipole with stream function `ψ₀ = cos x + cos y` on the square torus;
/// `ker L = span{cos x, sin x, cos y, sin y}`.
pub fn dipole_flow() -> BaseFlow {
    BaseFlow {
        kind: FlowKind::Dipole,
        profile: Profile::SinY,
        domain: Domain::Torus,
        u_s: 0.0,
        alpha: Some(1.0),
        kernel_bounds: None,
    }
}

/// Classify a shear profile into class 1 (`K₁ > 0`) or class K⁺ (`K₂ > 0`)
/// and freeze the kernel bounds.
///
/// With `u_s = None` the reference value is selected automatically: the
/// single inflection value if there is exactly one, or a constant outside
/// the range of `U` when `U''` never vanishes. Profiles with several
/// distinct inflection values are refused.
pub fn shear_flow(profile: Profile, domain: Domain, u_s: Option<f64>) -> Result<BaseFlow> {
    let report = inflection_scan(&profile, &domain);
    let (y1, y2) = domain.bounds();
    let n = SCAN_POINTS;
    let h = (y2 - y1) / n as f64;
    let ys: Vec<f64> = (0..n).map(|i| y1 + (i as f64 + 0.5) * h).collect();

    let mut u_min = f64::INFINITY;
    let mut u_max = f64::NEG_INFINITY;
    let mut d2_min = f64::INFINITY;
    let mut d2_max = f64::NEG_INFINITY;
    for &y in &ys {
        let u = profile.u(y);
        let d2 = profile.d2u(y);
        u_min = u_min.min(u);
        u_max = u_max.max(u);
        d2_min = d2_min.min(d2);
        d2_max = d2_max.max(d2);
    }

    let d2_scale = fmath::abs(d2_min).max(fmath::abs(d2_max));
    if d2_scale < 1e-12 {
        return Err(Error::Classification(String::from(
            "U'' vanishes identically; neither class 1 nor K+",
        )));
    }

    let no_inflection = report.distinct_values.is_empty();
    let u_s = match u_s {
        Some(v) => v,
        None => {
            if no_inflection {
                // Class-1 convention: a constant outside the range of U.
                if d2_min > 0.0 {
                    u_min - 1.0
                } else {
                    u_max + 1.0
                }
            } else if report.distinct_values.len() == 1 {
                report.distinct_values[0]
            } else {
                return Err(Error::Classification(format!(
                    "{} distinct inflection values; specify U_s explicitly",
                    report.distinct_values.len()
                )));
            }
        }
    };

    let class_one = u_s < u_min || u_s > u_max;
    let kind = if class_one {
        FlowKind::ShearNoInflection
    } else {
        FlowKind::ShearKPlus
    };
    let mut flow = BaseFlow {
        kind,
        profile,
        domain,
        u_s,
        alpha: None,
        kernel_bounds: None,
    };

    // Evaluate the kernel across the scan grid; this also trips the
    // degenerate-profile error when U' = 0 at a critical point.
    let mut k_min = f64::INFINITY;
    let mut k_max = f64::NEG_INFINITY;
    for &y in &ys {
        let k = flow.kernel_at(y)?;
        k_min = k_min.min(k);
        k_max = k_max.max(k);
    }
    if !(k_min > 0.0) {
        return Err(Error::KernelNotPositive(format!(
            "kernel reaches {k_min:e}; neither class 1 nor K+ (K changes sign or vanishes)"
        )));
    }
    if !k_max.is_finite() {
        return Err(Error::KernelNotPositive(String::from("kernel is unbounded")));
    }
    flow.kernel_bounds = Some((k_min, k_max));
    Ok(flow)
}

impl BaseFlow {
    /// Kernel value at `y`: `K₂ = −U''/(U−U_s)` for class K⁺ and the bar
    /// state, `K₁ = U''/(U−U_s)` for class 1. Near critical points where
    /// `U = U_s` the stable limit `∓U'''/U'` is used.
    pub fn kernel_at(&self, y: f64) -> Result<f64> {
        match self.kind {
            FlowKind::KolmogorovBar => Ok(1.0),
            FlowKind::Dipole => Err(Error::Classification(String::from(
                "dipole flows have no shear kernel",
            ))),
            FlowKind::ShearKPlus | FlowKind::ShearNoInflection => {
                let sign = if self.kind == FlowKind::ShearKPlus {
                    -1.0
                } else {
                    1.0
                };
                let denom = self.profile.u(y) - self.u_s;
                let scale = self.u_range_scale();
                if fmath::abs(denom) > 1e-9 * scale {
                    Ok(sign * self.profile.d2u(y) / denom)
                } else {
                    let du = self.profile.du(y);
                    if fmath::abs(du) < 1e-9 {
                        return Err(Error::DegenerateProfile(format!(
                            "U' = 0 at critical point y = {y}; kernel limit undefined"
                        )));
                    }
                    Ok(sign * self.profile.d3u(y) / du)
                }
            }
        }
    }

    fn u_range_scale(&self) -> f64 {
        let (y1, y2) = self.domain.bounds();
        let mut s = 0.0f64;
        for i in 0..64 {
            let y = y1 + (y2 - y1) * (i as f64 + 0.5) / 64.0;
            s = s.max(fmath::abs(self.profile.u(y) - self.u_s));
        }
        s.max(f64::MIN_POSITIVE)
    }

    /// Kernel values at the given nodes.
    pub fn kernel_values(&self, ys: &[f64]) -> Result<Vec<f64>> {
        ys.iter().map(|&y| self.kernel_at(y)).collect()
    }

    /// `(min K, max K)` recorded at construction for shear flows.
    pub fn kernel_bounds(&self) -> Option<(f64, f64)> {
        self.kernel_bounds
    }

    /// Largest advective speed, used for CFL bounds: `max |U − U_s|` for
    /// shear flows, `√2` for the dipole, 1 for the bar state.
    pub fn advective_speed(&self) -> f64 {
        match self.kind {
            FlowKind::KolmogorovBar => 1.0,
            FlowKind::Dipole => fmath::sqrt(2.0),
            _ => {
                let (y1, y2) = self.domain.bounds();
                let mut s = 0.0f64;
                for i in 0..=256 {
                    let y = y1 + (y2 - y1) * i as f64 / 256.0;
                    s = s.max(fmath::abs(self.profile.u(y) - self.u_s));
                }
                s
            }
        }
    }

    /// Whether the construction-time x-wavenumber puts the flow in its
    /// spectrally stable regime (bar state: `α ≥ 1`).
    pub fn stable_regime(&self) -> Option<bool> {
        match (self.kind, self.alpha) {
            (FlowKind::KolmogorovBar, Some(a)) => Some(a >= 1.0),
            _ => None,
        }
    }

    pub fn find_inflection_values(&self) -> InflectionReport {
        inflection_scan(&self.profile, &self.domain)
    }
}

/// Zeros of `U''` with their `U`-values.
#[derive(Debug, Clone, PartialEq)]
pub struct InflectionReport {
    /// `(y*, U(y*))` pairs with `U''(y*) = 0` after root polishing.
    pub values: Vec<(f64, f64)>,
    /// The distinct `U(y*)` values (clustered within a relative tolerance).
    pub distinct_values: Vec<f64>,
}

fn inflection_scan(profile: &Profile, domain: &Domain) -> InflectionReport {
    let (y1, mut y2) = domain.bounds();
    if domain.is_periodic() {
        // Avoid double-counting the wrap-around node.
        y2 -= (y2 - y1) / SCAN_POINTS as f64 * 0.5;
    }
    let n = SCAN_POINTS;
    let h = (y2 - y1) / n as f64;
    let f = |y: f64| profile.d2u(y);

    let mut roots: Vec<f64> = Vec::new();
    let mut prev_y = y1;
    let mut prev_f = f(y1);
    let scale = (0..=n)
        .map(|i| fmath::abs(f(y1 + i as f64 * h)))
        .fold(0.0f64, f64::max)
        .max(f64::MIN_POSITIVE);
    if fmath::abs(prev_f) <= 1e-12 * scale {
        roots.push(prev_y);
    }
    for i in 1..=n {
        let y = y1 + i as f64 * h;
        let fy = f(y);
        if fmath::abs(fy) <= 1e-12 * scale {
            roots.push(y);
        } else if prev_f * fy < 0.0 && fmath::abs(prev_f) > 1e-12 * scale {
            roots.push(bisect(&f, prev_y, y));
        }
        prev_y = y;
        prev_f = fy;
    }
    roots.dedup_by(|a, b| fmath::abs(*a - *b) < 10.0 * ROOT_TOL);

    let values: Vec<(f64, f64)> = roots.iter().map(|&y| (y, profile.u(y))).collect();
    let mut distinct: Vec<f64> = Vec::new();
    let u_scale = values
        .iter()
        .map(|&(_, u)| fmath::abs(u))
        .fold(1.0f64, f64::max);
    for &(_, u) in &values {
        if !distinct.iter().any(|&v| fmath::abs(v - u) < 1e-8 * u_scale) {
            distinct.push(u);
        }
    }
    distinct.sort_by(|a, b| a.partial_cmp(b).unwrap());
    InflectionReport {
        values,
        distinct_values: distinct,
    }
}

fn bisect(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    for _ in 0..200 {
        if b - a < ROOT_TOL {
            break;
        }
        let mid = 0.5 * (a + b);
        let fm = f(mid);
        if fa * fm <= 0.0 {
            b = mid;
        } else {
            a = mid;
            fa = fm;
        }
    }
    0.5 * (a + b)
}

/// Natural or periodic cubic spline with analytic derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct CubicSpline {
    xs: Vec<f64>,
    ys: Vec<f64>,
    // Second derivatives at the knots.
    m: Vec<f64>,
    periodic: bool,
    period: f64,
}

impl CubicSpline {
    /// Clamped spline through `(xs, ys)` with end slopes estimated from a
    /// cubic through the four boundary samples; `xs` strictly increasing.
    /// A natural spline would force `U'' = 0` at the walls and fabricate
    /// inflection points there.
    pub fn clamped(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        Self::build(xs, ys, false, 0.0)
    }

    /// Periodic spline: `xs` covers one period, `period` is the wrap length.
    pub fn periodic(xs: Vec<f64>, ys: Vec<f64>, period: f64) -> Result<Self> {
        Self::build(xs, ys, true, period)
    }

    fn build(xs: Vec<f64>, ys: Vec<f64>, periodic: bool, period: f64) -> Result<Self> {
        let n = xs.len();
        if n < 4 || ys.len() != n {
            return Err(Error::Classification(String::from(
                "spline needs at least 4 samples",
            )));
        }
        for w in xs.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::Classification(String::from(
                    "spline abscissae must increase strictly",
                )));
            }
        }
        let m = if periodic {
            solve_periodic_moments(&xs, &ys, period)
        } else {
            let d_start = cubic_end_slope(&xs[..4], &ys[..4], xs[0]);
            let d_end = cubic_end_slope(&xs[n - 4..], &ys[n - 4..], xs[n - 1]);
            solve_clamped_moments(&xs, &ys, d_start, d_end)
        };
        Ok(Self {
            xs,
            ys,
            m,
            periodic,
            period,
        })
    }

    fn segment(&self, x: f64) -> (f64, f64, f64, f64, f64, f64) {
        let n = self.xs.len();
        let mut xq = x;
        if self.periodic {
            let x0 = self.xs[0];
            xq = x0 + crate::fmath::rem_euclid(x - x0, self.period);
        }
        // Interval [x_i, x_{i+1}], wrapping for periodic splines.
        let mut i = match self.xs.binary_search_by(|v| v.partial_cmp(&xq).unwrap()) {
            Ok(j) => j,
            Err(j) => j.saturating_sub(1),
        };
        let wrap = self.periodic && (i >= n - 1 || xq >= self.xs[n - 1]);
        if wrap {
            i = n - 1;
        } else {
            i = i.min(n - 2);
        }
        let (x0, x1, y0, y1, m0, m1) = if wrap {
            (
                self.xs[n - 1],
                self.xs[0] + self.period,
                self.ys[n - 1],
                self.ys[0],
                self.m[n - 1],
                self.m[0],
            )
        } else {
            (
                self.xs[i],
                self.xs[i + 1],
                self.ys[i],
                self.ys[i + 1],
                self.m[i],
                self.m[i + 1],
            )
        };
        (xq - x0, x1 - x0, y0, y1, m0, m1)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let (t, h, y0, y1, m0, m1) = self.segment(x);
        let a = (h - t) / h;
        let b = t / h;
        a * y0 + b * y1 + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0
    }

    pub fn d1(&self, x: f64) -> f64 {
        let (t, h, y0, y1, m0, m1) = self.segment(x);
        let a = (h - t) / h;
        let b = t / h;
        (y1 - y0) / h + ((1.0 - 3.0 * a * a) * m0 + (3.0 * b * b - 1.0) * m1) * h / 6.0
    }

    pub fn d2(&self, x: f64) -> f64 {
        let (t, h, _, _, m0, m1) = self.segment(x);
        let a = (h - t) / h;
        let b = t / h;
        a * m0 + b * m1
    }

    pub fn d3(&self, x: f64) -> f64 {
        let (_, h, _, _, m0, m1) = self.segment(x);
        (m1 - m0) / h
    }
}

/// Derivative at `x0` of the Lagrange cubic through four samples.
fn cubic_end_slope(xs: &[f64], ys: &[f64], x0: f64) -> f64 {
    debug_assert_eq!(xs.len(), 4);
    let mut d = 0.0;
    for i in 0..4 {
        let mut num_deriv = 0.0;
        let mut denom = 1.0;
        for j in 0..4 {
            if j == i {
                continue;
            }
            denom *= xs[i] - xs[j];
            let mut prod = 1.0;
            for k in 0..4 {
                if k == i || k == j {
                    continue;
                }
                prod *= x0 - xs[k];
            }
            num_deriv += prod;
        }
        d += ys[i] * num_deriv / denom;
    }
    d
}

fn solve_clamped_moments(xs: &[f64], ys: &[f64], d_start: f64, d_end: f64) -> Vec<f64> {
    let n = xs.len();
    let mut sub = vec![0.0; n];
    let mut diag = vec![1.0; n];
    let mut sup = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    let h0 = xs[1] - xs[0];
    diag[0] = h0 / 3.0;
    sup[0] = h0 / 6.0;
    rhs[0] = (ys[1] - ys[0]) / h0 - d_start;
    for i in 1..n - 1 {
        let hm = xs[i] - xs[i - 1];
        let hp = xs[i + 1] - xs[i];
        sub[i] = hm / 6.0;
        diag[i] = (hm + hp) / 3.0;
        sup[i] = hp / 6.0;
        rhs[i] = (ys[i + 1] - ys[i]) / hp - (ys[i] - ys[i - 1]) / hm;
    }
    let hl = xs[n - 1] - xs[n - 2];
    sub[n - 1] = hl / 6.0;
    diag[n - 1] = hl / 3.0;
    rhs[n - 1] = d_end - (ys[n - 1] - ys[n - 2]) / hl;
    thomas(&sub, &mut diag, &sup, &mut rhs);
    rhs
}

fn solve_periodic_moments(xs: &[f64], ys: &[f64], period: f64) -> Vec<f64> {
    // Cyclic tridiagonal system via the Sherman–Morrison correction.
    let n = xs.len();
    let h = |i: usize| -> f64 {
        if i + 1 < n {
            xs[i + 1] - xs[i]
        } else {
            xs[0] + period - xs[n - 1]
        }
    };
    let y = |i: usize| ys[i % n];
    let mut sub = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut sup = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    for i in 0..n {
        let hm = h((i + n - 1) % n);
        let hp = h(i);
        sub[i] = hm / 6.0;
        diag[i] = (hm + hp) / 3.0;
        sup[i] = hp / 6.0;
        let ym = y((i + n - 1) % n);
        let yp = y(i + 1);
        rhs[i] = (yp - y(i)) / hp - (y(i) - ym) / hm;
    }
    // Corner entries sub[0] (to n-1) and sup[n-1] (to 0); eliminate with u·vᵀ.
    let alpha = sub[0];
    let beta = sup[n - 1];
    let gamma = -diag[0];
    let mut d = diag.clone();
    d[0] -= gamma;
    d[n - 1] -= alpha * beta / gamma;
    let mut r1 = rhs.clone();
    thomas(&sub, &mut d.clone(), &sup, &mut r1);
    let mut u = vec![0.0; n];
    u[0] = gamma;
    u[n - 1] = beta;
    let mut d2 = d;
    thomas(&sub, &mut d2, &sup, &mut u);
    let vy = r1[0] + alpha / gamma * r1[n - 1];
    let vu = 1.0 + u[0] + alpha / gamma * u[n - 1];
    (0..n).map(|i| r1[i] - u[i] * vy / vu).collect()
}

/// In-place Thomas solve; `diag` and `rhs` are clobbered, solution in `rhs`.
fn thomas(sub: &[f64], diag: &mut [f64], sup: &[f64], rhs: &mut [f64]) {
    let n = diag.len();
    for i in 1..n {
        let w = sub[i] / diag[i - 1];
        diag[i] -= w * sup[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    rhs[n - 1] /= diag[n - 1];
    for i in (0..n - 1).rev() {
        rhs[i] = (rhs[i] - sup[i] * rhs[i + 1]) / diag[i];
    }
}
