//! Experiment configuration: a single TOML file with nested sections. All
//! physical parameters are in the nondimensional units of the solver
//! (y-period 2π, unit base-flow amplitude).

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use shearlab_core::diagnostics::Probe;
use shearlab_core::dynamics::ModelTag;
use shearlab_core::flow::{shear_flow, dipole_flow, kolmogorov_flow, BaseFlow, CubicSpline, Domain, Profile};

/// A configuration error that names the offending key.
#[derive(Debug)]
pub struct ConfigError {
    pub key: String,
    pub message: String,
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "config key `{}`: {}", self.key, self.message)
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(key: &str, message: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError {
        key: key.into(),
        message: message.into(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Simulate,
    Sweep,
    Stability,
    Rage,
    Damping,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    #[serde(default)]
    pub model: ModelSection,
    #[serde(default)]
    pub flow: FlowSection,
    #[serde(default)]
    pub initial: InitialSection,
    #[serde(default)]
    pub probes: Vec<String>,
    #[serde(default)]
    pub stability: Option<StabilitySection>,
    #[serde(default)]
    pub rage: Option<RageSection>,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    #[serde(default = "default_tag")]
    pub tag: String,
    #[serde(default)]
    pub nu: f64,
    /// Sweep list; overrides `nu` for `kind = "sweep"`.
    #[serde(default)]
    pub nus: Vec<f64>,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_res")]
    pub nx: usize,
    #[serde(default = "default_res")]
    pub ny: usize,
    /// Time step; omitted = 0.9 × the CFL bound at t = 0.
    #[serde(default)]
    pub dt: Option<f64>,
    #[serde(default)]
    pub t_end: Option<f64>,
    /// Damping horizon: the run covers [0, tau/nu].
    #[serde(default)]
    pub tau: Option<f64>,
    #[serde(default = "default_sample")]
    pub sample_every: f64,
    /// Re-project onto the discrete center space at every sample time
    /// (suppresses round-off re-seeding of unstable modes).
    #[serde(default)]
    pub reproject_center: bool,
}

fn default_tag() -> String {
    "lns-bar".into()
}

fn default_alpha() -> f64 {
    1.0
}

fn default_res() -> usize {
    64
}

fn default_sample() -> f64 {
    0.1
}

impl Default for ModelSection {
    fn default() -> Self {
        toml::from_str("").expect("defaults")
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowSection {
    /// kolmogorov | dipole | sinY | tanh | couette | cosh | csv
    #[serde(default = "default_flow_name")]
    pub name: String,
    /// Two-column CSV (y, U) when `name = "csv"`.
    #[serde(default)]
    pub csv: Option<PathBuf>,
    /// "torus" or [y1, y2].
    #[serde(default)]
    pub domain: Option<toml::Value>,
    #[serde(default)]
    pub u_s: Option<f64>,
}

fn default_flow_name() -> String {
    "kolmogorov".into()
}

impl Default for FlowSection {
    fn default() -> Self {
        toml::from_str("").expect("defaults")
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSection {
    /// random | named | snapshot
    #[serde(default = "default_initial_kind")]
    pub kind: String,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_k0")]
    pub k0: f64,
    /// mean-zero | non-shear | x1 | shear | center
    #[serde(default = "default_subspace")]
    pub subspace: String,
    /// Absolute L² amplitude after normalization.
    #[serde(default)]
    pub amplitude: Option<f64>,
    /// Amplitude as a multiple of ν (`‖ω(0)‖ = d·ν`).
    #[serde(default)]
    pub amplitude_dnu: Option<f64>,
    /// Analytic field for `kind = "named"`, e.g. "cos-2y" or "sin-x+cos-y".
    #[serde(default)]
    pub name: Option<String>,
    /// Snapshot sidecar path for `kind = "snapshot"`.
    #[serde(default)]
    pub path: Option<PathBuf>,
}

fn default_initial_kind() -> String {
    "random".into()
}

fn default_seed() -> u64 {
    1
}

fn default_k0() -> f64 {
    2.0
}

fn default_subspace() -> String {
    "non-shear".into()
}

impl Default for InitialSection {
    fn default() -> Self {
        toml::from_str("").expect("defaults")
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StabilitySection {
    #[serde(default)]
    pub alphas: Vec<f64>,
    #[serde(default = "default_lmax")]
    pub l_max: i64,
    #[serde(default = "default_n1d")]
    pub n: usize,
    /// Optional cross-check resolution for integer-equality verification.
    #[serde(default)]
    pub n_check: Option<usize>,
    /// Resolutions of the embedded-eigenvalue scan.
    #[serde(default)]
    pub resolutions: Vec<usize>,
    /// torus | channel
    #[serde(default = "default_bc")]
    pub bc: String,
}

fn default_lmax() -> i64 {
    3
}

fn default_n1d() -> usize {
    128
}

fn default_bc() -> String {
    "torus".into()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RageSection {
    #[serde(default = "default_n_modes")]
    pub n_modes: usize,
    #[serde(default)]
    pub on_x1: bool,
}

fn default_n_modes() -> usize {
    8
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_out_dir")]
    pub dir: PathBuf,
    #[serde(default)]
    pub snapshots: bool,
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: default_out_dir(),
            snapshots: false,
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError {
                key: "config".into(),
                message: format!("cannot read {}: {e}", path.display()),
            })?;
        let cfg: ExperimentConfig = toml::from_str(&text).map_err(|e| ConfigError {
            key: "config".into(),
            message: e.to_string(),
        })?;
        cfg.validate(path.parent().unwrap_or(Path::new(".")))?;
        Ok(cfg)
    }

    /// Structural validation; referenced paths must exist at load time.
    pub fn validate(&self, base: &Path) -> Result<(), ConfigError> {
        if !(self.model.alpha > 0.0) {
            return err("model.alpha", "must be positive");
        }
        if self.model.nx < 4 || self.model.nx % 2 != 0 {
            return err("model.nx", "must be even and >= 4");
        }
        if self.model.ny < 4 || self.model.ny % 2 != 0 {
            return err("model.ny", "must be even and >= 4");
        }
        if self.model.nu < 0.0 {
            return err("model.nu", "must be nonnegative");
        }
        if let Some(dt) = self.model.dt {
            if !(dt > 0.0) {
                return err("model.dt", "must be positive when given");
            }
        }
        if !(self.model.sample_every > 0.0) {
            return err("model.sample_every", "must be positive");
        }
        if self.model_tag().is_none() {
            return err("model.tag", format!("unknown tag `{}`", self.model.tag));
        }
        match self.kind {
            ExperimentKind::Simulate | ExperimentKind::Rage => {
                if self.model.t_end.is_none() {
                    return err("model.t_end", "required for this experiment kind");
                }
            }
            ExperimentKind::Damping | ExperimentKind::Sweep => {
                if self.model.tau.is_none() {
                    return err("model.tau", "required for damping experiments");
                }
                if self.kind == ExperimentKind::Sweep && self.model.nus.is_empty() {
                    // an empty sweep is legal; nothing to check
                }
            }
            ExperimentKind::Stability => {
                let st = self
                    .stability
                    .as_ref()
                    .ok_or_else(|| ConfigError {
                        key: "stability".into(),
                        message: "section required for kind = \"stability\"".into(),
                    })?;
                if st.alphas.is_empty() {
                    return err("stability.alphas", "must list at least one wavenumber");
                }
                if st.l_max < 1 {
                    return err("stability.l_max", "must be >= 1");
                }
                if !matches!(st.bc.as_str(), "torus" | "channel") {
                    return err("stability.bc", "must be `torus` or `channel`");
                }
            }
        }
        for p in &self.probes {
            if Probe::parse(p).is_none() {
                return err("probes", format!("unknown probe `{p}`"));
            }
        }
        match self.initial.kind.as_str() {
            "random" => {
                if !matches!(
                    self.initial.subspace.as_str(),
                    "mean-zero" | "non-shear" | "x1" | "shear" | "center"
                ) {
                    return err("initial.subspace", "unknown subspace");
                }
            }
            "named" => {
                if self.initial.name.is_none() {
                    return err("initial.name", "required for kind = \"named\"");
                }
            }
            "snapshot" => {
                let p = self.initial.path.as_ref().ok_or_else(|| ConfigError {
                    key: "initial.path".into(),
                    message: "required for kind = \"snapshot\"".into(),
                })?;
                if !base.join(p).exists() {
                    return err("initial.path", format!("{} does not exist", p.display()));
                }
            }
            other => return err("initial.kind", format!("unknown kind `{other}`")),
        }
        if self.flow.name == "csv" {
            let p = self.flow.csv.as_ref().ok_or_else(|| ConfigError {
                key: "flow.csv".into(),
                message: "required when flow.name = \"csv\"".into(),
            })?;
            if !base.join(p).exists() {
                return err("flow.csv", format!("{} does not exist", p.display()));
            }
        }
        Ok(())
    }

    pub fn model_tag(&self) -> Option<ModelTag> {
        Some(match self.model.tag.as_str() {
            "nse" => ModelTag::Nse,
            "lns-bar" => ModelTag::LnsBar,
            "lns-approx" => ModelTag::LnsApprox,
            "lin-euler-bar" => ModelTag::LinEulerBar,
            "lin-euler-projected" => ModelTag::LinEulerProjected,
            "lns-dipole" => ModelTag::LnsDipole,
            "lin-euler-shear" => ModelTag::LinEulerShear,
            _ => return None,
        })
    }

    pub fn domain(&self) -> Result<Domain, ConfigError> {
        match &self.flow.domain {
            None => Ok(Domain::Torus),
            Some(toml::Value::String(s)) if s == "torus" => Ok(Domain::Torus),
            Some(toml::Value::Array(arr)) if arr.len() == 2 => {
                let y1 = arr[0].as_float().ok_or_else(|| ConfigError {
                    key: "flow.domain".into(),
                    message: "bounds must be floats".into(),
                })?;
                let y2 = arr[1].as_float().ok_or_else(|| ConfigError {
                    key: "flow.domain".into(),
                    message: "bounds must be floats".into(),
                })?;
                if !(y2 > y1) {
                    return err("flow.domain", "upper bound must exceed lower bound");
                }
                Ok(Domain::Channel { y1, y2 })
            }
            _ => err("flow.domain", "expected \"torus\" or [y1, y2]"),
        }
    }

    /// Build the background flow this config names.
    pub fn build_flow(&self, base: &Path) -> anyhow::Result<BaseFlow> {
        let domain = self.domain()?;
        Ok(match self.flow.name.as_str() {
            "kolmogorov" => kolmogorov_flow(self.model.alpha),
            "dipole" => dipole_flow(),
            "sinY" | "siny" | "sin-y" => shear_flow(Profile::SinY, domain, self.flow.u_s)?,
            "tanh" => shear_flow(Profile::Tanh, domain, self.flow.u_s)?,
            "couette" => shear_flow(Profile::Couette, domain, self.flow.u_s)?,
            "cosh" => shear_flow(Profile::Cosh, domain, self.flow.u_s)?,
            "csv" => {
                let path = base.join(self.flow.csv.as_ref().expect("validated"));
                let (ys, us) = read_profile_csv(&path)?;
                let spline = match domain {
                    Domain::Torus => {
                        CubicSpline::periodic(ys, us, shearlab_core::grid::TWO_PI)?
                    }
                    Domain::Channel { .. } => CubicSpline::clamped(ys, us)?,
                };
                shear_flow(Profile::Spline(spline), domain, self.flow.u_s)?
            }
            other => anyhow::bail!("config key `flow.name`: unknown flow `{other}`"),
        })
    }

    pub fn probe_list(&self) -> Vec<Probe> {
        self.probes
            .iter()
            .filter_map(|p| Probe::parse(p))
            .collect()
    }
}

fn read_profile_csv(path: &Path) -> anyhow::Result<(Vec<f64>, Vec<f64>)> {
    let text = std::fs::read_to_string(path)?;
    let mut ys = Vec::new();
    let mut us = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split(',');
        let y: f64 = parts
            .next()
            .ok_or_else(|| anyhow::anyhow!("line {}: missing y column", i + 1))?
            .trim()
            .parse()?;
        let u: f64 = parts
            .next()
            .ok_or_else(|| anyhow::anyhow!("line {}: missing U column", i + 1))?
            .trim()
            .parse()?;
        ys.push(y);
        us.push(u);
    }
    Ok((ys, us))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_simulate_config_parses() {
        let cfg: ExperimentConfig = toml::from_str(
            r#"
            kind = "simulate"
            [model]
            t_end = 1.0
            "#,
        )
        .unwrap();
        cfg.validate(Path::new(".")).unwrap();
        assert_eq!(cfg.model.nx, 64);
        assert_eq!(cfg.model_tag(), Some(shearlab_core::dynamics::ModelTag::LnsBar));
    }

    #[test]
    fn validation_names_offending_key() {
        let cfg: ExperimentConfig = toml::from_str(
            r#"
            kind = "simulate"
            [model]
            nx = 7
            t_end = 1.0
            "#,
        )
        .unwrap();
        let e = cfg.validate(Path::new(".")).unwrap_err();
        assert_eq!(e.key, "model.nx");

        let cfg: ExperimentConfig = toml::from_str(
            r#"
            kind = "damping"
            [model]
            "#,
        )
        .unwrap();
        let e = cfg.validate(Path::new(".")).unwrap_err();
        assert_eq!(e.key, "model.tau");
    }

    #[test]
    fn unknown_probe_is_rejected() {
        let cfg: ExperimentConfig = toml::from_str(
            r#"
            kind = "simulate"
            probes = ["l2", "nonsense"]
            [model]
            t_end = 1.0
            "#,
        )
        .unwrap();
        let e = cfg.validate(Path::new(".")).unwrap_err();
        assert_eq!(e.key, "probes");
    }
}
