//! Experiment orchestration: prepares runs from a configuration, drives the
//! integration loop with sampling and optional center-space re-projection,
//! and persists manifests, series and summaries.

use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Instant;

use anyhow::{anyhow, bail, Context};
use shearlab_core::diagnostics::{
    enhanced_damping_metric, sample, time_average, Probe, TimeSeriesRecord,
};
use shearlab_core::dynamics::{cfl_bound, sampling_plan, EvolutionModel, SimState, Stepper};
use shearlab_core::field::SpectralField;
use shearlab_core::flow::BaseFlow;
use shearlab_core::grid::TorusGrid;
use shearlab_core::linalg::DMat;
use shearlab_core::randfield::{random_field, Subspace};
use shearlab_core::stability::{
    apply_block_projector, build_l0, center_space, eigen_l0, embedded_eigenvalue_scan,
    index_check, unstable_modes, Bc,
};

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::manifest::RunManifest;
use crate::reports::{
    DampingRow, IndexReportJson, RageSummary, ScanJson, SimulateSummary,
};
use crate::snapshot::{read_snapshot, write_snapshot};

/// Command-line overrides applied on top of the configuration file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub parallel: usize,
}

/// Error class used to pick the process exit code.
#[derive(Debug)]
pub enum RunError {
    Validation(anyhow::Error),
    Numerical(anyhow::Error),
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Validation(e) => write!(f, "validation error: {e:#}"),
            RunError::Numerical(e) => write!(f, "numerical abort: {e:#}"),
        }
    }
}

impl std::error::Error for RunError {}

pub fn run(config_path: &Path, kind: ExperimentKind, overrides: &Overrides) -> Result<(), RunError> {
    let cfg = ExperimentConfig::load(config_path)
        .map_err(|e| RunError::Validation(anyhow!(e.to_string())))?;
    if cfg.kind != kind {
        return Err(RunError::Validation(anyhow!(
            "config kind `{:?}` does not match the `{}` subcommand",
            cfg.kind,
            subcommand_name(kind)
        )));
    }
    let base = config_path.parent().unwrap_or(Path::new(".")).to_path_buf();
    let out_dir = overrides
        .out
        .clone()
        .unwrap_or_else(|| cfg.output.dir.clone());
    std::fs::create_dir_all(&out_dir)
        .with_context(|| format!("creating {}", out_dir.display()))
        .map_err(RunError::Validation)?;

    match kind {
        ExperimentKind::Simulate => run_simulate(&cfg, &base, &out_dir, overrides),
        ExperimentKind::Damping => run_damping(&cfg, &base, &out_dir, overrides),
        ExperimentKind::Sweep => run_sweep(&cfg, &base, &out_dir, overrides),
        ExperimentKind::Stability => run_stability(&cfg, &base, &out_dir, overrides),
        ExperimentKind::Rage => run_rage(&cfg, &base, &out_dir, overrides),
    }
}

fn subcommand_name(kind: ExperimentKind) -> &'static str {
    match kind {
        ExperimentKind::Simulate => "simulate",
        ExperimentKind::Sweep => "sweep",
        ExperimentKind::Stability => "stability",
        ExperimentKind::Rage => "rage",
        ExperimentKind::Damping => "damping",
    }
}

// ---------------------------------------------------------------------------
// Shared preparation and integration loop.
// ---------------------------------------------------------------------------

struct PreparedRun {
    state: SimState,
    probes: Vec<Probe>,
    dt: f64,
    sample_every: f64,
    t_end: f64,
    seed: u64,
    /// `(l, projector)` blocks applied after every sample.
    reprojectors: Vec<(i64, DMat)>,
}

fn prepare(
    cfg: &ExperimentConfig,
    base: &Path,
    overrides: &Overrides,
    nu: f64,
    t_end: f64,
    extra_probes: &[Probe],
) -> anyhow::Result<PreparedRun> {
    let grid = TorusGrid::new(cfg.model.alpha, cfg.model.nx, cfg.model.ny)?;
    let flow = cfg.build_flow(base)?;
    let tag = cfg
        .model_tag()
        .ok_or_else(|| anyhow!("config key `model.tag`: unknown tag"))?;
    let model = EvolutionModel::new(tag, nu, flow.clone())?;
    let seed = overrides.seed.unwrap_or(cfg.initial.seed);
    let omega = build_initial(cfg, base, &grid, &flow, nu, seed)?;
    let state = SimState::new(model, omega);

    let mut probes: Vec<Probe> = extra_probes.to_vec();
    for p in cfg.probe_list() {
        if !probes.contains(&p) {
            probes.push(p);
        }
    }

    let dt = match cfg.model.dt {
        Some(dt) => dt,
        None => 0.9 * cfl_bound(&state),
    };

    let mut reprojectors = Vec::new();
    if cfg.model.reproject_center {
        reprojectors = center_projectors(&flow, cfg.model.alpha, cfg.model.ny)?;
    }

    Ok(PreparedRun {
        state,
        probes,
        dt,
        sample_every: cfg.model.sample_every,
        t_end,
        seed,
        reprojectors,
    })
}

fn center_projectors(flow: &BaseFlow, alpha: f64, ny: usize) -> anyhow::Result<Vec<(i64, DMat)>> {
    let l0 = build_l0(flow, ny, Bc::PeriodicTorus)?;
    let alpha_max = eigen_l0(&l0)?.alpha_max;
    let mut out = Vec::new();
    let mut l = 1i64;
    while (l as f64) * alpha < alpha_max {
        let cs = center_space(flow, alpha, l, ny, Bc::PeriodicTorus)?;
        if cs.dim_u > 0 {
            out.push((l, cs.projector_ec));
        }
        l += 1;
    }
    Ok(out)
}

fn build_initial(
    cfg: &ExperimentConfig,
    base: &Path,
    grid: &TorusGrid,
    flow: &BaseFlow,
    nu: f64,
    seed: u64,
) -> anyhow::Result<SpectralField> {
    let mut omega = match cfg.initial.kind.as_str() {
        "random" => {
            let subspace = match cfg.initial.subspace.as_str() {
                "mean-zero" => Subspace::MeanZero,
                "non-shear" => Subspace::NonShear,
                "x1" => Subspace::X1,
                "shear" => Subspace::Shear,
                "center" => Subspace::NonShear,
                other => bail!("config key `initial.subspace`: unknown subspace `{other}`"),
            };
            let mut f = random_field(*grid, seed, cfg.initial.k0, subspace)?;
            if cfg.initial.subspace == "center" {
                for (l, proj) in center_projectors(flow, grid.alpha(), grid.ny())? {
                    f = apply_block_projector(&f, l, &proj);
                }
                let n = f.norm();
                if n > 0.0 {
                    f.scale(1.0 / n);
                }
            }
            f
        }
        "named" => {
            let name = cfg.initial.name.as_ref().expect("validated");
            parse_named_field(*grid, name)?
        }
        "snapshot" => {
            let path = base.join(cfg.initial.path.as_ref().expect("validated"));
            let (f, meta) = read_snapshot(&path)?;
            if meta.nx != grid.nx() || meta.ny != grid.ny() {
                bail!(
                    "config key `initial.path`: snapshot grid {}x{} does not match model grid {}x{}",
                    meta.nx,
                    meta.ny,
                    grid.nx(),
                    grid.ny()
                );
            }
            f
        }
        other => bail!("config key `initial.kind`: unknown kind `{other}`"),
    };
    if let Some(amp) = cfg.initial.amplitude {
        let n = omega.norm();
        if n > 0.0 {
            omega.scale(amp / n);
        }
    } else if let Some(d) = cfg.initial.amplitude_dnu {
        let n = omega.norm();
        if n > 0.0 {
            omega.scale(d * nu / n);
        }
    }
    Ok(omega)
}

/// Parse "cos-2y", "sin-x", and sums like "cos-y+0.5*sin-3x".
fn parse_named_field(grid: TorusGrid, name: &str) -> anyhow::Result<SpectralField> {
    let mut out = SpectralField::zeros(grid);
    for term in name.split('+') {
        let term = term.trim();
        let (coef, rest) = match term.split_once('*') {
            Some((c, rest)) => (c.trim().parse::<f64>()?, rest.trim()),
            None => (1.0, term),
        };
        let (func, modespec) = rest
            .split_once('-')
            .ok_or_else(|| anyhow!("malformed field term `{term}` (expected e.g. cos-2y)"))?;
        let phase = match func {
            "cos" => 0.0,
            "sin" => -std::f64::consts::FRAC_PI_2,
            other => bail!("unknown function `{other}` in field term `{term}`"),
        };
        let (num_part, axis) = modespec.split_at(modespec.len() - 1);
        let n: i64 = if num_part.is_empty() {
            1
        } else {
            num_part.parse()?
        };
        let (k, m) = match axis {
            "x" => (n, 0),
            "y" => (0, n),
            other => bail!("unknown axis `{other}` in field term `{term}`"),
        };
        let mut h = SpectralField::harmonic(grid, k, m, coef, phase);
        h.axpy(1.0, &out);
        out = h;
    }
    Ok(out)
}

struct LoopOutcome {
    record: TimeSeriesRecord,
    state: Option<SimState>,
    error: Option<shearlab_core::Error>,
}

/// Integration loop with sampling and projection hooks; on failure the
/// partial record survives.
fn integrate(prep: &mut PreparedRun) -> LoopOutcome {
    let mut record = TimeSeriesRecord::new(&prep.probes);
    let plan = match sampling_plan(prep.dt, prep.sample_every) {
        Ok(p) => p,
        Err(e) => {
            return LoopOutcome {
                record,
                state: None,
                error: Some(e),
            }
        }
    };
    let (dt_eff, substeps) = plan;
    if let Err(e) = sample(&mut record, &prep.probes, &prep.state) {
        return LoopOutcome {
            record,
            state: None,
            error: Some(e),
        };
    }
    let n_samples = ((prep.t_end - prep.state.time) / prep.sample_every).round() as usize;
    let mut stepper = Stepper::new(&prep.state);
    for _ in 0..n_samples {
        for _ in 0..substeps {
            if let Err(e) = stepper.step(&mut prep.state, dt_eff) {
                return LoopOutcome {
                    record,
                    state: None,
                    error: Some(e),
                };
            }
        }
        if !prep.state.omega.is_finite() {
            return LoopOutcome {
                record,
                state: None,
                error: Some(shearlab_core::Error::NanAbort {
                    time: prep.state.time,
                }),
            };
        }
        for (l, proj) in &prep.reprojectors {
            prep.state.omega = apply_block_projector(&prep.state.omega, *l, proj);
        }
        if let Err(e) = sample(&mut record, &prep.probes, &prep.state) {
            return LoopOutcome {
                record,
                state: None,
                error: Some(e),
            };
        }
    }
    LoopOutcome {
        record,
        state: Some(prep.state.clone()),
        error: None,
    }
}

fn write_series_csv(path: &Path, record: &TimeSeriesRecord) -> anyhow::Result<()> {
    let mut text = String::from("time");
    for name in &record.names {
        text.push(',');
        text.push_str(name);
    }
    text.push('\n');
    for i in 0..record.len() {
        text.push_str(&record.times[i].to_string());
        for col in &record.columns {
            text.push(',');
            text.push_str(&col[i].to_string());
        }
        text.push('\n');
    }
    std::fs::write(path, text)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

fn run_simulate(
    cfg: &ExperimentConfig,
    base: &Path,
    out_dir: &Path,
    overrides: &Overrides,
) -> Result<(), RunError> {
    let started = Instant::now();
    let t_end = cfg.model.t_end.expect("validated");
    let mut prep = prepare(cfg, base, overrides, cfg.model.nu, t_end, &[Probe::L2])
        .map_err(RunError::Validation)?;
    let outcome = integrate(&mut prep);
    let mut manifest = RunManifest::new(cfg, prep.seed, "simulate");

    let series = out_dir.join("series.csv");
    write_series_csv(&series, &outcome.record).map_err(RunError::Validation)?;
    manifest.record_output(&series).ok();

    if let Some(state) = &outcome.state {
        if cfg.output.snapshots {
            let stem = out_dir.join("snapshot_final");
            write_snapshot(&stem, &state.omega, "vorticity", state.time)
                .map_err(RunError::Validation)?;
            manifest.record_output(&stem.with_extension("json")).ok();
            manifest.record_output(&stem.with_extension("bin")).ok();
        }
        let summary = SimulateSummary {
            final_time: state.time,
            final_l2: state.omega.norm(),
            samples: outcome.record.len(),
            dt: prep.dt,
        };
        let sp = out_dir.join("summary.json");
        std::fs::write(&sp, serde_json::to_string_pretty(&summary).unwrap())
            .map_err(|e| RunError::Validation(e.into()))?;
        manifest.record_output(&sp).ok();
    }
    finalize_manifest(manifest, out_dir, started, outcome.error)
}

fn finalize_manifest(
    mut manifest: RunManifest,
    out_dir: &Path,
    started: Instant,
    error: Option<shearlab_core::Error>,
) -> Result<(), RunError> {
    manifest.wall_clock_seconds = started.elapsed().as_secs_f64();
    if let Some(e) = &error {
        manifest.aborted = Some(e.to_string());
    }
    manifest
        .write(&out_dir.join("manifest.json"))
        .map_err(RunError::Validation)?;
    match error {
        Some(e) => Err(RunError::Numerical(anyhow!(e.to_string()))),
        None => Ok(()),
    }
}

// ---------------------------------------------------------------------------
// damping + sweep
// ---------------------------------------------------------------------------

fn damping_probes(cfg: &ExperimentConfig) -> Vec<Probe> {
    let mut probes = vec![Probe::L2, Probe::PneqL2];
    if (cfg.model.alpha - 1.0).abs() < 1e-12 {
        probes.push(Probe::X1DeflL2);
    }
    probes
}

fn one_damping_run(
    cfg: &ExperimentConfig,
    base: &Path,
    overrides: &Overrides,
    nu: f64,
) -> anyhow::Result<(TimeSeriesRecord, DampingRow)> {
    if !(nu > 0.0) {
        bail!("config key `model.nu`: damping runs need nu > 0, got {nu}");
    }
    let tau = cfg.model.tau.expect("validated");
    let horizon = tau / nu;
    let mut prep = prepare(cfg, base, overrides, nu, horizon, &damping_probes(cfg))?;
    // land exactly on the horizon
    let n_windows = (horizon / prep.sample_every).ceil().max(1.0);
    prep.sample_every = horizon / n_windows;
    let outcome = integrate(&mut prep);
    if let Some(e) = outcome.error {
        return Err(anyhow!(e.to_string()));
    }
    let square = (cfg.model.alpha - 1.0).abs() < 1e-12;
    let report = enhanced_damping_metric(&outcome.record, nu, tau, square)?;
    Ok((outcome.record, DampingRow::ok(&report)))
}

fn run_damping(
    cfg: &ExperimentConfig,
    base: &Path,
    out_dir: &Path,
    overrides: &Overrides,
) -> Result<(), RunError> {
    let started = Instant::now();
    let (record, row) =
        one_damping_run(cfg, base, overrides, cfg.model.nu).map_err(classify_run_error)?;
    let mut manifest = RunManifest::new(cfg, overrides.seed.unwrap_or(cfg.initial.seed), "damping");
    let series = out_dir.join("series.csv");
    write_series_csv(&series, &record).map_err(RunError::Validation)?;
    manifest.record_output(&series).ok();
    let summary = out_dir.join("damping.json");
    std::fs::write(&summary, serde_json::to_string_pretty(&row).unwrap())
        .map_err(|e| RunError::Validation(e.into()))?;
    manifest.record_output(&summary).ok();
    finalize_manifest(manifest, out_dir, started, None)
}

fn classify_run_error(e: anyhow::Error) -> RunError {
    let text = e.to_string();
    if text.contains("CFL") || text.contains("finiteness") || text.contains("abort") {
        RunError::Numerical(e)
    } else {
        RunError::Validation(e)
    }
}

fn run_sweep(
    cfg: &ExperimentConfig,
    base: &Path,
    out_dir: &Path,
    overrides: &Overrides,
) -> Result<(), RunError> {
    let started = Instant::now();
    let tau = cfg.model.tau.expect("validated");
    let nus = cfg.model.nus.clone();
    let parallel = overrides.parallel.max(1);

    // Fixed-size result table filled by worker threads; merge order never
    // depends on completion order.
    let results: Mutex<Vec<Option<DampingRow>>> = Mutex::new(vec![None; nus.len()]);
    std::thread::scope(|scope| {
        for worker in 0..parallel.min(nus.len().max(1)) {
            let results = &results;
            let nus = &nus;
            let cfg = &*cfg;
            let base = base.to_path_buf();
            let overrides = overrides.clone();
            scope.spawn(move || {
                let mut idx = worker;
                while idx < nus.len() {
                    let nu = nus[idx];
                    let row = match one_damping_run(cfg, &base, &overrides, nu) {
                        Ok((_, row)) => row,
                        Err(e) => DampingRow::failed(nu, tau, e.to_string()),
                    };
                    results.lock().unwrap()[idx] = Some(row);
                    idx += parallel;
                }
            });
        }
    });

    let mut rows: Vec<DampingRow> = results
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|r| r.expect("all indices filled"))
        .collect();
    rows.sort_by(|a, b| a.nu.partial_cmp(&b.nu).unwrap());

    let mut csv = String::from("nu,tau,metric,delta,status\n");
    for row in &rows {
        csv.push_str(&row.csv_line());
    }
    let csv_path = out_dir.join("sweep.csv");
    std::fs::write(&csv_path, csv).map_err(|e| RunError::Validation(e.into()))?;
    let json_path = out_dir.join("sweep.json");
    std::fs::write(&json_path, serde_json::to_string_pretty(&rows).unwrap())
        .map_err(|e| RunError::Validation(e.into()))?;

    let mut manifest = RunManifest::new(cfg, overrides.seed.unwrap_or(cfg.initial.seed), "sweep");
    manifest.record_output(&csv_path).ok();
    manifest.record_output(&json_path).ok();
    finalize_manifest(manifest, out_dir, started, None)
}

// ---------------------------------------------------------------------------
// stability
// ---------------------------------------------------------------------------

fn bc_of(cfg: &ExperimentConfig) -> Bc {
    match cfg.stability.as_ref().map(|s| s.bc.as_str()) {
        Some("channel") => Bc::DirichletChannel,
        _ => Bc::PeriodicTorus,
    }
}

fn run_stability(
    cfg: &ExperimentConfig,
    base: &Path,
    out_dir: &Path,
    overrides: &Overrides,
) -> Result<(), RunError> {
    let started = Instant::now();
    let st = cfg.stability.as_ref().expect("validated").clone();
    let bc = bc_of(cfg);
    let flow = cfg.build_flow(base).map_err(RunError::Validation)?;

    let mut reports = Vec::new();
    let mut csv = String::from("l,alpha,n_neg,k_ul,max_re_lambda\n");
    for &alpha in &st.alphas {
        let rep = index_check(&flow, alpha, st.l_max, st.n, bc)
            .map_err(|e| RunError::Numerical(anyhow!(e.to_string())))?;
        let mut max_res = Vec::new();
        for l in 1..=st.l_max {
            let um = unstable_modes(&flow, alpha, l, st.n, bc)
                .map_err(|e| RunError::Numerical(anyhow!(e.to_string())))?;
            let max_re = um
                .eigenvalues
                .iter()
                .map(|z| z.re.abs())
                .fold(0.0f64, f64::max);
            max_res.push(max_re);
        }
        let mut json = IndexReportJson::from_core(alpha, st.n, &rep, &max_res);
        if let Some(n2) = st.n_check {
            let rep2 = index_check(&flow, alpha, st.l_max, n2, bc)
                .map_err(|e| RunError::Numerical(anyhow!(e.to_string())))?;
            json.cross_check_consistic_set(&rep, &rep2);
        }
        for row in &json.rows {
            csv.push_str(&format!(
                "{},{},{},{},{}\n",
                row.l, row.alpha, row.n_neg, row.k_ul, row.max_re_lambda
            ));
        }
        reports.push(json);
    }

    let mut scans = Vec::new();
    if !st.resolutions.is_empty() {
        for &alpha in &st.alphas {
            let scan = embedded_eigenvalue_scan(&flow, alpha, 1, &st.resolutions, bc)
                .map_err(|e| RunError::Numerical(anyhow!(e.to_string())))?;
            scans.push(ScanJson::from_core(alpha, 1, &scan));
        }
    }

    let csv_path = out_dir.join("stability.csv");
    std::fs::write(&csv_path, csv).map_err(|e| RunError::Validation(e.into()))?;
    let json_path = out_dir.join("stability.json");
    let doc = serde_json::json!({ "index_reports": reports, "scans": scans });
    std::fs::write(&json_path, serde_json::to_string_pretty(&doc).unwrap())
        .map_err(|e| RunError::Validation(e.into()))?;

    let mut manifest = RunManifest::new(cfg, overrides.seed.unwrap_or(cfg.initial.seed), "stability");
    manifest.record_output(&csv_path).ok();
    manifest.record_output(&json_path).ok();
    finalize_manifest(manifest, out_dir, started, None)
}

impl IndexReportJson {
    fn cross_check_consistic_set(
        &mut self,
        a: &shearlab_core::stability::IndexReport,
        b: &shearlab_core::stability::IndexReport,
    ) {
        let consistent = a
            .rows
            .iter()
            .zip(b.rows.iter())
            .all(|(x, y)| x.n_neg == y.n_neg && x.k_ul == y.k_ul);
        self.cross_check_consistent = Some(consistent);
    }
}

// ---------------------------------------------------------------------------
// rage
// ---------------------------------------------------------------------------

fn run_rage(
    cfg: &ExperimentConfig,
    base: &Path,
    out_dir: &Path,
    overrides: &Overrides,
) -> Result<(), RunError> {
    let started = Instant::now();
    let rage = cfg.rage.clone().unwrap_or_else(|| {
        toml::from_str("").expect("defaults")
    });
    let t_end = cfg.model.t_end.expect("validated");
    let probe = Probe::PnXSq {
        n: rage.n_modes,
        on_x1: rage.on_x1,
    };
    let mut prep = prepare(cfg, base, overrides, cfg.model.nu, t_end, &[probe, Probe::L2])
        .map_err(RunError::Validation)?;
    let outcome = integrate(&mut prep);
    let mut manifest = RunManifest::new(cfg, prep.seed, "rage");

    let series = out_dir.join("series.csv");
    write_series_csv(&series, &outcome.record).map_err(RunError::Validation)?;
    manifest.record_output(&series).ok();

    if outcome.error.is_none() {
        let col = outcome
            .record
            .column(&probe.name())
            .expect("probe recorded");
        let avg = time_average(&outcome.record.times, col);
        let mut csv = String::from("time,average\n");
        for (t, a) in &avg {
            csv.push_str(&format!("{t},{a}\n"));
        }
        let avg_path = out_dir.join("rage.csv");
        std::fs::write(&avg_path, csv).map_err(|e| RunError::Validation(e.into()))?;
        manifest.record_output(&avg_path).ok();

        let t_last = avg.last().map(|p| p.0).unwrap_or(0.0);
        let t_ref = t_last / 20.0;
        let a_ref = avg
            .iter()
            .find(|(t, _)| *t >= t_ref)
            .map(|p| p.1)
            .unwrap_or(f64::NAN);
        let a_last = avg.last().map(|p| p.1).unwrap_or(f64::NAN);
        let summary = RageSummary {
            n_modes: rage.n_modes,
            on_x1: rage.on_x1,
            first: *avg.first().unwrap_or(&(0.0, f64::NAN)),
            last: *avg.last().unwrap_or(&(0.0, f64::NAN)),
            decay_ratio: a_last / a_ref,
        };
        let sp = out_dir.join("rage.json");
        std::fs::write(&sp, serde_json::to_string_pretty(&summary).unwrap())
            .map_err(|e| RunError::Validation(e.into()))?;
        manifest.record_output(&sp).ok();
    }
    finalize_manifest(manifest, out_dir, started, outcome.error)
}
