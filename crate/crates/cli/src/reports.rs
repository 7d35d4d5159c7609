//! Serializable summaries the runner emits next to the raw CSV series.

use serde::{Deserialize, Serialize};
use shearlab_core::diagnostics::{DampingMetric, DampingReport};
use shearlab_core::stability::{IndexReport, ScanReport};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DampingRow {
    pub nu: f64,
    pub tau: f64,
    pub metric: String,
    pub delta: Option<f64>,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

pub fn metric_name(m: DampingMetric) -> &'static str {
    match m {
        DampingMetric::Rectangular => "rectangular",
        DampingMetric::SquareInfimum => "square-infimum",
        DampingMetric::ShearHeat => "shear-heat",
    }
}

impl DampingRow {
    pub fn ok(report: &DampingReport) -> Self {
        Self {
            nu: report.nu,
            tau: report.tau,
            metric: metric_name(report.metric).into(),
            delta: Some(report.delta_achieved),
            status: "ok".into(),
            error: None,
        }
    }

    pub fn failed(nu: f64, tau: f64, error: String) -> Self {
        Self {
            nu,
            tau,
            metric: "none".into(),
            delta: None,
            status: "error".into(),
            error: Some(error),
        }
    }

    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{}\n",
            self.nu,
            self.tau,
            self.metric,
            self.delta.map(|d| d.to_string()).unwrap_or_default(),
            self.status
        )
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IndexRowJson {
    pub l: i64,
    pub alpha: f64,
    pub n_neg: usize,
    pub n_zero: usize,
    pub k_ul: usize,
    pub max_re_lambda: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IndexReportJson {
    pub alpha: f64,
    pub n: usize,
    pub rows: Vec<IndexRowJson>,
    pub k_u: usize,
    pub n_neg_l: usize,
    pub n_zero_l: usize,
    pub k_r: usize,
    pub k_c: usize,
    pub k_i_le0: usize,
    pub k_0_le0: usize,
    pub identity_holds: bool,
    /// Agreement with the cross-check resolution, when one was run.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cross_check_consistent: Option<bool>,
}

impl IndexReportJson {
    pub fn from_core(alpha: f64, n: usize, rep: &IndexReport, max_re: &[f64]) -> Self {
        Self {
            alpha,
            n,
            rows: rep
                .rows
                .iter()
                .zip(max_re.iter())
                .map(|(r, &m)| IndexRowJson {
                    l: r.l,
                    alpha,
                    n_neg: r.n_neg,
                    n_zero: r.n_zero,
                    k_ul: r.k_ul,
                    max_re_lambda: m,
                })
                .collect(),
            k_u: rep.k_u,
            n_neg_l: rep.n_neg_l,
            n_zero_l: rep.n_zero_l,
            k_r: rep.k_r,
            k_c: rep.k_c,
            k_i_le0: rep.k_i_le0,
            k_0_le0: rep.k_0_le0,
            identity_holds: rep.identity_holds,
            cross_check_consistent: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanJson {
    pub alpha: f64,
    pub l: i64,
    pub rows: Vec<(usize, f64)>,
    pub decreasing: bool,
    pub final_max_re: f64,
}

impl ScanJson {
    pub fn from_core(alpha: f64, l: i64, scan: &ScanReport) -> Self {
        Self {
            alpha,
            l,
            rows: scan.rows.iter().map(|r| (r.n, r.max_re)).collect(),
            decreasing: scan.decreasing,
            final_max_re: scan.final_max_re,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RageSummary {
    pub n_modes: usize,
    pub on_x1: bool,
    pub first: (f64, f64),
    pub last: (f64, f64),
    /// `A(t_last)/A(t_ref)` with `t_ref` the earliest sample past `t_last/20`.
    pub decay_ratio: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimulateSummary {
    pub final_time: f64,
    pub final_l2: f64,
    pub samples: usize,
    pub dt: f64,
}
