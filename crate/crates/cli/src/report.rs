//! The versioned JSON report and its records.

use std::collections::BTreeMap;

use cone_lab_core::mc::OperatorEstimate;
use cone_lab_core::special::ObstructionReport;
use cone_lab_core::tube::{GramCertificate, Verdict};
use cone_lab_core::Algebra;
use serde::{Deserialize, Serialize};

use crate::config::ScanConfig;

pub const SCHEMA: &str = "cone-lab-report/1";

/// Outcome of one deterministic identity check over one algebra.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub algebra: String,
    pub name: String,
    pub cases: usize,
    pub max_error: f64,
    pub tol: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarginSummary {
    pub points: usize,
    /// Smallest `margin(μ, y)/‖P(y)‖_F` over random cone points.
    pub min_scaled: f64,
    /// Margin at `y = e`, which is `μ − rd/2`.
    pub at_identity: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GramSummary {
    /// Configurations evaluated (before refinement).
    pub configurations: u64,
    /// `witness_search` (with refinement) or `psd_test` (raw configurations).
    pub protocol: String,
    pub min_relative: f64,
    pub verdict: Verdict,
}

/// One μ of a Wallach scan.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRecord {
    pub algebra: String,
    pub family: String,
    pub r: usize,
    pub d: usize,
    pub n: usize,
    pub mu: f64,
    /// `k` when `μ = kd/2`.
    pub lattice_k: Option<u32>,
    pub predicted: bool,
    pub observed: Verdict,
    /// Observation disagrees with the prediction. A PSD verdict outside the
    /// predicted set only means no witness was found within budget.
    pub mismatch: bool,
    pub margin: MarginSummary,
    pub gram: GramSummary,
    /// Most negative certificate found (the witness when `observed` is `witness`).
    pub certificate: GramCertificate,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LaplaceCheck {
    pub pairs: usize,
    /// Per pair: `max |Q_quad − Q| / max |Q|` over entries.
    pub errors: Vec<f64>,
    pub max_error: f64,
}

/// One Monte Carlo or quadrature verification.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McRecord {
    /// `riesz`, `boundary`, `obstruction` or `laplace`.
    pub kind: String,
    pub algebra: String,
    pub mu: Option<f64>,
    pub k: Option<usize>,
    pub samples: u64,
    pub seed: u64,
    pub max_sigma: Option<f64>,
    pub frobenius_rel: Option<f64>,
    pub pass: bool,
    pub estimate: Option<OperatorEstimate>,
    pub obstruction: Option<ObstructionReport>,
    pub laplace: Option<LaplaceCheck>,
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessRecord {
    pub algebra: String,
    pub mu: f64,
    pub predicted: bool,
    pub certificate: GramCertificate,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub pass: bool,
    pub checks: usize,
    pub failures: Vec<String>,
    /// Scan rows where the observation differs from the prediction.
    pub mismatches: Vec<String>,
    pub notes: Vec<String>,
}

/// The only non-reproducible part of a report.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timestamp {
    pub generated_unix: u64,
    pub elapsed_seconds: f64,
    /// Wall time of individual steps, keyed by a step label.
    pub steps: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub version: String,
    pub command: String,
    pub config: ScanConfig,
    #[serde(default)]
    pub identities: Vec<IdentityCheck>,
    #[serde(default)]
    pub scan: Vec<ScanRecord>,
    #[serde(default)]
    pub mc: Vec<McRecord>,
    #[serde(default)]
    pub witnesses: Vec<WitnessRecord>,
    pub summary: Summary,
    pub timestamp: Timestamp,
}

impl Report {
    pub fn new(command: &str, config: ScanConfig) -> Self {
        Self {
            schema: SCHEMA.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            config,
            identities: Vec::new(),
            scan: Vec::new(),
            mc: Vec::new(),
            witnesses: Vec::new(),
            summary: Summary::default(),
            timestamp: Timestamp::default(),
        }
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    /// JSON with the timestamp blanked, for reproducibility comparisons.
    pub fn reproducible_json(&self) -> serde_json::Result<String> {
        let mut r = self.clone();
        r.timestamp = Timestamp::default();
        r.to_json()
    }
}

pub fn algebra_fields(alg: &Algebra) -> (String, String, usize, usize, usize) {
    (alg.to_string(), alg.family().to_string(), alg.rank(), alg.peirce_d(), alg.dim())
}
