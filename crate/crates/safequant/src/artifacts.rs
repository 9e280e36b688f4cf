//! On-disk artifact formats: centroid CSV, run-log JSONL, report and
//! verdict JSON, trace CSV, oracle CSV.
//!
//! Numbers are written with nine significant digits, far finer than any
//! reasonable cell radius, so reading a set back and re-snapping recovers
//! the identical cells byte for byte.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::OracleResult;
use crate::oss::{CoveringSet, OssSpec, StatePoint};
use crate::quantify::{CampaignCounters, CampaignReport, QuantifyConfig, RunRecord, Verdict};
use crate::scenario::ScenarioRun;
use crate::validate::{ValidationOutcome, ValidationVerdict};

/// Shortest decimal form that round-trips 9 significant digits.
pub fn fmt_g9(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let rounded: f64 = format!("{x:.8e}").parse().expect("rounded float re-parses");
    format!("{rounded}")
}

/// Writes `content` to `path`, creating parent directories as needed.
pub fn save(path: &Path, content: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    std::fs::write(path, content)?;
    Ok(())
}

// ─── centroid CSV ───

fn dim_header(spec: &OssSpec) -> String {
    let mut cols = vec!["id".to_string()];
    cols.extend(spec.cont_dims.iter().map(|d| d.name.clone()));
    cols.extend(spec.disc_dims.iter().map(|d| d.name.clone()));
    cols.join(",")
}

fn point_fields(point: &StatePoint) -> String {
    let mut cols: Vec<String> = point.cont.iter().map(|&v| fmt_g9(v)).collect();
    cols.extend(point.disc.iter().map(|v| v.to_string()));
    cols.join(",")
}

/// One row per centroid, in id order.
pub fn centroid_csv(set: &CoveringSet) -> String {
    let mut out = dim_header(set.spec()) + "\n";
    for (id, point) in set.iter() {
        out.push_str(&format!("{},{}\n", id.0, point_fields(point)));
    }
    out
}

/// Parses a centroid CSV against `spec`. Rows are snapped onto the grid;
/// header names must match the spec's dimensions exactly.
pub fn parse_centroid_csv(text: &str, spec: &OssSpec) -> Result<CoveringSet> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("centroid csv is empty".into()))?;
    let expect = dim_header(spec);
    if header.trim() != expect {
        return Err(Error::GridMismatch(format!(
            "centroid csv header {header:?} does not match the grid columns {expect:?}"
        )));
    }
    let n_cont = spec.n_cont();
    let n_disc = spec.n_disc();
    let mut set = CoveringSet::empty(spec);
    for (lineno, line) in lines.enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 1 + n_cont + n_disc {
            return Err(Error::Parse(format!(
                "centroid csv line {}: expected {} fields, got {}",
                lineno + 2,
                1 + n_cont + n_disc,
                fields.len()
            )));
        }
        let bad = |what: &str| {
            Error::Parse(format!("centroid csv line {}: bad {what}", lineno + 2))
        };
        fields[0].parse::<u64>().map_err(|_| bad("id"))?;
        let mut cont = Vec::with_capacity(n_cont);
        for f in &fields[1..1 + n_cont] {
            cont.push(f.parse::<f64>().map_err(|_| bad("coordinate"))?);
        }
        let mut disc = Vec::with_capacity(n_disc);
        for f in &fields[1 + n_cont..] {
            disc.push(f.parse::<i64>().map_err(|_| bad("mode"))?);
        }
        let point = StatePoint::new(cont, disc);
        if !spec.in_space(&point) {
            return Err(Error::GridMismatch(format!(
                "centroid csv line {}: point lies outside the operational space",
                lineno + 2
            )));
        }
        set.insert_point(&point).map_err(|e| match e {
            Error::CellOccupied => Error::Parse(format!(
                "centroid csv line {}: duplicate cell",
                lineno + 2
            )),
            other => other,
        })?;
    }
    Ok(set)
}

pub fn read_centroid_csv(path: &Path, spec: &OssSpec) -> Result<CoveringSet> {
    parse_centroid_csv(&std::fs::read_to_string(path)?, spec)
}

// ─── run log JSONL ───

pub fn run_log_jsonl(log: &[RunRecord]) -> String {
    let mut out = String::new();
    for rec in log {
        out.push_str(&serde_json::to_string(rec).expect("run record serializes"));
        out.push('\n');
    }
    out
}

pub fn parse_run_log(text: &str) -> Result<Vec<RunRecord>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(Error::from))
        .collect()
}

// ─── campaign report JSON ───

/// Top-level quantification report. Bulky artifacts (the set, the log) live
/// in sibling files named here.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportDoc {
    pub verdict: Verdict,
    pub vacuous_empty: bool,
    pub config: QuantifyConfig,
    pub counters: CampaignCounters,
    pub centroid_csv: String,
    pub run_log: String,
}

impl ReportDoc {
    pub fn new(report: &CampaignReport, centroid_csv: &str, run_log: &str) -> Self {
        ReportDoc {
            verdict: report.verdict,
            vacuous_empty: report.vacuous_empty,
            config: report.config.clone(),
            counters: report.counters.clone(),
            centroid_csv: centroid_csv.into(),
            run_log: run_log.into(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

// ─── validation verdict JSON ───

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerdictDoc {
    pub verdict: String,
    pub runs_used: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub confidence: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_initial: Option<StatePoint>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_escape: Option<StatePoint>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace_csv: Option<String>,
}

impl VerdictDoc {
    pub fn new(verdict: &ValidationVerdict, trace_csv: Option<&str>) -> Self {
        let mut doc = VerdictDoc {
            verdict: verdict.outcome.label().into(),
            runs_used: verdict.runs_used,
            epsilon: None,
            confidence: None,
            witness_initial: None,
            first_escape: None,
            trace_csv: trace_csv.map(Into::into),
        };
        match &verdict.outcome {
            ValidationOutcome::Validated { epsilon, confidence } => {
                doc.epsilon = Some(*epsilon);
                doc.confidence = Some(*confidence);
            }
            ValidationOutcome::Falsified { witness } => {
                doc.witness_initial = Some(witness.initial.clone());
            }
            ValidationOutcome::CoverageViolated { witness, first_escape } => {
                doc.witness_initial = Some(witness.initial.clone());
                doc.first_escape = Some(first_escape.clone());
            }
        }
        doc
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("verdict serializes") + "\n"
    }
}

// ─── trace CSV ───

/// Recorded trajectory of one scenario, one row per time index.
pub fn trace_csv(spec: &OssSpec, run: &ScenarioRun) -> String {
    let mut cols = vec!["t".to_string()];
    cols.extend(spec.cont_dims.iter().map(|d| d.name.clone()));
    cols.extend(spec.disc_dims.iter().map(|d| d.name.clone()));
    cols.push("flag".into());
    let mut out = cols.join(",") + "\n";
    for (t, (point, flag)) in run.recorded.iter().zip(&run.flags).enumerate() {
        out.push_str(&format!("{t},{},{}\n", point_fields(point), flag.label()));
    }
    out
}

// ─── oracle CSV ───

/// Per-centroid failure estimates: id, coordinates, p_hat, trial count.
pub fn oracle_csv(spec: &OssSpec, result: &OracleResult) -> String {
    let mut out = format!("{},p_hat,trials\n", dim_header(spec));
    for e in &result.entries {
        out.push_str(&format!(
            "{},{},{},{}\n",
            e.id.0,
            point_fields(&e.point),
            fmt_g9(e.p_hat),
            result.trials
        ));
    }
    out
}
