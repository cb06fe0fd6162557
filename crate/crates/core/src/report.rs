//! Check reports: a JSON document and a text table rendered from it.

use std::fmt::Write as _;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::monitor::{CheckError, Outcome, Verdict};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "lowercase")]
pub enum Provenance {
    File {
        path: String,
    },
    Simulation {
        seed: u64,
        steps: u64,
        #[serde(skip_serializing_if = "Option::is_none")]
        fault: Option<String>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Settings {
    /// Steps checked.
    pub steps: u64,
    /// Sample size, or null for the whole trace.
    pub samples: Option<u64>,
    /// Threshold applied to every relation, if overridden.
    pub threshold: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub id: String,
    pub kind: String,
    pub k: u64,
    pub m: u64,
    /// `m / k` to 15 significant digits; null when `k = 0`.
    pub probability: Option<f64>,
    pub fraction: String,
    pub threshold: f64,
    pub threshold_exact: String,
    pub outcome: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorRecord {
    pub id: String,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub valid: usize,
    pub fail: usize,
    pub vacuous: usize,
    pub error: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub spec: String,
    pub trace: Provenance,
    pub settings: Settings,
    pub relations: Vec<Record>,
    pub errors: Vec<ErrorRecord>,
    pub summary: Summary,
    pub duration_ms: f64,
}

fn round15(x: f64) -> f64 {
    format!("{x:.14e}").parse().expect("formatted float parses")
}

impl Record {
    pub fn from_verdict(v: &Verdict) -> Self {
        Record {
            id: v.id.clone(),
            kind: v.kind.name().to_string(),
            k: v.k,
            m: v.m,
            probability: v.probability().map(round15),
            fraction: v.fraction(),
            threshold: v.threshold.as_f64(),
            threshold_exact: v.threshold.fraction(),
            outcome: v.outcome.as_str().to_string(),
        }
    }
}

impl Report {
    pub fn new(
        spec: impl Into<String>,
        trace: Provenance,
        settings: Settings,
        results: &[Result<Verdict, CheckError>],
        duration: Duration,
    ) -> Self {
        let mut summary = Summary {
            total: results.len(),
            ..Summary::default()
        };
        let mut relations = Vec::new();
        let mut errors = Vec::new();
        for r in results {
            match r {
                Ok(v) => {
                    match v.outcome {
                        Outcome::Valid => summary.valid += 1,
                        Outcome::Fail => summary.fail += 1,
                        Outcome::Vacuous => summary.vacuous += 1,
                    }
                    relations.push(Record::from_verdict(v));
                }
                Err(e) => {
                    summary.error += 1;
                    errors.push(ErrorRecord {
                        id: e.id.clone(),
                        message: e.source.to_string(),
                    });
                }
            }
        }
        Report {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            spec: spec.into(),
            trace,
            settings,
            relations,
            errors,
            summary,
            duration_ms: duration.as_secs_f64() * 1000.0,
        }
    }

    /// 0 when nothing failed, 1 on a failed relation, 2 on a relation error.
    pub fn exit_code(&self) -> i32 {
        if self.summary.error > 0 {
            2
        } else if self.summary.fail > 0 {
            1
        } else {
            0
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let trace = match &self.trace {
            Provenance::File { path } => path.clone(),
            Provenance::Simulation { seed, steps, fault } => {
                let mut s = format!("simulation seed={seed} steps={steps}");
                if let Some(f) = fault {
                    let _ = write!(s, " fault={f}");
                }
                s
            }
        };
        let _ = writeln!(out, "{} {}", self.tool, self.version);
        let _ = writeln!(out, "spec:  {}", self.spec);
        let _ = writeln!(out, "trace: {trace}");
        let _ = writeln!(
            out,
            "steps: {}  samples: {}",
            self.settings.steps,
            self.settings
                .samples
                .map_or_else(|| "whole trace".to_string(), |n| n.to_string())
        );
        let _ = writeln!(out);
        let id_w = self
            .relations
            .iter()
            .map(|r| r.id.len())
            .max()
            .unwrap_or(2)
            .max(2);
        let _ = writeln!(
            out,
            "{:id_w$}  {:11}  {:>7}  {:>7}  {:>17}  {:>9}  OUTCOME",
            "ID", "KIND", "K", "M", "PROBABILITY", "THRESHOLD"
        );
        for r in &self.relations {
            let prob = r
                .probability
                .map_or_else(|| "-".to_string(), |p| format!("{p:.6}"));
            let _ = writeln!(
                out,
                "{:id_w$}  {:11}  {:>7}  {:>7}  {:>17}  {:>9}  {}",
                r.id, r.kind, r.k, r.m, prob, r.threshold, r.outcome
            );
        }
        for e in &self.errors {
            let _ = writeln!(out, "error {}: {}", e.id, e.message);
        }
        let s = &self.summary;
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "{} relations: {} valid, {} fail, {} vacuous, {} error ({:.0} ms)",
            s.total, s.valid, s.fail, s.vacuous, s.error, self.duration_ms
        );
        out
    }
}
