//! End-to-end drivers shared by the command line and the tests.

use std::time::Instant;

use crate::clock::Trace;
use crate::corpus::{av_spec, AV_SPEC_PATH};
use crate::lang::Elaborated;
use crate::monitor::{Checker, RelationSpec, SampleSize, Threshold};
use crate::report::{Provenance, Report, Settings};
use crate::sim::{AVParams, FaultSpec, ParamError, Simulator};

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub steps: u64,
    pub seed: u64,
    pub threshold: Option<Threshold>,
    pub samples: Option<u64>,
    pub fault: Option<FaultSpec>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            steps: 60_000,
            seed: 42,
            threshold: Some("0.95".parse().expect("valid threshold")),
            samples: None,
            fault: None,
        }
    }
}

fn apply_overrides(
    relations: &[RelationSpec],
    threshold: Option<Threshold>,
    samples: Option<u64>,
) -> Vec<RelationSpec> {
    relations
        .iter()
        .cloned()
        .map(|mut r| {
            if let Some(p) = threshold {
                r.threshold = p;
            }
            if let Some(n) = samples {
                r.sample_size = SampleSize::Fixed(n);
            }
            r
        })
        .collect()
}

/// Simulates the vehicle and checks the bundled specification in one pass.
pub fn verify_av(opts: &VerifyOptions) -> Result<Report, ParamError> {
    let start = Instant::now();
    let params = AVParams {
        steps: opts.steps,
        seed: opts.seed,
        ..AVParams::default()
    };
    let sim = Simulator::new(params, opts.fault)?;
    let spec = av_spec();
    let samples = opts.samples.or(spec.samples);
    let relations = apply_overrides(&spec.relations, opts.threshold, samples);
    let mut checker = Checker::new(sim.alphabet(), relations);
    for ticks in sim {
        checker.step(&ticks);
    }
    let steps = checker.steps();
    let results = checker.finish();
    Ok(Report::new(
        format!("<bundled> {AV_SPEC_PATH}"),
        Provenance::Simulation {
            seed: opts.seed,
            steps: opts.steps,
            fault: opts.fault.map(|f| f.to_string()),
        },
        Settings {
            steps,
            samples,
            threshold: opts.threshold.map(|p| p.to_string()),
        },
        &results,
        start.elapsed(),
    ))
}

/// Checks an elaborated specification against a trace. The spec's `steps`
/// setting, if any, limits the steps checked.
pub fn check_trace(
    spec: &Elaborated,
    spec_name: &str,
    trace: &Trace,
    trace_name: &str,
    samples: Option<u64>,
) -> Report {
    let start = Instant::now();
    let samples = samples.or(spec.samples);
    let relations = apply_overrides(&spec.relations, None, samples);
    let mut checker = Checker::new(trace.alphabet().clone(), relations);
    let limit = spec
        .steps
        .map_or(trace.len(), |n| trace.len().min(n as usize));
    for ticks in trace.steps().take(limit) {
        checker.step(&ticks);
    }
    let steps = checker.steps();
    let results = checker.finish();
    Report::new(
        spec_name,
        Provenance::File {
            path: trace_name.to_string(),
        },
        Settings {
            steps,
            samples,
            threshold: None,
        },
        &results,
        start.elapsed(),
    )
}
