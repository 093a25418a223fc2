use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::scenario::{default_round_bound, ScenarioSpec};
use crate::verifier::{check_properties, judge, FailureReason, Property, Verdict};
use crate::world::simulate;

/// Exemplars kept per category in a report.
pub const MAX_EXEMPLARS: usize = 8;

/// A scenario kept in a report so it can be replayed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exemplar {
    /// Position of the scenario in the swept sequence.
    pub index: u64,
    pub spec: ScenarioSpec,
    pub verdict: Verdict,
    pub violations: Vec<String>,
}

/// Result of running and judging one scenario.
#[derive(Clone, Debug)]
pub struct Evaluation {
    pub verdict: Verdict,
    pub violations: Vec<crate::verifier::Violation>,
}

pub fn evaluate(spec: &ScenarioSpec) -> Evaluation {
    match simulate(spec, spec.protocol.automaton()) {
        Ok(trace) => Evaluation { verdict: judge(&trace), violations: check_properties(&trace, spec.protocol) },
        Err(_) => Evaluation {
            verdict: Verdict {
                success: false,
                failure_reason: Some(FailureReason::ProtocolFault),
                dead_count: 0,
                rounds_used: 0,
                marked_links: Vec::new(),
            },
            violations: Vec::new(),
        },
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepReport {
    pub scenarios: u64,
    pub successes: u64,
    pub failures: BTreeMap<FailureReason, u64>,
    /// Traces with at least one property violation.
    pub traces_with_violations: u64,
    pub violations: BTreeMap<Property, u64>,
    /// Number of traces by number of agents lost.
    pub deaths: BTreeMap<usize, u64>,
    /// Longest run observed for each ring size.
    pub max_rounds: BTreeMap<usize, u64>,
    pub failure_exemplars: Vec<Exemplar>,
    pub violation_exemplars: Vec<Exemplar>,
}

fn merge_exemplars(a: &mut Vec<Exemplar>, b: Vec<Exemplar>) {
    a.extend(b);
    a.sort_by_key(|e| e.index);
    a.truncate(MAX_EXEMPLARS);
}

impl SweepReport {
    pub fn single(index: u64, spec: &ScenarioSpec, eval: Evaluation) -> SweepReport {
        let mut r = SweepReport { scenarios: 1, ..SweepReport::default() };
        let v = &eval.verdict;
        r.max_rounds.insert(spec.n, v.rounds_used);
        r.deaths.insert(v.dead_count, 1);
        let exemplar = || Exemplar {
            index,
            spec: spec.clone(),
            verdict: v.clone(),
            violations: eval.violations.iter().map(|x| x.to_string()).collect(),
        };
        match v.failure_reason {
            None => r.successes = 1,
            Some(reason) => {
                r.failures.insert(reason, 1);
                r.failure_exemplars.push(exemplar());
            }
        }
        if !eval.violations.is_empty() {
            r.traces_with_violations = 1;
            for x in &eval.violations {
                *r.violations.entry(x.property).or_default() += 1;
            }
            r.violation_exemplars.push(exemplar());
        }
        r
    }

    /// Associative, commutative combination of two partial reports.
    pub fn merge(mut self, other: SweepReport) -> SweepReport {
        self.scenarios += other.scenarios;
        self.successes += other.successes;
        self.traces_with_violations += other.traces_with_violations;
        for (k, v) in other.failures {
            *self.failures.entry(k).or_default() += v;
        }
        for (k, v) in other.violations {
            *self.violations.entry(k).or_default() += v;
        }
        for (k, v) in other.deaths {
            *self.deaths.entry(k).or_default() += v;
        }
        for (n, r) in other.max_rounds {
            let e = self.max_rounds.entry(n).or_default();
            *e = (*e).max(r);
        }
        merge_exemplars(&mut self.failure_exemplars, other.failure_exemplars);
        merge_exemplars(&mut self.violation_exemplars, other.violation_exemplars);
        self
    }

    pub fn all_succeeded(&self) -> bool {
        self.successes == self.scenarios
    }

    pub fn is_clean(&self) -> bool {
        self.all_succeeded() && self.traces_with_violations == 0
    }

    pub fn success_rate(&self) -> f64 {
        if self.scenarios == 0 {
            1.0
        } else {
            self.successes as f64 / self.scenarios as f64
        }
    }

    /// Least-squares slope of the longest run against ring size.
    pub fn fitted_slope(&self) -> Option<f64> {
        if self.max_rounds.len() < 2 {
            return None;
        }
        let pts: Vec<(f64, f64)> = self.max_rounds.iter().map(|(&n, &r)| (n as f64, r as f64)).collect();
        let m = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        Some(sxy / sxx)
    }

    /// Ring sizes whose longest run exceeded the default bound.
    pub fn over_bound(&self) -> Vec<usize> {
        self.max_rounds.iter().filter(|(&n, &r)| r > default_round_bound(n)).map(|(&n, _)| n).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> serde_json::Result<SweepReport> {
        serde_json::from_str(s)
    }
}

const CHUNK: usize = 4096;

/// Runs and judges every scenario on `jobs` worker threads.
///
/// The report does not depend on `jobs`: partial reports merge associatively
/// and exemplars are chosen by position in `specs`.
pub fn sweep<I>(specs: I, jobs: usize) -> SweepReport
where
    I: IntoIterator<Item = ScenarioSpec>,
{
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build().expect("thread pool");
    let mut report = SweepReport::default();
    let mut iter = specs.into_iter();
    let mut base = 0u64;
    loop {
        let chunk: Vec<ScenarioSpec> = iter.by_ref().take(CHUNK).collect();
        if chunk.is_empty() {
            break;
        }
        let part = pool.install(|| {
            chunk
                .par_iter()
                .enumerate()
                .map(|(i, s)| SweepReport::single(base + i as u64, s, evaluate(s)))
                .reduce(SweepReport::default, SweepReport::merge)
        });
        base += chunk.len() as u64;
        report = report.merge(part);
    }
    report
}
