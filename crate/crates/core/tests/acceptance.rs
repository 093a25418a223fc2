//! One line per acceptance criterion, PASS or FAIL, with the numbers behind it.
//!
//! Everything runs in a single test so the lines come out in order; the test
//! fails if any criterion does. The sampled sweep dominates the running time.

use std::io::Write;
use std::time::{Duration, Instant};

use bhs_core::harness::{adversary_search, enumerate, sweep, theorem_scenario, Construction, Family, LabelingMode};
use bhs_core::scenario::default_round_bound;
use bhs_core::verifier::Property;
use bhs_core::{judge, simulate, ProtocolId, SweepReport, Trace};

const RING1_TIME_LIMIT: Duration = Duration::from_secs(60);
const SLOPE_LIMIT: f64 = 30.0;
const ADVERSARY_NMAX: usize = 20;
const SAMPLE_SEED: u64 = 7;
const SAMPLE_PLACEMENTS: usize = 256;
const SAMPLE_LABELINGS: usize = 256;
const JOBS: usize = 8;

struct Board {
    failed: Vec<String>,
}

impl Board {
    fn line(&mut self, id: &str, ok: bool, detail: String) {
        let verdict = if ok { "PASS" } else { "FAIL" };
        let _ = writeln!(std::io::stderr(), "acceptance {id:<3} {verdict}  {detail}");
        if !ok {
            self.failed.push(id.to_string());
        }
    }
}

fn family(protocol: ProtocolId, n: std::ops::RangeInclusive<usize>, mode: LabelingMode) -> Family {
    let k = protocol.meta().min_agents..=*n.end() - 1;
    Family { protocol, n, k, mode }
}

fn summary(r: &SweepReport) -> String {
    format!(
        "{}/{} succeeded, {} traces with violations, deaths {:?}",
        r.successes, r.scenarios, r.traces_with_violations, r.deaths
    )
}

fn mark_violations(r: &SweepReport) -> u64 {
    [Property::MarkPrecededByDeath, Property::MarkedLinkCrossed]
        .iter()
        .map(|p| r.violations.get(p).copied().unwrap_or(0))
        .sum()
}

#[test]
fn acceptance() {
    let mut board = Board { failed: Vec::new() };

    let ring1 = family(ProtocolId::Ring1, 4..=12, LabelingMode::Oriented);
    let t0 = Instant::now();
    let r1 = sweep(enumerate(&ring1), 1);
    let took = t0.elapsed();
    let two_deaths = r1.deaths.keys().all(|&d| d == 2);
    board.line(
        "1",
        r1.is_clean() && two_deaths && took <= RING1_TIME_LIMIT,
        format!("ring1 oriented n 4..12: {} in {:.1}s (limit {}s)", summary(&r1), took.as_secs_f64(), RING1_TIME_LIMIT.as_secs()),
    );

    let ring1u = family(ProtocolId::Ring1, 4..=9, LabelingMode::Exhaustive);
    let r1u = sweep(enumerate(&ring1u), 1);
    board.line("2", r1u.all_succeeded(), format!("ring1 unoriented n 4..9: {}", summary(&r1u)));

    let ring2 = family(ProtocolId::Ring2, 5..=12, LabelingMode::Oriented);
    let r2 = sweep(enumerate(&ring2), 1);
    board.line("3", r2.is_clean(), format!("ring2 oriented n 5..12: {}", summary(&r2)));

    let ring3 = family(ProtocolId::Ring3, 6..=9, LabelingMode::Exhaustive);
    let r3 = sweep(enumerate(&ring3), 1);
    let ring3s = family(
        ProtocolId::Ring3,
        10..=40,
        LabelingMode::Sampled { seed: SAMPLE_SEED, placements: SAMPLE_PLACEMENTS, labelings: SAMPLE_LABELINGS },
    );
    let r3s = sweep(enumerate(&ring3s), JOBS);
    board.line(
        "4",
        r3.is_clean() && r3s.is_clean(),
        format!("ring3 exhaustive n 6..9: {}; sampled n 10..40: {}", summary(&r3), summary(&r3s)),
    );

    let all = [&r1, &r1u, &r2, &r3, &r3s].into_iter().cloned().fold(SweepReport::default(), SweepReport::merge);
    let worst = all.max_rounds.iter().map(|(&n, &r)| r as f64 / default_round_bound(n) as f64).fold(0.0, f64::max);
    let slope = all.fitted_slope().unwrap_or(f64::INFINITY);
    board.line(
        "5",
        all.over_bound().is_empty() && slope < SLOPE_LIMIT,
        format!("max rounds at most {:.2} of 30n+30, fitted slope {slope:.2} (limit {SLOPE_LIMIT})", worst),
    );

    let mut witnesses = Vec::new();
    let mut ok6 = true;
    for (p, k) in [(ProtocolId::Ring1, 2), (ProtocolId::Ring2, 3), (ProtocolId::Ring3, 4)] {
        let meta = p.meta();
        match adversary_search(p.automaton(), k, meta.tokens_per_agent, meta.movable, ADVERSARY_NMAX) {
            Some(hit) => witnesses.push(format!("{p} k={k}: n={} {}", hit.spec.n, hit.verdict.failure_reason.unwrap().as_str())),
            None => {
                ok6 = false;
                witnesses.push(format!("{p} k={k}: none"));
            }
        }
    }
    for c in [
        Construction::Periodic { k: 3, p: 2 },
        Construction::ThreeAgents { t: 2, x: 1, y: 2 },
        Construction::MirrorFour { t: 2, x: 1 },
    ] {
        let specs = theorem_scenario(c).expect("construction builds");
        let failing = specs.iter().filter(|s| !judge(&simulate(s, s.protocol.automaton()).unwrap()).success).count();
        ok6 &= failing == specs.len();
        witnesses.push(format!("{c:?}: {failing}/{} fail", specs.len()));
    }
    board.line("6", ok6, witnesses.join("; "));

    let marks: Vec<u64> = [&r1, &r1u, &r2, &r3, &r3s].iter().map(|r| mark_violations(r)).collect();
    board.line("7", marks.iter().all(|&v| v == 0), format!("mark-before-death or marked-crossing per sweep: {marks:?}"));

    let mut same = true;
    for (f, jobs1) in [(&ring1, &r1), (&ring1u, &r1u), (&ring2, &r2), (&ring3, &r3)] {
        same &= sweep(enumerate(f), JOBS).to_json() == jobs1.to_json();
    }
    let under = Family { protocol: ProtocolId::Ring1, n: 4..=9, k: 2..=2, mode: LabelingMode::Oriented };
    let failures = sweep(enumerate(&under), 1);
    let mut replayed = 0;
    for ex in &failures.failure_exemplars {
        let stored = simulate(&ex.spec, ex.spec.protocol.automaton()).unwrap();
        let back = Trace::read_jsonl(stored.to_jsonl().as_bytes()).unwrap();
        let again = simulate(&back.spec, back.spec.protocol.automaton()).unwrap();
        if again == back && judge(&again) == ex.verdict {
            replayed += 1;
        }
    }
    board.line(
        "8",
        same && replayed == failures.failure_exemplars.len() && replayed > 0,
        format!("jobs 1 vs {JOBS} reports identical: {same}; exemplars replayed: {replayed}/{}", failures.failure_exemplars.len()),
    );

    assert!(board.failed.is_empty(), "failed criteria: {:?}", board.failed);
}
