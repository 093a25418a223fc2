use std::collections::BTreeSet;

use bhs_core::harness::evaluate;
use bhs_core::ring::Mark;
use bhs_core::verifier::check_marks;
use bhs_core::{judge, simulate, Labeling, ProtocolId, RingWorld, ScenarioSpec, Trace};
use proptest::prelude::*;
use proptest::sample::subsequence;

/// Any instance with black hole at `bh`, `k` agents and a labeling drawn from `bits`.
fn instance(protocol: ProtocolId, n: usize, bh: usize, homes: Vec<usize>, bits: u64, oriented: bool) -> ScenarioSpec {
    let spec = ScenarioSpec::new(protocol, n, bh, homes);
    if oriented {
        spec
    } else {
        spec.unoriented(Labeling::from_bits(n, bits))
    }
}

fn any_instance() -> impl Strategy<Value = ScenarioSpec> {
    (prop::sample::select(ProtocolId::ALL.to_vec()), 4usize..=16, any::<u64>(), any::<bool>(), any::<usize>())
        .prop_flat_map(|(p, n, bits, oriented, bh)| {
            let bh = bh % n;
            let others: Vec<usize> = (0..n).filter(|&v| v != bh).collect();
            let k = 1..=(n - 1);
            subsequence(others, k).prop_map(move |homes| instance(p, n, bh, homes, bits, oriented))
        })
}

/// Instances the protocol is meant to solve.
fn solvable() -> impl Strategy<Value = ScenarioSpec> {
    (prop::sample::select(ProtocolId::ALL.to_vec()), 0usize..=10, any::<u64>(), any::<usize>()).prop_flat_map(
        |(p, extra, bits, bh)| {
            let meta = p.meta();
            let n = meta.min_agents + 1 + extra;
            let bh = bh % n;
            let others: Vec<usize> = (0..n).filter(|&v| v != bh).collect();
            subsequence(others, meta.min_agents..=n - 1)
                .prop_map(move |homes| instance(p, n, bh, homes, bits, meta.needs_orientation))
        },
    )
}

fn run(spec: &ScenarioSpec) -> Trace {
    simulate(spec, spec.protocol.automaton()).expect("valid spec")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn simulation_is_deterministic(spec in any_instance()) {
        prop_assert_eq!(run(&spec), run(&spec));
    }

    #[test]
    fn jsonl_round_trip(spec in any_instance()) {
        let t = run(&spec);
        let back = Trace::read_jsonl(t.to_jsonl().as_bytes()).unwrap();
        prop_assert_eq!(back, t);
    }

    #[test]
    fn tokens_are_conserved_and_marks_only_grow(spec in any_instance()) {
        let a = spec.protocol.automaton();
        let mut w = RingWorld::new(&spec, a).unwrap();
        let budget = spec.agents() as u32 * spec.tokens as u32;
        let mut marks = w.marks().clone();
        while w.round() < spec.round_bound && w.live_count() > 0 && w.step(a).is_ok() {
            let carried: u32 = w.agents().iter().map(|x| x.carried as u32).sum();
            prop_assert_eq!(w.placed_tokens() + carried + w.destroyed_tokens(), budget);
            prop_assert_eq!(w.tokens_at(spec.black_hole), 0);
            prop_assert!(marks.is_subset(w.marks()));
            marks = w.marks().clone();
        }
    }

    #[test]
    fn marks_follow_deaths(spec in solvable()) {
        let mut out = Vec::new();
        check_marks(&run(&spec), &mut out);
        prop_assert!(out.is_empty(), "{:?}", out);
    }

    #[test]
    fn black_hole_links_are_marked_only_after_a_death(spec in any_instance()) {
        let t = run(&spec);
        let mut died = BTreeSet::new();
        for r in &t.rounds {
            for m in r.marks_added.iter().filter(|m| m.target(spec.n) == spec.black_hole) {
                prop_assert!(died.contains(m), "{} marked in round {}", m, r.round);
            }
            died.extend(r.deaths.iter().map(|d| d.link()));
        }
    }

    #[test]
    fn rotation_changes_nothing_but_names(spec in any_instance(), by in 0usize..16) {
        let (a, b) = (run(&spec), run(&spec.rotated(by)));
        let (va, vb) = (judge(&a), judge(&b));
        prop_assert_eq!(va.failure_reason, vb.failure_reason);
        prop_assert_eq!(va.dead_count, vb.dead_count);
        prop_assert_eq!(va.rounds_used, vb.rounds_used);
        let n = spec.n;
        let mut moved: Vec<Mark> = va.marked_links.iter().map(|m| Mark { node: (m.node + by) % n, heading: m.heading }).collect();
        moved.sort();
        prop_assert_eq!(moved, vb.marked_links);
    }

    #[test]
    fn reflection_preserves_unoriented_verdicts(spec in any_instance()) {
        prop_assume!(!spec.oriented);
        let (va, vb) = (judge(&run(&spec)), judge(&run(&spec.reflected())));
        prop_assert_eq!(va.failure_reason, vb.failure_reason);
        prop_assert_eq!(va.dead_count, vb.dead_count);
        prop_assert_eq!(va.rounds_used, vb.rounds_used);
    }

    #[test]
    fn ports_away_from_homebases_are_irrelevant(spec in any_instance(), flips in any::<u64>()) {
        prop_assume!(!spec.oriented);
        let mut other = spec.clone();
        let labels = &mut other.port_labeling.as_mut().unwrap().0;
        for v in (0..spec.n).filter(|v| !spec.homebases.contains(v) && flips >> v & 1 == 1) {
            labels[v] = labels[v].flip();
        }
        let (a, b) = (run(&spec), run(&other));
        prop_assert_eq!(a.rounds, b.rounds);
        prop_assert_eq!(a.termination, b.termination);
    }

    #[test]
    fn protocols_solve_their_instances(spec in solvable()) {
        let e = evaluate(&spec);
        prop_assert!(e.verdict.success, "{:?} {}", spec, e.verdict);
        prop_assert!(e.violations.is_empty(), "{:?} {:?}", spec, e.violations);
    }
}
