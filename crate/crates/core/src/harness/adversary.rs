use serde::{Deserialize, Serialize};

use crate::agent::Automaton;
use crate::scenario::{Labeling, ScenarioSpec};
use crate::verifier::{judge, Verdict};
use crate::world::simulate;

use super::enumerate::placements;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdversaryHit {
    pub spec: ScenarioSpec,
    pub verdict: Verdict,
    /// Scenarios run before this one was found, including it.
    pub examined: u64,
}

/// First failing scenario for `k` agents in canonical order: ring size, then
/// placement, then labeling (the consistent one first, and only that one for
/// automata that assume an oriented ring).
pub fn adversary_search(
    automaton: &Automaton,
    k: usize,
    tokens: u8,
    movable: bool,
    n_max: usize,
) -> Option<AdversaryHit> {
    let meta = automaton.meta();
    let mut examined = 0u64;
    for n in (k + 1).max(3)..=n_max {
        for homes in placements(n, k) {
            let base = ScenarioSpec::new(meta.id, n, 0, homes).with_tokens(tokens, movable);
            let labelings = (!meta.needs_orientation)
                .then(|| (1..1u64 << n).map(move |bits| Labeling::from_bits(n, bits)))
                .into_iter()
                .flatten();
            let candidates = std::iter::once(base.clone())
                .chain(labelings.map(|l| base.clone().unoriented(l)).filter(|s| s.is_canonical()));
            for spec in candidates {
                examined += 1;
                let verdict = match simulate(&spec, automaton) {
                    Ok(trace) => judge(&trace),
                    Err(_) => continue,
                };
                if !verdict.success {
                    return Some(AdversaryHit { spec, verdict, examined });
                }
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocols::ProtocolId;

    #[test]
    fn two_movable_agents_are_defeated_quickly() {
        let hit = adversary_search(ProtocolId::Ring1.automaton(), 2, 1, true, 20).expect("failing scenario");
        assert!(hit.spec.n <= 20);
        assert!(!hit.verdict.success);
        assert_eq!(hit.spec.agents(), 2);
    }

    #[test]
    fn nothing_found_when_all_pass() {
        assert!(adversary_search(ProtocolId::Ring1.automaton(), 3, 1, true, 7).is_none());
    }
}
