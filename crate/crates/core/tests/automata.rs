//! The shipped automata, pinned as text. Regenerate a dump with
//! `bhs dump-fsm --protocol <p>` after a deliberate change.

use bhs_core::ProtocolId;

fn golden(p: ProtocolId) -> &'static str {
    match p {
        ProtocolId::Ring1 => include_str!("golden/ring1.txt"),
        ProtocolId::Ring2 => include_str!("golden/ring2.txt"),
        ProtocolId::Ring3 => include_str!("golden/ring3.txt"),
    }
}

#[test]
fn dumps_match_golden_files() {
    for p in ProtocolId::ALL {
        assert_eq!(p.automaton().dump(), golden(p), "{p} changed");
    }
}

#[test]
fn every_state_ends_in_a_catch_all() {
    for p in ProtocolId::ALL {
        let a = p.automaton();
        let dump = a.dump();
        for block in dump.split("\n[").skip(1) {
            let name = block.split_whitespace().nth(1).unwrap();
            if name == "FAULT" {
                continue;
            }
            // Each real state ends in a catch-all, so no percept leads to FAULT.
            let last_rule = block.trim_end().lines().last().unwrap().trim();
            assert!(last_rule.starts_with("always ->"), "{p} {name}: {last_rule}");
        }
    }
}
