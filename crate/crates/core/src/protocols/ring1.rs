//! Three agents with one movable token each.
//!
//! Every agent cautiously walks Left until, after a completed step, it sees a
//! token with nobody beside it: the token's owner died one step further on.
//! It marks that link, turns around and does the same to the Right, then
//! marks the second link and halts. The mark is issued together with the
//! first action of the next phase, which keeps every agent in the same
//! three-round phase as the others.

use crate::agent::{Action, Automaton, AutomatonBuilder, Guard, Role};
use crate::ring::Side;

use super::walks::cautious_walk;
use super::ProtocolId;

pub fn build_ring1() -> Automaton {
    let mut b = AutomatonBuilder::new(ProtocolId::Ring1.meta());
    let start = b.state("START", Role::Start, Action::idle());
    let left = cautious_walk(&mut b, Side::Left, Role::CautiousLeft, ["L-PUT", "L-BACK", "L-PICK"]);
    let turn = b.state("R-MARK-PUT", Role::CautiousRight, Action::go(Side::Right).put().marking(Side::Left));
    let right = cautious_walk(&mut b, Side::Right, Role::CautiousRight, ["R-PUT", "R-BACK", "R-PICK"]);
    let halt = b.state("HALT", Role::Halt, Action::idle().marking(Side::Right).halting());

    let abandoned = |side| (Guard::TokensAtLeast(1) & Guard::NoOthers) | Guard::Dangerous(side);
    b.otherwise(start, left.put);
    b.on(left.pick, abandoned(Side::Left), turn).otherwise(left.pick, left.put);
    b.otherwise(turn, right.back);
    b.on(right.pick, abandoned(Side::Right), halt).otherwise(right.pick, right.put);
    b.otherwise(halt, halt);
    b.build(start)
}

#[cfg(test)]
mod tests {
    use crate::agent::Role;
    use crate::protocols::ProtocolId;
    use crate::ring::{Heading, Mark};
    use crate::scenario::{Labeling, ScenarioSpec};
    use crate::trace::Termination;
    use crate::world::{simulate, AgentStatus, RingWorld};

    #[test]
    fn nearest_agent_dies_in_first_step() {
        let a = ProtocolId::Ring1.automaton();
        let spec = ScenarioSpec::new(ProtocolId::Ring1, 4, 0, vec![1, 2, 3]);
        let mut w = RingWorld::new(&spec, a).unwrap();
        for _ in 0..3 {
            w.step(a).unwrap();
        }
        assert_eq!(w.agents()[0].status, AgentStatus::Dead);
        assert!(w.agents()[1..].iter().all(|x| x.status == AgentStatus::Alive));
        // Its token stayed behind at node 1.
        assert_eq!(w.tokens_at(1), 1);
    }

    #[test]
    fn ten_ring_marks_both_links_and_halts() {
        let a = ProtocolId::Ring1.automaton();
        let spec = ScenarioSpec::new(ProtocolId::Ring1, 10, 0, vec![3, 6, 9]).with_bound(330);
        let t = simulate(&spec, a).unwrap();
        assert_eq!(t.termination, Termination::Quiescent);
        let marks: Vec<Mark> = t.marks().into_iter().collect();
        assert_eq!(marks, vec![Mark { node: 1, heading: Heading::Cw }, Mark { node: 9, heading: Heading::Ccw }]);
        assert_eq!(t.dead_count(), 2);
    }

    #[test]
    fn unoriented_agents_walk_their_own_left() {
        let a = ProtocolId::Ring1.automaton();
        // Agent at 3 sees port 1 anticlockwise, so it walks away from the black hole first.
        let spec = ScenarioSpec::new(ProtocolId::Ring1, 8, 0, vec![3, 5, 7]).unoriented("cccacccc".parse::<Labeling>().unwrap());
        let t = simulate(&spec, a).unwrap();
        let first = &t.rounds[0].steps[0];
        assert_eq!(first.left, Heading::Ccw);
        assert_eq!(first.location, 4);
        assert_eq!(t.marks().len(), 2);
        assert_eq!(a.role(first.state_after), Role::CautiousLeft);
    }
}
