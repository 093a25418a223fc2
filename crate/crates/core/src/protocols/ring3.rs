//! Five agents with two unmovable tokens each, unoriented ring.
//!
//! Each agent marks its homebase, visits the next token on its Left, comes
//! back, visits the next token on its Right and comes home to put its second
//! token. The two agents whose homebases flank the black hole are lost and
//! leave one gate on each side. Survivors pair up at single-token nodes and
//! probe Left, the follower adopting the leader's orientation. A follower
//! whose leader vanishes marks that link and becomes a RIGHT-LEADER: it looks
//! for a partner at the near gate, walks slowly to the far gate and back, and
//! probes Right with the first RIGHT-FOLLOWER it meets.
//!
//! Pairing between arriving agents is decided by relative orientation, so two
//! candidates that reach a node from opposite sides never both take the same
//! role.

use crate::agent::{Action, Automaton, AutomatonBuilder, Guard, Role, StateId, StateSet};
use crate::ring::Side;

use super::walks::{paired_follower, paired_leader};
use super::ProtocolId;

use Guard::{Dangerous, Present, PresentAligned, PresentOpposed, SharedOrientation, TokensEq};

pub fn build_ring3() -> Automaton {
    let mut b = AutomatonBuilder::new(ProtocolId::Ring3.meta());
    let (l, r) = (Side::Left, Side::Right);

    let start = b.state("START", Role::Start, Action::idle());
    let cl_put = b.state("CL-PUT", Role::CheckLeft, Action::go(l).put());
    let cl = b.state("CL", Role::CheckLeft, Action::go(l));
    let cr = b.state("CR", Role::CheckRight, Action::go(r));
    let cr2 = b.state("CR2", Role::CheckRight, Action::go(r));
    let gb = b.state("GB", Role::GoBack, Action::go(l));
    let gb_put = b.state("GB-PUT", Role::GoBack, Action::idle().put());
    let alone = b.state("ALONE", Role::Alone, Action::go(l));
    let hold = b.state("ALONE-HOLD", Role::Alone, Action::idle());
    let waiting = b.state("WAITING", Role::Waiting, Action::idle());

    let leader = b.state("LEADER", Role::Leader, Action::idle());
    let lw = paired_leader(&mut b, l, Role::Leader, ["L-OUT", "L-BACK", "L-FWD"]);
    let follower = b.state("FOLLOWER", Role::Follower, Action::idle());
    let f_align = b.state("F-ALIGN", Role::Follower, Action::idle().aligning(StateSet::of(&[leader])));
    let fw = paired_follower(&mut b, l, Role::Follower, ["F-WAIT1", "F-WAIT2", "F-GO"]);
    let f_idle = b.state("F-IDLE", Role::Follower, Action::idle());

    let searcher = b.state("SEARCHER", Role::Searcher, Action::go(r));

    let rl_mark = b.state("RL-MARK", Role::RightLeader, Action::go(r).marking(l));
    let rl = b.state("RL", Role::RightLeader, Action::go(r));
    let near_mark = b.state("RL-GATE-MARK", Role::RightLeader, Action::idle().marking(l));
    let near = b.state("RL-GATE", Role::RightLeader, Action::idle());
    let near2 = b.state("RL-GATE2", Role::RightLeader, Action::idle());
    // Two tours, each: slow walk out, pause at the far gate, fast walk back, pause at the near gate.
    let tours: Vec<[StateId; 8]> = [
        ["RL-SLOW-1", "RL-SLOW-1A", "RL-SLOW-1B", "RL-FAR-1", "RL-FAR-1B", "RL-RETURN-1", "RL-NEAR-1", "RL-NEAR-1B"],
        ["RL-SLOW-2", "RL-SLOW-2A", "RL-SLOW-2B", "RL-FAR-2", "RL-FAR-2B", "RL-RETURN-2", "RL-NEAR-2", "RL-NEAR-2B"],
    ]
    .iter()
    .map(|names| {
        let acts = [Action::go(r), Action::idle(), Action::idle(), Action::idle(), Action::idle(), Action::go(l), Action::idle(), Action::idle()];
        std::array::from_fn(|i| b.state(names[i], Role::RightLeader, acts[i]))
    })
    .collect();
    let rlw = paired_leader(&mut b, r, Role::RightLeader, ["RL-OUT", "RL-BACK", "RL-FWD"]);
    let deciders = StateSet::of(&[near2, tours[0][4], tours[0][7], tours[1][4], tours[1][7]]);
    let rl_done = b.state("RL-DONE", Role::RightLeader, Action::idle().halting());

    let rf = b.state("RF", Role::RightFollower, Action::idle());
    let rf_align = b.state("RF-ALIGN", Role::RightFollower, Action::idle().aligning(deciders.with(rlw.fwd)));
    let rfw = paired_follower(&mut b, r, Role::RightFollower, ["RF-WAIT1", "RF-WAIT2", "RF-GO"]);
    let rf_idle = b.state("RF-IDLE", Role::RightFollower, Action::idle());
    let halt = b.state("HALT", Role::Halt, Action::idle().marking(r).halting());

    let all = b.all_states();
    let leaders = b.role_set(Role::Leader);
    let right_leaders = b.role_set(Role::RightLeader).minus(StateSet::of(&[rl_done]));
    let arriving = StateSet::of(&[alone]);
    let holding = StateSet::of(&[hold]);
    let waiters = StateSet::of(&[waiting]);
    let put_down = StateSet::of(&[gb_put]);
    let returning = StateSet::of(&[gb]);
    let single = || TokensEq(1);
    // A RIGHT-FOLLOWER joins a lone RIGHT-LEADER that is deciding at a gate or
    // about to step out of a paired walk; other candidates join the latter directly.
    let lone = |s: StateId| Present(StateSet::of(&[s])) & !Present(right_leaders.minus(StateSet::of(&[s])));
    let two_right_leaders = PresentAligned(right_leaders) & PresentOpposed(right_leaders);
    let joinable = Guard::Any(deciders.with(rlw.fwd).iter().map(lone).collect()) & !two_right_leaders.clone();
    let passing = lone(rlw.fwd) & !two_right_leaders;
    let only = move |set: StateSet| !Present(all.minus(set));
    // Agents passing through, parked for a RIGHT-LEADER or finished: none of them pairs.
    let bystanders = StateSet::of(&[cl_put, cl, cr, cr2, gb, searcher, rf, f_idle, rf_idle, rl_done, halt]);

    // Become a SEARCHER; one already standing on a single-token node is done searching.
    let to_searcher = |b: &mut AutomatonBuilder, s: StateId, g: Guard| {
        b.on(s, g.clone() & single(), rf).on(s, g, searcher);
    };

    b.otherwise(start, cl_put);
    for s in [cl_put, cl] {
        b.on(s, Guard::TokensAtLeast(1), cr).otherwise(s, cl);
    }
    b.on(cr, Guard::TokensAtLeast(1), cr2).otherwise(cr, cr);
    b.on(cr2, Guard::TokensAtLeast(1), gb).otherwise(cr2, cr2);
    b.on(gb, single(), gb_put).otherwise(gb, gb);

    b.on(gb_put, passing.clone(), rf_align).on(gb_put, Present(right_leaders), rf);
    to_searcher(&mut b, gb_put, Present(leaders));
    b.on(gb_put, Present(arriving.union(holding).union(waiters)), follower).otherwise(gb_put, alone);

    // ALONE stops at a single-token node or at a homebase whose owner just put its second token.
    let stop = single() | (TokensEq(2) & Present(put_down));
    b.on(alone, !stop, alone)
        .on(alone, passing.clone(), rf_align)
        .on(alone, Present(right_leaders), rf);
    to_searcher(&mut b, alone, Present(leaders));
    // An agent already holding here has priority over newcomers.
    to_searcher(&mut b, alone, Present(holding));
    b.on(alone, Present(waiters) & !Present(put_down) & SharedOrientation(arriving, waiters), searcher)
        .on(alone, Present(waiters) & !Present(put_down), follower);
    to_searcher(&mut b, alone, Present(put_down) & !Present(waiters) & SharedOrientation(arriving, put_down));
    b.on(alone, Present(put_down) & !Present(waiters), leader)
        // The owner is home but has not put its second token yet.
        .on(alone, Present(returning) & single(), hold)
        // Two agents that reach an empty gate from opposite sides both wait.
        .on(alone, only(arriving.union(bystanders)), waiting);
    to_searcher(&mut b, alone, Guard::Always);

    b.on(hold, passing.clone(), rf_align).on(hold, Present(right_leaders), rf);
    to_searcher(&mut b, hold, Present(leaders));
    to_searcher(&mut b, hold, Present(put_down) & !Present(waiters) & SharedOrientation(holding, put_down));
    b.on(hold, Present(put_down) & !Present(waiters), leader)
        .on(hold, Present(returning), hold)
        .on(hold, only(bystanders) & single(), waiting);
    to_searcher(&mut b, hold, Guard::Always);

    b.on(waiting, passing.clone(), rf_align).on(waiting, Present(right_leaders), rf);
    to_searcher(&mut b, waiting, Present(leaders));
    to_searcher(&mut b, waiting, Present(put_down) & SharedOrientation(waiters, put_down));
    b.on(waiting, Present(put_down), leader);
    to_searcher(&mut b, waiting, Present(arriving) & SharedOrientation(waiters, arriving));
    b.on(waiting, Present(arriving), leader).on(waiting, only(waiters.union(bystanders)), waiting);
    to_searcher(&mut b, waiting, Guard::Always);

    // Left paired walk. A fresh pair that finds another pair's walk at its
    // node dissolves into searchers instead of probing out of phase with it.
    let walking = StateSet::of(&[lw.out, lw.back, lw.fwd, f_align, fw.wait1, fw.wait2, fw.go]);
    to_searcher(&mut b, leader, Dangerous(l) | Present(walking));
    b.otherwise(leader, lw.out);
    to_searcher(&mut b, lw.fwd, Dangerous(l));
    b.otherwise(lw.fwd, lw.out);

    to_searcher(&mut b, follower, Present(walking));
    b.otherwise(follower, f_align);
    b.on(f_align, Dangerous(l), f_idle).otherwise(f_align, fw.wait2);
    b.on(fw.wait2, Present(StateSet::of(&[lw.back])), fw.go)
        .on(fw.wait2, single(), near_mark)
        .otherwise(fw.wait2, rl_mark);
    b.on(fw.go, Present(StateSet::of(&[lw.fwd])) & !Dangerous(l), fw.wait1).otherwise(fw.go, f_idle);
    b.otherwise(f_idle, f_idle);

    b.on(searcher, single(), rf).otherwise(searcher, searcher);

    // RIGHT-LEADER: near gate, then twice a slow walk to the far gate and a
    // fast walk back, stopping at the first gate where a RIGHT-FOLLOWER joins;
    // then probe Right for good, with or without one.
    // Two RIGHT-LEADERs mean both links are marked already.
    let any_right_leader = b.role_set(Role::RightLeader);
    let touring = any_right_leader.minus(StateSet::of(&[rlw.out, rlw.back, rlw.fwd, rl_done]));
    for s in touring.iter() {
        b.on(s, Present(any_right_leader), rl_done);
    }
    for s in [rl_mark, rl] {
        b.on(s, single(), near).otherwise(s, rl);
    }
    b.otherwise(near_mark, near2).otherwise(near, near2);
    // A left probe under way here may be about to mark the link we would take.
    let probing = StateSet::of(&[f_align, fw.wait1, fw.wait2]);
    let decide = |b: &mut AutomatonBuilder, s: StateId, give_up: StateId| {
        b.on(s, Dangerous(r), rl_done)
            .on(s, Present(probing), s)
            .on(s, Present(StateSet::of(&[rf])), rlw.out)
            .otherwise(s, give_up);
    };
    let mut gate = near2;
    for &[slow, slow_a, slow_b, far, far_b, ret, back, back_b] in &tours {
        decide(&mut b, gate, slow);
        b.on(slow, single(), far).otherwise(slow, slow_a);
        b.otherwise(slow_a, slow_b).otherwise(slow_b, slow);
        b.otherwise(far, far_b);
        decide(&mut b, far_b, ret);
        b.on(ret, single(), back).otherwise(ret, ret);
        b.otherwise(back, back_b);
        gate = back_b;
    }
    decide(&mut b, gate, rlw.out);
    b.on(rlw.fwd, Dangerous(r), rl_done).otherwise(rlw.fwd, rlw.out);
    b.otherwise(rl_done, rl_done);

    b.on(rf, joinable & !Present(probing), rf_align)
        .on(rf, !single(), searcher)
        .otherwise(rf, rf);
    b.otherwise(rf_align, rfw.wait2);
    b.on(rfw.wait2, Present(StateSet::of(&[rlw.back])), rfw.go).otherwise(rfw.wait2, halt);
    b.on(rfw.go, Present(StateSet::of(&[rlw.fwd])), rfw.wait1).otherwise(rfw.go, rf_idle);
    b.otherwise(rf_idle, rf_idle);
    b.otherwise(halt, halt);
    b.build(start)
}
