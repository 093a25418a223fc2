//! Four agents with two unmovable tokens each, oriented ring.
//!
//! Each agent marks its homebase, walks Left to the next token and back, and
//! puts its second token; the one agent whose walk crosses the black hole is
//! lost and its homebase keeps a single token (the gate). Survivors gather in
//! pairs at single-token nodes and probe Left with a paired walk. The
//! follower whose leader vanishes marks that link, walks Right to a
//! single-token node as RIGHT-LEADER, and probes the other way with the
//! first agent that joins it.
//!
//! Pairing decisions look at specific sub-states so that both partners of a
//! pair switch roles in the same round: a GO-BACK agent counts as a partner
//! only once its second token is down, and a RIGHT-LEADER only while it
//! stands still at its single-token node.

use crate::agent::{Action, Automaton, AutomatonBuilder, Guard, Role, StateSet};
use crate::ring::Side;

use super::walks::{paired_follower, paired_leader};
use super::ProtocolId;

use Guard::{Dangerous, NoOthers, Present, TokensEq};

pub fn build_ring2() -> Automaton {
    let mut b = AutomatonBuilder::new(ProtocolId::Ring2.meta());
    let (l, r) = (Side::Left, Side::Right);

    let start = b.state("START", Role::Start, Action::idle());
    let cl_put = b.state("CL-PUT", Role::CheckLeft, Action::go(l).put());
    let cl = b.state("CL", Role::CheckLeft, Action::go(l));
    let gb = b.state("GB", Role::GoBack, Action::go(r));
    let gb_put = b.state("GB-PUT", Role::GoBack, Action::idle().put());
    let alone = b.state("ALONE", Role::Alone, Action::go(l));
    let alone_hold = b.state("ALONE-HOLD", Role::Alone, Action::idle());
    let waiting = b.state("WAITING", Role::Waiting, Action::idle());

    let leader = b.state("LEADER", Role::Leader, Action::idle());
    let lw = paired_leader(&mut b, l, Role::Leader, ["L-OUT", "L-BACK", "L-FWD"]);
    let follower = b.state("FOLLOWER", Role::Follower, Action::idle());
    let fw = paired_follower(&mut b, l, Role::Follower, ["F-WAIT1", "F-WAIT2", "F-GO"]);
    let f_idle = b.state("F-IDLE", Role::Follower, Action::idle());

    let ls = b.state("LS", Role::LeftSearcher, Action::go(l));
    let ls_wait = b.state("LS-WAIT", Role::LeftSearcher, Action::idle());
    let rs = b.state("RS", Role::RightSearcher, Action::go(r));
    let rs_wait = b.state("RS-WAIT", Role::RightSearcher, Action::idle());

    let rl_mark = b.state("RL-MARK", Role::RightLeader, Action::go(r).marking(l));
    let rl = b.state("RL", Role::RightLeader, Action::go(r));
    let rl_gate_mark = b.state("RL-GATE-MARK", Role::RightLeader, Action::idle().marking(l));
    let rl_gate = b.state("RL-GATE", Role::RightLeader, Action::idle());
    let rlw = paired_leader(&mut b, r, Role::RightLeader, ["RL-OUT", "RL-BACK", "RL-FWD"]);

    let rf = b.state("RF", Role::RightFollower, Action::idle());
    let rfw = paired_follower(&mut b, r, Role::RightFollower, ["RF-WAIT1", "RF-WAIT2", "RF-GO"]);
    let rf_idle = b.state("RF-IDLE", Role::RightFollower, Action::idle());
    let halt = b.state("HALT", Role::Halt, Action::idle().marking(r).halting());

    let leaders = b.role_set(Role::Leader);
    let go_back = b.role_set(Role::GoBack);
    let alones = b.role_set(Role::Alone);
    let waiters = StateSet::of(&[waiting]);
    let put_down = StateSet::of(&[gb_put]);
    let rl_ready = StateSet::of(&[rl_gate, rl_gate_mark]);
    let single = || TokensEq(1);

    b.otherwise(start, cl_put);
    for s in [cl_put, cl] {
        b.on(s, Guard::TokensAtLeast(1), gb).otherwise(s, cl);
    }
    b.on(gb, Guard::TokensAtLeast(1), gb_put).otherwise(gb, gb);

    b.on(gb_put, Present(rl_ready), rf)
        .on(gb_put, Present(leaders), ls)
        .on(gb_put, Present(alones.union(waiters)), follower)
        .otherwise(gb_put, alone);

    // ALONE stops at a single-token node or at a homebase whose owner just put its second token.
    let stop = single() | (TokensEq(2) & Present(go_back));
    for s in [alone, alone_hold] {
        b.on(s, Present(rl_ready), rf)
            .on(s, Present(leaders) & single(), ls_wait)
            .on(s, Present(leaders), ls);
        if s == alone {
            // Somebody already holds here and will take the next pairing.
            b.on(s, Present(StateSet::of(&[alone_hold])) & single(), ls_wait)
                .on(s, Present(StateSet::of(&[alone_hold])), ls);
        }
        b.on(s, !stop.clone(), alone)
            .on(s, Present(put_down) & !Present(waiters), leader)
            .on(s, Present(waiters) & !Present(go_back), follower)
            .on(s, NoOthers, waiting)
            .otherwise(s, alone_hold);
    }

    b.on(waiting, Present(leaders), ls_wait)
        .on(waiting, Present(rl_ready), rf)
        .on(waiting, Present(put_down), leader)
        .on(waiting, Present(alones) & !Present(go_back), leader)
        .otherwise(waiting, waiting);

    // Left paired walk. A fresh pair that finds another pair's walk at its
    // node dissolves into searchers instead of probing out of phase with it.
    let walking = StateSet::of(&[lw.out, lw.back, lw.fwd, fw.wait1, fw.wait2, fw.go]);
    for s in [leader, lw.fwd] {
        b.on(s, Dangerous(l) & single(), rs_wait).on(s, Dangerous(l), rs);
        if s == leader {
            b.on(s, Present(walking) & single(), ls_wait).on(s, Present(walking), ls);
        }
        b.otherwise(s, lw.out);
    }
    b.on(follower, Dangerous(l), f_idle)
        .on(follower, Present(walking) & single(), ls_wait)
        .on(follower, Present(walking), ls)
        .otherwise(follower, fw.wait1);
    b.on(fw.wait2, Present(StateSet::of(&[lw.back])), fw.go)
        .on(fw.wait2, single(), rl_gate_mark)
        .otherwise(fw.wait2, rl_mark);
    b.on(fw.go, Present(StateSet::of(&[lw.fwd])) & !Dangerous(l), fw.wait1).otherwise(fw.go, f_idle);
    b.otherwise(f_idle, f_idle);

    // Searchers settle on a single-token node and wait for the RIGHT-LEADER.
    for (moving, parked) in [(ls, ls_wait), (rs, rs_wait)] {
        for s in [moving, parked] {
            b.on(s, Present(rl_ready), rf).on(s, single(), parked).otherwise(s, moving);
        }
    }

    // RIGHT-LEADER: walk Right to a single-token node, wait for a partner, probe Right forever.
    for s in [rl_mark, rl] {
        b.on(s, single(), rl_gate).otherwise(s, rl);
    }
    for s in [rl_gate_mark, rl_gate] {
        b.on(s, Present(StateSet::of(&[rf])), rlw.out).on(s, single(), rl_gate).otherwise(s, rl);
    }
    b.otherwise(rlw.fwd, rlw.out);

    b.on(rf, Present(rl_ready), rfw.wait1).on(rf, single(), rs_wait).otherwise(rf, rs);
    b.on(rfw.wait2, Present(StateSet::of(&[rlw.back])), rfw.go).otherwise(rfw.wait2, halt);
    b.on(rfw.go, Present(StateSet::of(&[rlw.fwd])), rfw.wait1).otherwise(rfw.go, rf_idle);
    b.otherwise(rf_idle, rf_idle);
    b.otherwise(halt, halt);
    b.build(start)
}
