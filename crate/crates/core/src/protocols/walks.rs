//! Sub-machines shared by the protocols.
//!
//! Each builder adds its states to an [`AutomatonBuilder`] and wires the
//! transitions internal to the walk; the caller wires the exits.

use crate::agent::{Action, AutomatonBuilder, Role, StateId};
use crate::ring::Side;

/// Put, step, step back, pick, step: a safe advance with a movable token.
///
/// The origin holds the token during the two rounds the agent is away, so an
/// agent that dies in the first step leaves its token behind.
#[derive(Clone, Copy, Debug)]
pub struct CautiousWalk {
    /// Put the token and step out.
    pub put: StateId,
    /// Step back to the token.
    pub back: StateId,
    /// Pick the token and step out again. Exits are wired by the caller.
    pub pick: StateId,
}

pub fn cautious_walk(b: &mut AutomatonBuilder, side: Side, role: Role, names: [&'static str; 3]) -> CautiousWalk {
    let put = b.state(names[0], role, Action::go(side).put());
    let back = b.state(names[1], role, Action::go(side.flip()));
    let pick = b.state(names[2], role, Action::go(side).pick());
    b.otherwise(put, back).otherwise(back, pick);
    CautiousWalk { put, back, pick }
}

/// The probing half of a paired walk: out, back, out again.
#[derive(Clone, Copy, Debug)]
pub struct PairedLeader {
    pub out: StateId,
    /// Standing at the origin again; the follower checks for this state.
    pub back: StateId,
    /// Arrived together with the follower. Exits are wired by the caller.
    pub fwd: StateId,
}

pub fn paired_leader(b: &mut AutomatonBuilder, side: Side, role: Role, names: [&'static str; 3]) -> PairedLeader {
    let out = b.state(names[0], role, Action::go(side));
    let back = b.state(names[1], role, Action::go(side.flip()));
    let fwd = b.state(names[2], role, Action::go(side));
    b.otherwise(out, back).otherwise(back, fwd);
    PairedLeader { out, back, fwd }
}

/// The waiting half of a paired walk: wait two rounds, then follow if the
/// leader came back.
#[derive(Clone, Copy, Debug)]
pub struct PairedFollower {
    pub wait1: StateId,
    /// Decides between following and concluding the leader was lost.
    pub wait2: StateId,
    /// Step taken together with the leader. Exits are wired by the caller.
    pub go: StateId,
}

pub fn paired_follower(b: &mut AutomatonBuilder, side: Side, role: Role, names: [&'static str; 3]) -> PairedFollower {
    let wait1 = b.state(names[0], role, Action::idle());
    let wait2 = b.state(names[1], role, Action::idle());
    let go = b.state(names[2], role, Action::go(side));
    b.otherwise(wait1, wait2);
    PairedFollower { wait1, wait2, go }
}
