//! Finite Moore automata for agents: percepts, actions, guards and the
//! transition machinery shared by every protocol.
//!
//! An automaton is a list of states. Each state carries the [`Action`] it
//! emits (its Moore output) and an ordered list of guarded transitions; the
//! first guard that holds on the round's [`Percept`] selects the next state.
//! A percept that matches no guard sends the agent to the `FAULT` state.

use std::fmt;
use std::ops::{BitAnd, BitOr, Not};

use serde::{Deserialize, Serialize};

use crate::protocols::ProtocolId;
use crate::ring::{Heading, Orientation, Side};
use crate::world::{AgentInstance, RingWorld};

/// Index of a state within its automaton.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StateId(pub u8);

/// A set of states of one automaton (at most 64 states).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StateSet(pub u64);

impl StateSet {
    pub const EMPTY: StateSet = StateSet(0);

    pub fn of(states: &[StateId]) -> StateSet {
        states.iter().fold(StateSet::EMPTY, |s, &id| s.with(id))
    }

    pub fn with(self, id: StateId) -> StateSet {
        StateSet(self.0 | (1u64 << id.0))
    }

    pub fn contains(self, id: StateId) -> bool {
        self.0 & (1u64 << id.0) != 0
    }

    pub fn intersects(self, other: StateSet) -> bool {
        self.0 & other.0 != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: StateSet) -> StateSet {
        StateSet(self.0 | other.0)
    }

    pub fn minus(self, other: StateSet) -> StateSet {
        StateSet(self.0 & !other.0)
    }

    pub fn iter(self) -> impl Iterator<Item = StateId> {
        (0..64u8).filter(move |i| self.0 & (1u64 << i) != 0).map(StateId)
    }
}

/// The named phase a state belongs to. Guards such as "there is a LEADER
/// agent" range over every state of a role.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Role {
    Start,
    CautiousLeft,
    CautiousRight,
    CheckLeft,
    CheckRight,
    GoBack,
    Alone,
    Waiting,
    Leader,
    Follower,
    LeftSearcher,
    RightSearcher,
    Searcher,
    RightLeader,
    RightFollower,
    Halt,
    Fault,
}

impl Role {
    pub fn name(self) -> &'static str {
        match self {
            Role::Start => "START",
            Role::CautiousLeft => "CAUTIOUS-LEFT",
            Role::CautiousRight => "CAUTIOUS-RIGHT",
            Role::CheckLeft => "CHECK-LEFT",
            Role::CheckRight => "CHECK-RIGHT",
            Role::GoBack => "GO-BACK",
            Role::Alone => "ALONE",
            Role::Waiting => "WAITING",
            Role::Leader => "LEADER",
            Role::Follower => "FOLLOWER",
            Role::LeftSearcher => "LEFT-SEARCHER",
            Role::RightSearcher => "RIGHT-SEARCHER",
            Role::Searcher => "SEARCHER",
            Role::RightLeader => "RIGHT-LEADER",
            Role::RightFollower => "RIGHT-FOLLOWER",
            Role::Halt => "HALT",
            Role::Fault => "FAULT",
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// What one agent senses during the Look stage, in its own Left/Right frame.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Percept {
    /// States of co-located agents whose orientation agrees with the observer's.
    pub aligned: StateSet,
    /// States of co-located agents with the opposite orientation.
    pub opposed: StateSet,
    /// Tokens placed at the node; never includes the observer's own tokens.
    pub tokens_here: u8,
    /// Direction of the move that brought the agent here, if it moved last round.
    pub arrival: Option<Side>,
    pub carried: u8,
    pub left_dangerous: bool,
    pub right_dangerous: bool,
}

impl Percept {
    /// The set of states held by co-located agents, excluding the observer.
    pub fn states_present(&self) -> StateSet {
        self.aligned.union(self.opposed)
    }

    pub fn dangerous(&self, side: Side) -> bool {
        match side {
            Side::Left => self.left_dangerous,
            Side::Right => self.right_dangerous,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TokenOp {
    #[default]
    None,
    Put,
    Pick,
}

/// The Move-stage output of a state. Executed in the order
/// align, mark, token operation, move, halt.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Action {
    pub token: TokenOp,
    #[serde(rename = "move")]
    pub mv: Option<Side>,
    pub mark: Option<Side>,
    /// Adopt the orientation of a co-located agent in one of these states.
    pub align: Option<StateSet>,
    pub halt: bool,
}

impl Action {
    pub fn idle() -> Action {
        Action::default()
    }

    pub fn go(side: Side) -> Action {
        Action { mv: Some(side), ..Action::default() }
    }

    pub fn put(mut self) -> Action {
        self.token = TokenOp::Put;
        self
    }

    pub fn pick(mut self) -> Action {
        self.token = TokenOp::Pick;
        self
    }

    pub fn and_move(mut self, side: Side) -> Action {
        self.mv = Some(side);
        self
    }

    pub fn marking(mut self, side: Side) -> Action {
        self.mark = Some(side);
        self
    }

    pub fn aligning(mut self, with: StateSet) -> Action {
        self.align = Some(with);
        self
    }

    pub fn halting(mut self) -> Action {
        self.halt = true;
        self
    }
}

/// A predicate over a percept, used to select transitions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Guard {
    Always,
    TokensEq(u8),
    TokensAtLeast(u8),
    /// Some other agent here is in one of these states.
    Present(StateSet),
    /// Some other agent here is in one of these states and shares the observer's orientation.
    PresentAligned(StateSet),
    /// Some other agent here is in one of these states with the opposite orientation.
    PresentOpposed(StateSet),
    /// No other agent (alive or halted) is here.
    NoOthers,
    /// Two distinct agents, one in each set, share an orientation.
    SharedOrientation(StateSet, StateSet),
    Dangerous(Side),
    Not(Box<Guard>),
    All(Vec<Guard>),
    Any(Vec<Guard>),
}

impl Guard {
    pub fn holds(&self, p: &Percept) -> bool {
        match self {
            Guard::Always => true,
            Guard::TokensEq(t) => p.tokens_here == *t,
            Guard::TokensAtLeast(t) => p.tokens_here >= *t,
            Guard::Present(s) => p.states_present().intersects(*s),
            Guard::PresentAligned(s) => p.aligned.intersects(*s),
            Guard::PresentOpposed(s) => p.opposed.intersects(*s),
            Guard::NoOthers => p.states_present().is_empty(),
            Guard::SharedOrientation(a, b) => {
                let together = |x: StateSet| x.intersects(*a) && x.intersects(*b) && distinct(x, *a, *b);
                together(p.aligned) || together(p.opposed)
            }
            Guard::Dangerous(side) => p.dangerous(*side),
            Guard::Not(g) => !g.holds(p),
            Guard::All(gs) => gs.iter().all(|g| g.holds(p)),
            Guard::Any(gs) => gs.iter().any(|g| g.holds(p)),
        }
    }
}

// Distinct states imply distinct agents; one state in both sets may be a single agent.
fn distinct(x: StateSet, a: StateSet, b: StateSet) -> bool {
    (x.0 & (a.0 | b.0)).count_ones() >= 2
}

impl Not for Guard {
    type Output = Guard;
    fn not(self) -> Guard {
        Guard::Not(Box::new(self))
    }
}

impl BitAnd for Guard {
    type Output = Guard;
    fn bitand(self, rhs: Guard) -> Guard {
        match self {
            Guard::All(mut gs) => {
                gs.push(rhs);
                Guard::All(gs)
            }
            g => Guard::All(vec![g, rhs]),
        }
    }
}

impl BitOr for Guard {
    type Output = Guard;
    fn bitor(self, rhs: Guard) -> Guard {
        match self {
            Guard::Any(mut gs) => {
                gs.push(rhs);
                Guard::Any(gs)
            }
            g => Guard::Any(vec![g, rhs]),
        }
    }
}

/// One row of the resource table: what a protocol needs to be correct.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProtocolMeta {
    pub id: ProtocolId,
    pub name: &'static str,
    pub min_agents: usize,
    pub tokens_per_agent: u8,
    pub movable: bool,
    pub needs_orientation: bool,
}

#[derive(Clone, Debug)]
pub struct StateDef {
    pub name: &'static str,
    pub role: Role,
    pub action: Action,
    pub rules: Vec<(Guard, StateId)>,
}

/// A constant-size Moore machine `(S, S0, δ, φ)`.
#[derive(Clone, Debug)]
pub struct Automaton {
    meta: ProtocolMeta,
    states: Vec<StateDef>,
    initial: StateId,
    fault: StateId,
}

impl Automaton {
    pub fn meta(&self) -> &ProtocolMeta {
        &self.meta
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn fault(&self) -> StateId {
        self.fault
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> impl Iterator<Item = (StateId, &StateDef)> {
        self.states.iter().enumerate().map(|(i, s)| (StateId(i as u8), s))
    }

    pub fn state(&self, id: StateId) -> &StateDef {
        &self.states[id.0 as usize]
    }

    pub fn name(&self, id: StateId) -> &'static str {
        self.state(id).name
    }

    pub fn role(&self, id: StateId) -> Role {
        self.state(id).role
    }

    pub fn output(&self, id: StateId) -> Action {
        self.state(id).action
    }

    pub fn state_named(&self, name: &str) -> Option<StateId> {
        self.states().find(|(_, s)| s.name == name).map(|(id, _)| id)
    }

    pub fn role_set(&self, role: Role) -> StateSet {
        self.states()
            .filter(|(_, s)| s.role == role)
            .fold(StateSet::EMPTY, |acc, (id, _)| acc.with(id))
    }

    /// One Compute stage: `next = δ(state, percept)` and the Moore output `φ(next)`.
    pub fn decide(&self, state: StateId, percept: &Percept) -> (StateId, Action) {
        let next = self
            .state(state)
            .rules
            .iter()
            .find(|(g, _)| g.holds(percept))
            .map(|&(_, to)| to)
            .unwrap_or(self.fault);
        (next, self.output(next))
    }

    pub fn set_label(&self, set: StateSet) -> String {
        // Whole roles print as the role name, stray states by name.
        let mut parts = Vec::new();
        let mut rest = set;
        let mut roles: Vec<Role> = self.states.iter().map(|s| s.role).collect();
        roles.dedup();
        for role in roles {
            let rs = self.role_set(role);
            if !rs.is_empty() && rs.0 & rest.0 == rs.0 {
                let states_in_role = rs.0.count_ones();
                parts.push(if states_in_role == 1 {
                    self.name(rs.iter().next().unwrap()).to_string()
                } else {
                    format!("{}*", role.name())
                });
                rest = StateSet(rest.0 & !rs.0);
            }
        }
        parts.extend(rest.iter().map(|id| self.name(id).to_string()));
        parts.join("|")
    }

    pub fn guard_label(&self, guard: &Guard) -> String {
        match guard {
            Guard::Always => "always".into(),
            Guard::TokensEq(t) => format!("tokens={t}"),
            Guard::TokensAtLeast(t) => format!("tokens>={t}"),
            Guard::Present(s) => format!("present({})", self.set_label(*s)),
            Guard::PresentAligned(s) => format!("present-aligned({})", self.set_label(*s)),
            Guard::PresentOpposed(s) => format!("present-opposed({})", self.set_label(*s)),
            Guard::NoOthers => "no-others".into(),
            Guard::SharedOrientation(a, b) => {
                format!("same-orientation({}, {})", self.set_label(*a), self.set_label(*b))
            }
            Guard::Dangerous(side) => format!("dangerous({side})"),
            Guard::Not(g) => format!("!{}", self.guard_label(g)),
            Guard::All(gs) => {
                let inner: Vec<_> = gs.iter().map(|g| self.guard_label(g)).collect();
                format!("({})", inner.join(" & "))
            }
            Guard::Any(gs) => {
                let inner: Vec<_> = gs.iter().map(|g| self.guard_label(g)).collect();
                format!("({})", inner.join(" | "))
            }
        }
    }

    pub fn action_label(&self, a: &Action) -> String {
        let mut parts = Vec::new();
        if let Some(s) = a.align {
            parts.push(format!("align({})", self.set_label(s)));
        }
        if let Some(side) = a.mark {
            parts.push(format!("mark({side})"));
        }
        match a.token {
            TokenOp::Put => parts.push("put".into()),
            TokenOp::Pick => parts.push("pick".into()),
            TokenOp::None => {}
        }
        if let Some(side) = a.mv {
            parts.push(format!("move({side})"));
        }
        if a.halt {
            parts.push("halt".into());
        }
        if parts.is_empty() {
            "stay".into()
        } else {
            parts.join("+")
        }
    }

    /// Human-readable state-machine listing, stable enough for golden files.
    pub fn dump(&self) -> String {
        let m = &self.meta;
        let mut out = format!(
            "automaton {}\n  agents >= {}, tokens = {} ({}), orientation {}\n  states = {}, initial = {}\n",
            m.name,
            m.min_agents,
            m.tokens_per_agent,
            if m.movable { "movable" } else { "unmovable" },
            if m.needs_orientation { "required" } else { "not required" },
            self.states.len(),
            self.name(self.initial),
        );
        for (id, s) in self.states() {
            out.push_str(&format!(
                "\n[{:>2}] {} <{}>  output: {}\n",
                id.0,
                s.name,
                s.role,
                self.action_label(&s.action)
            ));
            for (g, to) in &s.rules {
                out.push_str(&format!("       {} -> {}\n", self.guard_label(g), self.name(*to)));
            }
        }
        out
    }
}

/// Incrementally assembles an [`Automaton`]; states may be referenced
/// before their rules are written.
pub struct AutomatonBuilder {
    meta: ProtocolMeta,
    states: Vec<StateDef>,
}

impl AutomatonBuilder {
    pub fn new(meta: ProtocolMeta) -> AutomatonBuilder {
        AutomatonBuilder { meta, states: Vec::new() }
    }

    pub fn state(&mut self, name: &'static str, role: Role, action: Action) -> StateId {
        assert!(self.states.len() < 63, "automaton exceeds 63 states");
        assert!(self.states.iter().all(|s| s.name != name), "duplicate state {name}");
        self.states.push(StateDef { name, role, action, rules: Vec::new() });
        StateId((self.states.len() - 1) as u8)
    }

    /// Appends a transition; earlier rules take priority.
    pub fn on(&mut self, from: StateId, guard: Guard, to: StateId) -> &mut Self {
        self.states[from.0 as usize].rules.push((guard, to));
        self
    }

    pub fn otherwise(&mut self, from: StateId, to: StateId) -> &mut Self {
        self.on(from, Guard::Always, to)
    }

    pub fn role_set(&self, role: Role) -> StateSet {
        self.states
            .iter()
            .enumerate()
            .filter(|(_, s)| s.role == role)
            .fold(StateSet::EMPTY, |acc, (i, _)| acc.with(StateId(i as u8)))
    }

    /// Every state declared so far.
    pub fn all_states(&self) -> StateSet {
        StateSet((1u64 << self.states.len()) - 1)
    }

    pub fn build(mut self, initial: StateId) -> Automaton {
        let fault = self.state("FAULT", Role::Fault, Action::idle().halting());
        self.on(fault, Guard::Always, fault);
        Automaton { meta: self.meta, states: self.states, initial, fault }
    }
}

/// The orientation an agent adopts at its first step: clockwise in an
/// oriented ring, otherwise whichever heading port 1 of its homebase leads to.
pub fn fix_orientation(agent: &AgentInstance, world: &RingWorld) -> Orientation {
    if world.is_oriented() {
        Orientation::CLOCKWISE
    } else if world.port_one_heading(agent.homebase) == Heading::Cw {
        Orientation { left: Heading::Cw }
    } else {
        Orientation { left: Heading::Ccw }
    }
}

/// Builds the percept of agent `index` from the current (start-of-round) world.
pub fn observe(world: &RingWorld, index: usize) -> Percept {
    let agents = world.agents();
    let me = &agents[index];
    let orient = me.orientation.unwrap_or_else(|| fix_orientation(me, world));
    let mut aligned = StateSet::EMPTY;
    let mut opposed = StateSet::EMPTY;
    for (j, other) in agents.iter().enumerate() {
        if j == index || !other.is_present() || other.location != me.location {
            continue;
        }
        let theirs = other.orientation.unwrap_or_else(|| fix_orientation(other, world));
        if theirs.agrees_with(orient) {
            aligned = aligned.with(other.state);
        } else {
            opposed = opposed.with(other.state);
        }
    }
    frame(world, me, orient, aligned, opposed)
}

fn frame(world: &RingWorld, me: &AgentInstance, orient: Orientation, aligned: StateSet, opposed: StateSet) -> Percept {
    Percept {
        aligned,
        opposed,
        tokens_here: world.tokens_at(me.location),
        arrival: me.arrival.map(|h| orient.side(h)),
        carried: me.carried,
        left_dangerous: world.is_marked(me.location, orient.heading(Side::Left)),
        right_dangerous: world.is_marked(me.location, orient.heading(Side::Right)),
    }
}

/// Who stands where, by orientation; answers [`observe`] without rescanning all agents.
pub(crate) struct Occupancy {
    // Per node and orientation: states held by some agent, and by at least two.
    cells: Vec<[(StateSet, StateSet); 2]>,
}

fn slot(o: Orientation) -> usize {
    (o.left == Heading::Cw) as usize
}

impl Occupancy {
    /// Every agent must already have its orientation fixed.
    pub(crate) fn of(world: &RingWorld) -> Occupancy {
        let mut cells = vec![[(StateSet::EMPTY, StateSet::EMPTY); 2]; world.n()];
        for a in world.agents().iter().filter(|a| a.is_present()) {
            let (once, twice) = &mut cells[a.location][slot(a.orientation.expect("orientation fixed"))];
            if once.contains(a.state) {
                *twice = twice.with(a.state);
            }
            *once = once.with(a.state);
        }
        Occupancy { cells }
    }

    pub(crate) fn observe(&self, world: &RingWorld, index: usize) -> Percept {
        let me = &world.agents()[index];
        let orient = me.orientation.expect("orientation fixed");
        let mine = slot(orient);
        let cell = &self.cells[me.location];
        let (once, twice) = cell[mine];
        let aligned = if twice.contains(me.state) { once } else { once.minus(StateSet::EMPTY.with(me.state)) };
        frame(world, me, orient, aligned, cell[1 - mine].0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn meta() -> ProtocolMeta {
        ProtocolMeta {
            id: ProtocolId::Ring1,
            name: "test",
            min_agents: 1,
            tokens_per_agent: 1,
            movable: true,
            needs_orientation: false,
        }
    }

    fn percept() -> Percept {
        Percept {
            aligned: StateSet::EMPTY,
            opposed: StateSet::EMPTY,
            tokens_here: 0,
            arrival: None,
            carried: 0,
            left_dangerous: false,
            right_dangerous: false,
        }
    }

    #[test]
    fn first_matching_rule_wins_and_output_follows_new_state() {
        let mut b = AutomatonBuilder::new(meta());
        let a = b.state("A", Role::Start, Action::idle());
        let x = b.state("X", Role::Waiting, Action::go(Side::Left));
        let y = b.state("Y", Role::Waiting, Action::idle().put());
        b.on(a, Guard::TokensAtLeast(1), x).on(a, Guard::TokensAtLeast(0), y);
        let m = b.build(a);
        let mut p = percept();
        p.tokens_here = 2;
        assert_eq!(m.decide(a, &p), (x, Action::go(Side::Left)));
        p.tokens_here = 0;
        assert_eq!(m.decide(a, &p), (y, Action::idle().put()));
    }

    #[test]
    fn unmatched_percept_falls_into_absorbing_fault() {
        let mut b = AutomatonBuilder::new(meta());
        let a = b.state("A", Role::Start, Action::idle());
        b.on(a, Guard::NoOthers, a);
        let m = b.build(a);
        let mut p = percept();
        p.opposed = StateSet::of(&[a]);
        let (next, action) = m.decide(a, &p);
        assert_eq!(next, m.fault());
        assert!(action.halt);
        assert_eq!(m.decide(m.fault(), &percept()).0, m.fault());
    }

    #[test]
    fn shared_orientation_needs_two_agents() {
        let mut b = AutomatonBuilder::new(meta());
        let a = b.state("A", Role::Alone, Action::idle());
        let w = b.state("W", Role::Waiting, Action::idle());
        let m = b.build(a);
        let g = Guard::SharedOrientation(StateSet::of(&[a]), StateSet::of(&[w]));
        let mut p = percept();
        p.aligned = StateSet::of(&[a]);
        p.opposed = StateSet::of(&[w]);
        assert!(!g.holds(&p));
        p.opposed = StateSet::of(&[w, a]);
        assert!(g.holds(&p));
        assert_eq!(m.guard_label(&g), "same-orientation(A, W)");
    }
}
