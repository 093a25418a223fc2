//! The ring, its tokens and marks, and the lockstep round engine.
//!
//! Every round all live agents Look at the same start-of-round snapshot,
//! Compute their next state, and then Move simultaneously. An agent whose
//! move lands on the black hole dies at the end of the round together with
//! the tokens it carries; tokens it put before stepping stay behind.

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::agent::{fix_orientation, Action, Automaton, Occupancy, StateId, TokenOp};
use crate::error::{SpecError, StepError};
use crate::ring::{edge_index, Heading, Mark, Orientation};
use crate::scenario::ScenarioSpec;
use crate::trace::{AgentStep, Death, RoundRecord, Termination, Trace};

/// Upper bound on tokens resting on one node.
pub const NODE_CAPACITY: u8 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AgentStatus {
    Alive,
    Dead,
    Halted,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AgentInstance {
    /// Simulator-side identifier; agents never see it.
    pub id: usize,
    pub homebase: usize,
    pub status: AgentStatus,
    pub location: usize,
    pub state: StateId,
    pub carried: u8,
    /// Fixed at the agent's first step.
    pub orientation: Option<Orientation>,
    /// Global heading of the move that brought the agent here last round.
    pub arrival: Option<Heading>,
}

impl AgentInstance {
    pub fn is_alive(&self) -> bool {
        self.status == AgentStatus::Alive
    }

    /// Physically at a node: alive or halted.
    pub fn is_present(&self) -> bool {
        self.status != AgentStatus::Dead
    }
}

#[derive(Clone, Debug)]
pub struct RingWorld {
    spec: ScenarioSpec,
    tokens: Vec<u8>,
    marks: BTreeSet<Mark>,
    marked_edges: Vec<bool>,
    agents: Vec<AgentInstance>,
    round: u64,
    destroyed: u32,
}

struct Plan {
    index: usize,
    percept: crate::agent::Percept,
    next: StateId,
    action: Action,
    orientation: Orientation,
}

impl RingWorld {
    /// Round-0 world: agents alive at their homebases with full budgets.
    pub fn new(spec: &ScenarioSpec, automaton: &Automaton) -> Result<RingWorld, SpecError> {
        spec.validate()?;
        let agents = spec
            .homebases
            .iter()
            .enumerate()
            .map(|(id, &h)| AgentInstance {
                id,
                homebase: h,
                status: AgentStatus::Alive,
                location: h,
                state: automaton.initial(),
                carried: spec.tokens,
                orientation: None,
                arrival: None,
            })
            .collect();
        Ok(RingWorld {
            spec: spec.clone(),
            tokens: vec![0; spec.n],
            marks: BTreeSet::new(),
            marked_edges: vec![false; spec.n],
            agents,
            round: 0,
            destroyed: 0,
        })
    }

    pub fn spec(&self) -> &ScenarioSpec {
        &self.spec
    }

    pub fn n(&self) -> usize {
        self.spec.n
    }

    pub fn black_hole(&self) -> usize {
        self.spec.black_hole
    }

    pub fn is_oriented(&self) -> bool {
        self.spec.oriented
    }

    pub fn port_one_heading(&self, v: usize) -> Heading {
        self.spec.port_one(v)
    }

    pub fn round(&self) -> u64 {
        self.round
    }

    pub fn agents(&self) -> &[AgentInstance] {
        &self.agents
    }

    pub fn tokens_at(&self, v: usize) -> u8 {
        self.tokens[v]
    }

    pub fn placed_tokens(&self) -> u32 {
        self.tokens.iter().map(|&t| t as u32).sum()
    }

    pub fn destroyed_tokens(&self) -> u32 {
        self.destroyed
    }

    pub fn marks(&self) -> &BTreeSet<Mark> {
        &self.marks
    }

    pub fn is_marked(&self, v: usize, heading: Heading) -> bool {
        self.marked_edges[edge_index(v, heading, self.spec.n)]
    }

    pub fn live_count(&self) -> usize {
        self.agents.iter().filter(|a| a.is_alive()).count()
    }

    /// Executes one Look-Compute-Move round. On error the world is left untouched.
    pub fn step(&mut self, automaton: &Automaton) -> Result<RoundRecord, StepError> {
        let n = self.spec.n;
        if self.live_count() == 0 {
            return Err(StepError::NoLiveAgents);
        }
        for i in 0..self.agents.len() {
            if self.agents[i].orientation.is_none() {
                let o = fix_orientation(&self.agents[i], self);
                self.agents[i].orientation = Some(o);
            }
        }

        // Look + Compute against the start-of-round snapshot.
        let occupancy = Occupancy::of(self);
        let mut plans = Vec::with_capacity(self.agents.len());
        for (i, a) in self.agents.iter().enumerate() {
            if !a.is_alive() {
                continue;
            }
            let percept = occupancy.observe(self, i);
            let (next, action) = automaton.decide(a.state, &percept);
            if next == automaton.fault() {
                return Err(StepError::Fault { agent: i, state: automaton.name(a.state).to_string() });
            }
            let orientation = match action.align {
                Some(set) => self.alignment_target(i, set)?,
                None => a.orientation.expect("orientation fixed above"),
            };
            plans.push(Plan { index: i, percept, next, action, orientation });
        }

        // Validate moves and token operations before touching anything.
        // (node, puts, picks) for the few nodes whose tokens change.
        let mut token_ops: Vec<(usize, u8, u8)> = Vec::new();
        let mut new_marks = Vec::new();
        for p in &plans {
            let a = &self.agents[p.index];
            let own_mark = p.action.mark.map(|s| edge_index(a.location, p.orientation.heading(s), n));
            if let Some(side) = p.action.mv {
                let e = edge_index(a.location, p.orientation.heading(side), n);
                if self.marked_edges[e] || own_mark == Some(e) {
                    return Err(StepError::MarkedLinkTraversal { agent: p.index, node: a.location });
                }
            }
            if let Some(side) = p.action.mark {
                new_marks.push(Mark { node: a.location, heading: p.orientation.heading(side) });
            }
            let (put, pick) = match p.action.token {
                TokenOp::Put if a.carried > 0 => (1, 0),
                TokenOp::Pick if self.spec.movable => {
                    if a.carried >= self.spec.tokens {
                        return Err(StepError::CarryOverflow { agent: p.index, budget: self.spec.tokens });
                    }
                    (0, 1)
                }
                _ => continue,
            };
            match token_ops.iter_mut().find(|op| op.0 == a.location) {
                Some(op) => {
                    op.1 += put;
                    op.2 += pick;
                }
                None => token_ops.push((a.location, put, pick)),
            }
        }
        token_ops.sort_unstable();
        for &(v, puts, picks) in &token_ops {
            if picks > self.tokens[v] {
                return Err(StepError::TokenConflict { node: v, picks, present: self.tokens[v] });
            }
            let count = self.tokens[v] + puts - picks;
            if count > NODE_CAPACITY {
                return Err(StepError::TokenCapacity { node: v, count });
            }
        }

        // Move stage.
        let mut marks_added = Vec::new();
        for m in new_marks {
            let e = m.edge(n);
            if !self.marked_edges[e] {
                self.marked_edges[e] = true;
                self.marks.insert(m);
                marks_added.push(m);
            }
        }
        let mut token_deltas = Vec::new();
        for (v, puts, picks) in token_ops {
            let delta = puts as i8 - picks as i8;
            if delta != 0 {
                self.tokens[v] = (self.tokens[v] as i8 + delta) as u8;
                token_deltas.push((v, delta));
            }
        }
        let bh = self.spec.black_hole;
        let mut steps = Vec::with_capacity(plans.len());
        let mut deaths = Vec::new();
        for p in plans {
            let movable = self.spec.movable;
            let a = &mut self.agents[p.index];
            let from = a.location;
            let state_before = a.state;
            a.orientation = Some(p.orientation);
            match p.action.token {
                TokenOp::Put if a.carried > 0 => a.carried -= 1,
                TokenOp::Pick if movable => a.carried += 1,
                _ => {}
            }
            a.state = p.next;
            a.arrival = None;
            if let Some(side) = p.action.mv {
                let heading = p.orientation.heading(side);
                a.location = heading.step(from, n);
                a.arrival = Some(heading);
                if a.location == bh {
                    a.status = AgentStatus::Dead;
                    deaths.push(Death {
                        agent: p.index,
                        from,
                        heading,
                        state: p.next,
                        tokens_lost: a.carried,
                    });
                    self.destroyed += a.carried as u32;
                    a.carried = 0;
                }
            }
            if p.action.halt && a.status == AgentStatus::Alive {
                a.status = AgentStatus::Halted;
            }
            steps.push(AgentStep {
                agent: p.index,
                from,
                state_before,
                percept: p.percept,
                action: p.action,
                state_after: p.next,
                location: a.location,
                status: a.status,
                left: p.orientation.left,
            });
        }
        self.round += 1;
        Ok(RoundRecord { round: self.round, steps, token_deltas, marks_added, deaths })
    }

    fn alignment_target(&self, i: usize, set: crate::agent::StateSet) -> Result<Orientation, StepError> {
        let here = self.agents[i].location;
        let mut found: Option<Orientation> = None;
        for (j, b) in self.agents.iter().enumerate() {
            if j == i || !b.is_present() || b.location != here || !set.contains(b.state) {
                continue;
            }
            let o = b.orientation.expect("orientation fixed");
            match found {
                Some(prev) if prev != o => return Err(StepError::AlignmentTarget { agent: i }),
                _ => found = Some(o),
            }
        }
        found.ok_or(StepError::AlignmentTarget { agent: i })
    }

    fn fingerprint(&self) -> Fingerprint {
        Fingerprint {
            agents: self
                .agents
                .iter()
                .map(|a| (a.status, a.location, a.state, a.carried, a.orientation, a.arrival))
                .collect(),
            tokens: self.tokens.clone(),
            marked: self.marked_edges.clone(),
        }
    }
}

type AgentKey = (AgentStatus, usize, StateId, u8, Option<Orientation>, Option<Heading>);

#[derive(PartialEq, Eq)]
struct Fingerprint {
    agents: Vec<AgentKey>,
    tokens: Vec<u8>,
    marked: Vec<bool>,
}

/// Rounds over which a repeating world state counts as quiescent.
pub const QUIESCENCE_PERIOD: usize = 3;

/// Steps `world` until quiescence, extinction, a fault, or `round_bound` rounds.
pub fn run(mut world: RingWorld, automaton: &Automaton, round_bound: u64) -> Result<Trace, RunError> {
    if round_bound == 0 {
        return Err(RunError::ZeroBound);
    }
    let mut trace = Trace { spec: world.spec.clone(), rounds: Vec::new(), termination: Termination::BoundReached };
    if world.agents.is_empty() {
        trace.termination = Termination::Invalid { message: "scenario has no agents".into() };
        return Ok(trace);
    }
    let mut recent: VecDeque<Fingerprint> = VecDeque::with_capacity(QUIESCENCE_PERIOD + 1);
    recent.push_back(world.fingerprint());
    while world.round < round_bound {
        if world.live_count() == 0 {
            break;
        }
        match world.step(automaton) {
            Ok(record) => trace.rounds.push(record),
            Err(e) => {
                trace.termination = Termination::Fault { message: e.to_string() };
                return Ok(trace);
            }
        }
        let fp = world.fingerprint();
        if recent.contains(&fp) {
            trace.termination = Termination::Quiescent;
            return Ok(trace);
        }
        if recent.len() == QUIESCENCE_PERIOD {
            recent.pop_front();
        }
        recent.push_back(fp);
    }
    if world.agents.iter().all(|a| a.status == AgentStatus::Dead) {
        trace.termination = Termination::Extinct;
    } else if world.live_count() == 0 {
        trace.termination = Termination::Quiescent;
    }
    Ok(trace)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RunError {
    #[error("round bound must be at least 1")]
    ZeroBound,
    #[error(transparent)]
    Spec(#[from] SpecError),
}

/// Builds the world for `spec` and runs it under `spec.round_bound`.
pub fn simulate(spec: &ScenarioSpec, automaton: &Automaton) -> Result<Trace, RunError> {
    let world = RingWorld::new(spec, automaton)?;
    run(world, automaton, spec.round_bound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agent::{observe, AutomatonBuilder, ProtocolMeta, Role};
    use crate::protocols::ProtocolId;
    use crate::ring::Side;
    use crate::scenario::Labeling;

    fn meta() -> ProtocolMeta {
        ProtocolMeta { id: ProtocolId::Ring1, name: "test", min_agents: 1, tokens_per_agent: 1, movable: true, needs_orientation: false }
    }

    /// Put a token, then walk Left forever.
    fn put_and_walk() -> Automaton {
        let mut b = AutomatonBuilder::new(meta());
        let start = b.state("START", Role::Start, Action::idle());
        let put = b.state("PUT", Role::CheckLeft, Action::idle().put());
        let walk = b.state("WALK", Role::CheckLeft, Action::go(Side::Left));
        b.otherwise(start, put).otherwise(put, walk).otherwise(walk, walk);
        b.build(start)
    }

    #[test]
    fn walkers_die_and_leave_their_tokens() {
        let spec = ScenarioSpec::new(ProtocolId::Ring1, 6, 0, vec![2, 4]);
        let a = put_and_walk();
        let trace = run(RingWorld::new(&spec, &a).unwrap(), &a, 50).unwrap();
        assert_eq!(trace.termination, Termination::Extinct);
        let deaths: Vec<_> = trace.deaths().map(|(r, d)| (r, d.agent, d.from, d.tokens_lost)).collect();
        assert_eq!(deaths, vec![(3, 0, 1, 0), (5, 1, 1, 0)]);
    }

    #[test]
    fn marked_links_cannot_be_crossed() {
        let mut b = AutomatonBuilder::new(meta());
        let start = b.state("START", Role::Start, Action::idle());
        let mark = b.state("MARK", Role::CheckLeft, Action::idle().marking(Side::Left));
        let go = b.state("GO", Role::CheckLeft, Action::go(Side::Left));
        b.otherwise(start, mark).otherwise(mark, go).otherwise(go, go);
        let a = b.build(start);
        let mut w = RingWorld::new(&ScenarioSpec::new(ProtocolId::Ring1, 5, 0, vec![2]), &a).unwrap();
        w.step(&a).unwrap();
        assert!(w.is_marked(2, Heading::Cw));
        let before = w.clone().agents().to_vec();
        assert!(matches!(w.step(&a), Err(StepError::MarkedLinkTraversal { agent: 0, node: 2 })));
        assert_eq!(w.agents(), before);
    }

    #[test]
    fn node_capacity_is_enforced() {
        // Two agents facing each other meet in the middle and keep putting.
        let mut b = AutomatonBuilder::new(meta());
        let start = b.state("START", Role::Start, Action::idle());
        let go = b.state("GO", Role::CheckLeft, Action::go(Side::Left));
        let put = b.state("PUT", Role::CheckLeft, Action::idle().put());
        b.otherwise(start, go).otherwise(go, put).otherwise(put, put);
        let a = b.build(start);
        let spec = ScenarioSpec::new(ProtocolId::Ring1, 7, 0, vec![3, 5])
            .unoriented("cccaccc".parse().unwrap())
            .with_tokens(2, false);
        let trace = run(RingWorld::new(&spec, &a).unwrap(), &a, 50).unwrap();
        assert_eq!(trace.rounds_used(), 2);
        assert_eq!(trace.termination, Termination::Fault { message: StepError::TokenCapacity { node: 4, count: 4 }.to_string() });
    }

    #[test]
    fn fast_percepts_match_the_plain_scan() {
        for p in ProtocolId::ALL {
            let a = p.automaton();
            let spec = ScenarioSpec::new(p, 11, 0, vec![1, 2, 4, 7, 9, 10]).unoriented("cacaacccaac".parse::<Labeling>().unwrap());
            let mut w = RingWorld::new(&spec, a).unwrap();
            while w.round() < 120 && w.live_count() > 0 {
                let before = w.clone();
                if w.step(a).is_err() {
                    break;
                }
                let mut fixed = before.clone();
                for i in 0..fixed.agents.len() {
                    let o = fix_orientation(&fixed.agents[i], &fixed);
                    fixed.agents[i].orientation.get_or_insert(o);
                }
                let occ = Occupancy::of(&fixed);
                for i in (0..fixed.agents.len()).filter(|&i| fixed.agents[i].is_alive()) {
                    assert_eq!(occ.observe(&fixed, i), observe(&fixed, i), "{p} round {}", before.round());
                }
            }
        }
    }

    #[test]
    fn world_invariants_hold_every_round() {
        let a = ProtocolId::Ring3.automaton();
        let spec = ScenarioSpec::new(ProtocolId::Ring3, 9, 0, vec![1, 3, 5, 6, 8]).unoriented("ccacaacac".parse().unwrap());
        let mut w = RingWorld::new(&spec, a).unwrap();
        let mut marks = 0;
        while w.round() < 300 && w.live_count() > 0 && w.step(a).is_ok() {
            assert!((0..9).all(|v| w.tokens_at(v) <= NODE_CAPACITY));
            assert_eq!(w.tokens_at(0), 0);
            assert!(w.agents().iter().all(|x| !x.is_present() || x.location != 0));
            let carried: u32 = w.agents().iter().map(|x| x.carried as u32).sum();
            assert_eq!(w.placed_tokens() + carried + w.destroyed_tokens(), 10);
            assert!(w.marks().len() >= marks);
            marks = w.marks().len();
        }
        assert_eq!(marks, 2);
    }
}
