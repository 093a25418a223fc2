//! Judging traces: the search success criterion and per-protocol execution properties.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::agent::{Automaton, Role};
use crate::protocols::ProtocolId;
use crate::ring::{edge_index, Heading, Mark, Orientation};
use crate::trace::{Termination, Trace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FailureReason {
    WrongLinkMarked,
    ProtocolFault,
    Timeout,
    MissingLinkMark,
    NoSurvivor,
}

impl FailureReason {
    pub fn as_str(self) -> &'static str {
        match self {
            FailureReason::WrongLinkMarked => "wrong-link-marked",
            FailureReason::ProtocolFault => "protocol-fault",
            FailureReason::Timeout => "timeout",
            FailureReason::MissingLinkMark => "missing-link-mark",
            FailureReason::NoSurvivor => "no-survivor",
        }
    }
}

impl fmt::Display for FailureReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub success: bool,
    pub failure_reason: Option<FailureReason>,
    pub dead_count: usize,
    pub rounds_used: u64,
    pub marked_links: Vec<Mark>,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.failure_reason {
            None => write!(f, "success")?,
            Some(r) => write!(f, "failure ({r})")?,
        }
        write!(f, ": {} rounds, {} dead, marks [", self.rounds_used, self.dead_count)?;
        for (i, m) in self.marked_links.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{m}")?;
        }
        f.write_str("]")
    }
}

/// Both links at the black hole and no other link marked, somebody alive or
/// halted, and the run ended on its own before the bound.
pub fn judge(trace: &Trace) -> Verdict {
    let n = trace.spec.n;
    let bh = trace.spec.black_hole;
    let marks = trace.marks();
    let edges: BTreeSet<usize> = marks.iter().map(|m| m.edge(n)).collect();
    let correct = [edge_index(bh, Heading::Cw, n), edge_index(bh, Heading::Ccw, n)];
    let dead_count = trace.dead_count();
    let survivors = trace.spec.agents().saturating_sub(dead_count);

    let reason = if edges.iter().any(|e| !correct.contains(e)) {
        Some(FailureReason::WrongLinkMarked)
    } else if matches!(trace.termination, Termination::Fault { .. }) {
        Some(FailureReason::ProtocolFault)
    } else if trace.termination == Termination::BoundReached {
        Some(FailureReason::Timeout)
    } else if correct.iter().any(|e| !edges.contains(e)) {
        Some(FailureReason::MissingLinkMark)
    } else if survivors == 0 || matches!(trace.termination, Termination::Invalid { .. }) {
        Some(FailureReason::NoSurvivor)
    } else {
        None
    };
    Verdict {
        success: reason.is_none(),
        failure_reason: reason,
        dead_count,
        rounds_used: trace.rounds_used(),
        marked_links: marks.into_iter().collect(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Property {
    /// A marked link was entered earlier by an agent that died through it.
    MarkPrecededByDeath,
    MarkedLinkCrossed,
    /// A new LEADER comes with exactly one new FOLLOWER at its node.
    LeaderHasOneFollower,
    LeadersCreatedTogether,
    DeathCount,
    CheckLeftDeaths,
    RightLeaderCount,
    RightLeaderEntrySide,
    RightLeaderOrientations,
    DeathInSafeState,
    EarlyDeaths,
    LeadersPerDirection,
}

impl Property {
    pub fn as_str(self) -> &'static str {
        match self {
            Property::MarkPrecededByDeath => "mark-preceded-by-death",
            Property::MarkedLinkCrossed => "marked-link-crossed",
            Property::LeaderHasOneFollower => "leader-has-one-follower",
            Property::LeadersCreatedTogether => "leaders-created-together",
            Property::DeathCount => "death-count",
            Property::CheckLeftDeaths => "check-left-deaths",
            Property::RightLeaderCount => "right-leader-count",
            Property::RightLeaderEntrySide => "right-leader-entry-side",
            Property::RightLeaderOrientations => "right-leader-orientations",
            Property::DeathInSafeState => "death-in-safe-state",
            Property::EarlyDeaths => "early-deaths",
            Property::LeadersPerDirection => "leaders-per-direction",
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub property: Property,
    pub round: Option<u64>,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.round {
            Some(r) => write!(f, "{} at round {}: {}", self.property, r, self.detail),
            None => write!(f, "{}: {}", self.property, self.detail),
        }
    }
}

fn violation(property: Property, round: Option<u64>, detail: String) -> Violation {
    Violation { property, round, detail }
}

/// Every generic and protocol-specific property that fails on `trace`.
pub fn check_properties(trace: &Trace, protocol: ProtocolId) -> Vec<Violation> {
    let automaton = protocol.automaton();
    let mut out = Vec::new();
    check_marks(trace, &mut out);
    check_pairing(trace, automaton, &mut out);
    match protocol {
        ProtocolId::Ring1 => check_ring1(trace, &mut out),
        ProtocolId::Ring2 => check_ring2(trace, automaton, &mut out),
        ProtocolId::Ring3 => check_ring3(trace, automaton, &mut out),
    }
    out
}

/// Trace-level form of the fact that only a death can reveal a dangerous link.
pub fn check_marks(trace: &Trace, out: &mut Vec<Violation>) {
    let n = trace.spec.n;
    let mut entered: BTreeSet<usize> = BTreeSet::new();
    let mut marked: BTreeSet<usize> = BTreeSet::new();
    for r in &trace.rounds {
        for s in &r.steps {
            if let Some(side) = s.action.mv {
                let heading = Orientation { left: s.left }.heading(side);
                let e = edge_index(s.from, heading, n);
                if marked.contains(&e) {
                    out.push(violation(
                        Property::MarkedLinkCrossed,
                        Some(r.round),
                        format!("agent {} crossed marked link {}", s.agent, Mark { node: s.from, heading }),
                    ));
                }
            }
        }
        for m in &r.marks_added {
            if !entered.contains(&m.edge(n)) {
                out.push(violation(
                    Property::MarkPrecededByDeath,
                    Some(r.round),
                    format!("link {m} marked before any agent died through it"),
                ));
            }
        }
        for d in &r.deaths {
            entered.insert(edge_index(d.from, d.heading, n));
        }
        marked.extend(r.marks_added.iter().map(|m| m.edge(n)));
    }
}

fn check_pairing(trace: &Trace, a: &Automaton, out: &mut Vec<Violation>) {
    for r in &trace.rounds {
        let mut leaders: BTreeMap<usize, usize> = BTreeMap::new();
        let mut followers: BTreeMap<usize, usize> = BTreeMap::new();
        for s in &r.steps {
            let (before, after) = (a.role(s.state_before), a.role(s.state_after));
            if after == Role::Leader && before != Role::Leader {
                *leaders.entry(s.location).or_default() += 1;
            }
            if after == Role::Follower && before != Role::Follower {
                *followers.entry(s.location).or_default() += 1;
            }
        }
        for (&node, &count) in &leaders {
            if count > 1 {
                out.push(violation(
                    Property::LeadersCreatedTogether,
                    Some(r.round),
                    format!("{count} leaders created at node {node}"),
                ));
            }
        }
        let nodes: BTreeSet<usize> = leaders.keys().chain(followers.keys()).copied().collect();
        for node in nodes {
            let (l, f) = (leaders.get(&node).copied().unwrap_or(0), followers.get(&node).copied().unwrap_or(0));
            if l != f {
                out.push(violation(
                    Property::LeaderHasOneFollower,
                    Some(r.round),
                    format!("{l} new leaders and {f} new followers at node {node}"),
                ));
            }
        }
    }
}

fn check_ring1(trace: &Trace, out: &mut Vec<Violation>) {
    let dead = trace.dead_count();
    if dead != 2 {
        out.push(violation(Property::DeathCount, None, format!("{dead} agents died, expected exactly 2")));
    }
}

fn death_roles(trace: &Trace, a: &Automaton) -> Vec<(u64, Role, usize)> {
    trace.deaths().map(|(r, d)| (r, a.role(d.state), d.agent)).collect()
}

/// Agents that ever entered a RIGHT-LEADER state, with their orientation at that moment.
fn right_leaders(trace: &Trace, a: &Automaton) -> BTreeMap<usize, Heading> {
    let mut found = BTreeMap::new();
    for r in &trace.rounds {
        for s in &r.steps {
            if a.role(s.state_after) == Role::RightLeader {
                found.entry(s.agent).or_insert(s.left);
            }
        }
    }
    found
}

fn check_ring2(trace: &Trace, a: &Automaton, out: &mut Vec<Violation>) {
    let n = trace.spec.n;
    let deaths = death_roles(trace, a);
    let total = deaths.len();
    if !(1..=3).contains(&total) {
        out.push(violation(Property::DeathCount, None, format!("{total} agents died, expected 1 to 3")));
    }
    let check_left = deaths.iter().filter(|d| d.1 == Role::CheckLeft).count();
    if check_left != 1 {
        out.push(violation(Property::CheckLeftDeaths, None, format!("{check_left} CHECK-LEFT deaths")));
    }
    for &(round, role, agent) in &deaths {
        if !matches!(role, Role::CheckLeft | Role::Leader | Role::RightLeader) {
            out.push(violation(Property::DeathInSafeState, Some(round), format!("agent {agent} died as {role}")));
        }
    }
    let leaders = deaths.iter().filter(|d| d.1 == Role::Leader).count();
    if leaders > 1 {
        out.push(violation(Property::LeadersPerDirection, None, format!("{leaders} LEADER deaths")));
    }
    let rl = right_leaders(trace, a);
    if rl.len() != 1 {
        out.push(violation(Property::RightLeaderCount, None, format!("{} RIGHT-LEADER agents", rl.len())));
    }
    let left_of_bh = (trace.spec.black_hole + n - 1) % n;
    for (round, d) in trace.deaths() {
        if a.role(d.state) == Role::RightLeader && (d.from != left_of_bh || d.heading != Heading::Ccw) {
            out.push(violation(
                Property::RightLeaderEntrySide,
                Some(round),
                format!("RIGHT-LEADER entered from node {} heading {}", d.from, d.heading),
            ));
        }
    }
}

fn check_ring3(trace: &Trace, a: &Automaton, out: &mut Vec<Violation>) {
    let n = trace.spec.n;
    let total = trace.dead_count();
    if !(2..=4).contains(&total) {
        out.push(violation(Property::DeathCount, None, format!("{total} agents died, expected 2 to 4")));
    }
    let early = trace.deaths().filter(|(_, d)| d.tokens_lost > 0).count();
    if early != 2 {
        out.push(violation(
            Property::EarlyDeaths,
            None,
            format!("{early} agents died before placing their second token"),
        ));
    }
    let mut per_link: BTreeMap<usize, usize> = BTreeMap::new();
    for (round, d) in trace.deaths() {
        let role = a.role(d.state);
        if d.tokens_lost == 0 {
            if matches!(role, Role::Leader | Role::RightLeader) {
                *per_link.entry(edge_index(d.from, d.heading, n)).or_default() += 1;
            } else {
                out.push(violation(Property::DeathInSafeState, Some(round), format!("agent {} died as {role}", d.agent)));
            }
        }
    }
    for (edge, count) in per_link {
        if count > 1 {
            out.push(violation(
                Property::LeadersPerDirection,
                None,
                format!("{count} LEADER/RIGHT-LEADER deaths through link {edge}"),
            ));
        }
    }
    let rl = right_leaders(trace, a);
    if !(1..=2).contains(&rl.len()) {
        out.push(violation(Property::RightLeaderCount, None, format!("{} RIGHT-LEADER agents", rl.len())));
    }
    if rl.len() == 2 {
        let o: Vec<Heading> = rl.values().copied().collect();
        if o[0] == o[1] {
            out.push(violation(
                Property::RightLeaderOrientations,
                None,
                "two RIGHT-LEADER agents share an orientation".into(),
            ));
        }
    }
}
