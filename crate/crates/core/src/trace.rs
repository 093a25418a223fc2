//! Execution records and their line-delimited JSON form.
//!
//! A stored trace is one header line carrying the full [`ScenarioSpec`],
//! one line per executed round, and an end line with the termination cause.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::agent::{Action, Automaton, Percept, StateId};
use crate::error::TraceError;
use crate::ring::{Heading, Mark};
use crate::scenario::ScenarioSpec;
use crate::world::AgentStatus;

/// What one live agent did in one round.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgentStep {
    pub agent: usize,
    pub from: usize,
    pub state_before: StateId,
    pub percept: Percept,
    pub action: Action,
    pub state_after: StateId,
    pub location: usize,
    pub status: AgentStatus,
    /// Global heading of the agent's Left after this round.
    pub left: Heading,
}

/// An agent entering the black hole.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Death {
    pub agent: usize,
    pub from: usize,
    pub heading: Heading,
    /// State the agent was in when it stepped in.
    pub state: StateId,
    pub tokens_lost: u8,
}

impl Death {
    /// The link the agent died through, named from its safe endpoint.
    pub fn link(&self) -> Mark {
        Mark { node: self.from, heading: self.heading }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round: u64,
    pub steps: Vec<AgentStep>,
    pub token_deltas: Vec<(usize, i8)>,
    pub marks_added: Vec<Mark>,
    pub deaths: Vec<Death>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Termination {
    /// Every surviving agent halted or the world state started repeating.
    Quiescent,
    /// Every agent died.
    Extinct,
    BoundReached,
    Fault { message: String },
    Invalid { message: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub spec: ScenarioSpec,
    pub rounds: Vec<RoundRecord>,
    pub termination: Termination,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum Line {
    Header { spec: ScenarioSpec },
    Round(RoundRecord),
    End { termination: Termination, rounds: u64 },
}

impl Trace {
    pub fn rounds_used(&self) -> u64 {
        self.rounds.len() as u64
    }

    pub fn deaths(&self) -> impl Iterator<Item = (u64, &Death)> {
        self.rounds.iter().flat_map(|r| r.deaths.iter().map(move |d| (r.round, d)))
    }

    pub fn dead_count(&self) -> usize {
        self.deaths().count()
    }

    pub fn marks(&self) -> BTreeSet<Mark> {
        self.rounds.iter().flat_map(|r| r.marks_added.iter().copied()).collect()
    }

    pub fn write_jsonl<W: Write>(&self, mut out: W) -> Result<(), TraceError> {
        let mut emit = |line: &Line| -> Result<(), TraceError> {
            serde_json::to_writer(&mut out, line).map_err(|e| TraceError::Json { line: 0, source: e })?;
            out.write_all(b"\n")?;
            Ok(())
        };
        emit(&Line::Header { spec: self.spec.clone() })?;
        for r in &self.rounds {
            emit(&Line::Round(r.clone()))?;
        }
        emit(&Line::End { termination: self.termination.clone(), rounds: self.rounds_used() })
    }

    pub fn to_jsonl(&self) -> String {
        let mut buf = Vec::new();
        self.write_jsonl(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("json is utf-8")
    }

    pub fn read_jsonl<R: BufRead>(input: R) -> Result<Trace, TraceError> {
        let mut spec = None;
        let mut rounds = Vec::new();
        let mut termination = None;
        for (i, line) in input.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            match serde_json::from_str(&line).map_err(|e| TraceError::Json { line: i + 1, source: e })? {
                Line::Header { spec: s } => spec = Some(s),
                Line::Round(r) => rounds.push(r),
                Line::End { termination: t, .. } => termination = Some(t),
            }
        }
        Ok(Trace {
            spec: spec.ok_or(TraceError::MissingHeader)?,
            rounds,
            termination: termination.ok_or(TraceError::MissingEnd)?,
        })
    }

    /// One fixed-width ring strip per round: each cell shows the node's
    /// tokens (`X` for the black hole), marks (`<`/`>` for cw/ccw links),
    /// and the agents standing there as `id:STATE`.
    pub fn render_human(&self, automaton: &Automaton) -> String {
        let n = self.spec.n;
        let bh = self.spec.black_hole;
        let mut tokens = vec![0i8; n];
        let mut marks: BTreeSet<Mark> = BTreeSet::new();
        let mut where_: Vec<(usize, Option<StateId>, AgentStatus)> =
            self.spec.homebases.iter().map(|&h| (h, None, AgentStatus::Alive)).collect();

        let cell = |v: usize,
                    tokens: &[i8],
                    marks: &BTreeSet<Mark>,
                    where_: &[(usize, Option<StateId>, AgentStatus)]|
         -> String {
            let mut s = String::new();
            if v == bh {
                s.push('X');
            } else {
                s.push_str(&tokens[v].to_string());
            }
            if marks.contains(&Mark { node: v, heading: Heading::Cw }) {
                s.push('<');
            }
            if marks.contains(&Mark { node: v, heading: Heading::Ccw }) {
                s.push('>');
            }
            for (id, (loc, st, status)) in where_.iter().enumerate() {
                if *loc == v && *status != AgentStatus::Dead {
                    let name = st.map(|s| automaton.name(s)).unwrap_or(automaton.name(automaton.initial()));
                    let _ = write!(s, " {id}:{name}");
                    if *status == AgentStatus::Halted {
                        s.push('.');
                    }
                }
            }
            s
        };

        let mut rows = Vec::new();
        let header: Vec<String> = (0..n).map(|v| format!("n{v}")).collect();
        rows.push(("round".to_string(), header));
        rows.push(("0".to_string(), (0..n).map(|v| cell(v, &tokens, &marks, &where_)).collect()));
        for r in &self.rounds {
            for &(v, d) in &r.token_deltas {
                tokens[v] += d;
            }
            marks.extend(r.marks_added.iter().copied());
            for s in &r.steps {
                where_[s.agent] = (s.location, Some(s.state_after), s.status);
            }
            rows.push((r.round.to_string(), (0..n).map(|v| cell(v, &tokens, &marks, &where_)).collect()));
        }
        let mut widths = vec![0usize; n];
        for (_, cells) in &rows {
            for (w, c) in widths.iter_mut().zip(cells) {
                *w = (*w).max(c.len());
            }
        }
        let label_w = rows.iter().map(|(l, _)| l.len()).max().unwrap_or(0);
        let mut out = String::new();
        for (label, cells) in rows {
            let _ = write!(out, "{label:>label_w$} |");
            for (c, w) in cells.iter().zip(&widths) {
                let _ = write!(out, " {c:<w$} |");
            }
            out.push('\n');
        }
        let _ = writeln!(out, "end: {:?} after {} rounds", self.termination, self.rounds_used());
        out
    }
}
