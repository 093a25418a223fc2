//! Concrete problem instances.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::SpecError;
use crate::protocols::ProtocolId;
use crate::ring::Heading;

/// Per-node choice of where local port 1 leads.
///
/// Text form: one character per node, `c` when port 1 leads clockwise and
/// `a` when it leads anticlockwise.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Labeling(pub Vec<Heading>);

impl Labeling {
    pub fn consistent(n: usize) -> Labeling {
        Labeling(vec![Heading::Cw; n])
    }

    /// Labeling whose bit `v` of `bits` set means port 1 at `v` leads anticlockwise.
    pub fn from_bits(n: usize, bits: u64) -> Labeling {
        Labeling((0..n).map(|v| if bits >> v & 1 == 1 { Heading::Ccw } else { Heading::Cw }).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Labeling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for h in &self.0 {
            f.write_str(match h {
                Heading::Cw => "c",
                Heading::Ccw => "a",
            })?;
        }
        Ok(())
    }
}

impl FromStr for Labeling {
    type Err = SpecError;

    fn from_str(s: &str) -> Result<Labeling, SpecError> {
        s.chars()
            .map(|c| match c {
                'c' | 'C' => Ok(Heading::Cw),
                'a' | 'A' => Ok(Heading::Ccw),
                other => Err(SpecError::BadLabeling(format!("unexpected character {other:?}"))),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Labeling)
    }
}

impl Serialize for Labeling {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Labeling {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Labeling, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// One instance: ring, black hole, homebases, port labeling, protocol and budget.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub n: usize,
    pub black_hole: usize,
    pub homebases: Vec<usize>,
    pub oriented: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub port_labeling: Option<Labeling>,
    pub protocol: ProtocolId,
    pub tokens: u8,
    pub movable: bool,
    pub round_bound: u64,
}

pub fn default_round_bound(n: usize) -> u64 {
    30 * n as u64 + 30
}

impl ScenarioSpec {
    /// An oriented instance with the protocol's own token budget and the default bound.
    pub fn new(protocol: ProtocolId, n: usize, black_hole: usize, homebases: Vec<usize>) -> ScenarioSpec {
        let meta = protocol.meta();
        ScenarioSpec {
            n,
            black_hole,
            homebases,
            oriented: true,
            port_labeling: None,
            protocol,
            tokens: meta.tokens_per_agent,
            movable: meta.movable,
            round_bound: default_round_bound(n),
        }
    }

    pub fn unoriented(mut self, labeling: Labeling) -> ScenarioSpec {
        self.oriented = false;
        self.port_labeling = Some(labeling);
        self
    }

    pub fn with_tokens(mut self, tokens: u8, movable: bool) -> ScenarioSpec {
        self.tokens = tokens;
        self.movable = movable;
        self
    }

    pub fn with_bound(mut self, round_bound: u64) -> ScenarioSpec {
        self.round_bound = round_bound;
        self
    }

    pub fn agents(&self) -> usize {
        self.homebases.len()
    }

    /// Heading of port 1 at node `v`.
    pub fn port_one(&self, v: usize) -> Heading {
        match (&self.port_labeling, self.oriented) {
            (Some(l), false) => l.0[v],
            _ => Heading::Cw,
        }
    }

    pub fn validate(&self) -> Result<(), SpecError> {
        if self.n < 3 {
            return Err(SpecError::RingTooSmall(self.n));
        }
        if self.black_hole >= self.n {
            return Err(SpecError::NodeOutOfRange(self.black_hole));
        }
        if self.homebases.len() > self.n - 1 {
            return Err(SpecError::TooManyAgents { agents: self.homebases.len(), n: self.n });
        }
        let mut seen = vec![false; self.n];
        for &h in &self.homebases {
            if h >= self.n {
                return Err(SpecError::NodeOutOfRange(h));
            }
            if h == self.black_hole {
                return Err(SpecError::HomebaseOnBlackHole(h));
            }
            if std::mem::replace(&mut seen[h], true) {
                return Err(SpecError::DuplicateHomebase(h));
            }
        }
        if !self.oriented {
            match &self.port_labeling {
                Some(l) if l.len() == self.n => {}
                Some(l) => {
                    return Err(SpecError::BadLabeling(format!("{} entries for {} nodes", l.len(), self.n)))
                }
                None => return Err(SpecError::BadLabeling("unoriented ring needs a labeling".into())),
            }
        }
        if self.tokens > 2 {
            return Err(SpecError::TooManyTokens(self.tokens));
        }
        Ok(())
    }

    /// The same instance with every node shifted by `by` positions anticlockwise.
    pub fn rotated(&self, by: usize) -> ScenarioSpec {
        let n = self.n;
        let shift = |v: usize| (v + by) % n;
        let mut out = self.clone();
        out.black_hole = shift(self.black_hole);
        out.homebases = self.homebases.iter().map(|&h| shift(h)).collect();
        out.homebases.sort_unstable();
        if let Some(l) = &self.port_labeling {
            let mut rotated = vec![Heading::Cw; n];
            for (v, &h) in l.0.iter().enumerate() {
                rotated[shift(v)] = h;
            }
            out.port_labeling = Some(Labeling(rotated));
        }
        out
    }

    /// Mirror image through the black hole. Only a symmetry of unoriented instances.
    pub fn reflected(&self) -> ScenarioSpec {
        let n = self.n;
        let mirror = |v: usize| (2 * self.black_hole + n - v % n) % n;
        let mut out = self.clone();
        out.homebases = self.homebases.iter().map(|&h| mirror(h)).collect();
        out.homebases.sort_unstable();
        if let Some(l) = &self.port_labeling {
            let mut reflected = vec![Heading::Cw; n];
            for (v, &h) in l.0.iter().enumerate() {
                reflected[mirror(v)] = h.flip();
            }
            out.port_labeling = Some(Labeling(reflected));
        }
        out
    }

    /// Canonical representative: black hole at node 0, sorted homebases and,
    /// when unoriented, the smaller of the instance and its mirror image.
    pub fn canonical(&self) -> ScenarioSpec {
        let rotated = self.rotated((self.n - self.black_hole) % self.n);
        if self.oriented {
            return rotated;
        }
        let mirrored = rotated.reflected();
        if canonical_key(&mirrored) < canonical_key(&rotated) {
            mirrored
        } else {
            rotated
        }
    }

    pub fn is_canonical(&self) -> bool {
        self.canonical() == *self
    }
}

pub(crate) fn canonical_key(spec: &ScenarioSpec) -> (Vec<usize>, Option<Labeling>) {
    (spec.homebases.clone(), spec.port_labeling.clone())
}
