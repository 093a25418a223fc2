//! The three shipped automata and the walk sub-machines they are built from.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::agent::{Automaton, ProtocolMeta};

mod ring1;
mod ring2;
mod ring3;
pub mod walks;

pub use ring1::build_ring1;
pub use ring2::build_ring2;
pub use ring3::build_ring3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProtocolId {
    /// Three agents, one movable token each, any ring.
    Ring1,
    /// Four agents, two unmovable tokens each, oriented ring.
    Ring2,
    /// Five agents, two unmovable tokens each, unoriented ring.
    Ring3,
}

impl ProtocolId {
    pub const ALL: [ProtocolId; 3] = [ProtocolId::Ring1, ProtocolId::Ring2, ProtocolId::Ring3];

    pub fn meta(self) -> ProtocolMeta {
        match self {
            ProtocolId::Ring1 => ProtocolMeta {
                id: self,
                name: "BHS-Ring-1",
                min_agents: 3,
                tokens_per_agent: 1,
                movable: true,
                needs_orientation: false,
            },
            ProtocolId::Ring2 => ProtocolMeta {
                id: self,
                name: "BHS-Ring-2",
                min_agents: 4,
                tokens_per_agent: 2,
                movable: false,
                needs_orientation: true,
            },
            ProtocolId::Ring3 => ProtocolMeta {
                id: self,
                name: "BHS-Ring-3",
                min_agents: 5,
                tokens_per_agent: 2,
                movable: false,
                needs_orientation: false,
            },
        }
    }

    /// Shared, lazily built automaton.
    pub fn automaton(self) -> &'static Automaton {
        static CELLS: [OnceLock<Automaton>; 3] = [OnceLock::new(), OnceLock::new(), OnceLock::new()];
        match self {
            ProtocolId::Ring1 => CELLS[0].get_or_init(build_ring1),
            ProtocolId::Ring2 => CELLS[1].get_or_init(build_ring2),
            ProtocolId::Ring3 => CELLS[2].get_or_init(build_ring3),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ProtocolId::Ring1 => "ring1",
            ProtocolId::Ring2 => "ring2",
            ProtocolId::Ring3 => "ring3",
        }
    }
}

impl fmt::Display for ProtocolId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProtocolId {
    type Err = String;

    fn from_str(s: &str) -> Result<ProtocolId, String> {
        match s.to_ascii_lowercase().as_str() {
            "ring1" | "1" | "bhs-ring-1" => Ok(ProtocolId::Ring1),
            "ring2" | "2" | "bhs-ring-2" => Ok(ProtocolId::Ring2),
            "ring3" | "3" | "bhs-ring-3" => Ok(ProtocolId::Ring3),
            other => Err(format!("unknown protocol {other:?} (expected ring1, ring2 or ring3)")),
        }
    }
}
