//! Round-synchronous simulation of black hole search in anonymous rings.
//!
//! Constant-memory agents start scattered on a ring that hides one black
//! hole, carry a few tokens, and try to mark both links into the black hole
//! while at least one of them survives. The crate provides the round engine
//! ([`world`]), the automaton framework ([`agent`]), three protocols
//! ([`protocols`]), a trace judge ([`verifier`]) and scenario sweeps
//! ([`harness`]).

pub mod agent;
pub mod error;
pub mod harness;
pub mod protocols;
pub mod ring;
pub mod scenario;
pub mod trace;
pub mod verifier;
pub mod world;

pub use agent::{Action, Automaton, Guard, Percept, Role, StateId, StateSet};
pub use error::{SpecError, StepError, TraceError};
pub use harness::{adversary_search, enumerate, sweep, theorem_scenario, Construction, Family, LabelingMode, SweepReport};
pub use protocols::ProtocolId;
pub use ring::{Heading, Mark, Orientation, Side};
pub use scenario::{Labeling, ScenarioSpec};
pub use trace::{Termination, Trace};
pub use verifier::{check_properties, judge, FailureReason, Verdict};
pub use world::{run, simulate, RingWorld};
