//! Scenario families, parallel sweeps, adversary search and the lower-bound constructions.

mod adversary;
mod constructions;
mod enumerate;
mod sweep;

pub use adversary::{adversary_search, AdversaryHit};
pub use constructions::{theorem_scenario, Construction};
pub use enumerate::{enumerate, Family, LabelingMode, DEFAULT_CAP};
pub use sweep::{evaluate, sweep, Evaluation, Exemplar, SweepReport, MAX_EXEMPLARS};
