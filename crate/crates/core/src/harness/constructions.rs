//! The placements used by the lower-bound arguments, as concrete scenario families.

use serde::{Deserialize, Serialize};

use crate::error::SpecError;
use crate::protocols::ProtocolId;
use crate::ring::Heading;
use crate::scenario::{Labeling, ScenarioSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "construction")]
pub enum Construction {
    /// Agents `2(p+1)` apart with the black hole halfway between two of
    /// them: `k` agents on a ring of `2k(p+1)` nodes and `k+1` agents on a
    /// ring of `2(k+1)(p+1)`. Run with one unmovable token per agent.
    Periodic { k: usize, p: usize },
    /// Three agents `4t` apart on a ring of `8t+x+y` nodes, the black hole
    /// `x` and `y` away from the outer two. Run with `t` unmovable tokens.
    ThreeAgents { t: usize, x: usize, y: usize },
    /// Four agents `4t+1` apart, mirror-symmetric about the black hole at
    /// distance `x` from the nearest two, under every mirror-symmetric
    /// choice of homebase ports. Run with `t` unmovable tokens.
    MirrorFour { t: usize, x: usize },
}

fn tokens(t: usize) -> u8 {
    t.min(2) as u8
}

fn params(msg: &str) -> SpecError {
    SpecError::Params(msg.to_string())
}

pub fn theorem_scenario(c: Construction) -> Result<Vec<ScenarioSpec>, SpecError> {
    let specs = match c {
        Construction::Periodic { k, p } => {
            if k == 0 {
                return Err(params("need at least one agent"));
            }
            let ring = |agents: usize| {
                let gap = p + 1;
                let n = 2 * agents * gap;
                let homes = (0..agents).map(|i| gap + 2 * gap * i).collect();
                ScenarioSpec::new(ProtocolId::Ring1, n, 0, homes).with_tokens(1, false)
            };
            vec![ring(k), ring(k + 1)]
        }
        Construction::ThreeAgents { t, x, y } => {
            if t == 0 || !(1..=2 * t).contains(&x) || !(1..=2 * t).contains(&y) {
                return Err(params("need t >= 1 and 1 <= x, y <= 2t"));
            }
            let n = 8 * t + x + y;
            let homes = vec![x, x + 4 * t, x + 8 * t];
            vec![ScenarioSpec::new(ProtocolId::Ring2, n, 0, homes).with_tokens(tokens(t), false)]
        }
        Construction::MirrorFour { t, x } => {
            if t == 0 || x == 0 {
                return Err(params("need t >= 1 and x >= 1"));
            }
            let gap = 4 * t + 1;
            let n = 3 * gap + 2 * x;
            let homes: Vec<usize> = (0..4).map(|i| x + i * gap).collect();
            let mut out = Vec::new();
            for first in [Heading::Cw, Heading::Ccw] {
                for second in [Heading::Cw, Heading::Ccw] {
                    let mut l = vec![Heading::Cw; n];
                    l[homes[0]] = first;
                    l[homes[1]] = second;
                    for v in 1..n {
                        if 2 * v > n {
                            l[v] = l[n - v].flip();
                        }
                    }
                    let spec = ScenarioSpec::new(ProtocolId::Ring3, n, 0, homes.clone())
                        .unoriented(Labeling(l))
                        .with_tokens(tokens(t), false);
                    out.push(spec);
                }
            }
            out
        }
    };
    for s in &specs {
        s.validate()?;
    }
    Ok(specs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agent::fix_orientation;
    use crate::world::RingWorld;

    #[test]
    fn periodic_ring_of_eighteen() {
        let specs = theorem_scenario(Construction::Periodic { k: 3, p: 2 }).unwrap();
        assert_eq!(specs[0].n, 18);
        assert_eq!(specs[0].homebases, vec![3, 9, 15]);
        assert_eq!(specs[1].n, 24);
        assert_eq!(specs[1].homebases, vec![3, 9, 15, 21]);
        assert!(!specs[0].movable);
    }

    #[test]
    fn three_agent_ring_of_twenty_one() {
        let s = &theorem_scenario(Construction::ThreeAgents { t: 2, x: 3, y: 2 }).unwrap()[0];
        assert_eq!((s.n, s.homebases.clone()), (21, vec![3, 11, 19]));
        assert_eq!(s.n - s.homebases[2], 2);
        assert!(theorem_scenario(Construction::ThreeAgents { t: 1, x: 3, y: 1 }).is_err());
    }

    #[test]
    fn mirror_four_is_symmetric() {
        let specs = theorem_scenario(Construction::MirrorFour { t: 1, x: 2 }).unwrap();
        assert_eq!(specs.len(), 4);
        for s in &specs {
            assert_eq!(s.homebases, vec![2, 7, 12, 17]);
            let (a, b) = (s.port_labeling.clone().unwrap(), s.reflected().port_labeling.unwrap());
            // Every node but the black hole itself is mirrored.
            assert_eq!(a.0[1..], b.0[1..]);
        }
        // First variant: the two agents next to the black hole both start toward it.
        let w = RingWorld::new(&specs[0], ProtocolId::Ring3.automaton()).unwrap();
        let lefts: Vec<Heading> = w.agents().iter().map(|a| fix_orientation(a, &w).left).collect();
        assert_eq!(lefts[0], Heading::Cw);
        assert_eq!(lefts[3], Heading::Ccw);
    }
}
