use std::collections::HashSet;
use std::ops::RangeInclusive;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::protocols::ProtocolId;
use crate::scenario::{Labeling, ScenarioSpec};

/// Exhaustive enumerations larger than this trigger a warning.
pub const DEFAULT_CAP: u128 = 5_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "mode")]
pub enum LabelingMode {
    /// Consistently labelled ring, every placement.
    Oriented,
    /// Every placement under every port labeling, up to reflection.
    Exhaustive,
    /// Per ring size, `placements` random placements crossed with `labelings` random labelings.
    Sampled { seed: u64, placements: usize, labelings: usize },
}

/// A family of scenarios: black hole at node 0, every `n` and `k` in range.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Family {
    pub protocol: ProtocolId,
    pub n: RangeInclusive<usize>,
    pub k: RangeInclusive<usize>,
    pub mode: LabelingMode,
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i as u128 + 1))
}

impl Family {
    fn ks(&self, n: usize) -> RangeInclusive<usize> {
        *self.k.start().max(&1)..=*self.k.end().min(&(n - 1))
    }

    /// Upper estimate of the number of scenarios, before deduplication.
    pub fn estimate(&self) -> u128 {
        self.n
            .clone()
            .filter(|&n| n >= 3)
            .map(|n| match self.mode {
                LabelingMode::Oriented => self.ks(n).map(|k| binomial(n - 1, k)).sum(),
                LabelingMode::Exhaustive => {
                    let placements: u128 = self.ks(n).map(|k| binomial(n - 1, k)).sum();
                    placements * (1u128 << n.min(100)) / 2
                }
                LabelingMode::Sampled { placements, labelings, .. } => (placements * labelings) as u128,
            })
            .sum()
    }

    pub fn budget_warning(&self, cap: u128) -> Option<String> {
        let e = self.estimate();
        (e > cap).then(|| format!("family holds about {e} scenarios, above the cap of {cap}"))
    }
}

/// Lexicographic `k`-subsets of `1..n`, i.e. every placement with the black hole at 0.
pub(super) fn placements(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut cur: Option<Vec<usize>> = (k < n).then(|| (1..=k).collect());
    std::iter::from_fn(move || {
        let out = cur.clone()?;
        let mut next = out.clone();
        let mut i = k;
        cur = loop {
            if i == 0 {
                break None;
            }
            i -= 1;
            if next[i] < n - k + i {
                next[i] += 1;
                for j in i + 1..k {
                    next[j] = next[j - 1] + 1;
                }
                break Some(next);
            }
        };
        Some(out)
    })
}

/// Canonical, duplicate-free scenarios of `family`, in a fixed order.
pub fn enumerate(family: &Family) -> Box<dyn Iterator<Item = ScenarioSpec> + Send + '_> {
    let protocol = family.protocol;
    let ns = family.n.clone().filter(|&n| n >= 3);
    match family.mode {
        LabelingMode::Oriented => Box::new(ns.flat_map(move |n| {
            family.ks(n).flat_map(move |k| placements(n, k).map(move |h| ScenarioSpec::new(protocol, n, 0, h)))
        })),
        LabelingMode::Exhaustive => Box::new(ns.flat_map(move |n| {
            family.ks(n).flat_map(move |k| {
                placements(n, k).flat_map(move |h| {
                    (0..1u64 << n).filter_map(move |bits| {
                        let s = ScenarioSpec::new(protocol, n, 0, h.clone()).unoriented(Labeling::from_bits(n, bits));
                        s.is_canonical().then_some(s)
                    })
                })
            })
        })),
        LabelingMode::Sampled { seed, placements: np, labelings: nl } => Box::new(ns.flat_map(move |n| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (n as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
            let ks = family.ks(n);
            let homes: Vec<Vec<usize>> = (0..np)
                .map(|_| {
                    let k = rng.random_range(ks.clone());
                    let mut h: Vec<usize> = sample(&mut rng, n - 1, k).into_iter().map(|v| v + 1).collect();
                    h.sort_unstable();
                    h
                })
                .collect();
            let labels: Vec<Labeling> = (0..nl)
                .map(|_| Labeling((0..n).map(|_| if rng.random() { crate::ring::Heading::Ccw } else { crate::ring::Heading::Cw }).collect()))
                .collect();
            let mut seen = HashSet::new();
            let mut out = Vec::new();
            for h in &homes {
                for l in &labels {
                    let s = ScenarioSpec::new(protocol, n, 0, h.clone()).unoriented(l.clone()).canonical();
                    if seen.insert(s.clone()) {
                        out.push(s);
                    }
                }
            }
            out.into_iter()
        })),
    }
}
