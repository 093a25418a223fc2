//! Ring geometry: global headings, agent-relative sides, orientations and links.
//!
//! Nodes are numbered `0..n` counterclockwise, so a clockwise step goes from
//! `v` to `v - 1` (mod n). In an oriented ring every agent's `Left` is the
//! clockwise heading.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Global direction of travel around the ring.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Heading {
    /// `v -> v - 1`
    Cw,
    /// `v -> v + 1`
    Ccw,
}

impl Heading {
    pub fn flip(self) -> Heading {
        match self {
            Heading::Cw => Heading::Ccw,
            Heading::Ccw => Heading::Cw,
        }
    }

    /// The neighbour of `v` in this heading on a ring of `n` nodes.
    pub fn step(self, v: usize, n: usize) -> usize {
        match self {
            Heading::Cw => (v + n - 1) % n,
            Heading::Ccw => (v + 1) % n,
        }
    }
}

impl fmt::Display for Heading {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Heading::Cw => "cw",
            Heading::Ccw => "ccw",
        })
    }
}

/// Agent-relative direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
        })
    }
}

/// The mapping from an agent's `{Left, Right}` to global headings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Orientation {
    pub left: Heading,
}

impl Orientation {
    pub const CLOCKWISE: Orientation = Orientation { left: Heading::Cw };

    pub fn heading(self, side: Side) -> Heading {
        match side {
            Side::Left => self.left,
            Side::Right => self.left.flip(),
        }
    }

    pub fn side(self, heading: Heading) -> Side {
        if heading == self.left {
            Side::Left
        } else {
            Side::Right
        }
    }

    pub fn agrees_with(self, other: Orientation) -> bool {
        self.left == other.left
    }
}

/// A dangerous-link mark, stored at the safe endpoint of the link.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Mark {
    pub node: usize,
    pub heading: Heading,
}

impl Mark {
    /// Index of the undirected edge: edge `e` joins `e` and `e + 1` (mod n).
    pub fn edge(self, n: usize) -> usize {
        edge_index(self.node, self.heading, n)
    }

    /// Node at the far end of the marked link.
    pub fn target(self, n: usize) -> usize {
        self.heading.step(self.node, n)
    }
}

impl fmt::Display for Mark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.node, self.heading)
    }
}

pub fn edge_index(node: usize, heading: Heading, n: usize) -> usize {
    match heading {
        Heading::Ccw => node,
        Heading::Cw => (node + n - 1) % n,
    }
}

/// Distance walking from `from` to `to` in `heading`.
pub fn distance(from: usize, to: usize, heading: Heading, n: usize) -> usize {
    match heading {
        Heading::Ccw => (to + n - from) % n,
        Heading::Cw => (from + n - to) % n,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn headings_step_around_the_ring() {
        assert_eq!(Heading::Cw.step(0, 5), 4);
        assert_eq!(Heading::Ccw.step(4, 5), 0);
        assert_eq!(distance(1, 4, Heading::Cw, 5), 2);
        assert_eq!(distance(1, 4, Heading::Ccw, 5), 3);
    }

    #[test]
    fn both_endpoints_name_the_same_edge() {
        for n in 3..8 {
            for v in 0..n {
                let a = Mark { node: v, heading: Heading::Ccw };
                let b = Mark { node: a.target(n), heading: Heading::Cw };
                assert_eq!(a.edge(n), b.edge(n));
            }
        }
    }

    #[test]
    fn orientation_translates_both_ways() {
        let o = Orientation { left: Heading::Ccw };
        assert_eq!(o.heading(Side::Left), Heading::Ccw);
        assert_eq!(o.heading(Side::Right), Heading::Cw);
        assert_eq!(o.side(Heading::Cw), Side::Right);
        assert!(!o.agrees_with(Orientation::CLOCKWISE));
    }
}
