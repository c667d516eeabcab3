//! Patch index bookkeeping for the line window and the torus.

use crate::params::Topology;

/// Inclusive patch interval `[i_min, i_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Window {
    pub i_min: i64,
    pub i_max: i64,
}

impl Window {
    pub fn new(i_min: i64, i_max: i64) -> Self {
        assert!(i_min <= i_max, "empty window [{i_min}, {i_max}]");
        Self { i_min, i_max }
    }

    pub fn len(&self) -> usize {
        (self.i_max - self.i_min + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, patch: i64) -> bool {
        (self.i_min..=self.i_max).contains(&patch)
    }

    /// The window one generation later: one patch added on each side.
    pub fn expanded(&self) -> Self {
        Self::new(self.i_min - 1, self.i_max + 1)
    }

    pub fn covers(&self, other: &Window) -> bool {
        self.i_min <= other.i_min && other.i_max <= self.i_max
    }
}

/// The set of stored patches: a window of the line (exterior implicitly empty) or a torus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Domain {
    Line(Window),
    Torus { len: usize },
}

impl Domain {
    /// Initial domain for a topology; `window` is ignored on the torus.
    pub fn for_topology(topology: Topology, window: Window) -> Self {
        match topology {
            Topology::Line => Domain::Line(window),
            Topology::Torus(len) => Domain::Torus { len },
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Domain::Line(w) => w.len(),
            Domain::Torus { len } => *len,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Patch label of storage slot `idx`.
    pub fn patch(&self, idx: usize) -> i64 {
        match self {
            Domain::Line(w) => w.i_min + idx as i64,
            Domain::Torus { .. } => idx as i64,
        }
    }

    /// Storage slot of `patch`, wrapping on the torus; `None` outside a line window.
    pub fn index(&self, patch: i64) -> Option<usize> {
        match self {
            Domain::Line(w) => w.contains(patch).then(|| (patch - w.i_min) as usize),
            Domain::Torus { len } => Some(patch.rem_euclid(*len as i64) as usize),
        }
    }

    pub fn patches(&self) -> impl Iterator<Item = i64> + '_ {
        (0..self.len()).map(move |i| self.patch(i))
    }

    /// Domain after one generation.
    pub fn expanded(&self) -> Self {
        match self {
            Domain::Line(w) => Domain::Line(w.expanded()),
            torus => *torus,
        }
    }

    /// True if every patch of `other` has a slot here.
    pub fn covers(&self, other: &Domain) -> bool {
        match (self, other) {
            (Domain::Line(a), Domain::Line(b)) => a.covers(b),
            (Domain::Torus { len: a }, Domain::Torus { len: b }) => a == b,
            _ => false,
        }
    }

    pub fn window(&self) -> Option<Window> {
        match self {
            Domain::Line(w) => Some(*w),
            Domain::Torus { .. } => None,
        }
    }
}
