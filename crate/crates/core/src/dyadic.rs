//! Three shifted dyadic lattices covering a grid domain.
//!
//! Each lattice is the dyadic subdivision of a root interval three times as
//! long as the domain. The roots start `2N`, `N` and `0` cells left of the
//! domain, i.e. they are shifted by 0, 1/3 and 2/3 of the root length, and all
//! three contain the domain. With `2^depth | N` every cube boundary at every
//! level falls on a cell boundary, and at each level the endpoints of the three
//! lattices interleave at one third of the cube side. That interleaving is what
//! puts any interval `I` inside a lattice cube of side at most `6|I|`.
//!
//! Cube coordinates are signed cell indices relative to the domain's first
//! cell; [`Cube::clipped`] gives the part inside the domain, which is what all
//! averages use.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{CellRange, Domain1D};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DyadicLattice {
    /// Shift of the root in thirds of its length: 0, 1 or 2.
    pub shift_thirds: u8,
    /// First cell of the root, relative to the domain's cell 0.
    pub root_start: isize,
    pub root_cells: usize,
    pub depth: u32,
    /// Number of cells of the domain the lattice was built for.
    pub domain_cells: usize,
}

/// A lattice cube, identified by `(lattice, level, index)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cube {
    pub lattice: u8,
    pub level: u32,
    pub index: usize,
    pub start: isize,
    pub end: isize,
}

impl Cube {
    pub fn side(&self) -> usize {
        (self.end - self.start) as usize
    }

    pub fn contains_cell(&self, i: usize) -> bool {
        let i = i as isize;
        self.start <= i && i < self.end
    }

    /// Part of the cube inside `0..cells`, if any.
    pub fn clipped(&self, cells: usize) -> Option<CellRange> {
        clip(self.start, self.end, cells)
    }

    /// Concentric tripling `3Q`, clipped to `0..cells`.
    pub fn tripled_clipped(&self, cells: usize) -> Option<CellRange> {
        let s = self.end - self.start;
        clip(self.start - s, self.end + s, cells)
    }

    pub fn contains(&self, other: &Cube) -> bool {
        self.start <= other.start && other.end <= self.end
    }

    /// Stable textual key, `level:index`.
    pub fn key(&self) -> String {
        format!("{}:{}", self.level, self.index)
    }
}

fn clip(start: isize, end: isize, cells: usize) -> Option<CellRange> {
    let s = start.max(0);
    let e = end.min(cells as isize);
    (s < e).then(|| CellRange::new(s as usize, e as usize))
}

impl DyadicLattice {
    fn build(domain: &Domain1D, shift_thirds: u8, depth: u32) -> Self {
        let n = domain.cells();
        Self {
            shift_thirds,
            root_start: -2 * n as isize + shift_thirds as isize * n as isize,
            root_cells: 3 * n,
            depth,
            domain_cells: n,
        }
    }

    /// Cube side at `level`, in cells.
    pub fn side(&self, level: u32) -> usize {
        self.root_cells >> level
    }

    pub fn cube(&self, level: u32, index: usize) -> Cube {
        let s = self.side(level) as isize;
        let start = self.root_start + index as isize * s;
        Cube {
            lattice: self.shift_thirds,
            level,
            index,
            start,
            end: start + s,
        }
    }

    pub fn root(&self) -> Cube {
        self.cube(0, 0)
    }

    /// The level-`level` cube containing domain cell `cell`.
    pub fn containing(&self, level: u32, cell: usize) -> Cube {
        let s = self.side(level) as isize;
        let idx = (cell as isize - self.root_start).div_euclid(s);
        self.cube(level, idx as usize)
    }

    /// Level-`level` cubes meeting the domain, left to right.
    pub fn cubes_at(&self, level: u32) -> impl Iterator<Item = Cube> + '_ {
        let lo = self.containing(level, 0).index;
        let hi = self.containing(level, self.domain_cells - 1).index;
        (lo..=hi).map(move |j| self.cube(level, j))
    }

    /// Every cube meeting the domain, coarse to fine.
    pub fn cubes(&self) -> impl Iterator<Item = Cube> + '_ {
        (0..=self.depth).flat_map(move |l| self.cubes_at(l))
    }

    /// Level-`level` cubes meeting cells `r`.
    pub fn cubes_meeting(&self, level: u32, r: CellRange) -> impl Iterator<Item = Cube> + '_ {
        let lo = self.containing(level, r.start).index;
        let hi = self.containing(level, r.end - 1).index;
        (lo..=hi).map(move |j| self.cube(level, j))
    }

    pub fn children(&self, q: &Cube) -> Option<[Cube; 2]> {
        (q.level < self.depth).then(|| [self.cube(q.level + 1, 2 * q.index), self.cube(q.level + 1, 2 * q.index + 1)])
    }

    /// Children meeting the domain.
    pub fn children_in_domain(&self, q: &Cube) -> Vec<Cube> {
        self.children(q)
            .map(|cs| cs.into_iter().filter(|c| c.clipped(self.domain_cells).is_some()).collect())
            .unwrap_or_default()
    }

    /// Structural check of the lattice properties on the finite tree: children
    /// partition their parent, every cube lies in the root, the root covers the
    /// domain, and all boundaries are cell boundaries.
    pub fn validate(&self) -> Result<()> {
        let root = self.root();
        if root.start > 0 || root.end < self.domain_cells as isize {
            return Err(Error::Construction("root does not cover the domain".into()));
        }
        if self.root_cells % (1usize << self.depth) != 0 {
            return Err(Error::Construction("finest cubes are not whole cells".into()));
        }
        for level in 0..self.depth {
            for q in self.cubes_at(level) {
                let [a, b] = self.children(&q).expect("level below depth");
                if a.start != q.start || a.end != b.start || b.end != q.end || a.side() != b.side() {
                    return Err(Error::Construction(format!("children of {} do not partition it", q.key())));
                }
                if !root.contains(&q) {
                    return Err(Error::Construction(format!("cube {} escapes the root", q.key())));
                }
            }
        }
        Ok(())
    }
}

/// The three shifted lattices for `domain`, refined down to `depth` levels.
pub fn lattices_for_domain(domain: &Domain1D, depth: u32) -> Result<[DyadicLattice; 3]> {
    if depth < 1 {
        return Err(Error::Domain("lattice depth must be at least 1".into()));
    }
    if depth >= usize::BITS - 2 {
        return Err(Error::Domain(format!("lattice depth {depth} is too large")));
    }
    let n = domain.cells();
    let block = 1usize << depth;
    if n % block != 0 {
        return Err(Error::Alignment {
            cells: n,
            depth,
            suggested: n.div_ceil(block) * block,
        });
    }
    Ok([0u8, 1, 2].map(|s| DyadicLattice::build(domain, s, depth)))
}

/// Deepest aligned lattices for `domain` (depth = number of factors of 2 in N).
pub fn default_lattices(domain: &Domain1D) -> [DyadicLattice; 3] {
    let depth = domain.cells().trailing_zeros().min(40);
    [0u8, 1, 2].map(|s| DyadicLattice::build(domain, s, depth))
}

/// All cubes of `lattices` meeting the domain, clipped to it.
pub fn clipped_cubes(lattices: &[DyadicLattice]) -> Vec<CellRange> {
    lattices
        .iter()
        .flat_map(|lat| lat.cubes().filter_map(|q| q.clipped(lat.domain_cells)))
        .collect()
}

/// Smallest lattice cube (over all lattices and levels) containing `start..end`.
pub fn smallest_containing_cube(lattices: &[DyadicLattice], start: usize, end: usize) -> Option<Cube> {
    let mut best: Option<Cube> = None;
    for lat in lattices {
        for level in 0..=lat.depth {
            let q = lat.containing(level, start);
            if (end as isize) <= q.end && best.is_none_or(|b| q.side() < b.side()) {
                best = Some(q);
            }
        }
    }
    best
}
