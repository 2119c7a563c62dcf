//! Geometry of the hexagonal lattice and its triangular dual.
//!
//! A hexagon is addressed by `(a, b)` and sits at `a*(sqrt3, 1) + b*(0, 2)` in
//! the plane. Vertices of the hexagonal lattice are triangles of mutually
//! adjacent hexagons; edges are unordered pairs of adjacent hexagons.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use crate::error::ParseError;

/// Colour class of a hexagon, always in `0..3`.
pub type Color = u8;

/// Neighbour offsets in counter-clockwise order, starting at 30 degrees.
pub const DIRS: [(i32, i32); 6] = [(1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)];

/// Offsets to the six nearest hexagons of the same colour.
pub const SUBLATTICE_DIRS: [(i32, i32); 6] = [(1, 1), (-1, 2), (-2, 1), (-1, -1), (1, -2), (2, -1)];

// Offsets from the smaller endpoint of an edge to the larger one, sorted so
// that the derived ordering on `HexEdge` is lexicographic in its endpoints.
const EDGE_DIRS: [(i32, i32); 3] = [(0, 1), (1, -1), (1, 0)];

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HexCoord {
    pub a: i32,
    pub b: i32,
}

impl HexCoord {
    pub const ORIGIN: HexCoord = HexCoord { a: 0, b: 0 };

    pub const fn new(a: i32, b: i32) -> Self {
        HexCoord { a, b }
    }

    pub fn color(self) -> Color {
        (self.b - self.a).rem_euclid(3) as Color
    }

    pub fn offset(self, d: (i32, i32)) -> Self {
        HexCoord::new(self.a + d.0, self.b + d.1)
    }

    pub fn neighbor(self, i: usize) -> Self {
        self.offset(DIRS[i % 6])
    }

    pub fn neighbors(self) -> [HexCoord; 6] {
        std::array::from_fn(|i| self.neighbor(i))
    }

    pub fn sublattice_neighbors(self) -> [HexCoord; 6] {
        std::array::from_fn(|i| self.offset(SUBLATTICE_DIRS[i]))
    }

    pub fn is_adjacent(self, other: HexCoord) -> bool {
        direction_index(other.a - self.a, other.b - self.b).is_some()
    }

    /// Translation by one step along the vertical axis; raises the colour by one.
    pub fn shift_up(self) -> Self {
        HexCoord::new(self.a, self.b + 1)
    }

    pub fn shift_down(self) -> Self {
        HexCoord::new(self.a, self.b - 1)
    }

    /// Cartesian position of the centre.
    pub fn position(self) -> (f64, f64) {
        let s3 = 3f64.sqrt();
        (s3 * self.a as f64, self.a as f64 + 2.0 * self.b as f64)
    }

    /// Vertices of the hexagon in counter-clockwise order. Vertex `i` is shared
    /// with neighbours `i` and `i + 1`.
    pub fn vertices(self) -> [HexVertex; 6] {
        std::array::from_fn(|i| {
            HexVertex::from_hexagons([self, self.neighbor(i), self.neighbor(i + 1)])
                .expect("consecutive neighbours form a triangle")
        })
    }

    /// Boundary edges of the hexagon; edge `i` separates it from neighbour `i`
    /// and joins vertices `i - 1` and `i`.
    pub fn edges(self) -> [HexEdge; 6] {
        std::array::from_fn(|i| HexEdge::between(self, self.neighbor(i)).expect("adjacent"))
    }

    /// Hexagonal distance on the triangular lattice.
    pub fn distance(self, other: HexCoord) -> i32 {
        let da = other.a - self.a;
        let db = other.b - self.b;
        // axial coordinates (q, r) with third coordinate -q-r
        let (q, r) = (da, db);
        (q.abs() + r.abs() + (q + r).abs()) / 2
    }
}

fn direction_index(da: i32, db: i32) -> Option<usize> {
    DIRS.iter().position(|&d| d == (da, db))
}

impl fmt::Display for HexCoord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.a, self.b)
    }
}

impl FromStr for HexCoord {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let inner = t
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| ParseError::Coord(s.to_string()))?;
        let mut parts = inner.split(',');
        let (Some(x), Some(y), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(ParseError::Coord(s.to_string()));
        };
        let a = x
            .trim()
            .parse()
            .map_err(|_| ParseError::Coord(s.to_string()))?;
        let b = y
            .trim()
            .parse()
            .map_err(|_| ParseError::Coord(s.to_string()))?;
        Ok(HexCoord::new(a, b))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TriangleKind {
    /// hexagons `z`, `z + (0,1)`, `z + (1,0)`
    Up,
    /// hexagons `z`, `z + (1,-1)`, `z + (1,0)`
    Down,
}

/// A vertex of the hexagonal lattice, stored as its smallest hexagon plus the
/// shape of the triangle. The derived order is lexicographic in the sorted
/// hexagon triple.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HexVertex {
    pub a: i32,
    pub b: i32,
    pub kind: TriangleKind,
}

impl HexVertex {
    pub fn from_hexagons(hs: [HexCoord; 3]) -> Option<Self> {
        let mut s = hs;
        s.sort();
        let [p, q, r] = s;
        let d1 = (q.a - p.a, q.b - p.b);
        let d2 = (r.a - p.a, r.b - p.b);
        let kind = match (d1, d2) {
            ((0, 1), (1, 0)) => TriangleKind::Up,
            ((1, -1), (1, 0)) => TriangleKind::Down,
            _ => return None,
        };
        Some(HexVertex {
            a: p.a,
            b: p.b,
            kind,
        })
    }

    pub fn base(self) -> HexCoord {
        HexCoord::new(self.a, self.b)
    }

    /// The three hexagons meeting at this vertex, sorted.
    pub fn hexagons(self) -> [HexCoord; 3] {
        let p = self.base();
        match self.kind {
            TriangleKind::Up => [p, p.offset((0, 1)), p.offset((1, 0))],
            TriangleKind::Down => [p, p.offset((1, -1)), p.offset((1, 0))],
        }
    }

    pub fn hexagon_of_color(self, c: Color) -> HexCoord {
        self.hexagons()
            .into_iter()
            .find(|h| h.color() == c)
            .expect("a vertex touches one hexagon of each colour")
    }

    pub fn edges(self) -> [HexEdge; 3] {
        let [p, q, r] = self.hexagons();
        [
            HexEdge::between(p, q).expect("adjacent"),
            HexEdge::between(p, r).expect("adjacent"),
            HexEdge::between(q, r).expect("adjacent"),
        ]
    }

    pub fn neighbors(self) -> [HexVertex; 3] {
        let e = self.edges();
        std::array::from_fn(|i| e[i].other_endpoint(self))
    }

    pub fn is_adjacent(self, other: HexVertex) -> bool {
        self.neighbors().contains(&other)
    }

    /// Neighbours in the graph where opposite corners of every hexagon are
    /// also joined.
    pub fn hexcross_neighbors(self) -> [HexVertex; 6] {
        let n = self.neighbors();
        let hs = self.hexagons();
        let opp: [HexVertex; 3] = std::array::from_fn(|i| {
            let vs = hs[i].vertices();
            let k = vs
                .iter()
                .position(|&v| v == self)
                .expect("vertex of its hexagon");
            vs[(k + 3) % 6]
        });
        [n[0], n[1], n[2], opp[0], opp[1], opp[2]]
    }

    pub fn shift_up(self) -> Self {
        HexVertex {
            b: self.b + 1,
            ..self
        }
    }

    pub fn shift_down(self) -> Self {
        HexVertex {
            b: self.b - 1,
            ..self
        }
    }

    pub fn position(self) -> (f64, f64) {
        let hs = self.hexagons();
        let (mut x, mut y) = (0.0, 0.0);
        for h in hs {
            let (px, py) = h.position();
            x += px;
            y += py;
        }
        (x / 3.0, y / 3.0)
    }
}

impl fmt::Display for HexVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [p, q, r] = self.hexagons();
        write!(f, "[{p}{q}{r}]")
    }
}

/// An edge of the hexagonal lattice, identified with the pair of hexagons it
/// separates. Stored as the smaller hexagon and an index into the three
/// forward directions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HexEdge {
    lo: HexCoord,
    dir: u8,
}

impl HexEdge {
    pub fn between(y: HexCoord, z: HexCoord) -> Option<Self> {
        let (lo, hi) = if y < z { (y, z) } else { (z, y) };
        let d = (hi.a - lo.a, hi.b - lo.b);
        let dir = EDGE_DIRS.iter().position(|&e| e == d)? as u8;
        Some(HexEdge { lo, dir })
    }

    /// The two hexagons separated by the edge, smaller first.
    pub fn hexagons(self) -> (HexCoord, HexCoord) {
        (self.lo, self.lo.offset(EDGE_DIRS[self.dir as usize]))
    }

    pub fn endpoints(self) -> [HexVertex; 2] {
        let (p, q) = self.hexagons();
        let i = direction_index(q.a - p.a, q.b - p.b).expect("adjacent");
        let u = HexVertex::from_hexagons([p, q, p.neighbor(i + 5)]).expect("triangle");
        let v = HexVertex::from_hexagons([p, q, p.neighbor(i + 1)]).expect("triangle");
        if u < v {
            [u, v]
        } else {
            [v, u]
        }
    }

    pub fn other_endpoint(self, v: HexVertex) -> HexVertex {
        let [p, q] = self.endpoints();
        if p == v {
            q
        } else {
            debug_assert_eq!(q, v);
            p
        }
    }

    pub fn has_endpoint(self, v: HexVertex) -> bool {
        self.endpoints().contains(&v)
    }

    /// Whether the edge lies on the boundary of hexagon `z`.
    pub fn borders(self, z: HexCoord) -> bool {
        let (p, q) = self.hexagons();
        p == z || q == z
    }

    /// Whether the edge belongs to the ground state of colour `c`, i.e. lies
    /// on a hexagon of colour `c`.
    pub fn in_ground_state(self, c: Color) -> bool {
        let (p, q) = self.hexagons();
        p.color() == c || q.color() == c
    }

    pub fn shift_up(self) -> Self {
        HexEdge {
            lo: self.lo.shift_up(),
            dir: self.dir,
        }
    }

    pub fn shift_down(self) -> Self {
        HexEdge {
            lo: self.lo.shift_down(),
            dir: self.dir,
        }
    }
}

impl fmt::Display for HexEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (p, q) = self.hexagons();
        write!(f, "{p}-{q}")
    }
}

impl FromStr for HexEdge {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let split = t
            .find(")-")
            .ok_or_else(|| ParseError::Edge(s.to_string()))?;
        let p: HexCoord = t[..=split]
            .parse()
            .map_err(|_| ParseError::Edge(s.to_string()))?;
        let q: HexCoord = t[split + 2..]
            .parse()
            .map_err(|_| ParseError::Edge(s.to_string()))?;
        HexEdge::between(p, q).ok_or_else(|| ParseError::NotAdjacent(s.to_string()))
    }
}

/// Every edge of the ground state of colour `c` lying on the given hexagons.
pub fn ground_state_edges<I: IntoIterator<Item = HexCoord>>(
    c: Color,
    hexagons: I,
) -> BTreeSet<HexEdge> {
    hexagons
        .into_iter()
        .filter(|z| z.color() == c)
        .flat_map(|z| z.edges())
        .collect()
}

/// Connected components of `nodes` under the supplied adjacency, each sorted,
/// listed by smallest member.
pub fn connected_components<T, F, I>(nodes: &BTreeSet<T>, mut adj: F) -> Vec<BTreeSet<T>>
where
    T: Ord + Copy,
    F: FnMut(T) -> I,
    I: IntoIterator<Item = T>,
{
    let mut seen: BTreeSet<T> = BTreeSet::new();
    let mut out = Vec::new();
    for &s in nodes {
        if seen.contains(&s) {
            continue;
        }
        let mut comp = BTreeSet::new();
        let mut queue = VecDeque::from([s]);
        seen.insert(s);
        while let Some(x) = queue.pop_front() {
            comp.insert(x);
            for y in adj(x) {
                if nodes.contains(&y) && seen.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        out.push(comp);
    }
    out
}

/// Inclusive bounding box in `(a, b)` coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BBox {
    pub amin: i32,
    pub amax: i32,
    pub bmin: i32,
    pub bmax: i32,
}

impl BBox {
    pub fn of<I: IntoIterator<Item = HexCoord>>(hs: I) -> Option<Self> {
        let mut it = hs.into_iter();
        let first = it.next()?;
        let mut bb = BBox {
            amin: first.a,
            amax: first.a,
            bmin: first.b,
            bmax: first.b,
        };
        for h in it {
            bb.amin = bb.amin.min(h.a);
            bb.amax = bb.amax.max(h.a);
            bb.bmin = bb.bmin.min(h.b);
            bb.bmax = bb.bmax.max(h.b);
        }
        Some(bb)
    }

    pub fn of_vertices<'a, I: IntoIterator<Item = &'a HexVertex>>(vs: I) -> Option<Self> {
        Self::of(vs.into_iter().flat_map(|v| v.hexagons()))
    }

    pub fn grow(self, m: i32) -> Self {
        BBox {
            amin: self.amin - m,
            amax: self.amax + m,
            bmin: self.bmin - m,
            bmax: self.bmax + m,
        }
    }

    pub fn contains(&self, h: HexCoord) -> bool {
        (self.amin..=self.amax).contains(&h.a) && (self.bmin..=self.bmax).contains(&h.b)
    }

    pub fn on_rim(&self, h: HexCoord) -> bool {
        h.a == self.amin || h.a == self.amax || h.b == self.bmin || h.b == self.bmax
    }

    pub fn hexagons(&self) -> impl Iterator<Item = HexCoord> + '_ {
        (self.amin..=self.amax)
            .flat_map(move |a| (self.bmin..=self.bmax).map(move |b| HexCoord::new(a, b)))
    }

    /// Vertices all of whose hexagons lie in the box.
    pub fn vertices(&self) -> BTreeSet<HexVertex> {
        let mut out = BTreeSet::new();
        for h in self.hexagons() {
            for kind in [TriangleKind::Up, TriangleKind::Down] {
                let v = HexVertex {
                    a: h.a,
                    b: h.b,
                    kind,
                };
                if v.hexagons().iter().all(|x| self.contains(*x)) {
                    out.insert(v);
                }
            }
        }
        out
    }

    /// Whether a vertex touches a rim hexagon of the box.
    pub fn vertex_on_rim(&self, v: HexVertex) -> bool {
        v.hexagons().iter().any(|h| self.on_rim(*h))
    }
}
