//! Loop configurations, boundary conditions and the O(n) weight.

mod domain;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

pub use domain::Domain;

use crate::error::{Error, Result};
use crate::lattice::{BBox, Color, HexCoord, HexEdge, HexVertex};

/// A finite set of edges in which every vertex has degree 0 or 2.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LoopConfig {
    edges: BTreeSet<HexEdge>,
}

impl LoopConfig {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn new<I: IntoIterator<Item = HexEdge>>(edges: I) -> Result<Self> {
        let edges: BTreeSet<HexEdge> = edges.into_iter().collect();
        if let Some(v) = odd_vertex(&edges) {
            return Err(Error::Parity(v));
        }
        Ok(LoopConfig { edges })
    }

    /// Skip the parity check; callers guarantee evenness.
    pub(crate) fn from_even(edges: BTreeSet<HexEdge>) -> Self {
        debug_assert!(odd_vertex(&edges).is_none());
        LoopConfig { edges }
    }

    /// Ground state of colour `c` restricted to the given hexagons.
    pub fn ground_state<I: IntoIterator<Item = HexCoord>>(c: Color, hexagons: I) -> Self {
        LoopConfig {
            edges: crate::lattice::ground_state_edges(c, hexagons),
        }
    }

    /// Union of the boundaries of the given pairwise non-adjacent hexagons.
    pub fn trivial_loops<I: IntoIterator<Item = HexCoord>>(hexagons: I) -> Result<Self> {
        let mut edges = BTreeSet::new();
        for z in hexagons {
            for e in z.edges() {
                if !edges.insert(e) {
                    return Err(Error::Precondition(format!("hexagons touching at {e}")));
                }
            }
        }
        Self::new(edges)
    }

    pub fn edges(&self) -> &BTreeSet<HexEdge> {
        &self.edges
    }

    pub fn into_edges(self) -> BTreeSet<HexEdge> {
        self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn contains(&self, e: HexEdge) -> bool {
        self.edges.contains(&e)
    }

    pub fn degree(&self, v: HexVertex) -> usize {
        v.edges().iter().filter(|e| self.edges.contains(e)).count()
    }

    pub fn vertices(&self) -> BTreeSet<HexVertex> {
        self.edges.iter().flat_map(|e| e.endpoints()).collect()
    }

    pub fn symmetric_difference(&self, other: &LoopConfig) -> LoopConfig {
        LoopConfig::from_even(
            self.edges
                .symmetric_difference(&other.edges)
                .copied()
                .collect(),
        )
    }

    /// Toggle the six edges of a hexagon.
    pub fn flip_hexagon(&self, z: HexCoord) -> LoopConfig {
        let mut edges = self.edges.clone();
        for e in z.edges() {
            if !edges.remove(&e) {
                edges.insert(e);
            }
        }
        LoopConfig::from_even(edges)
    }

    /// Whether hexagon `z` is surrounded by a trivial loop.
    pub fn is_flower(&self, z: HexCoord) -> bool {
        z.edges().iter().all(|e| self.edges.contains(e))
    }

    pub fn shift_up(&self) -> Self {
        LoopConfig {
            edges: self.edges.iter().map(|e| e.shift_up()).collect(),
        }
    }

    pub fn shift_down(&self) -> Self {
        LoopConfig {
            edges: self.edges.iter().map(|e| e.shift_down()).collect(),
        }
    }

    /// Number of edges inside the domain.
    pub fn edges_in(&self, h: &Domain) -> usize {
        self.edges.iter().filter(|e| h.contains_edge(**e)).count()
    }
}

impl fmt::Display for LoopConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.edges {
            writeln!(f, "{e}")?;
        }
        Ok(())
    }
}

/// Parse one edge per line; blank lines and `#` comments are ignored.
impl FromStr for LoopConfig {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut edges = BTreeSet::new();
        for (i, raw) in s.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let e: HexEdge = line.parse().map_err(|e: crate::error::ParseError| {
                crate::error::ParseError::Line {
                    line: i + 1,
                    msg: e.to_string(),
                }
            })?;
            edges.insert(e);
        }
        LoopConfig::new(edges)
    }
}

pub(crate) fn odd_vertex(edges: &BTreeSet<HexEdge>) -> Option<HexVertex> {
    let mut deg: BTreeMap<HexVertex, u8> = BTreeMap::new();
    for e in edges {
        for v in e.endpoints() {
            *deg.entry(v).or_default() += 1;
        }
    }
    deg.into_iter().find(|(_, d)| d % 2 == 1).map(|(v, _)| v)
}

/// One loop: its edges and its vertices in cyclic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Loop {
    pub edges: BTreeSet<HexEdge>,
    pub vertices: Vec<HexVertex>,
}

impl Loop {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// The hexagon enclosed by a loop of length six.
    pub fn trivial_hexagon(&self) -> Option<HexCoord> {
        if self.edges.len() != 6 {
            return None;
        }
        let e = *self.edges.iter().next()?;
        let (p, q) = e.hexagons();
        [p, q]
            .into_iter()
            .find(|z| z.edges().iter().all(|f| self.edges.contains(f)))
    }

    pub fn is_trivial(&self) -> bool {
        self.trivial_hexagon().is_some()
    }

    pub fn shift_up(&self) -> Loop {
        Loop {
            edges: self.edges.iter().map(|e| e.shift_up()).collect(),
            vertices: self.vertices.iter().map(|v| v.shift_up()).collect(),
        }
    }

    /// Whether `u` lies on the loop or in the bounded region it encloses.
    pub fn surrounds(&self, u: HexVertex) -> bool {
        let on: BTreeSet<HexVertex> = self.vertices.iter().copied().collect();
        if on.contains(&u) {
            return true;
        }
        let bb = BBox::of_vertices(&on).expect("non-empty loop").grow(2);
        if !u.hexagons().iter().all(|h| bb.contains(*h)) {
            return false;
        }
        let mut seen = BTreeSet::from([u]);
        let mut queue = VecDeque::from([u]);
        while let Some(v) = queue.pop_front() {
            if bb.vertex_on_rim(v) {
                return false;
            }
            for w in v.neighbors() {
                if !on.contains(&w) && seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        true
    }
}

/// Split a configuration into its loops, listed by smallest edge.
pub fn loops_of(omega: &LoopConfig) -> Vec<Loop> {
    let mut used: BTreeSet<HexEdge> = BTreeSet::new();
    let mut out = Vec::new();
    for &e0 in omega.edges() {
        if used.contains(&e0) {
            continue;
        }
        let [start, mut cur] = e0.endpoints();
        let mut edges = BTreeSet::from([e0]);
        let mut vertices = vec![start];
        let mut prev_edge = e0;
        used.insert(e0);
        while cur != start {
            vertices.push(cur);
            let next = cur
                .edges()
                .into_iter()
                .find(|f| *f != prev_edge && omega.contains(*f))
                .expect("even degree");
            used.insert(next);
            edges.insert(next);
            prev_edge = next;
            cur = next.other_endpoint(cur);
        }
        out.push(Loop { edges, vertices });
    }
    out
}

/// Number of loops of `omega` having at least one edge in the domain.
pub fn count_loops(omega: &LoopConfig, h: &Domain) -> usize {
    loops_of(omega)
        .iter()
        .filter(|l| l.edges.iter().any(|e| h.contains_edge(*e)))
        .count()
}

/// Does `u` lie on or inside loop `l`.
pub fn loop_surrounds(l: &Loop, u: HexVertex) -> bool {
    l.surrounds(u)
}

/// Edge weight `x`, possibly infinite.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EdgeWeight {
    Finite(f64),
    Infinite,
}

impl EdgeWeight {
    pub fn is_infinite(self) -> bool {
        matches!(self, EdgeWeight::Infinite)
    }
}

impl fmt::Display for EdgeWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EdgeWeight::Finite(x) => write!(f, "{x}"),
            EdgeWeight::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for EdgeWeight {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "∞" => Ok(EdgeWeight::Infinite),
            t => {
                let x: f64 = t
                    .parse()
                    .map_err(|_| Error::Parameter(format!("edge weight `{s}`")))?;
                if x > 0.0 && x.is_finite() {
                    Ok(EdgeWeight::Finite(x))
                } else {
                    Err(Error::Parameter(format!(
                        "edge weight must be positive, got {s}"
                    )))
                }
            }
        }
    }
}

/// Loop weight `n` and edge weight `x`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    pub n: f64,
    pub x: EdgeWeight,
}

impl ModelParams {
    pub fn new(n: f64, x: f64) -> Result<Self> {
        Self::with_weight(n, EdgeWeight::Finite(x))
    }

    pub fn with_weight(n: f64, x: EdgeWeight) -> Result<Self> {
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::Parameter(format!(
                "loop weight must be positive, got {n}"
            )));
        }
        if let EdgeWeight::Finite(v) = x {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Parameter(format!(
                    "edge weight must be positive, got {v}"
                )));
            }
        }
        Ok(ModelParams { n, x })
    }

    /// Weight of `o` edges and `loops` loops.
    pub fn log_weight_of(&self, o: usize, loops: usize) -> LogWeight {
        match self.x {
            EdgeWeight::Finite(x) => {
                LogWeight::Finite(o as f64 * x.ln() + loops as f64 * self.n.ln())
            }
            EdgeWeight::Infinite => LogWeight::Packed { o, loops },
        }
    }
}

/// Logarithm of a configuration weight. With infinite edge weight only the
/// edge count and loop count are kept and compared lexicographically.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LogWeight {
    Finite(f64),
    Packed { o: usize, loops: usize },
}

/// `x^o n^L` for the part of `omega` inside the domain, as a logarithm.
pub fn log_weight(omega: &LoopConfig, h: &Domain, p: &ModelParams) -> LogWeight {
    p.log_weight_of(omega.edges_in(h), count_loops(omega, h))
}

/// Boundary condition: the configuration imposed outside the domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoundaryCondition {
    Vacant,
    Ground(Color),
    /// Given on a finite window; paths leaving the window are treated as
    /// infinite and never counted as loops.
    Explicit(LoopConfig),
}

impl BoundaryCondition {
    /// Edges of the boundary configuration that lie outside the domain and
    /// can meet it.
    pub fn frozen_edges(&self, h: &Domain) -> BTreeSet<HexEdge> {
        match self {
            BoundaryCondition::Vacant => BTreeSet::new(),
            BoundaryCondition::Ground(c) => {
                let touching: BTreeSet<HexCoord> = h
                    .vertices()
                    .iter()
                    .map(|v| v.hexagon_of_color(*c))
                    .collect();
                crate::lattice::ground_state_edges(*c, touching)
                    .into_iter()
                    .filter(|e| !h.contains_edge(*e))
                    .collect()
            }
            BoundaryCondition::Explicit(xi) => xi
                .edges()
                .iter()
                .copied()
                .filter(|e| !h.contains_edge(*e))
                .collect(),
        }
    }

    /// Edges of the boundary configuration inside the domain.
    pub fn inner_edges(&self, h: &Domain) -> BTreeSet<HexEdge> {
        match self {
            BoundaryCondition::Vacant => BTreeSet::new(),
            BoundaryCondition::Ground(c) => h
                .faces()
                .iter()
                .chain(h.circuit().hexagons())
                .filter(|z| z.color() == *c)
                .flat_map(|z| z.edges())
                .filter(|e| h.contains_edge(*e))
                .collect(),
            BoundaryCondition::Explicit(xi) => xi
                .edges()
                .iter()
                .copied()
                .filter(|e| h.contains_edge(*e))
                .collect(),
        }
    }

    pub fn is_vacant(&self) -> bool {
        matches!(self, BoundaryCondition::Vacant)
    }
}

impl fmt::Display for BoundaryCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryCondition::Vacant => f.write_str("vacant"),
            BoundaryCondition::Ground(c) => write!(f, "gnd{c}"),
            BoundaryCondition::Explicit(xi) => write!(f, "explicit({} edges)", xi.len()),
        }
    }
}

/// A configuration is vacant along a circuit when it uses none of the edges
/// the circuit crosses.
pub fn is_vacant(omega: &LoopConfig, gamma: &crate::circuits::Circuit) -> bool {
    gamma.dual_edges().iter().all(|e| !omega.contains(*e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parity_is_checked() {
        let z = HexCoord::ORIGIN;
        let e = z.edges();
        assert!(LoopConfig::new(e).is_ok());
        assert!(matches!(
            LoopConfig::new(e[..5].iter().copied()),
            Err(Error::Parity(_))
        ));
    }

    #[test]
    fn two_adjacent_hexagons_make_one_long_loop() {
        let z = HexCoord::ORIGIN;
        let w = z.neighbor(0);
        let omega = LoopConfig::trivial_loops([z]).unwrap().flip_hexagon(w);
        let ls = loops_of(&omega);
        assert_eq!(ls.len(), 1);
        assert_eq!(ls[0].len(), 10);
        assert!(!ls[0].is_trivial());
        assert!(LoopConfig::trivial_loops([z, w]).is_err());
    }

    #[test]
    fn ground_state_loops_are_trivial() {
        let h = Domain::ball(HexCoord::ORIGIN, 3);
        for c in 0..3 {
            let g = LoopConfig::ground_state(c, h.faces().iter().copied());
            for l in loops_of(&g) {
                assert_eq!(l.trivial_hexagon().map(|z| z.color()), Some(c));
            }
        }
    }

    #[test]
    fn surrounds_inside_and_outside() {
        let z = HexCoord::ORIGIN;
        let omega = LoopConfig::trivial_loops([z.neighbor(0)])
            .unwrap()
            .flip_hexagon(z);
        let l = &loops_of(&omega)[0];
        for v in z.vertices() {
            assert!(l.surrounds(v));
        }
        let far = HexCoord::new(5, 5).vertices()[0];
        assert!(!l.surrounds(far));
        let opposite = z.neighbor(3).vertices()[3];
        assert!(!l.surrounds(opposite));
    }

    #[test]
    fn config_text_round_trip() {
        let omega = LoopConfig::trivial_loops([HexCoord::new(1, 2), HexCoord::new(-3, 0)]).unwrap();
        let text = format!("# two flowers\n\n{omega}");
        assert_eq!(text.parse::<LoopConfig>().unwrap(), omega);
        assert!("(0,0)-(1,0)\n".parse::<LoopConfig>().is_err());
        assert!("(0,0)-(3,0)\n".parse::<LoopConfig>().is_err());
    }

    #[test]
    fn weights() {
        let h = Domain::hexagon(HexCoord::ORIGIN);
        let omega = LoopConfig::trivial_loops([HexCoord::ORIGIN]).unwrap();
        let p = ModelParams::new(8.0, 0.5).unwrap();
        match log_weight(&omega, &h, &p) {
            LogWeight::Finite(w) => assert!((w - (8.0f64 * 0.5f64.powi(6)).ln()).abs() < 1e-12),
            LogWeight::Packed { .. } => panic!(),
        }
        let q = ModelParams::with_weight(2.0, EdgeWeight::Infinite).unwrap();
        assert_eq!(
            log_weight(&omega, &h, &q),
            LogWeight::Packed { o: 6, loops: 1 }
        );
        assert!(ModelParams::new(0.0, 1.0).is_err());
        assert!("-1".parse::<EdgeWeight>().is_err());
        assert_eq!("inf".parse::<EdgeWeight>().unwrap(), EdgeWeight::Infinite);
    }

    #[test]
    fn ground_boundary_on_flower() {
        let h = Domain::flower(HexCoord::ORIGIN);
        let bc = BoundaryCondition::Ground(0);
        let frozen = bc.frozen_edges(&h);
        let inner = bc.inner_edges(&h);
        let all: BTreeSet<HexEdge> = frozen.union(&inner).copied().collect();
        assert!(LoopConfig::new(all).is_ok());
        assert!(!frozen.is_empty());
    }
}
