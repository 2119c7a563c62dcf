//! Circuits of the triangular lattice and the regions they enclose.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::lattice::{connected_components, BBox, Color, HexCoord, HexEdge, HexVertex};

/// Margin added around a bounding box before flood filling.
const WINDOW_MARGIN: i32 = 3;

/// A simple closed path of hexagons, stored in canonical form: it starts at
/// its smallest hexagon and heads toward the smaller of that hexagon's two
/// neighbours on the path.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Circuit {
    hexes: Vec<HexCoord>,
}

/// Vertices, edges and hexagons enclosed by a circuit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interior {
    pub vertices: BTreeSet<HexVertex>,
    pub edges: BTreeSet<HexEdge>,
    pub hexagons: BTreeSet<HexCoord>,
}

impl Circuit {
    pub fn new(hexes: Vec<HexCoord>) -> Result<Self> {
        let m = hexes.len();
        if m < 3 {
            return Err(Error::NotACircuit(format!("length {m} is below 3")));
        }
        let distinct: BTreeSet<_> = hexes.iter().collect();
        if distinct.len() != m {
            return Err(Error::NotACircuit("repeated hexagon".into()));
        }
        for i in 0..m {
            let (p, q) = (hexes[i], hexes[(i + 1) % m]);
            if !p.is_adjacent(q) {
                return Err(Error::NotACircuit(format!("{p} and {q} are not adjacent")));
            }
        }
        Ok(Circuit {
            hexes: canonical(hexes),
        })
    }

    pub fn hexagons(&self) -> &[HexCoord] {
        &self.hexes
    }

    pub fn len(&self) -> usize {
        self.hexes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hexes.is_empty()
    }

    pub fn colors(&self) -> BTreeSet<Color> {
        self.hexes.iter().map(|h| h.color()).collect()
    }

    pub fn avoids_color(&self, c: Color) -> bool {
        self.hexes.iter().all(|h| h.color() != c)
    }

    /// Edges crossed by the circuit, one per consecutive pair.
    pub fn dual_edges(&self) -> BTreeSet<HexEdge> {
        let m = self.hexes.len();
        (0..m)
            .map(|i| HexEdge::between(self.hexes[i], self.hexes[(i + 1) % m]).expect("adjacent"))
            .collect()
    }

    fn window(&self) -> BBox {
        BBox::of(self.hexes.iter().copied())
            .expect("non-empty")
            .grow(WINDOW_MARGIN)
    }

    /// Components of the vertices of a window around the circuit once the
    /// crossed edges are deleted. For a circuit there are exactly two, one of
    /// which touches the rim of the window.
    pub fn window_components(&self) -> (BBox, Vec<BTreeSet<HexVertex>>) {
        let bb = self.window();
        let cut = self.dual_edges();
        let verts = bb.vertices();
        let comps = connected_components(&verts, |v| {
            v.edges()
                .into_iter()
                .filter(|e| !cut.contains(e))
                .map(move |e| e.other_endpoint(v))
                .collect::<Vec<_>>()
        });
        (bb, comps)
    }

    pub fn interior(&self) -> Interior {
        let (bb, comps) = self.window_components();
        let vertices: BTreeSet<HexVertex> = comps
            .into_iter()
            .filter(|c| !c.iter().any(|v| bb.vertex_on_rim(*v)))
            .flatten()
            .collect();
        interior_from_vertices(vertices)
    }

    pub fn interior_vertices(&self) -> BTreeSet<HexVertex> {
        self.interior().vertices
    }

    pub fn shift_up(&self) -> Circuit {
        Circuit {
            hexes: canonical(self.hexes.iter().map(|h| h.shift_up()).collect()),
        }
    }

    pub fn shift_down(&self) -> Circuit {
        Circuit {
            hexes: canonical(self.hexes.iter().map(|h| h.shift_down()).collect()),
        }
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, h) in self.hexes.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{h}")?;
        }
        Ok(())
    }
}

fn canonical(mut hexes: Vec<HexCoord>) -> Vec<HexCoord> {
    let m = hexes.len();
    let k = (0..m).min_by_key(|&i| hexes[i]).expect("non-empty");
    hexes.rotate_left(k);
    if hexes[m - 1] < hexes[1] {
        hexes[1..].reverse();
    }
    hexes
}

pub(crate) fn interior_from_vertices(vertices: BTreeSet<HexVertex>) -> Interior {
    let edges = induced_edges(&vertices);
    let hexagons = full_hexagons(&vertices);
    Interior {
        vertices,
        edges,
        hexagons,
    }
}

pub fn induced_edges(vs: &BTreeSet<HexVertex>) -> BTreeSet<HexEdge> {
    vs.iter()
        .flat_map(|v| v.edges())
        .filter(|e| e.endpoints().iter().all(|w| vs.contains(w)))
        .collect()
}

/// Hexagons whose six corners all lie in `vs`.
pub fn full_hexagons(vs: &BTreeSet<HexVertex>) -> BTreeSet<HexCoord> {
    vs.iter()
        .flat_map(|v| v.hexagons())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .filter(|z| z.vertices().iter().all(|w| vs.contains(w)))
        .collect()
}

/// Vertices of `vs` with a neighbour outside `vs`.
pub fn vertex_boundary(vs: &BTreeSet<HexVertex>) -> BTreeSet<HexVertex> {
    vs.iter()
        .copied()
        .filter(|v| v.neighbors().iter().any(|w| !vs.contains(w)))
        .collect()
}

/// Complement of the unbounded component of the complement of `vs`.
pub fn fill_holes(vs: &BTreeSet<HexVertex>) -> BTreeSet<HexVertex> {
    let Some(bb) = BBox::of_vertices(vs) else {
        return BTreeSet::new();
    };
    let bb = bb.grow(2);
    let all = bb.vertices();
    let mut outside: BTreeSet<HexVertex> = BTreeSet::new();
    let mut queue: VecDeque<HexVertex> = all
        .iter()
        .copied()
        .filter(|v| bb.vertex_on_rim(*v) && !vs.contains(v))
        .collect();
    outside.extend(queue.iter().copied());
    while let Some(v) = queue.pop_front() {
        for w in v.neighbors() {
            if all.contains(&w) && !vs.contains(&w) && outside.insert(w) {
                queue.push_back(w);
            }
        }
    }
    all.difference(&outside).copied().collect()
}

/// The circuit crossing the edges with exactly one endpoint in `vs`.
pub fn circuit_of_vertex_set(vs: &BTreeSet<HexVertex>) -> Result<Circuit> {
    if vs.is_empty() {
        return Err(Error::NotADomain("empty vertex set".into()));
    }
    let mut adj: BTreeMap<HexCoord, Vec<HexCoord>> = BTreeMap::new();
    for &v in vs {
        for e in v.edges() {
            if !vs.contains(&e.other_endpoint(v)) {
                let (p, q) = e.hexagons();
                adj.entry(p).or_default().push(q);
                adj.entry(q).or_default().push(p);
            }
        }
    }
    if let Some((h, ns)) = adj.iter().find(|(_, ns)| ns.len() != 2) {
        return Err(Error::NotADomain(format!(
            "boundary hexagon {h} has {} crossing edges",
            ns.len()
        )));
    }
    let start = *adj.keys().next().expect("finite set has a boundary");
    let mut path = vec![start];
    let mut prev = start;
    let mut cur = adj[&start][0];
    while cur != start {
        path.push(cur);
        let ns = &adj[&cur];
        let next = if ns[0] == prev { ns[1] } else { ns[0] };
        prev = cur;
        cur = next;
    }
    if path.len() != adj.len() {
        return Err(Error::NotADomain(
            "boundary splits into several circuits".into(),
        ));
    }
    Circuit::new(path)
}

/// Outer circuit of a connected vertex set: the boundary of the set once its
/// holes are filled.
pub fn outer_circuit(vs: &BTreeSet<HexVertex>) -> Result<Circuit> {
    if vs.is_empty() {
        return Err(Error::Precondition("empty vertex set".into()));
    }
    if connected_components(vs, |v| v.neighbors()).len() != 1 {
        return Err(Error::Precondition("vertex set is not connected".into()));
    }
    circuit_of_vertex_set(&fill_holes(vs))
}

/// Outer circuit of the union of two overlapping interiors.
pub fn merge_circuits(s: &Circuit, t: &Circuit) -> Result<Circuit> {
    let is = s.interior_vertices();
    let it = t.interior_vertices();
    let share_edge = !s.dual_edges().is_disjoint(&t.dual_edges());
    if !share_edge && is.is_disjoint(&it) {
        return Err(Error::NoOverlap);
    }
    let union: BTreeSet<HexVertex> = is.union(&it).copied().collect();
    outer_circuit(&union)
}

/// Random domain grown from the origin by `steps` vertex additions, returned
/// as its circuit.
pub fn random_circuit<R: Rng + ?Sized>(rng: &mut R, steps: usize) -> Circuit {
    let start = HexCoord::ORIGIN.vertices()[0];
    let mut set: BTreeSet<HexVertex> = BTreeSet::from([start]);
    let mut order = vec![start];
    for _ in 0..steps {
        let v = order[rng.random_range(0..order.len())];
        let w = v.neighbors()[rng.random_range(0..3)];
        if set.insert(w) {
            order.push(w);
        }
    }
    outer_circuit(&set).expect("grown set is connected")
}

/// Random circuit avoiding colour `c`: the boundary of a hole-free connected
/// cluster of `c`-hexagons grown by `steps` additions.
pub fn random_typed_circuit<R: Rng + ?Sized>(rng: &mut R, c: Color, steps: usize) -> Circuit {
    let start = (0..3)
        .map(|k| HexCoord::new(0, k))
        .find(|h| h.color() == c)
        .expect("colour exists");
    let mut set = BTreeSet::from([start]);
    let mut order = vec![start];
    for _ in 0..steps {
        let z = order[rng.random_range(0..order.len())];
        let w = z.sublattice_neighbors()[rng.random_range(0..6)];
        if set.insert(w) {
            order.push(w);
        }
    }
    let filled = fill_sublattice(&set);
    let vs: BTreeSet<HexVertex> = filled.iter().flat_map(|z| z.vertices()).collect();
    circuit_of_vertex_set(&vs).expect("union of a filled cluster is a domain")
}

/// Fill the finite holes of a set of same-coloured hexagons within their
/// sublattice.
pub fn fill_sublattice(set: &BTreeSet<HexCoord>) -> BTreeSet<HexCoord> {
    let Some(first) = set.iter().next() else {
        return BTreeSet::new();
    };
    let c = first.color();
    let bb = BBox::of(set.iter().copied()).expect("non-empty").grow(2);
    let cells: BTreeSet<HexCoord> = bb.hexagons().filter(|h| h.color() == c).collect();
    let on_rim = |h: HexCoord| h.sublattice_neighbors().iter().any(|n| !bb.contains(*n));
    let mut outside: BTreeSet<HexCoord> = BTreeSet::new();
    let mut queue: VecDeque<HexCoord> = cells
        .iter()
        .copied()
        .filter(|h| on_rim(*h) && !set.contains(h))
        .collect();
    outside.extend(queue.iter().copied());
    while let Some(h) = queue.pop_front() {
        for n in h.sublattice_neighbors() {
            if cells.contains(&n) && !set.contains(&n) && outside.insert(n) {
                queue.push_back(n);
            }
        }
    }
    cells.difference(&outside).copied().collect()
}
