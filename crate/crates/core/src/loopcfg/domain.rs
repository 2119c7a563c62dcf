use std::collections::{BTreeSet, HashMap};

use crate::circuits::{self, Circuit};
use crate::error::{Error, Result};
use crate::lattice::{connected_components, Color, HexCoord, HexEdge, HexVertex};

/// A finite connected set of vertices whose complement is connected, with
/// its induced edges and the hexagons it fully contains (its faces).
#[derive(Clone, Debug)]
pub struct Domain {
    vertices: BTreeSet<HexVertex>,
    edges: Vec<HexEdge>,
    edge_index: HashMap<HexEdge, usize>,
    faces: Vec<HexCoord>,
    circuit: Circuit,
}

impl PartialEq for Domain {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices
    }
}

impl Eq for Domain {}

impl Domain {
    pub fn from_vertices(vertices: BTreeSet<HexVertex>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::NotADomain("empty vertex set".into()));
        }
        if connected_components(&vertices, |v| v.neighbors()).len() != 1 {
            return Err(Error::NotADomain("vertex set is not connected".into()));
        }
        if circuits::fill_holes(&vertices) != vertices {
            return Err(Error::NotADomain("complement is not connected".into()));
        }
        let circuit = circuits::circuit_of_vertex_set(&vertices)?;
        Ok(Self::assemble(vertices, circuit))
    }

    pub fn from_circuit(circuit: &Circuit) -> Self {
        Self::assemble(circuit.interior_vertices(), circuit.clone())
    }

    /// Domain spanned by the corners of the given hexagons.
    pub fn from_hexagons<I: IntoIterator<Item = HexCoord>>(hexagons: I) -> Result<Self> {
        Self::from_vertices(hexagons.into_iter().flat_map(|z| z.vertices()).collect())
    }

    /// The six corners of one hexagon.
    pub fn hexagon(z: HexCoord) -> Self {
        Self::from_hexagons([z]).expect("a hexagon is a domain")
    }

    /// A hexagon together with its six neighbours: seven faces.
    pub fn flower(z: HexCoord) -> Self {
        Self::from_hexagons(std::iter::once(z).chain(z.neighbors())).expect("a flower is a domain")
    }

    /// Corners of all hexagons within distance `r` of `z`.
    pub fn ball(z: HexCoord, r: i32) -> Self {
        let hs = (-r..=r)
            .flat_map(|a| (-r..=r).map(move |b| z.offset((a, b))))
            .filter(|h| h.distance(z) <= r);
        Self::from_hexagons(hs).expect("a ball is a domain")
    }

    /// Domain of type `c` covering roughly a `w` by `h` block of hexagons in
    /// offset coordinates: the union of the `c`-hexagons of the block.
    pub fn rect(w: u32, h: u32, c: Color) -> Result<Self> {
        if c > 2 {
            return Err(Error::Parameter(format!("colour {c}")));
        }
        let mut cs = BTreeSet::new();
        for a in 0..w as i32 {
            for r in 0..h as i32 {
                let z = HexCoord::new(a, r - a.div_euclid(2));
                if z.color() == c {
                    cs.insert(z);
                }
            }
        }
        if cs.is_empty() {
            return Err(Error::NotADomain(format!(
                "{w}x{h} block holds no hexagon of colour {c}"
            )));
        }
        let filled = circuits::fill_sublattice(&cs);
        Self::from_hexagons(filled)
    }

    /// Block of `2a + 1` columns and `b` rows centred at the origin: columns of
    /// the same parity as `a` carry `b` hexagons each, and the domain is the
    /// union of their corners.
    pub fn packing_rect(a: u32, b: u32) -> Result<Self> {
        if b == 0 {
            return Err(Error::Parameter("height must be positive".into()));
        }
        let (a, b) = (a as i32, b as i32);
        let lift = 2 * ((b - 1) / 2);
        let mut hs = Vec::new();
        for col in (-a..=a).step_by(2) {
            let p = col.rem_euclid(2);
            for k in 0..b {
                let y = p + 2 * k - lift;
                hs.push(HexCoord::new(col, (y - col) / 2));
            }
        }
        Self::from_hexagons(hs)
    }

    fn assemble(vertices: BTreeSet<HexVertex>, circuit: Circuit) -> Self {
        let edges: Vec<HexEdge> = circuits::induced_edges(&vertices).into_iter().collect();
        let edge_index = edges.iter().enumerate().map(|(i, e)| (*e, i)).collect();
        let faces = circuits::full_hexagons(&vertices).into_iter().collect();
        Domain {
            vertices,
            edges,
            edge_index,
            faces,
            circuit,
        }
    }

    pub fn vertices(&self) -> &BTreeSet<HexVertex> {
        &self.vertices
    }

    /// Induced edges in sorted order.
    pub fn edges(&self) -> &[HexEdge] {
        &self.edges
    }

    pub fn edge_set(&self) -> BTreeSet<HexEdge> {
        self.edges.iter().copied().collect()
    }

    pub fn edge_index(&self, e: HexEdge) -> Option<usize> {
        self.edge_index.get(&e).copied()
    }

    pub fn contains_edge(&self, e: HexEdge) -> bool {
        self.edge_index.contains_key(&e)
    }

    pub fn contains_vertex(&self, v: HexVertex) -> bool {
        self.vertices.contains(&v)
    }

    /// Hexagons with all six corners in the domain, sorted.
    pub fn faces(&self) -> &[HexCoord] {
        &self.faces
    }

    pub fn circuit(&self) -> &Circuit {
        &self.circuit
    }

    /// Vertices with a neighbour outside the domain.
    pub fn boundary_vertices(&self) -> BTreeSet<HexVertex> {
        circuits::vertex_boundary(&self.vertices)
    }

    /// Colours `c` such that every edge of the `c` ground state has both or
    /// neither endpoint in the domain.
    pub fn types(&self) -> BTreeSet<Color> {
        (0..3).filter(|&c| self.circuit.avoids_color(c)).collect()
    }

    pub fn shift_up(&self) -> Domain {
        Domain::from_circuit(&self.circuit.shift_up())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_hexagon() {
        let d = Domain::hexagon(HexCoord::ORIGIN);
        assert_eq!(d.vertices().len(), 6);
        assert_eq!(d.edges().len(), 6);
        assert_eq!(d.faces(), &[HexCoord::ORIGIN]);
        assert_eq!(d.types(), BTreeSet::from([0]));
    }

    #[test]
    fn flower_has_seven_faces_and_no_type() {
        let d = Domain::flower(HexCoord::ORIGIN);
        assert_eq!(d.vertices().len(), 24);
        assert_eq!(d.faces().len(), 7);
        // the boundary circuit runs through hexagons of all three colours
        assert!(d.types().is_empty());
        assert_eq!(d.circuit().len(), 12);
    }

    #[test]
    fn rect_domains_have_their_type() {
        for c in 0..3 {
            let d = Domain::rect(12, 9, c).unwrap();
            assert!(d.types().contains(&c));
            assert!(d.faces().len() > 60);
        }
    }

    #[test]
    fn packing_rect_face_counts() {
        for (a, b, faces) in [(1, 1, 2), (2, 2, 8), (2, 3, 13), (2, 5, 23)] {
            let d = Domain::packing_rect(a, b).unwrap();
            assert_eq!(d.faces().len(), faces, "a={a} b={b}");
        }
    }

    #[test]
    fn pinched_sets_are_rejected() {
        let z = HexCoord::ORIGIN;
        let vs = z.vertices();
        let two: BTreeSet<_> = [vs[0], vs[3]].into_iter().collect();
        assert!(Domain::from_vertices(two).is_err());
        let ring: BTreeSet<_> = z.neighbors().iter().flat_map(|h| h.vertices()).collect();
        let hollow: BTreeSet<_> = ring
            .difference(&vs.into_iter().collect())
            .copied()
            .collect();
        assert!(Domain::from_vertices(hollow).is_err());
    }
}
