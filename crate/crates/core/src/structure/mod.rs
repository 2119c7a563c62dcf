//! Flowers, gardens and clusters inside a circuit, the repair map that
//! shifts clusters into the 0-phase, breakups and capturing circuits.
//!
//! A `c`-garden is determined by a set `S` of `c`-hexagons that is connected
//! in the `c`-sublattice and has no holes there: its circuit bounds the
//! union of the corners of `S`, and the garden condition asks that every
//! hexagon of `S` with a sublattice neighbour outside `S` be a flower. The
//! maximal `c`-gardens are therefore the hole-filled sublattice components
//! of the `c`-flowers, which is how clusters are built here.

mod breakup;
mod capture;
mod repair;
mod sweep;

use std::collections::BTreeSet;

pub use breakup::{breakup, Breakup};
pub use capture::find_capturing_circuit;
pub use repair::{
    functional_delta, repair_map, repair_pieces, vbad_identity_check, weight_delta, RepairPieces,
    WeightDelta,
};
pub use sweep::{check_configuration, repair_sweep, ConfigCheck, RepairSweep, LAWS};

use crate::circuits::{self, Circuit, Interior};
use crate::error::{Error, Result};
use crate::lattice::{connected_components, Color, HexCoord, HexEdge, HexVertex};
use crate::loopcfg::{is_vacant, LoopConfig};

pub fn is_flower(omega: &LoopConfig, z: HexCoord) -> bool {
    omega.is_flower(z)
}

/// A garden: a circuit avoiding colour `color` whose boundary hexagons of
/// that colour are all flowers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Garden {
    pub color: Color,
    pub sigma: Circuit,
    /// Interior edges of `sigma` together with the edges it crosses.
    pub edges: BTreeSet<HexEdge>,
    pub vertices: BTreeSet<HexVertex>,
    /// The `color`-hexagons inside `sigma`.
    pub hexagons: BTreeSet<HexCoord>,
}

impl Garden {
    /// Garden spanned by a hole-free, sublattice-connected set of hexagons of
    /// one colour.
    pub fn from_hexagons(hexagons: BTreeSet<HexCoord>) -> Result<Self> {
        let color = hexagons
            .iter()
            .next()
            .ok_or_else(|| Error::Precondition("empty garden".into()))?
            .color();
        let vertices: BTreeSet<HexVertex> = hexagons.iter().flat_map(|z| z.vertices()).collect();
        let sigma = circuits::circuit_of_vertex_set(&vertices)?;
        let edges = vertices.iter().flat_map(|v| v.edges()).collect();
        Ok(Garden {
            color,
            sigma,
            edges,
            vertices,
            hexagons,
        })
    }

    pub fn contains_edge(&self, e: HexEdge) -> bool {
        self.edges.contains(&e)
    }
}

/// Maximal gardens of a set of flowers, across all three colours.
pub fn clusters_of_flowers(flowers: &BTreeSet<HexCoord>) -> Vec<Garden> {
    let mut candidates: Vec<Garden> = Vec::new();
    for c in 0..3 {
        let fc: BTreeSet<HexCoord> = flowers.iter().copied().filter(|z| z.color() == c).collect();
        for comp in connected_components(&fc, |z| z.sublattice_neighbors()) {
            let filled = circuits::fill_sublattice(&comp);
            candidates.push(
                Garden::from_hexagons(filled).expect("filled flower component spans a domain"),
            );
        }
    }
    let keep: Vec<bool> = candidates
        .iter()
        .enumerate()
        .map(|(i, g)| {
            !candidates.iter().enumerate().any(|(j, h)| {
                i != j && g.edges.len() < h.edges.len() && g.edges.is_subset(&h.edges)
            })
        })
        .collect();
    let mut out: Vec<Garden> = candidates
        .into_iter()
        .zip(keep)
        .filter(|(_, k)| *k)
        .map(|(g, _)| g)
        .collect();
    out.sort_by(|a, b| (a.color, &a.sigma).cmp(&(b.color, &b.sigma)));
    out
}

/// Cluster structure of a configuration inside a vacant circuit.
#[derive(Clone, Debug)]
pub struct ClusterDecomposition {
    pub gamma: Circuit,
    pub interior: Interior,
    /// The configuration restricted to interior edges.
    pub omega_in: BTreeSet<HexEdge>,
    pub clusters: Vec<Garden>,
    /// Union of the clusters of each colour.
    pub by_color: [BTreeSet<HexEdge>; 3],
    /// Interior and crossed edges outside `E0`, `E1` shifted down and `E2`
    /// shifted up.
    pub bad: BTreeSet<HexEdge>,
    /// Interior and crossed edges in no cluster.
    pub bar: BTreeSet<HexEdge>,
    /// Interior vertices whose three edges are not all in one cluster.
    pub v: BTreeSet<HexVertex>,
    /// Vertices of `v` touching no edge of `omega_in`.
    pub v_prime: BTreeSet<HexVertex>,
    /// Hexagons `z` with the edges of `z` shifted up in `E1` and of `z`
    /// shifted down in `E2`.
    pub dbl: BTreeSet<HexCoord>,
}

impl ClusterDecomposition {
    /// Interior edges plus the edges crossed by the circuit.
    pub fn region(&self) -> BTreeSet<HexEdge> {
        self.interior
            .edges
            .union(&self.gamma.dual_edges())
            .copied()
            .collect()
    }

    /// Endpoints of bad edges inside the circuit.
    pub fn v_bad(&self) -> BTreeSet<HexVertex> {
        self.bad
            .iter()
            .flat_map(|e| e.endpoints())
            .filter(|v| self.interior.vertices.contains(v))
            .collect()
    }

    pub fn e0(&self) -> &BTreeSet<HexEdge> {
        &self.by_color[0]
    }

    pub fn e1(&self) -> &BTreeSet<HexEdge> {
        &self.by_color[1]
    }

    pub fn e2(&self) -> &BTreeSet<HexEdge> {
        &self.by_color[2]
    }

    /// Index of a cluster holding all three edges of `v`.
    pub fn cluster_of_vertex(&self, v: HexVertex) -> Option<usize> {
        self.clusters
            .iter()
            .position(|g| v.edges().iter().all(|e| g.contains_edge(*e)))
    }

    /// One tab-separated line per cluster followed by a summary line.
    pub fn report(&self) -> String {
        let mut s = String::new();
        for g in &self.clusters {
            s.push_str(&format!(
                "cluster\t{}\t{}\t{}\n",
                g.color,
                g.sigma,
                g.edges.len()
            ));
        }
        s.push_str(&format!(
            "sizes\t{}\t{}\t{}\n",
            self.v.len(),
            self.v_prime.len(),
            self.dbl.len()
        ));
        s
    }
}

pub fn clusters_inside(omega: &LoopConfig, gamma: &Circuit) -> Result<ClusterDecomposition> {
    if !is_vacant(omega, gamma) {
        return Err(Error::Precondition("circuit is not vacant".into()));
    }
    let interior = gamma.interior();
    let omega_in: BTreeSet<HexEdge> = omega
        .edges()
        .intersection(&interior.edges)
        .copied()
        .collect();
    let flowers: BTreeSet<HexCoord> = interior
        .hexagons
        .iter()
        .copied()
        .filter(|z| z.edges().iter().all(|e| omega_in.contains(e)))
        .collect();
    let clusters = clusters_of_flowers(&flowers);
    let mut by_color: [BTreeSet<HexEdge>; 3] = Default::default();
    for g in &clusters {
        by_color[g.color as usize].extend(g.edges.iter().copied());
    }
    let region: BTreeSet<HexEdge> = interior.edges.union(&gamma.dual_edges()).copied().collect();
    let bar: BTreeSet<HexEdge> = region
        .iter()
        .copied()
        .filter(|e| !by_color.iter().any(|ec| ec.contains(e)))
        .collect();
    let e1_down: BTreeSet<HexEdge> = by_color[1].iter().map(|e| e.shift_down()).collect();
    let e2_up: BTreeSet<HexEdge> = by_color[2].iter().map(|e| e.shift_up()).collect();
    let bad: BTreeSet<HexEdge> = region
        .iter()
        .copied()
        .filter(|e| !by_color[0].contains(e) && !e1_down.contains(e) && !e2_up.contains(e))
        .collect();
    let v: BTreeSet<HexVertex> = interior
        .vertices
        .iter()
        .copied()
        .filter(|x| {
            !clusters
                .iter()
                .any(|g| x.edges().iter().all(|e| g.contains_edge(*e)))
        })
        .collect();
    let v_prime: BTreeSet<HexVertex> = v
        .iter()
        .copied()
        .filter(|x| x.edges().iter().all(|e| !omega_in.contains(e)))
        .collect();
    let dbl: BTreeSet<HexCoord> = interior
        .hexagons
        .iter()
        .copied()
        .filter(|z| {
            z.shift_up().edges().iter().all(|e| by_color[1].contains(e))
                && z.shift_down()
                    .edges()
                    .iter()
                    .all(|e| by_color[2].contains(e))
        })
        .collect();
    Ok(ClusterDecomposition {
        gamma: gamma.clone(),
        interior,
        omega_in,
        clusters,
        by_color,
        bad,
        bar,
        v,
        v_prime,
        dbl,
    })
}
