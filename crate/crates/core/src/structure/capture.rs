use std::collections::BTreeSet;

use crate::circuits::{self, Circuit};
use crate::error::{Error, Result};
use crate::lattice::{connected_components, Color, HexVertex};
use crate::loopcfg::{is_vacant, loops_of, LoopConfig};

use super::clusters_inside;

/// A circuit `sigma` avoiding some colour, inside `gamma`, vacant in `omega`,
/// with `U` and the inner boundary of `sigma` made of vertices whose edges
/// are not all in one cluster inside `sigma`. Descends into the cluster
/// containing `U`, or cuts away a flower touching the boundary, until both
/// conditions hold.
pub fn find_capturing_circuit(
    omega: &LoopConfig,
    c: Color,
    gamma: &Circuit,
    u_set: &BTreeSet<HexVertex>,
) -> Result<(Color, Circuit)> {
    if !gamma.avoids_color(c) {
        return Err(Error::Precondition(format!("circuit meets colour {c}")));
    }
    if !is_vacant(omega, gamma) {
        return Err(Error::Precondition("circuit is not vacant".into()));
    }
    if u_set.is_empty() {
        return Err(Error::Precondition("U is empty".into()));
    }
    if connected_components(u_set, |v| v.neighbors()).len() != 1 {
        return Err(Error::Precondition("U is not connected".into()));
    }
    let interior = gamma.interior_vertices();
    if !u_set.is_subset(&interior) {
        return Err(Error::Precondition("U is not inside the circuit".into()));
    }
    let on_trivial: BTreeSet<HexVertex> = loops_of(omega)
        .into_iter()
        .filter(|l| l.is_trivial())
        .flat_map(|l| l.vertices)
        .collect();
    if !u_set.is_disjoint(&on_trivial) {
        return Err(Error::Precondition("U meets a trivial loop".into()));
    }

    let (mut c, mut gamma) = (c, gamma.clone());
    loop {
        let d = clusters_inside(omega, &gamma)?;
        let boundary = circuits::vertex_boundary(&d.interior.vertices);
        if boundary.is_subset(&d.v) {
            if u_set.is_subset(&d.v) {
                return Ok((c, gamma));
            }
            let u = u_set
                .iter()
                .find(|u| !d.v.contains(u))
                .expect("U not inside V");
            let k = d
                .cluster_of_vertex(*u)
                .expect("vertex outside V lies in a cluster");
            let g = &d.clusters[k];
            if let Some(w) = u_set
                .iter()
                .find(|w| !w.edges().iter().all(|e| g.contains_edge(*e)))
            {
                return Err(Error::Identity(format!(
                    "vertex {w} of U leaves the cluster of {u}"
                )));
            }
            c = g.color;
            gamma = g.sigma.clone();
        } else {
            let u = *boundary
                .difference(&d.v)
                .next()
                .expect("non-empty difference");
            let z = u.hexagon_of_color(c);
            if !omega.is_flower(z) {
                return Err(Error::NotAFlower(z));
            }
            let cut: BTreeSet<HexVertex> = z.vertices().into_iter().collect();
            let rest: BTreeSet<HexVertex> = d.interior.vertices.difference(&cut).copied().collect();
            let part = connected_components(&rest, |v| v.neighbors())
                .into_iter()
                .find(|comp| u_set.is_subset(comp))
                .ok_or_else(|| Error::Identity("U split by a flower".into()))?;
            gamma = circuits::circuit_of_vertex_set(&part)?;
        }
    }
}
