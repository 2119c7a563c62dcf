use std::collections::{BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::lattice::{connected_components, BBox, HexEdge, HexVertex};
use crate::loopcfg::{Domain, LoopConfig};

/// The component of `u` once the infinite cluster of 0-flower vertices is
/// removed, with its inner vertex boundary.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Breakup {
    pub component: BTreeSet<HexVertex>,
    pub boundary: BTreeSet<HexVertex>,
}

impl Breakup {
    pub fn is_empty(&self) -> bool {
        self.component.is_empty()
    }
}

/// Breakup of `u` for the configuration equal to `omega` on the edges of
/// `window` and to the 0 ground state elsewhere.
pub fn breakup(omega: &LoopConfig, u: HexVertex, window: &Domain) -> Result<Breakup> {
    let has = |e: HexEdge| {
        if window.contains_edge(e) {
            omega.contains(e)
        } else {
            e.in_ground_state(0)
        }
    };
    for v in window.vertices() {
        if v.edges().iter().filter(|e| has(**e)).count() % 2 == 1 {
            return Err(Error::Parity(*v));
        }
    }
    let mut hexes: Vec<_> = window
        .vertices()
        .iter()
        .flat_map(|v| v.hexagons())
        .collect();
    hexes.extend(u.hexagons());
    let bb = BBox::of(hexes).expect("non-empty window").grow(3);
    let all = bb.vertices();
    let a: BTreeSet<HexVertex> = all
        .iter()
        .copied()
        .filter(|v| v.hexagon_of_color(0).edges().iter().all(|e| has(*e)))
        .collect();
    if all.iter().any(|v| bb.vertex_on_rim(*v) && !a.contains(v)) {
        return Err(Error::Window);
    }
    let comps = connected_components(&a, |v| v.neighbors());
    let mut rim_comps = comps
        .into_iter()
        .filter(|c| c.iter().any(|v| bb.vertex_on_rim(*v)));
    let b = rim_comps.next().ok_or(Error::Window)?;
    if rim_comps.next().is_some() {
        return Err(Error::Window);
    }
    if b.contains(&u) {
        return Ok(Breakup::default());
    }
    let mut comp = BTreeSet::from([u]);
    let mut queue = VecDeque::from([u]);
    while let Some(v) = queue.pop_front() {
        if bb.vertex_on_rim(v) {
            return Err(Error::Window);
        }
        for w in v.neighbors() {
            if !b.contains(&w) && comp.insert(w) {
                queue.push_back(w);
            }
        }
    }
    let boundary = comp
        .iter()
        .copied()
        .filter(|v| v.neighbors().iter().any(|w| !comp.contains(w)))
        .collect();
    Ok(Breakup {
        component: comp,
        boundary,
    })
}
