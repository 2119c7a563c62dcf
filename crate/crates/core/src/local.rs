//! Dense, index-based view of a domain used by the enumerator and the sampler.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use crate::lattice::{HexEdge, HexVertex};
use crate::loopcfg::{Domain, LoopConfig};

const NONE: u32 = u32::MAX;

/// Vertices and edges of a domain plus the frozen boundary edges that touch
/// it. Edges `0..mutable` are the domain's own edges in sorted order.
#[derive(Clone, Debug)]
pub struct LocalGraph {
    pub edges: Vec<HexEdge>,
    pub mutable: usize,
    ends: Vec<[u32; 2]>,
    inc: Vec<[u32; 3]>,
    pub faces: Vec<[u32; 6]>,
    pub face_verts: Vec<[u32; 6]>,
    nverts: usize,
}

impl LocalGraph {
    pub fn new(h: &Domain, frozen: &BTreeSet<HexEdge>) -> Self {
        let mut edges: Vec<HexEdge> = h.edges().to_vec();
        let mutable = edges.len();
        edges.extend(frozen.iter().copied().filter(|e| !h.contains_edge(*e)));
        let mut vindex: HashMap<HexVertex, u32> = HashMap::new();
        let mut verts = Vec::new();
        let mut id = |v: HexVertex, verts: &mut Vec<HexVertex>| -> u32 {
            *vindex.entry(v).or_insert_with(|| {
                verts.push(v);
                (verts.len() - 1) as u32
            })
        };
        for &v in h.vertices() {
            id(v, &mut verts);
        }
        let ends: Vec<[u32; 2]> = edges
            .iter()
            .map(|e| {
                let [p, q] = e.endpoints();
                [id(p, &mut verts), id(q, &mut verts)]
            })
            .collect();
        let mut inc = vec![[NONE; 3]; verts.len()];
        for (i, [p, q]) in ends.iter().enumerate() {
            for v in [*p, *q] {
                let slot = inc[v as usize]
                    .iter_mut()
                    .find(|s| **s == NONE)
                    .expect("degree at most three");
                *slot = i as u32;
            }
        }
        let eidx: HashMap<HexEdge, u32> = edges
            .iter()
            .enumerate()
            .map(|(i, e)| (*e, i as u32))
            .collect();
        let faces: Vec<[u32; 6]> = h
            .faces()
            .iter()
            .map(|z| z.edges().map(|e| eidx[&e]))
            .collect();
        let face_verts: Vec<[u32; 6]> = h
            .faces()
            .iter()
            .map(|z| z.vertices().map(|v| vindex[&v]))
            .collect();
        LocalGraph {
            edges,
            mutable,
            ends,
            inc,
            faces,
            face_verts,
            nverts: verts.len(),
        }
    }
}

/// A configuration on a [`LocalGraph`] with cached edge and loop counts.
#[derive(Clone, Debug)]
pub struct LocalState {
    pub g: Arc<LocalGraph>,
    present: Vec<bool>,
    o: usize,
    loops: usize,
    stamp: Vec<u32>,
    epoch: u32,
}

impl LocalState {
    /// Frozen edges are always present; `inside` lists the present domain edges.
    pub fn new(g: Arc<LocalGraph>, inside: &BTreeSet<HexEdge>) -> Self {
        let present: Vec<bool> = g
            .edges
            .iter()
            .enumerate()
            .map(|(i, e)| i >= g.mutable || inside.contains(e))
            .collect();
        let stamp = vec![0; g.nverts];
        let mut s = LocalState {
            g,
            present,
            o: 0,
            loops: 0,
            stamp,
            epoch: 0,
        };
        s.recount();
        s
    }

    pub fn o(&self) -> usize {
        self.o
    }

    pub fn loops(&self) -> usize {
        self.loops
    }

    /// Whether all six edges of face `f` are present.
    pub fn is_face_flower(&self, f: usize) -> bool {
        self.g.faces[f].iter().all(|&e| self.present[e as usize])
    }

    /// Recompute both counts from scratch.
    pub fn recount(&mut self) {
        self.o = self.present[..self.g.mutable]
            .iter()
            .filter(|p| **p)
            .count();
        self.epoch += 1;
        let mut loops = 0;
        for v in 0..self.g.nverts as u32 {
            if self.stamp[v as usize] != self.epoch && self.degree(v) == 2 {
                let (closed, has_mutable) = self.trace(v);
                if closed && has_mutable {
                    loops += 1;
                }
            }
        }
        self.loops = loops;
    }

    /// Counts computed from scratch without touching the cache.
    pub fn fresh_counts(&self) -> (usize, usize) {
        let mut copy = self.clone();
        copy.recount();
        (copy.o, copy.loops)
    }

    fn degree(&self, v: u32) -> usize {
        self.g.inc[v as usize]
            .iter()
            .filter(|&&e| e != NONE && self.present[e as usize])
            .count()
    }

    fn next_edge(&self, v: u32, skip: u32) -> Option<u32> {
        self.g.inc[v as usize]
            .iter()
            .copied()
            .find(|&e| e != NONE && e != skip && self.present[e as usize])
    }

    fn other(&self, e: u32, v: u32) -> u32 {
        let [p, q] = self.g.ends[e as usize];
        if p == v {
            q
        } else {
            p
        }
    }

    // Walk the component through `v`, stamping every vertex. Returns whether
    // it closes up and whether it uses a domain edge.
    fn trace(&mut self, v: u32) -> (bool, bool) {
        let mut has_mutable = false;
        self.stamp[v as usize] = self.epoch;
        let Some(first) = self.next_edge(v, NONE) else {
            return (false, false);
        };
        let mut e = first;
        let mut cur = v;
        loop {
            has_mutable |= (e as usize) < self.g.mutable;
            cur = self.other(e, cur);
            if cur == v {
                return (true, has_mutable);
            }
            self.stamp[cur as usize] = self.epoch;
            match self.next_edge(cur, e) {
                Some(n) if self.degree(cur) == 2 => e = n,
                _ => break,
            }
        }
        // open path: walk the other way from `v` to stamp the rest
        if let Some(mut e) = self.next_edge(v, first) {
            let mut cur = v;
            loop {
                has_mutable |= (e as usize) < self.g.mutable;
                cur = self.other(e, cur);
                self.stamp[cur as usize] = self.epoch;
                match self.next_edge(cur, e) {
                    Some(n) if self.degree(cur) == 2 => e = n,
                    _ => break,
                }
            }
        }
        (false, has_mutable)
    }

    fn loops_through(&mut self, vs: &[u32; 6]) -> usize {
        self.epoch += 1;
        let mut count = 0;
        for &v in vs {
            if self.stamp[v as usize] != self.epoch && self.degree(v) == 2 {
                let (closed, has_mutable) = self.trace(v);
                if closed && has_mutable {
                    count += 1;
                }
            }
        }
        count
    }

    /// Change in edge count if face `f` were toggled.
    pub fn face_delta_o(&self, f: usize) -> i64 {
        let k = self.g.faces[f]
            .iter()
            .filter(|&&e| self.present[e as usize])
            .count() as i64;
        6 - 2 * k
    }

    /// Toggle the six edges of face `f`, returning the change in edge and
    /// loop counts.
    pub fn flip(&mut self, f: usize) -> (i64, i64) {
        let vs = self.g.face_verts[f];
        let before = self.loops_through(&vs) as i64;
        let d_o = self.face_delta_o(f);
        for &e in &self.g.faces[f] {
            self.present[e as usize] ^= true;
        }
        let after = self.loops_through(&vs) as i64;
        self.o = (self.o as i64 + d_o) as usize;
        self.loops = (self.loops as i64 + after - before) as usize;
        (d_o, after - before)
    }

    /// Present domain and frozen edges.
    pub fn config(&self) -> LoopConfig {
        LoopConfig::from_even(
            self.g
                .edges
                .iter()
                .enumerate()
                .filter(|(i, _)| self.present[*i])
                .map(|(_, e)| *e)
                .collect(),
        )
    }
}
