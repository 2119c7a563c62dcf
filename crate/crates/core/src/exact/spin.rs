//! Configurations with two odd vertices and the spin-spin correlation they
//! encode.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::lattice::{HexEdge, HexVertex};
use crate::loopcfg::{loops_of, BoundaryCondition, Domain, LoopConfig, ModelParams};
use crate::par::map_indexed;

use super::{check_cap, gray, EnumOptions, EnumeratedMeasure};

/// Edge set inside a domain in which `u` and `v` have odd degree and every
/// other vertex even degree.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct OddConfig {
    pub edges: BTreeSet<HexEdge>,
    pub u: HexVertex,
    pub v: HexVertex,
}

fn neighbours_in(edges: &BTreeSet<HexEdge>, x: HexVertex) -> Vec<(HexVertex, HexEdge)> {
    let mut out: Vec<(HexVertex, HexEdge)> = x
        .edges()
        .into_iter()
        .filter(|e| edges.contains(e))
        .map(|e| (e.other_endpoint(x), e))
        .collect();
    out.sort();
    out
}

/// Breadth-first path from `u` to `v` in `edges`, neighbours taken in
/// increasing order.
fn bfs_path(edges: &BTreeSet<HexEdge>, u: HexVertex, v: HexVertex) -> Option<Vec<HexEdge>> {
    let mut parent: BTreeMap<HexVertex, (HexVertex, HexEdge)> = BTreeMap::new();
    let mut seen = BTreeSet::from([u]);
    let mut queue = VecDeque::from([u]);
    while let Some(x) = queue.pop_front() {
        if x == v {
            let mut path = Vec::new();
            let mut cur = v;
            while cur != u {
                let (p, e) = parent[&cur];
                path.push(e);
                cur = p;
            }
            path.reverse();
            return Some(path);
        }
        for (y, e) in neighbours_in(edges, x) {
            if seen.insert(y) {
                parent.insert(y, (x, e));
                queue.push_back(y);
            }
        }
    }
    None
}

fn check_marks(h: &Domain, u: HexVertex, v: HexVertex) -> Result<()> {
    if u == v {
        return Err(Error::Precondition("marked vertices coincide".into()));
    }
    if !h.contains_vertex(u) || !h.contains_vertex(v) {
        return Err(Error::Precondition(
            "marked vertices must lie in the domain".into(),
        ));
    }
    Ok(())
}

/// All odd configurations: one fixed path from `u` to `v` combined with every
/// element of the cycle space.
pub fn enumerate_odd(
    h: &Domain,
    u: HexVertex,
    v: HexVertex,
    opts: EnumOptions,
) -> Result<Vec<OddConfig>> {
    check_marks(h, u, v)?;
    let k = check_cap(h, opts.face_cap)?;
    let path: BTreeSet<HexEdge> = bfs_path(&h.edge_set(), u, v)
        .ok_or(Error::NoPath)?
        .into_iter()
        .collect();
    let mut out = Vec::with_capacity(1 << k);
    let mut cur = path;
    for i in 0..1u64 << k {
        if i > 0 {
            let z = h.faces()[i.trailing_zeros() as usize];
            for e in z.edges() {
                if !cur.remove(&e) {
                    cur.insert(e);
                }
            }
        }
        out.push(OddConfig {
            edges: cur.clone(),
            u,
            v,
        });
    }
    Ok(out)
}

/// Loops left after removing the breadth-first path from `u` to `v`.
pub fn reduced_loop_count(lambda: &OddConfig) -> Result<usize> {
    let path = bfs_path(&lambda.edges, lambda.u, lambda.v).ok_or(Error::NoPath)?;
    let mut rest = lambda.edges.clone();
    for e in path {
        rest.remove(&e);
    }
    let rest = LoopConfig::new(rest)?;
    Ok(loops_of(&rest).len())
}

/// Whether `u` and `v` are joined by three internally disjoint paths.
pub fn has_three_disjoint_paths(lambda: &OddConfig) -> bool {
    let (u, v) = (lambda.u, lambda.v);
    let deg = |x: HexVertex| {
        x.edges()
            .iter()
            .filter(|e| lambda.edges.contains(e))
            .count()
    };
    if deg(u) < 3 || deg(v) < 3 {
        return false;
    }
    max_disjoint_paths(&lambda.edges, u, v, 3) >= 3
}

// Unit vertex capacities via node splitting; node 2i is the entry of vertex
// i and 2i+1 its exit.
fn max_disjoint_paths(edges: &BTreeSet<HexEdge>, u: HexVertex, v: HexVertex, cap: usize) -> usize {
    let verts: BTreeSet<HexVertex> = edges.iter().flat_map(|e| e.endpoints()).collect();
    let idx: HashMap<HexVertex, usize> = verts.iter().enumerate().map(|(i, x)| (*x, i)).collect();
    let nn = 2 * verts.len();
    let mut res: HashMap<(usize, usize), i32> = HashMap::new();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); nn];
    let mut add = |a: usize, b: usize, c: i32, res: &mut HashMap<(usize, usize), i32>| {
        if !res.contains_key(&(a, b)) && !res.contains_key(&(b, a)) {
            adj[a].push(b);
            adj[b].push(a);
        }
        *res.entry((a, b)).or_default() += c;
        res.entry((b, a)).or_default();
    };
    for (x, &i) in &idx {
        let c = if *x == u || *x == v { 3 } else { 1 };
        add(2 * i, 2 * i + 1, c, &mut res);
    }
    for e in edges {
        let [p, q] = e.endpoints();
        let (i, j) = (idx[&p], idx[&q]);
        add(2 * i + 1, 2 * j, 1, &mut res);
        add(2 * j + 1, 2 * i, 1, &mut res);
    }
    let (s, t) = (2 * idx[&u] + 1, 2 * idx[&v]);
    let mut flow = 0;
    while flow < cap {
        let mut prev = vec![usize::MAX; nn];
        prev[s] = s;
        let mut queue = VecDeque::from([s]);
        while let Some(a) = queue.pop_front() {
            if a == t {
                break;
            }
            for &b in &adj[a] {
                if prev[b] == usize::MAX && res[&(a, b)] > 0 {
                    prev[b] = a;
                    queue.push_back(b);
                }
            }
        }
        if prev[t] == usize::MAX {
            break;
        }
        let mut b = t;
        while b != s {
            let a = prev[b];
            *res.get_mut(&(a, b)).expect("arc") -= 1;
            *res.get_mut(&(b, a)).expect("arc") += 1;
            b = a;
        }
        flow += 1;
    }
    flow
}

/// Spin-spin correlation divided by `n`: the sum over odd configurations of
/// `x^o n^L' J` over the vacant partition function, where `L'` counts loops
/// after removing a `u`-`v` path and `J` is `3n/(n+2)` when three disjoint
/// paths join `u` and `v`, else 1.
pub fn spin_spin_ratio(
    h: &Domain,
    u: HexVertex,
    v: HexVertex,
    n: f64,
    x: f64,
    opts: EnumOptions,
) -> Result<f64> {
    check_marks(h, u, v)?;
    let k = check_cap(h, opts.face_cap)?;
    let p = ModelParams::new(n, x)?;
    let path: BTreeSet<HexEdge> = bfs_path(&h.edge_set(), u, v)
        .ok_or(Error::NoPath)?
        .into_iter()
        .collect();
    let j = 3.0 * n / (n + 2.0);
    let bits = k.min(10);
    let size = 1u64 << bits;
    let nblocks = 1usize << (k - bits);
    let faces = h.faces();
    let parts: Vec<Result<f64>> = map_indexed(opts.exec, nblocks, |b| {
        let start = b as u64 * size;
        let mut cur = path.clone();
        let toggle = |cur: &mut BTreeSet<HexEdge>, f: usize| {
            for e in faces[f].edges() {
                if !cur.remove(&e) {
                    cur.insert(e);
                }
            }
        };
        let m0 = gray(start);
        for f in 0..k {
            if m0 >> f & 1 == 1 {
                toggle(&mut cur, f);
            }
        }
        let mut acc = 0.0;
        for i in start..start + size {
            let lambda = OddConfig {
                edges: cur.clone(),
                u,
                v,
            };
            let lp = reduced_loop_count(&lambda)?;
            let jj = if has_three_disjoint_paths(&lambda) {
                j
            } else {
                1.0
            };
            acc += x.powi(lambda.edges.len() as i32) * n.powi(lp as i32) * jj;
            if i + 1 < start + size {
                toggle(&mut cur, (i + 1).trailing_zeros() as usize);
            }
        }
        Ok(acc)
    });
    let mut num = 0.0;
    for part in parts {
        num += part?;
    }
    let mu = EnumeratedMeasure::build(h, &BoundaryCondition::Vacant, p, opts)?;
    Ok(num / mu.log_partition().exp())
}
