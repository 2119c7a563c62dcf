//! Monte Carlo sphere integrals behind the spin to loop correspondence.
//!
//! Points are uniform on the sphere of radius `√n` in `ℝⁿ`. For `n = 1` the
//! sphere is `{±1}` and is sampled exactly; otherwise a standard Gaussian
//! vector is normalised and rescaled. Samples are drawn in blocks of
//! [`BLOCK`]; block `b` uses `ChaCha8Rng::seed_from_u64(seed)` on stream `b`,
//! and block statistics are pooled in block order, so estimates do not
//! depend on the execution mode.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::exact::{partition_function, EnumOptions};
use crate::lattice::HexVertex;
use crate::loopcfg::{loops_of, BoundaryCondition, Domain, LoopConfig, ModelParams};
use crate::par::{map_indexed, Execution};

pub const BLOCK: u64 = 1 << 14;
pub const MIN_SAMPLES: u64 = 1000;
pub const MAX_VERTICES: usize = 30;
pub const MAX_PARTITION_VERTICES: usize = 20;

/// Uniform points on `√n · S^{n-1}`.
#[derive(Clone, Debug)]
pub struct SphereSampler {
    n: usize,
    rng: ChaCha8Rng,
}

impl SphereSampler {
    pub fn new(n: usize, seed: u64, stream: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Parameter(
                "sphere dimension must be at least 1".into(),
            ));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Ok(SphereSampler { n, rng })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn sample_into(&mut self, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.n);
        if self.n == 1 {
            out[0] = if self.rng.random::<bool>() { 1.0 } else { -1.0 };
            return;
        }
        loop {
            for v in out.iter_mut() {
                *v = self.rng.sample(StandardNormal);
            }
            let norm = out.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > 1e-12 {
                let s = (self.n as f64).sqrt() / norm;
                out.iter_mut().for_each(|v| *v *= s);
                return;
            }
        }
    }

    pub fn sample(&mut self) -> Vec<f64> {
        let mut v = vec![0.0; self.n];
        self.sample_into(&mut v);
        v
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Sample size and randomness for an estimate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct McOptions {
    pub samples: u64,
    pub seed: u64,
    pub exec: Execution,
}

impl McOptions {
    pub fn new(samples: u64, seed: u64) -> Self {
        McOptions {
            samples,
            seed,
            exec: Execution::default(),
        }
    }

    pub fn with_exec(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }
}

/// Sample mean with its standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: u64,
}

impl Estimate {
    /// Distance from `target` in standard errors. Zero when both the error
    /// and the discrepancy vanish.
    pub fn z(&self, target: f64) -> f64 {
        let d = self.mean - target;
        if d.abs() <= 1e-12 * target.abs().max(1.0) {
            0.0
        } else {
            d / self.stderr
        }
    }

    pub fn within(&self, target: f64, sigmas: f64) -> bool {
        self.z(target).abs() <= sigmas
    }
}

#[derive(Clone, Copy, Debug, Default)]
struct Moments {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, v: f64) {
        self.count += 1;
        let d = v - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (v - self.mean);
    }

    fn merge(self, o: Moments) -> Moments {
        if self.count == 0 {
            return o;
        }
        if o.count == 0 {
            return self;
        }
        let count = self.count + o.count;
        let d = o.mean - self.mean;
        let mean = if d == 0.0 {
            self.mean
        } else {
            self.mean + d * o.count as f64 / count as f64
        };
        let m2 = self.m2 + o.m2 + d * d * self.count as f64 * o.count as f64 / count as f64;
        Moments { count, mean, m2 }
    }

    fn estimate(self) -> Estimate {
        let var = if self.count > 1 {
            self.m2 / (self.count - 1) as f64
        } else {
            0.0
        };
        Estimate {
            mean: self.mean,
            stderr: (var / self.count as f64).sqrt(),
            samples: self.count,
        }
    }
}

/// Mean of `f(points)` where `points` holds `k` independent sphere samples.
fn monte_carlo<F>(n: usize, k: usize, opts: McOptions, f: F) -> Result<Estimate>
where
    F: Fn(&[Vec<f64>]) -> f64 + Sync + Send,
{
    if opts.samples < MIN_SAMPLES {
        return Err(Error::Parameter(format!(
            "need at least {MIN_SAMPLES} samples, got {}",
            opts.samples
        )));
    }
    SphereSampler::new(n, 0, 0)?;
    let nblocks = opts.samples.div_ceil(BLOCK) as usize;
    let parts = map_indexed(opts.exec, nblocks, |b| {
        let mut s = SphereSampler::new(n, opts.seed, b as u64).expect("dimension checked");
        let mut pts = vec![vec![0.0; n]; k];
        let mut m = Moments::default();
        let len = BLOCK.min(opts.samples - b as u64 * BLOCK);
        for _ in 0..len {
            for p in pts.iter_mut() {
                s.sample_into(p);
            }
            m.push(f(&pts));
        }
        m
    });
    Ok(parts
        .into_iter()
        .fold(Moments::default(), Moments::merge)
        .estimate())
}

/// Estimate of `∫ ⟨x,z⟩⟨z,y⟩ dz`, which equals `⟨x,y⟩`.
pub fn estimate_contraction(n: usize, x: &[f64], y: &[f64], opts: McOptions) -> Result<Estimate> {
    for v in [x, y] {
        if v.len() != n {
            return Err(Error::Dimension {
                expected: n,
                got: v.len(),
            });
        }
    }
    monte_carlo(n, 1, opts, |p| dot(x, &p[0]) * dot(&p[0], y))
}

/// Estimate of `∬ ⟨x,y⟩⁴ dx dy`, which equals `3n³/(n+2)`.
pub fn estimate_fourth_moment(n: usize, opts: McOptions) -> Result<Estimate> {
    monte_carlo(n, 2, opts, |p| dot(&p[0], &p[1]).powi(4))
}

pub fn fourth_moment_target(n: usize) -> f64 {
    let n = n as f64;
    3.0 * n.powi(3) / (n + 2.0)
}

/// A multigraph on vertices `0..vertices`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpinGraph {
    pub vertices: usize,
    pub edges: Vec<(usize, usize)>,
}

impl SpinGraph {
    pub fn new(vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if let Some(&(u, v)) = edges
            .iter()
            .find(|(u, v)| *u >= vertices || *v >= vertices || u == v)
        {
            return Err(Error::Precondition(format!(
                "bad edge ({u},{v}) on {vertices} vertices"
            )));
        }
        Ok(SpinGraph { vertices, edges })
    }

    /// The graph of a lattice edge set, vertices numbered in sorted order.
    pub fn from_lattice_edges<'a, I: IntoIterator<Item = &'a crate::lattice::HexEdge>>(
        edges: I,
    ) -> Self {
        let edges: Vec<_> = edges.into_iter().map(|e| e.endpoints()).collect();
        let index: BTreeMap<HexVertex, usize> = edges
            .iter()
            .flatten()
            .copied()
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .enumerate()
            .map(|(i, v)| (v, i))
            .collect();
        SpinGraph {
            vertices: index.len(),
            edges: edges.iter().map(|[p, q]| (index[p], index[q])).collect(),
        }
    }

    pub fn has_odd_vertex(&self) -> bool {
        let mut deg = vec![0usize; self.vertices];
        for &(u, v) in &self.edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg.iter().any(|d| d % 2 == 1)
    }

    /// A cycle through `0..k`.
    pub fn cycle(k: usize) -> Self {
        SpinGraph {
            vertices: k,
            edges: (0..k).map(|i| (i, (i + 1) % k)).collect(),
        }
    }

    pub fn disjoint_union(&self, other: &SpinGraph) -> Self {
        let off = self.vertices;
        let mut edges = self.edges.clone();
        edges.extend(other.edges.iter().map(|&(a, b)| (a + off, b + off)));
        SpinGraph {
            vertices: off + other.vertices,
            edges,
        }
    }

    /// Append `other` with its vertex `0` glued to `at`.
    fn glue(mut self, other: &SpinGraph, at: usize) -> Self {
        let off = self.vertices - 1;
        let map = |w: usize| if w == 0 { at } else { w + off };
        self.edges
            .extend(other.edges.iter().map(|&(a, b)| (map(a), map(b))));
        self.vertices += other.vertices - 1;
        self
    }
}

/// The component shapes met when a path from `u` to `v` is closed by the
/// extra edge `uv`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Witness {
    /// The path alone.
    Path,
    /// The path and a loop at one endpoint.
    PathLoop,
    /// The path and two disjoint loops, one at each endpoint.
    PathTwoLoops,
    /// Three internally disjoint paths between the endpoints.
    Theta,
}

impl Witness {
    pub const ALL: [Witness; 4] = [
        Witness::Path,
        Witness::PathLoop,
        Witness::PathTwoLoops,
        Witness::Theta,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Witness::Path => "path",
            Witness::PathLoop => "path+loop",
            Witness::PathTwoLoops => "path+2loops",
            Witness::Theta => "theta",
        }
    }

    /// The component together with the closing edge. The path runs from
    /// vertex 0 to vertex 3.
    pub fn graph(self) -> SpinGraph {
        let closed = SpinGraph::cycle(4);
        let hex = SpinGraph::cycle(6);
        match self {
            Witness::Path => closed,
            Witness::PathLoop => closed.glue(&hex, 0),
            Witness::PathTwoLoops => closed.glue(&hex, 0).glue(&hex, 3),
            Witness::Theta => {
                let mut g = closed;
                for _ in 0..2 {
                    let a = g.vertices;
                    g.vertices += 2;
                    g.edges.extend([(0, a), (a, a + 1), (a + 1, 3)]);
                }
                g
            }
        }
    }

    pub fn target(self, n: usize) -> f64 {
        let nf = n as f64;
        match self {
            Witness::Path => nf,
            Witness::PathLoop => nf * nf,
            Witness::PathTwoLoops => nf.powi(3),
            Witness::Theta => fourth_moment_target(n),
        }
    }
}

/// Estimate of `∫ ∏_{uv ∈ g} ⟨σ_u, σ_v⟩ dσ`.
pub fn estimate_graph_integral(g: &SpinGraph, n: usize, opts: McOptions) -> Result<Estimate> {
    if g.vertices > MAX_VERTICES {
        return Err(Error::Precondition(format!(
            "{} vertices, at most {MAX_VERTICES} allowed",
            g.vertices
        )));
    }
    monte_carlo(n, g.vertices, opts, |p| {
        g.edges.iter().map(|&(u, v)| dot(&p[u], &p[v])).product()
    })
}

/// Estimate of the loop integral of a configuration, which equals `n` to
/// the number of loops.
pub fn estimate_loop_integral(omega: &LoopConfig, n: usize, opts: McOptions) -> Result<Estimate> {
    estimate_graph_integral(&SpinGraph::from_lattice_edges(omega.edges()), n, opts)
}

pub fn loop_integral_target(omega: &LoopConfig, n: usize) -> f64 {
    (n as f64).powi(loops_of(omega).len() as i32)
}

/// Spin partition function next to its loop expansion.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpinPartition {
    pub spin: Estimate,
    pub loop_side: f64,
}

impl SpinPartition {
    pub fn relative_deviation(&self) -> f64 {
        (self.spin.mean - self.loop_side).abs() / self.loop_side
    }
}

/// `E ∏_{uv ∈ E(H)} exp(β⟨σ_u,σ_v⟩)` and `Σ_ω β^o n^L` over vacant
/// configurations.
pub fn estimate_spin_partition(
    h: &Domain,
    n: usize,
    beta: f64,
    opts: McOptions,
) -> Result<SpinPartition> {
    let nv = h.vertices().len();
    if nv > MAX_PARTITION_VERTICES {
        return Err(Error::TooLarge {
            faces: h.faces().len(),
            cap: MAX_PARTITION_VERTICES,
        });
    }
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(Error::Parameter(format!(
            "beta must be non-negative, got {beta}"
        )));
    }
    let g = SpinGraph::from_lattice_edges(h.edges());
    let spin = monte_carlo(n, g.vertices, opts, |p| {
        (beta * g.edges.iter().map(|&(u, v)| dot(&p[u], &p[v])).sum::<f64>()).exp()
    })?;
    let loop_side = if beta == 0.0 {
        1.0
    } else {
        let params = ModelParams::new(n as f64, beta)?;
        partition_function(
            h,
            &BoundaryCondition::Vacant,
            &params,
            EnumOptions::default(),
        )?
        .log_value()
        .exp()
    };
    Ok(SpinPartition { spin, loop_side })
}

/// One line of the identity report.
#[derive(Clone, Debug, PartialEq)]
pub struct IdentityRow {
    pub identity: String,
    pub n: usize,
    pub estimate: Estimate,
    pub target: f64,
}

impl IdentityRow {
    pub fn z(&self) -> f64 {
        self.estimate.z(self.target)
    }
}

pub fn report_tsv(rows: &[IdentityRow]) -> String {
    let mut out = String::from("identity\tn\tsamples\testimate\tstderr\ttarget\tz\n");
    for r in rows {
        writeln!(
            out,
            "{}\t{}\t{}\t{:.6}\t{:.6}\t{:.6}\t{:.3}",
            r.identity,
            r.n,
            r.estimate.samples,
            r.estimate.mean,
            r.estimate.stderr,
            r.target,
            r.z()
        )
        .unwrap();
    }
    out
}

/// Contraction, loop-integral, witness and fourth-moment checks for each
/// dimension in `dims`. Row `k` uses its own seed derived from `opts.seed`.
pub fn identity_report(dims: &[usize], opts: McOptions) -> Result<Vec<IdentityRow>> {
    let mut cases: Vec<(String, usize, Case)> = Vec::new();
    for &n in dims {
        let mut x = vec![0.0; n];
        let mut y = vec![0.0; n];
        x[0] = 1.0;
        y[0] = 0.5;
        if n > 1 {
            x[1] = -2.0;
            y[n - 1] += 1.5;
        }
        cases.push(("contraction".into(), n, Case::Contraction(x, y)));
        if n > 1 {
            let mut e1 = vec![0.0; n];
            let mut e2 = vec![0.0; n];
            e1[0] = 1.0;
            e2[1] = 1.0;
            cases.push((
                "contraction-orthogonal".into(),
                n,
                Case::Contraction(e1, e2),
            ));
        }
        let hex = SpinGraph::cycle(6);
        cases.push(("loop".into(), n, Case::Graph(hex.clone(), n as f64)));
        cases.push((
            "two-loops".into(),
            n,
            Case::Graph(hex.disjoint_union(&hex), (n * n) as f64),
        ));
        cases.push((
            "single-edge".into(),
            n,
            Case::Graph(SpinGraph::new(2, vec![(0, 1)])?, 0.0),
        ));
        for w in Witness::ALL {
            cases.push((
                format!("witness-{}", w.name()),
                n,
                Case::Graph(w.graph(), w.target(n)),
            ));
        }
        cases.push(("fourth-moment".into(), n, Case::FourthMoment));
    }
    cases
        .into_iter()
        .enumerate()
        .map(|(k, (identity, n, case))| {
            let o = McOptions {
                seed: row_seed(opts.seed, k as u64),
                ..opts
            };
            let (estimate, target) = match case {
                Case::Contraction(x, y) => (estimate_contraction(n, &x, &y, o)?, dot(&x, &y)),
                Case::Graph(g, t) => (estimate_graph_integral(&g, n, o)?, t),
                Case::FourthMoment => (estimate_fourth_moment(n, o)?, fourth_moment_target(n)),
            };
            Ok(IdentityRow {
                identity,
                n,
                estimate,
                target,
            })
        })
        .collect()
}

enum Case {
    Contraction(Vec<f64>, Vec<f64>),
    Graph(SpinGraph, f64),
    FourthMoment,
}

/// Seed for row `k` of a report.
pub fn row_seed(seed: u64, k: u64) -> u64 {
    seed ^ k.wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::HexCoord;

    #[test]
    fn samples_lie_on_the_sphere() {
        for n in 1..6 {
            let mut s = SphereSampler::new(n, 3, 0).unwrap();
            for _ in 0..1000 {
                let z = s.sample();
                let r = dot(&z, &z);
                assert!((r - n as f64).abs() <= 1e-9 * n as f64);
            }
        }
    }

    #[test]
    fn one_dimension_is_exact() {
        let opts = McOptions::new(5000, 1);
        let e = estimate_contraction(1, &[3.0], &[-0.5], opts).unwrap();
        assert_eq!((e.mean, e.stderr), (-1.5, 0.0));
        let f = estimate_fourth_moment(1, opts).unwrap();
        assert_eq!((f.mean, f.stderr), (1.0, 0.0));
    }

    #[test]
    fn dimension_mismatch() {
        let e = estimate_contraction(3, &[1.0], &[1.0, 0.0, 0.0], McOptions::new(1000, 1));
        assert_eq!(
            e.unwrap_err(),
            Error::Dimension {
                expected: 3,
                got: 1
            }
        );
    }

    #[test]
    fn execution_mode_does_not_change_estimates() {
        let o = McOptions::new(40_000, 5);
        let a = estimate_fourth_moment(3, o.with_exec(Execution::Sequential)).unwrap();
        let b = estimate_fourth_moment(3, o.with_exec(Execution::Parallel)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn fourth_moment_closed_form() {
        assert_eq!(fourth_moment_target(1), 1.0);
        assert_eq!(fourth_moment_target(2), 6.0);
        assert!((fourth_moment_target(3) - 16.2).abs() < 1e-12);
    }

    #[test]
    fn fourth_moment_by_quadrature() {
        // n^4 E[t^4] with t the first coordinate of a uniform unit vector,
        // whose density is proportional to (1 - t²)^{(n-3)/2}
        for n in 2..6usize {
            let w = |t: f64| (1.0 - t * t).powf((n as f64 - 3.0) / 2.0);
            let m = 200_000;
            let (mut num, mut den) = (0.0, 0.0);
            for i in 0..m {
                // midpoint rule in t = sin θ to tame the endpoint singularity
                let th = -std::f64::consts::FRAC_PI_2
                    + (i as f64 + 0.5) * std::f64::consts::PI / m as f64;
                let t = th.sin();
                let jac = th.cos();
                num += t.powi(4) * w(t) * jac;
                den += w(t) * jac;
            }
            let q = (n as f64).powi(4) * num / den;
            assert!((q - fourth_moment_target(n)).abs() < 1e-6, "n={n}: {q}");
        }
    }

    #[test]
    fn witness_shapes() {
        assert!(!Witness::Path.graph().has_odd_vertex());
        for w in Witness::ALL {
            let g = w.graph();
            assert!(!g.has_odd_vertex(), "{w:?}");
        }
        assert_eq!(Witness::PathTwoLoops.graph().vertices, 14);
        assert_eq!(Witness::Theta.graph().edges.len(), 10);
    }

    #[test]
    fn loop_integral_of_lattice_loops() {
        let z = HexCoord::ORIGIN;
        let two = LoopConfig::trivial_loops([z, HexCoord::new(2, 2)]).unwrap();
        assert_eq!(loop_integral_target(&two, 2), 4.0);
        let e = estimate_loop_integral(&two, 2, McOptions::new(200_000, 2)).unwrap();
        assert!(e.within(4.0, 4.0), "{e:?}");
    }

    #[test]
    fn spin_partition_at_zero_coupling() {
        let h = Domain::hexagon(HexCoord::ORIGIN);
        let s = estimate_spin_partition(&h, 2, 0.0, McOptions::new(1000, 1)).unwrap();
        assert_eq!(s.spin.mean, 1.0);
        assert_eq!(s.loop_side, 1.0);
    }

    #[test]
    fn spin_partition_deviation_grows_with_coupling() {
        let h = Domain::hexagon(HexCoord::ORIGIN);
        let o = McOptions::new(200_000, 4);
        let a = estimate_spin_partition(&h, 2, 0.1, o).unwrap();
        let b = estimate_spin_partition(&h, 2, 0.5, o).unwrap();
        assert!(
            a.relative_deviation() < b.relative_deviation(),
            "{a:?} {b:?}"
        );
    }

    #[test]
    fn ising_hexagon_closed_form() {
        // n = 1: E ∏ e^{β s_u s_v} = cosh(β)^6 (1 + tanh(β)^6)
        let h = Domain::hexagon(HexCoord::ORIGIN);
        let beta: f64 = 0.3;
        let s = estimate_spin_partition(&h, 1, beta, McOptions::new(200_000, 8)).unwrap();
        let exact = beta.cosh().powi(6) * (1.0 + beta.tanh().powi(6));
        assert!(s.spin.within(exact, 4.0), "{:?} vs {exact}", s.spin);
    }
}
