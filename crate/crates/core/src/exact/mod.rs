//! Exhaustive enumeration of loop configurations on small domains.
//!
//! Configurations with a given boundary condition form a coset of the cycle
//! space of the domain, which is spanned by the boundaries of its faces. A
//! configuration is addressed by the set of faces flipped relative to a
//! fixed base configuration, encoded as a bit mask. Masks are visited in
//! Gray-code order so that consecutive configurations differ by one face.

mod checks;
mod rational;
mod spin;

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

pub use checks::{
    hard_hexagon_compare, height_pushforward_check, loop_length_check, peierls_check,
    unique_packing_check, unique_packing_rect, HeightReport, LoopLengthBound, PackingReport,
    PeierlsReport,
};
pub use rational::{
    parse_ratio, pow_ratio, ratio_to_f64, rational_partition_function, rational_probabilities,
    rational_weights,
};
pub use spin::{
    enumerate_odd, has_three_disjoint_paths, reduced_loop_count, spin_spin_ratio, OddConfig,
};

use crate::error::{Error, Result};
use crate::lattice::HexEdge;
use crate::local::{LocalGraph, LocalState};
use crate::loopcfg::{BoundaryCondition, Domain, EdgeWeight, LoopConfig, ModelParams};
use crate::par::{map_indexed, Execution};

pub const DEFAULT_FACE_CAP: usize = 24;
const BLOCK_BITS: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumOptions {
    pub face_cap: usize,
    pub exec: Execution,
}

impl Default for EnumOptions {
    fn default() -> Self {
        EnumOptions {
            face_cap: DEFAULT_FACE_CAP,
            exec: Execution::default(),
        }
    }
}

impl EnumOptions {
    pub fn sequential() -> Self {
        EnumOptions {
            exec: Execution::Sequential,
            ..Self::default()
        }
    }
}

/// Edge count `o` and loop count `L` of one configuration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConfigStats {
    pub o: u32,
    pub loops: u32,
}

pub(crate) fn gray(i: u64) -> u64 {
    i ^ (i >> 1)
}

pub(crate) fn check_cap(h: &Domain, cap: usize) -> Result<usize> {
    let k = h.faces().len();
    if k > cap || k > 40 {
        return Err(Error::TooLarge {
            faces: k,
            cap: cap.min(40),
        });
    }
    Ok(k)
}

/// Base configuration inside the domain and frozen edges outside it.
fn base_and_frozen(
    h: &Domain,
    bc: &BoundaryCondition,
) -> Result<(BTreeSet<HexEdge>, BTreeSet<HexEdge>)> {
    let base = bc.inner_edges(h);
    let frozen = bc.frozen_edges(h);
    let all: BTreeSet<HexEdge> = base.union(&frozen).copied().collect();
    for v in h.vertices() {
        if v.edges().iter().filter(|e| all.contains(e)).count() % 2 == 1 {
            return Err(Error::InconsistentBoundary);
        }
    }
    Ok((base, frozen))
}

// Visit masks `gray(start)..gray(end)` calling `f(mask, state)`.
fn sweep_block<F: FnMut(u64, &LocalState)>(
    g: &Arc<LocalGraph>,
    base: &BTreeSet<HexEdge>,
    start: u64,
    end: u64,
    mut f: F,
) {
    let mut s = LocalState::new(Arc::clone(g), base);
    let m0 = gray(start);
    for b in 0..g.faces.len() {
        if m0 >> b & 1 == 1 {
            s.flip(b);
        }
    }
    for i in start..end {
        f(gray(i), &s);
        if i + 1 < end {
            s.flip((i + 1).trailing_zeros() as usize);
        }
    }
}

fn blocks(k: usize) -> (usize, u64) {
    let bits = k.min(BLOCK_BITS);
    (1usize << (k - bits), 1u64 << bits)
}

/// Every configuration of a domain under a boundary condition with its edge
/// and loop counts, indexed by face mask.
#[derive(Clone, Debug)]
pub struct Enumeration {
    domain: Domain,
    bc: BoundaryCondition,
    base: BTreeSet<HexEdge>,
    frozen: BTreeSet<HexEdge>,
    stats: Vec<ConfigStats>,
}

impl Enumeration {
    pub fn new(h: &Domain, bc: &BoundaryCondition, opts: EnumOptions) -> Result<Self> {
        let k = check_cap(h, opts.face_cap)?;
        let (base, frozen) = base_and_frozen(h, bc)?;
        let g = Arc::new(LocalGraph::new(h, &frozen));
        let (nblocks, size) = blocks(k);
        let parts = map_indexed(opts.exec, nblocks, |b| {
            let start = b as u64 * size;
            let mut out = Vec::with_capacity(size as usize);
            sweep_block(&g, &base, start, start + size, |mask, s| {
                out.push((
                    mask,
                    ConfigStats {
                        o: s.o() as u32,
                        loops: s.loops() as u32,
                    },
                ));
            });
            out
        });
        let mut stats = vec![ConfigStats { o: 0, loops: 0 }; 1usize << k];
        for (mask, st) in parts.into_iter().flatten() {
            stats[mask as usize] = st;
        }
        Ok(Enumeration {
            domain: h.clone(),
            bc: bc.clone(),
            base,
            frozen,
            stats,
        })
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn boundary(&self) -> &BoundaryCondition {
        &self.bc
    }

    pub fn len(&self) -> usize {
        self.stats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stats.is_empty()
    }

    pub fn stats(&self) -> &[ConfigStats] {
        &self.stats
    }

    /// Domain edges of the configuration with the given face mask.
    pub fn inside_edges(&self, mask: u64) -> BTreeSet<HexEdge> {
        let mut edges = self.base.clone();
        for (b, z) in self.domain.faces().iter().enumerate() {
            if mask >> b & 1 == 1 {
                for e in z.edges() {
                    if !edges.remove(&e) {
                        edges.insert(e);
                    }
                }
            }
        }
        edges
    }

    /// The configuration with the given face mask, frozen edges included.
    pub fn config(&self, mask: u64) -> LoopConfig {
        let mut edges = self.inside_edges(mask);
        edges.extend(self.frozen.iter().copied());
        LoopConfig::from_even(edges)
    }

    pub fn configs(&self) -> Vec<LoopConfig> {
        (0..self.stats.len() as u64)
            .map(|m| self.config(m))
            .collect()
    }

    /// Face mask of a configuration, if it belongs to this enumeration. A
    /// face is flipped iff an upward ray from it crosses the difference with
    /// the base an odd number of times.
    pub fn mask_of(&self, omega: &LoopConfig) -> Option<u64> {
        let inside: BTreeSet<HexEdge> = omega
            .edges()
            .iter()
            .copied()
            .filter(|e| self.domain.contains_edge(*e))
            .collect();
        let diff: BTreeSet<HexEdge> = inside.symmetric_difference(&self.base).copied().collect();
        let faces = self.domain.faces();
        let top = faces.iter().map(|z| z.b).max().unwrap_or(0);
        let mut mask = 0u64;
        for (i, z) in faces.iter().enumerate() {
            let mut crossings = 0;
            let mut cur = *z;
            while cur.b <= top {
                let next = cur.shift_up();
                if diff.contains(&HexEdge::between(cur, next).expect("adjacent")) {
                    crossings += 1;
                }
                cur = next;
            }
            if crossings % 2 == 1 {
                mask |= 1 << i;
            }
        }
        (self.config(mask) == *omega).then_some(mask)
    }
}

/// All configurations of a domain under a boundary condition.
pub fn enumerate(h: &Domain, bc: &BoundaryCondition) -> Result<Vec<LoopConfig>> {
    Ok(Enumeration::new(h, bc, EnumOptions::default())?.configs())
}

/// Number of configurations with each `(o, L)`.
pub type DensityOfStates = BTreeMap<ConfigStats, u64>;

/// Histogram of edge and loop counts, computed without storing configurations.
pub fn density_of_states(
    h: &Domain,
    bc: &BoundaryCondition,
    opts: EnumOptions,
) -> Result<DensityOfStates> {
    let k = check_cap(h, opts.face_cap)?;
    let (base, frozen) = base_and_frozen(h, bc)?;
    let g = Arc::new(LocalGraph::new(h, &frozen));
    let (nblocks, size) = blocks(k);
    let parts = map_indexed(opts.exec, nblocks, |b| {
        let start = b as u64 * size;
        let mut hist = DensityOfStates::new();
        sweep_block(&g, &base, start, start + size, |_, s| {
            *hist
                .entry(ConfigStats {
                    o: s.o() as u32,
                    loops: s.loops() as u32,
                })
                .or_default() += 1;
        });
        hist
    });
    let mut out = DensityOfStates::new();
    for part in parts {
        for (k, c) in part {
            *out.entry(k).or_default() += c;
        }
    }
    Ok(out)
}

/// Logarithm of a partition function. At infinite edge weight only the
/// configurations with the most edges survive; `log_sum` is the log of the
/// sum of `n^L` over them.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LogPartition {
    Finite(f64),
    Packed { o: u32, log_sum: f64 },
}

impl LogPartition {
    pub fn log_value(self) -> f64 {
        match self {
            LogPartition::Finite(z) => z,
            LogPartition::Packed { log_sum, .. } => log_sum,
        }
    }
}

pub(crate) fn log_sum_exp<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    let xs: Vec<f64> = xs.into_iter().collect();
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Effective log weights: at infinite edge weight, `L ln n` on the maximal
/// edge count and minus infinity elsewhere.
fn effective_log_weights<'a, I>(stats: I, p: &ModelParams) -> Vec<f64>
where
    I: IntoIterator<Item = &'a ConfigStats> + Clone,
{
    let ln_n = p.n.ln();
    match p.x {
        EdgeWeight::Finite(x) => {
            let ln_x = x.ln();
            stats
                .into_iter()
                .map(|s| s.o as f64 * ln_x + s.loops as f64 * ln_n)
                .collect()
        }
        EdgeWeight::Infinite => {
            let omax = stats.clone().into_iter().map(|s| s.o).max().unwrap_or(0);
            stats
                .into_iter()
                .map(|s| {
                    if s.o == omax {
                        s.loops as f64 * ln_n
                    } else {
                        f64::NEG_INFINITY
                    }
                })
                .collect()
        }
    }
}

pub fn log_partition_from_dos(dos: &DensityOfStates, p: &ModelParams) -> LogPartition {
    let keys: Vec<ConfigStats> = dos.keys().copied().collect();
    let lw = effective_log_weights(keys.iter(), p);
    let z = log_sum_exp(keys.iter().zip(&lw).map(|(k, w)| w + (dos[k] as f64).ln()));
    match p.x {
        EdgeWeight::Finite(_) => LogPartition::Finite(z),
        EdgeWeight::Infinite => LogPartition::Packed {
            o: keys.iter().map(|k| k.o).max().unwrap_or(0),
            log_sum: z,
        },
    }
}

pub fn partition_function(
    h: &Domain,
    bc: &BoundaryCondition,
    p: &ModelParams,
    opts: EnumOptions,
) -> Result<LogPartition> {
    Ok(log_partition_from_dos(&density_of_states(h, bc, opts)?, p))
}

/// The loop measure on an enumerated domain.
#[derive(Clone, Debug)]
pub struct EnumeratedMeasure {
    pub enumeration: Enumeration,
    pub params: ModelParams,
    log_w: Vec<f64>,
    log_z: f64,
}

impl EnumeratedMeasure {
    pub fn new(enumeration: Enumeration, params: ModelParams) -> Self {
        let log_w = effective_log_weights(enumeration.stats().iter(), &params);
        let log_z = log_sum_exp(log_w.iter().copied());
        EnumeratedMeasure {
            enumeration,
            params,
            log_w,
            log_z,
        }
    }

    pub fn build(
        h: &Domain,
        bc: &BoundaryCondition,
        p: ModelParams,
        opts: EnumOptions,
    ) -> Result<Self> {
        Ok(Self::new(Enumeration::new(h, bc, opts)?, p))
    }

    pub fn log_partition(&self) -> f64 {
        self.log_z
    }

    pub fn log_weight(&self, mask: u64) -> f64 {
        self.log_w[mask as usize]
    }

    pub fn probability_of(&self, mask: u64) -> f64 {
        (self.log_w[mask as usize] - self.log_z).exp()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.log_w.iter().map(|w| (w - self.log_z).exp()).collect()
    }

    /// Probability of an event given as a predicate on configurations.
    pub fn probability<F: Fn(&LoopConfig) -> bool>(&self, event: F) -> f64 {
        (0..self.log_w.len() as u64)
            .filter(|&m| {
                self.log_w[m as usize] > f64::NEG_INFINITY && event(&self.enumeration.config(m))
            })
            .map(|m| self.probability_of(m))
            .sum()
    }

    pub fn conditional_probability<F, G>(&self, event: F, given: G) -> Result<f64>
    where
        F: Fn(&LoopConfig) -> bool,
        G: Fn(&LoopConfig) -> bool,
    {
        let mut both = 0.0;
        let mut cond = 0.0;
        for m in 0..self.log_w.len() as u64 {
            let w = self.log_w[m as usize];
            if w == f64::NEG_INFINITY {
                continue;
            }
            let omega = self.enumeration.config(m);
            if given(&omega) {
                let p = (w - self.log_z).exp();
                cond += p;
                if event(&omega) {
                    both += p;
                }
            }
        }
        if cond == 0.0 {
            return Err(Error::Precondition(
                "conditioning event has probability zero".into(),
            ));
        }
        Ok(both / cond)
    }

    /// One row per configuration: mask, `o`, `L`, log weight, probability.
    pub fn report_tsv(&self) -> String {
        use std::fmt::Write as _;
        let mut out = String::from("config\to\tL\tlog_weight\tprobability\n");
        for (m, st) in self.enumeration.stats().iter().enumerate() {
            let w = self.log_w[m];
            let lw = if w == f64::NEG_INFINITY {
                "-inf".to_string()
            } else {
                format!("{w:.9}")
            };
            writeln!(
                out,
                "{m}\t{}\t{}\t{lw}\t{:.12e}",
                st.o,
                st.loops,
                self.probability_of(m as u64)
            )
            .unwrap();
        }
        out
    }

    pub fn expectation<F: Fn(&LoopConfig) -> f64>(&self, f: F) -> f64 {
        (0..self.log_w.len() as u64)
            .filter(|&m| self.log_w[m as usize] > f64::NEG_INFINITY)
            .map(|m| self.probability_of(m) * f(&self.enumeration.config(m)))
            .sum()
    }
}

/// Probability of `event` under the loop measure on `h`.
pub fn probability<F: Fn(&LoopConfig) -> bool>(
    h: &Domain,
    bc: &BoundaryCondition,
    p: ModelParams,
    event: F,
) -> Result<f64> {
    Ok(EnumeratedMeasure::build(h, bc, p, EnumOptions::default())?.probability(event))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::HexCoord;
    use crate::loopcfg::{count_loops, loops_of};

    #[test]
    fn single_hexagon_partition_function() {
        let h = Domain::hexagon(HexCoord::ORIGIN);
        let p = ModelParams::new(8.0, 0.5).unwrap();
        let z =
            partition_function(&h, &BoundaryCondition::Vacant, &p, EnumOptions::default()).unwrap();
        assert!((z.log_value() - (1.0f64 + 8.0 * 0.5f64.powi(6)).ln()).abs() < 1e-12);
    }

    #[test]
    fn flower_has_128_configurations() {
        let h = Domain::flower(HexCoord::ORIGIN);
        let en = Enumeration::new(&h, &BoundaryCondition::Vacant, EnumOptions::default()).unwrap();
        assert_eq!(en.len(), 128);
        let configs: BTreeSet<LoopConfig> = en.configs().into_iter().collect();
        assert_eq!(configs.len(), 128);
        for (m, st) in en.stats().iter().enumerate() {
            let omega = en.config(m as u64);
            assert_eq!(st.o as usize, omega.len());
            assert_eq!(st.loops as usize, loops_of(&omega).len());
            assert_eq!(en.mask_of(&omega), Some(m as u64));
        }
    }

    #[test]
    fn ground_boundary_counts_loops_through_frozen_edges() {
        let h = Domain::flower(HexCoord::ORIGIN);
        for c in 0..3 {
            let bc = BoundaryCondition::Ground(c);
            let en = Enumeration::new(&h, &bc, EnumOptions::default()).unwrap();
            for (m, st) in en.stats().iter().enumerate() {
                let omega = en.config(m as u64);
                assert_eq!(st.loops as usize, count_loops(&omega, &h));
                assert_eq!(st.o as usize, omega.edges_in(&h));
            }
        }
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let h = Domain::ball(HexCoord::ORIGIN, 2);
        let opts = EnumOptions {
            face_cap: 24,
            exec: Execution::Sequential,
        };
        let a = density_of_states(&h, &BoundaryCondition::Vacant, opts).unwrap();
        let b = density_of_states(&h, &BoundaryCondition::Vacant, EnumOptions::default()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.values().sum::<u64>(), 1 << 19);
    }

    #[test]
    fn cap_is_enforced() {
        let h = Domain::ball(HexCoord::ORIGIN, 2);
        let opts = EnumOptions {
            face_cap: 10,
            ..Default::default()
        };
        assert!(matches!(
            Enumeration::new(&h, &BoundaryCondition::Vacant, opts),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn infinite_weight_keeps_packed_configurations() {
        let h = Domain::flower(HexCoord::ORIGIN);
        let p = ModelParams::with_weight(2.0, EdgeWeight::Infinite).unwrap();
        let mu =
            EnumeratedMeasure::build(&h, &BoundaryCondition::Vacant, p, EnumOptions::default())
                .unwrap();
        let omax = mu.enumeration.stats().iter().map(|s| s.o).max().unwrap();
        let total: f64 = mu.probabilities().iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        for (m, s) in mu.enumeration.stats().iter().enumerate() {
            if s.o < omax {
                assert_eq!(mu.probability_of(m as u64), 0.0);
            }
        }
    }
}
