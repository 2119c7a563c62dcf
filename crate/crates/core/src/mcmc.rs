//! Glauber dynamics by single-face Metropolis flips.
//!
//! The generator is `ChaCha8Rng` seeded with `seed_from_u64(seed)` and then
//! moved to stream `stream`; chain `i` of a multi-chain run uses stream `i`.
//! Each step draws a face index and then one uniform `f64`, whether or not the
//! uniform is needed, so a trajectory is a pure function of
//! `(seed, stream, domain, boundary, params)`.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lattice::HexVertex;
use crate::local::{LocalGraph, LocalState};
use crate::loopcfg::{loops_of, BoundaryCondition, Domain, EdgeWeight, LoopConfig, ModelParams};
use crate::par::{map_indexed, Execution};
use crate::structure::breakup;

/// A quantity recorded along a run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Observable {
    /// Number of edges inside the domain.
    EdgeCount,
    /// Number of loops meeting the domain.
    LoopCount,
    /// Fraction of faces of each colour that are flowers.
    FlowerDensity,
    /// For each even `k` from 6 to `k_max`, whether a loop of length `k`
    /// surrounds `u`.
    SurroundingLoops { u: HexVertex, k_max: usize },
    /// Size of the inner boundary of the breakup component of `u`. Needs the
    /// ground-0 boundary condition; recorded as NaN otherwise.
    BreakupBoundary { u: HexVertex },
}

impl Observable {
    pub fn columns(&self) -> Vec<String> {
        match self {
            Observable::EdgeCount => vec!["o".into()],
            Observable::LoopCount => vec!["loops".into()],
            Observable::FlowerDensity => vec!["rho0".into(), "rho1".into(), "rho2".into()],
            Observable::SurroundingLoops { k_max, .. } => (6..=*k_max)
                .step_by(2)
                .map(|k| format!("surround{k}"))
                .collect(),
            Observable::BreakupBoundary { .. } => vec!["breakup".into()],
        }
    }
}

/// Run length and sampling schedule, all in sweeps of `faces` steps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub sweeps: u64,
    pub burn_in: u64,
    pub thin: u64,
    pub seed: u64,
    pub observables: Vec<Observable>,
}

impl RunConfig {
    pub fn new(sweeps: u64, burn_in: u64, thin: u64, seed: u64) -> Self {
        RunConfig {
            sweeps,
            burn_in,
            thin,
            seed,
            observables: Vec::new(),
        }
    }

    pub fn observe(mut self, o: Observable) -> Self {
        self.observables.push(o);
        self
    }

    fn validate(&self) -> Result<()> {
        if self.thin == 0 {
            return Err(Error::Parameter("thin must be positive".into()));
        }
        Ok(())
    }
}

/// Recorded observables, one row per sample.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ObservableTrace {
    pub columns: Vec<String>,
    pub steps: Vec<u64>,
    pub rows: Vec<Vec<f64>>,
}

impl ObservableTrace {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    /// Column means, ignoring NaN entries.
    pub fn means(&self) -> Vec<f64> {
        (0..self.columns.len())
            .map(|j| {
                let vals: Vec<f64> = self
                    .rows
                    .iter()
                    .map(|r| r[j])
                    .filter(|v| !v.is_nan())
                    .collect();
                if vals.is_empty() {
                    f64::NAN
                } else {
                    vals.iter().sum::<f64>() / vals.len() as f64
                }
            })
            .collect()
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::from("step");
        for c in &self.columns {
            out.push('\t');
            out.push_str(c);
        }
        out.push('\n');
        for (step, row) in self.steps.iter().zip(&self.rows) {
            write!(out, "{step}").unwrap();
            for v in row {
                write!(out, "\t{}", format_value(*v)).unwrap();
            }
            out.push('\n');
        }
        out
    }
}

fn format_value(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v:.6}")
    }
}

/// Traces of several chains, concatenated with a leading chain column.
pub fn merged_tsv(traces: &[ObservableTrace]) -> String {
    let mut out = String::from("chain\tstep");
    if let Some(t) = traces.first() {
        for c in &t.columns {
            out.push('\t');
            out.push_str(c);
        }
    }
    out.push('\n');
    for (i, t) in traces.iter().enumerate() {
        for line in t.to_tsv().lines().skip(1) {
            writeln!(out, "{i}\t{line}").unwrap();
        }
    }
    out
}

/// A running chain.
#[derive(Clone, Debug)]
pub struct ChainState {
    domain: Domain,
    bc: BoundaryCondition,
    params: ModelParams,
    state: LocalState,
    mask: Vec<u64>,
    rng: ChaCha8Rng,
    steps: u64,
    accepted: u64,
}

impl ChainState {
    /// Start from the boundary condition's own configuration inside the
    /// domain (the empty configuration for vacant boundaries). Infinite edge
    /// weight is refused unless `allow_nonergodic` is set.
    pub fn new(
        h: &Domain,
        bc: &BoundaryCondition,
        params: ModelParams,
        seed: u64,
        stream: u64,
        allow_nonergodic: bool,
    ) -> Result<Self> {
        if params.x.is_infinite() && !allow_nonergodic {
            return Err(Error::NonErgodic);
        }
        if let BoundaryCondition::Explicit(xi) = bc {
            if let Some(v) = crate::loopcfg::odd_vertex(xi.edges()) {
                return Err(Error::Parity(v));
            }
        }
        let g = Arc::new(LocalGraph::new(h, &bc.frozen_edges(h)));
        let state = LocalState::new(g, &bc.inner_edges(h));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Ok(ChainState {
            domain: h.clone(),
            bc: bc.clone(),
            params,
            state,
            mask: vec![0; h.faces().len().div_ceil(64)],
            rng,
            steps: 0,
            accepted: 0,
        })
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn o(&self) -> usize {
        self.state.o()
    }

    pub fn loops(&self) -> usize {
        self.state.loops()
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn acceptance_rate(&self) -> f64 {
        if self.steps == 0 {
            0.0
        } else {
            self.accepted as f64 / self.steps as f64
        }
    }

    /// Current configuration including the frozen boundary edges next to
    /// the domain.
    pub fn config(&self) -> LoopConfig {
        self.state.config()
    }

    /// Faces flipped an odd number of times since the start, as a bit mask
    /// over `domain().faces()`. Matches the mask convention of
    /// [`crate::exact::Enumeration`]. `None` above 64 faces.
    pub fn face_mask(&self) -> Option<u64> {
        (self.mask.len() <= 1).then(|| self.mask.first().copied().unwrap_or(0))
    }

    /// Metropolis acceptance of a move with the given changes.
    fn accept(&self, d_o: i64, d_l: i64, u: f64) -> bool {
        let ln_n = self.params.n.ln();
        match self.params.x {
            EdgeWeight::Finite(x) => {
                let r = d_o as f64 * x.ln() + d_l as f64 * ln_n;
                r >= 0.0 || u < r.exp()
            }
            EdgeWeight::Infinite => match d_o {
                d if d > 0 => true,
                0 => {
                    let r = d_l as f64 * ln_n;
                    r >= 0.0 || u < r.exp()
                }
                _ => false,
            },
        }
    }

    /// One proposal. Returns whether it was accepted.
    pub fn step(&mut self) -> bool {
        let nf = self.domain.faces().len();
        if nf == 0 {
            self.steps += 1;
            return false;
        }
        let f = self.rng.random_range(0..nf);
        let u: f64 = self.rng.random();
        let (d_o, d_l) = self.state.flip(f);
        let ok = self.accept(d_o, d_l, u);
        if ok {
            self.mask[f / 64] ^= 1 << (f % 64);
            self.accepted += 1;
        } else {
            self.state.flip(f);
        }
        self.steps += 1;
        if cfg!(debug_assertions) && self.steps.is_multiple_of(10_000) {
            assert_eq!(
                self.state.fresh_counts(),
                (self.state.o(), self.state.loops()),
                "cache drift"
            );
        }
        ok
    }

    /// `faces` steps.
    pub fn sweep(&mut self) {
        for _ in 0..self.domain.faces().len().max(1) {
            self.step();
        }
    }

    pub fn flower_density(&self) -> [f64; 3] {
        let mut hits = [0usize; 3];
        let mut total = [0usize; 3];
        for (f, z) in self.domain.faces().iter().enumerate() {
            let c = z.color() as usize;
            total[c] += 1;
            if self.state.is_face_flower(f) {
                hits[c] += 1;
            }
        }
        std::array::from_fn(|c| {
            if total[c] == 0 {
                0.0
            } else {
                hits[c] as f64 / total[c] as f64
            }
        })
    }

    /// Indicator for each even `k ≤ k_max` of a length-`k` loop surrounding `u`.
    pub fn surrounding_loops(&self, u: HexVertex, k_max: usize) -> Vec<bool> {
        let mut out = vec![false; (6..=k_max).step_by(2).count()];
        for l in loops_of(&self.config()) {
            let k = l.len();
            if (6..=k_max).contains(&k) && l.surrounds(u) {
                out[(k - 6) / 2] = true;
            }
        }
        out
    }

    /// `|∂C(ω, u)|` under the ground-0 boundary condition.
    pub fn breakup_boundary(&self, u: HexVertex) -> Result<usize> {
        if self.bc != BoundaryCondition::Ground(0) {
            return Err(Error::Precondition(
                "breakup needs the ground-0 boundary condition".into(),
            ));
        }
        Ok(breakup(&self.config(), u, &self.domain)?.boundary.len())
    }

    fn record(&self, obs: &[Observable], row: &mut Vec<f64>) {
        for o in obs {
            match o {
                Observable::EdgeCount => row.push(self.o() as f64),
                Observable::LoopCount => row.push(self.loops() as f64),
                Observable::FlowerDensity => row.extend(self.flower_density()),
                Observable::SurroundingLoops { u, k_max } => row.extend(
                    self.surrounding_loops(*u, *k_max)
                        .into_iter()
                        .map(|b| b as u8 as f64),
                ),
                Observable::BreakupBoundary { u } => row.push(
                    self.breakup_boundary(*u)
                        .map(|k| k as f64)
                        .unwrap_or(f64::NAN),
                ),
            }
        }
    }

    /// Burn in, then run `sweeps` sweeps recording every `thin` sweeps.
    pub fn run(&mut self, rc: &RunConfig) -> Result<ObservableTrace> {
        rc.validate()?;
        let mut trace = ObservableTrace {
            columns: rc.observables.iter().flat_map(|o| o.columns()).collect(),
            ..Default::default()
        };
        for _ in 0..rc.burn_in {
            self.sweep();
        }
        for s in 1..=rc.sweeps {
            self.sweep();
            if s % rc.thin == 0 {
                let mut row = Vec::with_capacity(trace.columns.len());
                self.record(&rc.observables, &mut row);
                trace.steps.push(self.steps);
                trace.rows.push(row);
            }
        }
        Ok(trace)
    }

    /// Visit counts of face masks, sampled after every sweep.
    pub fn state_histogram(&mut self, burn_in: u64, sweeps: u64) -> Result<HashMap<u64, u64>> {
        if self.face_mask().is_none() {
            return Err(Error::TooLarge {
                faces: self.domain.faces().len(),
                cap: 64,
            });
        }
        for _ in 0..burn_in {
            self.sweep();
        }
        let mut counts = HashMap::new();
        for _ in 0..sweeps {
            self.sweep();
            *counts.entry(self.mask[0]).or_insert(0) += 1;
        }
        Ok(counts)
    }
}

/// Run `chains` independent chains with seed `rc.seed` and streams
/// `0..chains`. Returns each chain's trace and final configuration.
pub fn run_chains(
    h: &Domain,
    bc: &BoundaryCondition,
    params: ModelParams,
    rc: &RunConfig,
    chains: usize,
    allow_nonergodic: bool,
    exec: Execution,
) -> Result<Vec<(ObservableTrace, LoopConfig)>> {
    rc.validate()?;
    ChainState::new(h, bc, params, rc.seed, 0, allow_nonergodic)?;
    let results = map_indexed(exec, chains, |i| {
        let mut c = ChainState::new(h, bc, params, rc.seed, i as u64, allow_nonergodic)?;
        let t = c.run(rc)?;
        Ok((t, c.config()))
    });
    results.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{EnumOptions, EnumeratedMeasure, Enumeration};
    use crate::lattice::HexCoord;

    fn params(n: f64, x: f64) -> ModelParams {
        ModelParams::new(n, x).unwrap()
    }

    #[test]
    fn infinite_weight_is_refused_without_override() {
        let h = Domain::hexagon(HexCoord::ORIGIN);
        let p = ModelParams::with_weight(2.0, EdgeWeight::Infinite).unwrap();
        assert_eq!(
            ChainState::new(&h, &BoundaryCondition::Vacant, p, 1, 0, false).unwrap_err(),
            Error::NonErgodic
        );
        assert!(ChainState::new(&h, &BoundaryCondition::Vacant, p, 1, 0, true).is_ok());
    }

    #[test]
    fn acceptance_of_isolated_flip() {
        let h = Domain::hexagon(HexCoord::ORIGIN);
        let c = ChainState::new(
            &h,
            &BoundaryCondition::Vacant,
            params(2.0, 0.5),
            1,
            0,
            false,
        )
        .unwrap();
        // n x^6 = 1/32
        assert!(c.accept(6, 1, 0.03));
        assert!(!c.accept(6, 1, 0.032));
        assert!(c.accept(-6, -1, 0.99));
    }

    #[test]
    fn zero_sweeps_give_empty_trace() {
        let h = Domain::flower(HexCoord::ORIGIN);
        let mut c = ChainState::new(
            &h,
            &BoundaryCondition::Vacant,
            params(1.0, 1.0),
            3,
            0,
            false,
        )
        .unwrap();
        let t = c
            .run(&RunConfig::new(0, 0, 1, 3).observe(Observable::EdgeCount))
            .unwrap();
        assert!(t.is_empty());
        assert_eq!(c.config(), LoopConfig::empty());
    }

    #[test]
    fn runs_are_deterministic() {
        let h = Domain::flower(HexCoord::ORIGIN);
        let rc = RunConfig::new(200, 10, 5, 42)
            .observe(Observable::EdgeCount)
            .observe(Observable::LoopCount);
        let run = || {
            let mut c = ChainState::new(
                &h,
                &BoundaryCondition::Ground(0),
                params(8.0, 2.0),
                42,
                0,
                false,
            )
            .unwrap();
            (c.run(&rc).unwrap(), c.config())
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn chains_agree_across_execution_modes() {
        let h = Domain::flower(HexCoord::ORIGIN);
        let rc = RunConfig::new(50, 0, 1, 9).observe(Observable::FlowerDensity);
        let p = params(2.0, 1.0);
        let a = run_chains(
            &h,
            &BoundaryCondition::Vacant,
            p,
            &rc,
            4,
            false,
            Execution::Sequential,
        )
        .unwrap();
        let b = run_chains(
            &h,
            &BoundaryCondition::Vacant,
            p,
            &rc,
            4,
            false,
            Execution::Parallel,
        )
        .unwrap();
        assert_eq!(a, b);
        assert_ne!(a[0].0, a[1].0);
    }

    #[test]
    fn face_mask_matches_enumeration() {
        let h = Domain::flower(HexCoord::ORIGIN);
        let bc = BoundaryCondition::Ground(1);
        let e = Enumeration::new(&h, &bc, EnumOptions::default()).unwrap();
        let mut c = ChainState::new(&h, &bc, params(1.0, 1.0), 5, 0, false).unwrap();
        for _ in 0..50 {
            c.sweep();
            assert_eq!(e.mask_of(&c.config()), c.face_mask());
        }
    }

    #[test]
    fn ground_state_observables() {
        let h = Domain::flower(HexCoord::ORIGIN);
        let c = ChainState::new(
            &h,
            &BoundaryCondition::Ground(0),
            params(8.0, 2.0),
            1,
            0,
            false,
        )
        .unwrap();
        assert_eq!(c.flower_density(), [1.0, 0.0, 0.0]);
        let u = HexCoord::ORIGIN.vertices()[0];
        assert_eq!(c.surrounding_loops(u, 12), vec![true, false, false, false]);
        assert_eq!(c.breakup_boundary(u).unwrap(), 0);
        let v = ChainState::new(
            &h,
            &BoundaryCondition::Vacant,
            params(8.0, 2.0),
            1,
            0,
            false,
        )
        .unwrap();
        assert_eq!(v.flower_density(), [0.0; 3]);
        assert_eq!(v.surrounding_loops(u, 12), vec![false; 4]);
    }

    #[test]
    fn two_state_chain_matches_closed_form() {
        // H1 alternates between empty and one trivial loop.
        let h = Domain::hexagon(HexCoord::ORIGIN);
        let (n, x) = (2.0, 0.9_f64);
        let mut c =
            ChainState::new(&h, &BoundaryCondition::Vacant, params(n, x), 11, 0, false).unwrap();
        let hist = c.state_histogram(100, 1_000_000).unwrap();
        let p = n * x.powi(6) / (1.0 + n * x.powi(6));
        let got = *hist.get(&1).unwrap_or(&0) as f64 / 1e6;
        // two-state chain: the lag-one autocorrelation is 1 - a - b
        let a = (n * x.powi(6)).min(1.0);
        let b = (1.0 / (n * x.powi(6))).min(1.0);
        let tau = (2.0 - a - b) / (a + b);
        let sigma = (p * (1.0 - p) * tau.max(1.0) / 1e6).sqrt();
        assert!(
            (got - p).abs() < 4.0 * sigma,
            "got {got}, want {p} ± {sigma}"
        );
    }

    #[test]
    fn every_configuration_of_the_flower_is_visited() {
        let h = Domain::flower(HexCoord::ORIGIN);
        let mut c = ChainState::new(
            &h,
            &BoundaryCondition::Vacant,
            params(1.0, 1.0),
            2,
            0,
            false,
        )
        .unwrap();
        let hist = c.state_histogram(0, 20_000).unwrap();
        assert_eq!(hist.len(), 128);
    }

    #[test]
    fn ordered_phase_prefers_boundary_colour() {
        let h = Domain::flower(HexCoord::ORIGIN);
        let p = params(8.0, 2.0);
        let mut c = ChainState::new(&h, &BoundaryCondition::Ground(0), p, 7, 0, false).unwrap();
        let t = c
            .run(&RunConfig::new(20_000, 1000, 1, 7).observe(Observable::FlowerDensity))
            .unwrap();
        let m = t.means();
        assert!(m[0] > m[1] && m[0] > m[2], "{m:?}");
        let mu =
            EnumeratedMeasure::build(&h, &BoundaryCondition::Ground(0), p, EnumOptions::default())
                .unwrap();
        let exact = mu.probability(|w| w.is_flower(HexCoord::ORIGIN));
        assert!((m[0] - exact).abs() < 0.05, "{} vs {exact}", m[0]);
    }
}
