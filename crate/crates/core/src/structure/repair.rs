use std::collections::BTreeSet;

use crate::circuits::Circuit;
use crate::error::{Error, Result};
use crate::lattice::{HexCoord, HexEdge, HexVertex};
use crate::loopcfg::{loops_of, Loop, LoopConfig};

use super::{clusters_inside, ClusterDecomposition};

/// The three parts of the repaired configuration.
#[derive(Clone, Debug)]
pub struct RepairPieces {
    /// The configuration on 0-clusters, unchanged.
    pub zero: BTreeSet<HexEdge>,
    /// The configuration on 1-clusters shifted down, united with that on
    /// 2-clusters shifted up.
    pub shifted: BTreeSet<HexEdge>,
    /// The 0 ground state on the bad edges.
    pub ground: BTreeSet<HexEdge>,
    pub decomposition: ClusterDecomposition,
}

impl RepairPieces {
    pub fn union(&self) -> BTreeSet<HexEdge> {
        self.zero
            .iter()
            .chain(&self.shifted)
            .chain(&self.ground)
            .copied()
            .collect()
    }
}

fn check_pre(omega: &LoopConfig, gamma: &Circuit) -> Result<()> {
    if !gamma.avoids_color(0) {
        return Err(Error::Precondition("circuit meets colour 0".into()));
    }
    let int = gamma.interior();
    if let Some(e) = omega.edges().iter().find(|e| !int.edges.contains(e)) {
        return Err(Error::Precondition(format!(
            "edge {e} is not inside the circuit"
        )));
    }
    Ok(())
}

pub fn repair_pieces(omega: &LoopConfig, gamma: &Circuit) -> Result<RepairPieces> {
    check_pre(omega, gamma)?;
    let d = clusters_inside(omega, gamma)?;
    let on =
        |ec: &BTreeSet<HexEdge>| -> Vec<HexEdge> { d.omega_in.intersection(ec).copied().collect() };
    let zero: BTreeSet<HexEdge> = on(d.e0()).into_iter().collect();
    let shifted: BTreeSet<HexEdge> = on(d.e1())
        .into_iter()
        .map(|e| e.shift_down())
        .chain(on(d.e2()).into_iter().map(|e| e.shift_up()))
        .collect();
    let ground: BTreeSet<HexEdge> = d
        .bad
        .iter()
        .copied()
        .filter(|e| e.in_ground_state(0))
        .collect();
    Ok(RepairPieces {
        zero,
        shifted,
        ground,
        decomposition: d,
    })
}

/// Shift the 1- and 2-clusters into the 0-phase and overwrite bad edges by
/// the 0 ground state.
pub fn repair_map(omega: &LoopConfig, gamma: &Circuit) -> Result<LoopConfig> {
    let pieces = repair_pieces(omega, gamma)?;
    LoopConfig::new(pieces.union())
        .map_err(|e| Error::Identity(format!("repaired configuration: {e}")))
}

/// Changes in edge and loop count under the repair map with the quantities
/// that control them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightDelta {
    pub d_o: i64,
    pub d_l: i64,
    pub v: BTreeSet<HexVertex>,
    pub v_prime: BTreeSet<HexVertex>,
    pub dbl: BTreeSet<HexCoord>,
    /// Edges and loops of the configuration outside every cluster.
    pub bar_edges: usize,
    pub bar_loops: usize,
}

/// Compute the weight change directly and check it against the cluster
/// quantities: `do = |V'|`, `6 dL = |V| - 6 L(bar)` and
/// `30 dL >= 2|V| + 3|V'|`.
pub fn weight_delta(omega: &LoopConfig, gamma: &Circuit) -> Result<WeightDelta> {
    let pieces = repair_pieces(omega, gamma)?;
    weight_delta_of(&pieces)
}

fn repaired_and_bar(pieces: &RepairPieces) -> Result<(LoopConfig, LoopConfig, LoopConfig)> {
    let d = &pieces.decomposition;
    let repaired = LoopConfig::new(pieces.union())
        .map_err(|e| Error::Identity(format!("repaired configuration: {e}")))?;
    let omega_in = LoopConfig::new(d.omega_in.clone())?;
    let bar = LoopConfig::new(d.omega_in.intersection(&d.bar).copied())
        .map_err(|e| Error::Identity(format!("configuration outside clusters: {e}")))?;
    Ok((repaired, omega_in, bar))
}

pub(crate) fn weight_delta_of(pieces: &RepairPieces) -> Result<WeightDelta> {
    let d = &pieces.decomposition;
    let (repaired, omega_in, bar_cfg) = repaired_and_bar(pieces)?;
    let d_o = repaired.len() as i64 - omega_in.len() as i64;
    let d_l = loops_of(&repaired).len() as i64 - loops_of(&omega_in).len() as i64;
    let bar_loops = loops_of(&bar_cfg).len();
    let (v, vp) = (d.v.len() as i64, d.v_prime.len() as i64);
    if d_o != vp {
        return Err(Error::Identity(format!(
            "edge change {d_o} but |V'| = {vp}"
        )));
    }
    if v % 6 != 0 || d_l != v / 6 - bar_loops as i64 {
        return Err(Error::Identity(format!(
            "loop change {d_l} but |V| = {v}, bar loops = {bar_loops}"
        )));
    }
    if 30 * d_l < 2 * v + 3 * vp {
        return Err(Error::Identity(format!(
            "loop gain {d_l} below |V|/15 + |V'|/10 with |V| = {v}, |V'| = {vp}"
        )));
    }
    Ok(WeightDelta {
        d_o,
        d_l,
        v: d.v.clone(),
        v_prime: d.v_prime.clone(),
        dbl: d.dbl.clone(),
        bar_edges: bar_cfg.len(),
        bar_loops,
    })
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs()))
}

/// `phi(R omega) - phi(omega)` for a functional on loops that is invariant
/// under vertical shifts, checked against `phi(hexagon) |V| / 6 - phi(bar)`.
pub fn functional_delta<F: Fn(&Loop) -> f64>(
    phi: F,
    omega: &LoopConfig,
    gamma: &Circuit,
) -> Result<f64> {
    let trivial =
        loops_of(&LoopConfig::trivial_loops([HexCoord::ORIGIN]).expect("one hexagon")).remove(0);
    for l in std::iter::once(trivial).chain(loops_of(omega)) {
        let (a, b) = (phi(&l), phi(&l.shift_up()));
        if !close(a, b) {
            return Err(Error::Invariance(format!("{a} before shift, {b} after")));
        }
    }
    let pieces = repair_pieces(omega, gamma)?;
    functional_delta_of(&phi, &pieces)
}

/// The functional identity on precomputed pieces, without the invariance
/// spot-check.
pub(crate) fn functional_delta_of<F: Fn(&Loop) -> f64>(
    phi: F,
    pieces: &RepairPieces,
) -> Result<f64> {
    let phi_hex =
        phi(&loops_of(&LoopConfig::trivial_loops([HexCoord::ORIGIN]).expect("one hexagon"))[0]);
    let total = |c: &LoopConfig| loops_of(c).iter().map(&phi).sum::<f64>();
    let d = &pieces.decomposition;
    let (repaired, omega_in, bar) = repaired_and_bar(pieces)?;
    let delta = total(&repaired) - total(&omega_in);
    let want = phi_hex * d.v.len() as f64 / 6.0 - total(&bar);
    if !close(delta, want) {
        return Err(Error::Identity(format!(
            "functional changed by {delta}, expected {want}"
        )));
    }
    Ok(delta)
}

/// `(|V_bad|, |V|, |dbl|)` after checking `|V_bad| = |V| + 6 |dbl|`.
pub fn vbad_identity_check(omega: &LoopConfig, gamma: &Circuit) -> Result<(usize, usize, usize)> {
    check_pre(omega, gamma)?;
    vbad_of(&clusters_inside(omega, gamma)?)
}

pub(crate) fn vbad_of(d: &ClusterDecomposition) -> Result<(usize, usize, usize)> {
    let (vb, v, dbl) = (d.v_bad().len(), d.v.len(), d.dbl.len());
    if vb != v + 6 * dbl {
        return Err(Error::Identity(format!(
            "|V_bad| = {vb}, |V| = {v}, |dbl| = {dbl}"
        )));
    }
    Ok((vb, v, dbl))
}
