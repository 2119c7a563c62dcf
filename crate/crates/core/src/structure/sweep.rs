//! Every identity of the repair map, checked on each configuration of a
//! domain of type 0.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::circuits::{vertex_boundary, Circuit};
use crate::error::{Error, Result};
use crate::exact::{EnumOptions, Enumeration};
use crate::lattice::{connected_components, HexEdge, HexVertex};
use crate::loopcfg::{BoundaryCondition, Domain, Loop, LoopConfig};
use crate::par::map_indexed;

use super::repair::{functional_delta_of, vbad_of, weight_delta_of};
use super::{repair_pieces, RepairPieces};

/// Names of the checked laws, in report order.
pub const LAWS: [&str; 11] = [
    "repair-valid",
    "pieces-disjoint",
    "parts-disjoint",
    "edge-change",
    "loop-change",
    "vbad",
    "functional",
    "overlap",
    "e12",
    "v-characterisation",
    "v-connected",
];

/// Outcome for one configuration.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConfigCheck {
    pub d_o: i64,
    pub d_l: i64,
    pub failures: Vec<(&'static str, String)>,
}

impl ConfigCheck {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

type LoopFunctional = fn(&Loop) -> f64;

fn disjoint(a: &BTreeSet<HexEdge>, b: &BTreeSet<HexEdge>) -> bool {
    a.intersection(b).next().is_none()
}

fn endpoints(es: &BTreeSet<HexEdge>) -> BTreeSet<HexVertex> {
    es.iter().flat_map(|e| e.endpoints()).collect()
}

/// Check every law on one configuration inside `gamma`.
pub fn check_configuration(omega: &LoopConfig, gamma: &Circuit) -> Result<ConfigCheck> {
    let pieces = repair_pieces(omega, gamma)?;
    Ok(check_pieces(&pieces))
}

fn check_pieces(pieces: &RepairPieces) -> ConfigCheck {
    let mut out = ConfigCheck::default();
    let mut failures: Vec<(&'static str, String)> = Vec::new();
    let d = &pieces.decomposition;

    match LoopConfig::new(pieces.union()) {
        Ok(r) => {
            if let Some(e) = r.edges().iter().find(|e| !d.interior.edges.contains(e)) {
                failures.push((
                    "repair-valid",
                    format!("repaired edge {e} leaves the interior"),
                ));
            }
        }
        Err(e) => failures.push(("repair-valid", e.to_string())),
    }
    if !disjoint(&pieces.zero, &pieces.shifted)
        || !disjoint(&pieces.zero, &pieces.ground)
        || !disjoint(&pieces.shifted, &pieces.ground)
    {
        failures.push(("pieces-disjoint", "repair pieces overlap".into()));
    }
    let on = |es: &BTreeSet<HexEdge>| -> BTreeSet<HexEdge> {
        d.omega_in.intersection(es).copied().collect()
    };
    let parts = [on(d.e0()), on(d.e1()), on(d.e2()), on(&d.bar)];
    for i in 0..4 {
        for j in i + 1..4 {
            if !disjoint(&parts[i], &parts[j]) {
                failures.push(("parts-disjoint", format!("parts {i} and {j} overlap")));
            }
        }
    }

    match weight_delta_of(pieces) {
        Ok(w) => {
            out.d_o = w.d_o;
            out.d_l = w.d_l;
        }
        Err(e) => {
            let msg = e.to_string();
            let law = if msg.contains("edge change") {
                "edge-change"
            } else {
                "loop-change"
            };
            failures.push((law, msg));
        }
    }
    if let Err(e) = vbad_of(d) {
        failures.push(("vbad", e.to_string()));
    }
    let phis: [(&str, LoopFunctional); 3] = [
        ("one", |_| 1.0),
        ("length", |l| l.len() as f64),
        ("length^2", |l| (l.len() * l.len()) as f64),
    ];
    for (name, phi) in phis {
        if let Err(e) = functional_delta_of(phi, pieces) {
            failures.push(("functional", format!("{name}: {e}")));
        }
    }

    // distinct clusters: same colour means no shared vertex, different
    // colours means nested or edge-disjoint
    for (i, a) in d.clusters.iter().enumerate() {
        for b in &d.clusters[i + 1..] {
            let ok = if a.color == b.color {
                endpoints(&a.edges).is_disjoint(&endpoints(&b.edges))
            } else {
                a.edges.is_subset(&b.edges)
                    || b.edges.is_subset(&a.edges)
                    || disjoint(&a.edges, &b.edges)
            };
            if !ok {
                failures.push((
                    "overlap",
                    format!("clusters {} and {} overlap", a.sigma, b.sigma),
                ));
            }
        }
    }

    let s1: BTreeSet<HexEdge> = parts[1].iter().map(|e| e.shift_down()).collect();
    let s2: BTreeSet<HexEdge> = parts[2].iter().map(|e| e.shift_up()).collect();
    let inter: BTreeSet<HexEdge> = s1.intersection(&s2).copied().collect();
    let dbl_edges: BTreeSet<HexEdge> = d.dbl.iter().flat_map(|z| z.edges()).collect();
    if inter != dbl_edges {
        failures.push((
            "e12",
            format!(
                "{} shared shifted edges, {} double-clustered edges",
                inter.len(),
                dbl_edges.len()
            ),
        ));
    }
    if let Some(z) = d.dbl.iter().find(|z| z.color() != 0) {
        failures.push((
            "e12",
            format!("double-clustered hexagon {z} has colour {}", z.color()),
        ));
    }

    for &x in &d.interior.vertices {
        let es = x.edges();
        let mut owners = BTreeSet::new();
        let mut loose = false;
        for e in es {
            let holders: Vec<usize> = d
                .clusters
                .iter()
                .enumerate()
                .filter(|(_, g)| g.contains_edge(e))
                .map(|(i, _)| i)
                .collect();
            loose |= holders.is_empty();
            owners.extend(holders);
        }
        let alt = loose || owners.len() >= 2;
        if alt != d.v.contains(&x) {
            failures.push(("v-characterisation", format!("vertex {x}")));
        }
    }
    if !d.v_prime.is_subset(&d.v) {
        failures.push(("v-characterisation", "V' is not inside V".into()));
    }

    if vertex_boundary(&d.interior.vertices).is_subset(&d.v)
        && connected_components(&d.v, |x| x.hexcross_neighbors()).len() > 1
    {
        failures.push((
            "v-connected",
            format!("{} vertices in several pieces", d.v.len()),
        ));
    }

    out.failures = failures;
    out
}

/// Per-law violation counts over every configuration of a domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepairSweep {
    pub configs: usize,
    pub violations: BTreeMap<&'static str, usize>,
    /// First few failing configurations by face mask.
    pub examples: Vec<(u64, String)>,
    pub max_d_o: i64,
    pub max_d_l: i64,
    /// Per-configuration diagnostic lines.
    pub diagnostics: Option<String>,
}

impl RepairSweep {
    pub fn total_violations(&self) -> usize {
        self.violations.values().sum()
    }

    pub fn all_hold(&self) -> bool {
        self.total_violations() == 0
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        for law in LAWS {
            writeln!(
                s,
                "law\t{law}\t{}",
                self.violations.get(law).copied().unwrap_or(0)
            )
            .unwrap();
        }
        writeln!(s, "configs\t{}", self.configs).unwrap();
        if self.all_hold() {
            s.push_str("all identities hold\n");
        } else {
            writeln!(s, "{} violations", self.total_violations()).unwrap();
            for (m, e) in &self.examples {
                writeln!(s, "example\t{m}\t{e}").unwrap();
            }
        }
        s
    }
}

const CHUNK: usize = 256;

/// Run [`check_configuration`] over every vacant-boundary configuration of
/// `h`, inside its own circuit. `h` must have type 0. With `diagnostics`,
/// the cluster report of every configuration is kept.
pub fn repair_sweep(h: &Domain, opts: EnumOptions, diagnostics: bool) -> Result<RepairSweep> {
    let gamma = h.circuit().clone();
    if !gamma.avoids_color(0) {
        return Err(Error::Precondition(
            "repair sweep needs a domain of type 0".into(),
        ));
    }
    let en = Enumeration::new(h, &BoundaryCondition::Vacant, opts)?;
    let n = en.len();
    let chunks = map_indexed(
        opts.exec,
        n.div_ceil(CHUNK),
        |c| -> Result<Vec<(ConfigCheck, Option<String>)>> {
            (c * CHUNK..((c + 1) * CHUNK).min(n))
                .map(|m| {
                    let omega = en.config(m as u64);
                    let pieces = repair_pieces(&omega, &gamma)?;
                    let check = check_pieces(&pieces);
                    let diag = diagnostics.then(|| {
                        let mut s = format!("config\t{m}\n");
                        for line in pieces.decomposition.report().lines() {
                            if let Some(rest) = line.strip_prefix("sizes\t") {
                                writeln!(s, "sizes\t{rest}\t{}\t{}", check.d_o, check.d_l).unwrap();
                            } else {
                                writeln!(s, "{line}").unwrap();
                            }
                        }
                        s
                    });
                    Ok((check, diag))
                })
                .collect()
        },
    );
    let mut sweep = RepairSweep {
        configs: n,
        violations: BTreeMap::new(),
        examples: Vec::new(),
        max_d_o: 0,
        max_d_l: 0,
        diagnostics: diagnostics.then(String::new),
    };
    let mut mask = 0u64;
    for chunk in chunks {
        for (check, diag) in chunk? {
            sweep.max_d_o = sweep.max_d_o.max(check.d_o);
            sweep.max_d_l = sweep.max_d_l.max(check.d_l);
            for (law, msg) in &check.failures {
                *sweep.violations.entry(law).or_insert(0) += 1;
                if sweep.examples.len() < 10 {
                    sweep.examples.push((mask, format!("{law}: {msg}")));
                }
            }
            if let (Some(all), Some(d)) = (sweep.diagnostics.as_mut(), diag) {
                all.push_str(&d);
            }
            mask += 1;
        }
    }
    Ok(sweep)
}
