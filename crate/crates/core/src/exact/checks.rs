//! Exhaustive verification of inequalities and exact identities on small
//! domains.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::lattice::{HexCoord, HexEdge, HexVertex};
use crate::loopcfg::{loops_of, BoundaryCondition, Domain, EdgeWeight, ModelParams};
use crate::par::map_indexed;

use super::rational::{pow_ratio, rational_probabilities};
use super::{EnumOptions, EnumeratedMeasure, Enumeration};

type Bits = Vec<u64>;

fn bits_of(h: &Domain, edges: &BTreeSet<HexEdge>) -> Bits {
    let mut b = vec![0u64; h.edges().len().div_ceil(64)];
    for e in edges {
        if let Some(i) = h.edge_index(*e) {
            b[i / 64] |= 1 << (i % 64);
        }
    }
    b
}

fn subset(a: &Bits, b: &Bits) -> bool {
    a.iter().zip(b).all(|(x, y)| x & !y == 0)
}

#[derive(Clone, Debug, PartialEq)]
pub struct PeierlsReport {
    /// Number of loop configurations `A` tested.
    pub checked: usize,
    /// `(mask of A, P(A in omega), bound)` for each violation.
    pub violations: Vec<(u64, f64, f64)>,
    /// Largest `P(A in omega) / bound` over all `A`.
    pub max_ratio: f64,
}

/// For every loop configuration `A` inside the domain, compare the
/// probability that `A` is contained in the random configuration with
/// `n^L(A) x^o(A)`.
pub fn peierls_check(
    h: &Domain,
    bc: &BoundaryCondition,
    p: &ModelParams,
    opts: EnumOptions,
) -> Result<PeierlsReport> {
    let EdgeWeight::Finite(x) = p.x else {
        return Err(Error::Parameter(
            "the bound needs a finite edge weight".into(),
        ));
    };
    let mu = EnumeratedMeasure::build(h, bc, *p, opts)?;
    let probs = mu.probabilities();
    let omega_bits: Vec<Bits> = (0..probs.len() as u64)
        .map(|m| bits_of(h, &mu.enumeration.inside_edges(m)))
        .collect();
    let vacant = Enumeration::new(h, &BoundaryCondition::Vacant, opts)?;
    let rows = map_indexed(opts.exec, vacant.len(), |a| {
        let edges = vacant.inside_edges(a as u64);
        let ab = bits_of(h, &edges);
        let prob: f64 = omega_bits
            .iter()
            .zip(&probs)
            .filter(|(w, _)| subset(&ab, w))
            .map(|(_, q)| q)
            .sum();
        let st = vacant.stats()[a];
        let bound = p.n.powi(st.loops as i32) * x.powi(st.o as i32);
        (a as u64, prob, bound)
    });
    let tol = 1e-12;
    let violations: Vec<(u64, f64, f64)> = rows
        .iter()
        .copied()
        .filter(|(_, pr, b)| *pr > b * (1.0 + tol) + tol)
        .collect();
    let max_ratio = rows.iter().map(|(_, pr, b)| pr / b).fold(0.0, f64::max);
    Ok(PeierlsReport {
        checked: rows.len(),
        violations,
        max_ratio,
    })
}

/// Probability of a loop of length `k` around `u` next to `k n (2x)^k`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LoopLengthBound {
    pub k: usize,
    pub probability: f64,
    pub bound: f64,
}

pub fn loop_length_check(mu: &EnumeratedMeasure, u: HexVertex) -> Result<Vec<LoopLengthBound>> {
    let EdgeWeight::Finite(x) = mu.params.x else {
        return Err(Error::Parameter(
            "the bound needs a finite edge weight".into(),
        ));
    };
    let n = mu.params.n;
    let mut by_len: BTreeMap<usize, f64> = BTreeMap::new();
    for m in 0..mu.enumeration.len() as u64 {
        let pr = mu.probability_of(m);
        let lens: BTreeSet<usize> = loops_of(&mu.enumeration.config(m))
            .into_iter()
            .filter(|l| l.surrounds(u))
            .map(|l| l.len())
            .collect();
        for k in lens {
            *by_len.entry(k).or_default() += pr;
        }
    }
    Ok(by_len
        .into_iter()
        .map(|(k, probability)| LoopLengthBound {
            k,
            probability,
            bound: k as f64 * n * (2.0 * x).powi(k as i32),
        })
        .collect())
}

/// Total-variation distance between the hard-hexagon measure with activity
/// `lambda` on the faces and the loop measure at `x = (lambda / n)^(1/6)`.
/// A set of pairwise non-adjacent faces is identified with the union of
/// their boundaries, whose face mask is the set itself.
pub fn hard_hexagon_compare(h: &Domain, n: f64, lambda: f64, opts: EnumOptions) -> Result<f64> {
    if lambda.is_nan() || lambda <= 0.0 {
        return Err(Error::Parameter(format!(
            "activity must be positive, got {lambda}"
        )));
    }
    let x = (lambda / n).powf(1.0 / 6.0);
    let mu =
        EnumeratedMeasure::build(h, &BoundaryCondition::Vacant, ModelParams::new(n, x)?, opts)?;
    let faces = h.faces();
    let k = faces.len();
    let adjacent: Vec<u64> = faces
        .iter()
        .map(|z| {
            faces
                .iter()
                .enumerate()
                .filter(|(_, w)| z.is_adjacent(**w))
                .fold(0u64, |acc, (j, _)| acc | 1 << j)
        })
        .collect();
    let independent = |m: u64| (0..k).all(|i| m >> i & 1 == 0 || m & adjacent[i] == 0);
    let hc: Vec<(u64, f64)> = (0..1u64 << k)
        .filter(|m| independent(*m))
        .map(|m| (m, m.count_ones() as f64 * lambda.ln()))
        .collect();
    let log_zhc = super::log_sum_exp(hc.iter().map(|(_, w)| *w));
    let mut hc_prob = vec![0.0; 1 << k];
    for (m, w) in hc {
        hc_prob[m as usize] = (w - log_zhc).exp();
    }
    let tv: f64 = mu
        .probabilities()
        .iter()
        .zip(&hc_prob)
        .map(|(a, b)| (a - b).abs())
        .sum::<f64>()
        / 2.0;
    Ok(tv)
}

#[derive(Clone, Debug, PartialEq)]
pub struct HeightReport {
    pub n: u32,
    pub height_functions: u64,
    pub configurations: usize,
    /// Largest absolute difference between the two distributions.
    pub max_abs_diff: BigRational,
}

impl HeightReport {
    pub fn exact_match(&self) -> bool {
        self.max_abs_diff.is_zero()
    }
}

/// Push the uniform-on-graph-homomorphisms measure, weighted by `x` per edge
/// between hexagons of different height, forward to loop configurations and
/// compare with the loop measure at loop weight `n`, exactly. Heights take
/// values in `{0, 1}` for `n = 1` and in the integers with steps of at most
/// one for `n = 2`; hexagons outside the faces are pinned to zero.
pub fn height_pushforward_check(
    h: &Domain,
    n: u32,
    x: &BigRational,
    opts: EnumOptions,
) -> Result<HeightReport> {
    if !(1..=2).contains(&n) {
        return Err(Error::Parameter(format!(
            "height representation needs n in {{1, 2}}, got {n}"
        )));
    }
    if *x <= BigRational::zero() {
        return Err(Error::Parameter("edge weight must be positive".into()));
    }
    let en = Enumeration::new(h, &BoundaryCondition::Vacant, opts)?;
    let faces = h.faces();
    let k = faces.len();
    let index: HashMap<HexCoord, usize> = faces.iter().enumerate().map(|(i, z)| (*z, i)).collect();
    // neighbours of each face: Some(face) or None for a pinned hexagon
    let nbrs: Vec<[Option<usize>; 6]> = faces
        .iter()
        .map(|z| z.neighbors().map(|w| index.get(&w).copied()))
        .collect();
    let range: Vec<i64> = if n == 1 {
        vec![0, 1]
    } else {
        (-(k as i64)..=k as i64).collect()
    };
    let by_config: HashMap<BTreeSet<HexEdge>, u64> = (0..en.len() as u64)
        .map(|m| (en.inside_edges(m), m))
        .collect();

    let mut weight: Vec<BigRational> = vec![BigRational::zero(); en.len()];
    let mut count = 0u64;
    let mut heights = vec![0i64; k];
    let mut failure: Option<Error> = None;
    // depth-first over faces in order
    fn rec(
        i: usize,
        heights: &mut Vec<i64>,
        ctx: &mut dyn FnMut(&[i64]),
        range: &[i64],
        nbrs: &[[Option<usize>; 6]],
        lipschitz: bool,
    ) {
        if i == heights.len() {
            ctx(heights);
            return;
        }
        for &val in range {
            let ok = !lipschitz
                || nbrs[i].iter().all(|nb| match nb {
                    None => val.abs() <= 1,
                    Some(j) if *j < i => (val - heights[*j]).abs() <= 1,
                    Some(_) => true,
                });
            if ok {
                heights[i] = val;
                rec(i + 1, heights, ctx, range, nbrs, lipschitz);
            }
        }
    }
    let mut visit = |hs: &[i64]| {
        count += 1;
        let mut edges = BTreeSet::new();
        for (i, z) in faces.iter().enumerate() {
            for (d, nb) in nbrs[i].iter().enumerate() {
                let other = nb.map_or(0, |j| hs[j]);
                if other != hs[i] {
                    edges.insert(HexEdge::between(*z, z.neighbor(d)).expect("adjacent"));
                }
            }
        }
        match by_config.get(&edges) {
            Some(&m) => weight[m as usize] += pow_ratio(x, edges.len() as u32),
            None => {
                failure = Some(Error::Identity(
                    "level lines are not a loop configuration".into(),
                ))
            }
        }
    };
    rec(0, &mut heights, &mut visit, &range, &nbrs, n == 2);
    if let Some(e) = failure {
        return Err(e);
    }
    let z = weight.iter().fold(BigRational::zero(), |a, w| a + w);
    let pushed: Vec<BigRational> = weight.into_iter().map(|w| w / &z).collect();
    let loop_probs = rational_probabilities(&en, &BigRational::from_integer(n.into()), x);
    let max_abs_diff = pushed
        .iter()
        .zip(&loop_probs)
        .map(|(a, b)| if a > b { a - b } else { b - a })
        .fold(BigRational::zero(), |m, d| if d > m { d } else { m });
    Ok(HeightReport {
        n,
        height_functions: count,
        configurations: en.len(),
        max_abs_diff,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PackingReport {
    pub max_edges: u32,
    pub optimal: usize,
    pub vertices: usize,
}

impl PackingReport {
    pub fn unique(&self) -> bool {
        self.optimal == 1
    }

    /// Whether the optimum visits every vertex.
    pub fn fully_packed(&self) -> bool {
        self.max_edges as usize == self.vertices
    }
}

/// Count the configurations with the largest number of edges.
pub fn unique_packing_check(h: &Domain, opts: EnumOptions) -> Result<PackingReport> {
    let en = Enumeration::new(h, &BoundaryCondition::Vacant, opts)?;
    let max_edges = en.stats().iter().map(|s| s.o).max().unwrap_or(0);
    let optimal = en.stats().iter().filter(|s| s.o == max_edges).count();
    Ok(PackingReport {
        max_edges,
        optimal,
        vertices: h.vertices().len(),
    })
}

pub fn unique_packing_rect(a: u32, b: u32, opts: EnumOptions) -> Result<PackingReport> {
    unique_packing_check(&Domain::packing_rect(a, b)?, opts)
}
