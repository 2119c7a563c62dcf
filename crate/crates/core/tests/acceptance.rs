//! End-to-end acceptance run. Every criterion is evaluated, one PASS/FAIL
//! line is printed for each, and the test fails if any criterion failed.
//! Run with `--nocapture` to see the lines on success.

use std::collections::BTreeSet;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use loopon::circuits::{
    circuit_of_vertex_set, merge_circuits, random_circuit, random_typed_circuit, vertex_boundary,
    Circuit,
};
use loopon::exact::{
    hard_hexagon_compare, height_pushforward_check, loop_length_check, peierls_check,
    rational_probabilities, unique_packing_rect, EnumOptions, EnumeratedMeasure, Enumeration,
};
use loopon::lattice::{connected_components, HexCoord, HexVertex};
use loopon::loopcfg::{BoundaryCondition, Domain, ModelParams};
use loopon::mcmc::{ChainState, Observable, RunConfig};
use loopon::spinint::{identity_report, IdentityRow, McOptions};
use loopon::structure::repair_sweep;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

fn params(n: f64, x: f64) -> ModelParams {
    ModelParams::new(n, x).unwrap()
}

fn flower() -> Domain {
    Domain::flower(HexCoord::ORIGIN)
}

fn exact_two_point() -> Outcome {
    let h = Domain::hexagon(HexCoord::ORIGIN);
    let en = Enumeration::new(&h, &BoundaryCondition::Vacant, EnumOptions::default())
        .map_err(|e| e.to_string())?;
    if en.len() != 2 {
        return Err(format!("{} configurations", en.len()));
    }
    for (n, x) in [
        (ratio(8, 1), ratio(1, 2)),
        (ratio(3, 2), ratio(2, 3)),
        (ratio(1, 1), ratio(5, 1)),
    ] {
        let probs = rational_probabilities(&en, &n, &x);
        let w = &n * x.pow(6);
        let want = &w / (BigRational::from_integer(1.into()) + &w);
        let m = en.mask_of(&en.config(1)).unwrap() as usize;
        if probs[m] != want {
            return Err(format!("n={n} x={x}: got {}, want {want}", probs[m]));
        }
    }
    let probs = rational_probabilities(&en, &ratio(8, 1), &ratio(1, 2));
    if probs[1] != ratio(1, 9) {
        return Err(format!("P = {} at n=8, x=1/2", probs[1]));
    }
    Ok("P(trivial loop) = 1/9 at n=8, x=1/2".into())
}

fn sampler_tv() -> Outcome {
    let h = flower();
    let mut notes = Vec::new();
    let mut bad = Vec::new();
    for (i, (n, x)) in [(1.0, 1.0), (8.0, 0.5), (8.0, 2.0)].into_iter().enumerate() {
        let p = params(n, x);
        let mu =
            EnumeratedMeasure::build(&h, &BoundaryCondition::Vacant, p, EnumOptions::default())
                .map_err(|e| e.to_string())?;
        let mut chain =
            ChainState::new(&h, &BoundaryCondition::Vacant, p, 2024 + i as u64, 0, false).unwrap();
        let sweeps = 1_000_000u64;
        let counts = chain.state_histogram(1000, sweeps).unwrap();
        let tv: f64 = mu
            .probabilities()
            .iter()
            .enumerate()
            .map(|(m, q)| {
                (counts.get(&(m as u64)).copied().unwrap_or(0) as f64 / sweeps as f64 - q).abs()
            })
            .sum::<f64>()
            / 2.0;
        notes.push(format!("({n},{x}) tv={tv:.4}"));
        if tv > 0.02 {
            bad.push(format!("({n},{x}) tv={tv:.4}"));
        }
    }
    if bad.is_empty() {
        Ok(notes.join(", "))
    } else {
        Err(bad.join(", "))
    }
}

fn zigzag() -> Domain {
    let hexes = [(0, 0), (1, 1), (2, -1), (3, 0), (4, -2), (5, -1), (6, -3)];
    Domain::from_hexagons(hexes.map(|(a, b)| HexCoord::new(a, b))).unwrap()
}

fn repair_identities() -> Outcome {
    let h = zigzag();
    if h.faces().len() != 12 || h.types() != BTreeSet::from([0]) {
        return Err(format!(
            "domain has {} faces and types {:?}",
            h.faces().len(),
            h.types()
        ));
    }
    let s = repair_sweep(&h, EnumOptions::default(), false).map_err(|e| e.to_string())?;
    if s.configs != 4096 {
        return Err(format!("{} configurations", s.configs));
    }
    if s.all_hold() {
        Ok(format!(
            "{} configurations, max do={}, max dL={}",
            s.configs, s.max_d_o, s.max_d_l
        ))
    } else {
        Err(s.summary().replace('\n', "; "))
    }
}

fn peierls() -> Outcome {
    let h = flower();
    let u = HexCoord::ORIGIN.vertices()[0];
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    for n in [2.0, 8.0] {
        for x in [0.3, 1.0, 2.0] {
            let p = params(n, x);
            let r = peierls_check(&h, &BoundaryCondition::Vacant, &p, EnumOptions::default())
                .map_err(|e| e.to_string())?;
            if !r.violations.is_empty() {
                return Err(format!(
                    "n={n} x={x}: {} subsets above the bound",
                    r.violations.len()
                ));
            }
            checked += r.checked;
            worst = worst.max(r.max_ratio);
            let mu =
                EnumeratedMeasure::build(&h, &BoundaryCondition::Vacant, p, EnumOptions::default())
                    .map_err(|e| e.to_string())?;
            for b in loop_length_check(&mu, u).map_err(|e| e.to_string())? {
                if b.probability > b.bound {
                    return Err(format!(
                        "n={n} x={x} k={}: {} > {}",
                        b.k, b.probability, b.bound
                    ));
                }
            }
        }
    }
    Ok(format!("{checked} subset checks, largest ratio {worst:.4}"))
}

fn spin_rows(seed: u64) -> Result<Vec<IdentityRow>, String> {
    identity_report(&[1, 2, 3], McOptions::new(1_000_000, seed)).map_err(|e| e.to_string())
}

fn spin_integrals() -> Outcome {
    let first = spin_rows(11)?;
    let mut retry: Option<Vec<IdentityRow>> = None;
    let mut retried = 0;
    for (k, r) in first.iter().enumerate() {
        if r.n == 1 && r.estimate.stderr == 0.0 && r.estimate.mean != r.target {
            return Err(format!(
                "{} n=1: {} != {}",
                r.identity, r.estimate.mean, r.target
            ));
        }
        if r.z().abs() <= 4.0 {
            continue;
        }
        retried += 1;
        let again =
            retry.get_or_insert_with(|| spin_rows(12).expect("same inputs succeeded before"));
        if again[k].z().abs() > 4.0 {
            return Err(format!(
                "{} n={}: z={:.2} then z={:.2}",
                r.identity,
                r.n,
                r.z(),
                again[k].z()
            ));
        }
    }
    let exact = first
        .iter()
        .filter(|r| r.n == 1 && r.estimate.stderr == 0.0)
        .count();
    let worst = first.iter().map(|r| r.z().abs()).fold(0.0, f64::max);
    Ok(format!(
        "{} rows, {exact} exact at n=1, max |z|={worst:.2}, {retried} retried",
        first.len()
    ))
}

fn height_pushforward() -> Outcome {
    let mut notes = Vec::new();
    for (h, n, name) in [
        (flower(), 1, "flower"),
        (Domain::hexagon(HexCoord::ORIGIN), 2, "hexagon"),
    ] {
        for x in [ratio(1, 2), ratio(3, 1)] {
            let r = height_pushforward_check(&h, n, &x, EnumOptions::default())
                .map_err(|e| e.to_string())?;
            if !r.exact_match() {
                return Err(format!("{name} n={n} x={x}: differs by {}", r.max_abs_diff));
            }
            notes.push(format!("{name} n={n} x={x}"));
        }
    }
    Ok(format!("exact on {}", notes.join(", ")))
}

fn hard_hexagon() -> Outcome {
    let h = flower();
    let mut notes = Vec::new();
    let mut ok = true;
    for lambda in [1.0, 11.09017] {
        let tv = |n: f64| {
            hard_hexagon_compare(&h, n, lambda, EnumOptions::default()).map_err(|e| e.to_string())
        };
        let (small, large) = (tv(100.0)?, tv(10_000.0)?);
        ok &= large < small && small < 0.05;
        notes.push(format!(
            "lambda={lambda}: tv(1e2)={small:.4}, tv(1e4)={large:.4}"
        ));
    }
    if ok {
        Ok(notes.join(", "))
    } else {
        Err(notes.join(", "))
    }
}

fn hexcross_connected(vs: &BTreeSet<HexVertex>) -> bool {
    connected_components(vs, |x| x.hexcross_neighbors()).len() == 1
}

fn check_circuit(g: &Circuit) -> Result<(), String> {
    let (bb, comps) = g.window_components();
    let rim = comps
        .iter()
        .filter(|c| c.iter().any(|v| bb.vertex_on_rim(*v)))
        .count();
    if comps.len() != 2 || rim != 1 {
        return Err(format!("{g}: {} components, {rim} on the rim", comps.len()));
    }
    let int = g.interior();
    let h = Domain::from_circuit(g);
    if h.circuit() != g || circuit_of_vertex_set(&int.vertices).map_err(|e| e.to_string())? != *g {
        return Err(format!("{g}: round trip through its domain changes it"));
    }
    let near: BTreeSet<HexCoord> = g
        .hexagons()
        .iter()
        .flat_map(|z| std::iter::once(*z).chain(z.neighbors()))
        .chain(int.hexagons.iter().copied())
        .collect();
    for c in 0..3 {
        if !g.avoids_color(c) {
            continue;
        }
        for z in near.iter().filter(|z| z.color() == c) {
            if int.hexagons.contains(z) != z.vertices().iter().any(|v| int.vertices.contains(v)) {
                return Err(format!("{g}: interior-degree fails at {z}"));
            }
        }
    }
    if g.avoids_color(0) {
        let outer: BTreeSet<HexVertex> = int
            .vertices
            .iter()
            .flat_map(|v| v.neighbors())
            .filter(|w| !int.vertices.contains(w))
            .collect();
        if !hexcross_connected(&vertex_boundary(&int.vertices)) || !hexcross_connected(&outer) {
            return Err(format!(
                "{g}: boundary not connected in the augmented lattice"
            ));
        }
    }
    Ok(())
}

fn geometry() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut typed = 0;
    for i in 0..1000 {
        let g = if i % 2 == 0 {
            {
                let k = rng.random_range(1..80);
                random_circuit(&mut rng, k)
            }
        } else {
            {
                let k = rng.random_range(0..30);
                random_typed_circuit(&mut rng, 0, k)
            }
        };
        typed += g.avoids_color(0) as usize;
        check_circuit(&g)?;
    }
    for _ in 0..100 {
        let s = {
            let k = rng.random_range(1..60);
            random_circuit(&mut rng, k)
        };
        let t = {
            let k = rng.random_range(1..60);
            random_circuit(&mut rng, k)
        };
        let m = merge_circuits(&s, &t).map_err(|e| e.to_string())?;
        let mine = m.interior_vertices();
        let duals: BTreeSet<_> = s.dual_edges().union(&t.dual_edges()).copied().collect();
        if !m.dual_edges().is_subset(&duals) {
            return Err(format!("merge of {s} and {t} crosses new edges"));
        }
        if !s.interior_vertices().is_subset(&mine) || !t.interior_vertices().is_subset(&mine) {
            return Err(format!("merge of {s} and {t} loses interior"));
        }
    }
    Ok(format!(
        "1000 circuits ({typed} avoiding colour 0), 100 merges"
    ))
}

fn unique_packing() -> Outcome {
    let mut notes = Vec::new();
    for (a, b) in [(1, 1), (2, 2), (2, 3)] {
        let r = unique_packing_rect(a, b, EnumOptions::default()).map_err(|e| e.to_string())?;
        if !r.unique() {
            return Err(format!("a={a} b={b}: {} optimal configurations", r.optimal));
        }
        notes.push(format!("({a},{b}) o={}", r.max_edges));
    }
    Ok(notes.join(", "))
}

fn densities(n: f64, x: f64, seed: u64) -> Result<[f64; 3], String> {
    let h = Domain::rect(12, 9, 0).map_err(|e| e.to_string())?;
    let mut chain = ChainState::new(
        &h,
        &BoundaryCondition::Ground(0),
        params(n, x),
        seed,
        0,
        false,
    )
    .unwrap();
    let rc = RunConfig::new(100_000, 20_000, 10, seed).observe(Observable::FlowerDensity);
    let m = chain.run(&rc).map_err(|e| e.to_string())?.means();
    Ok([m[0], m[1], m[2]])
}

fn phase_signature() -> Outcome {
    let ordered = densities(8.0, 2.0, 5)?;
    let dilute = densities(8.0, 0.5, 6)?;
    let line = format!("(8,2) rho={ordered:.3?}, (8,0.5) rho={dilute:.3?}");
    if ordered[0] > 0.5 && dilute.iter().all(|r| *r < 0.2) {
        Ok(line)
    } else {
        Err(line)
    }
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 10] = [
        ("1 exact two-point measure", exact_two_point),
        ("2 sampler total variation", sampler_tv),
        ("3 repair identities", repair_identities),
        ("4 peierls bounds", peierls),
        ("5 spin integrals", spin_integrals),
        ("6 height pushforward", height_pushforward),
        ("7 hard-hexagon limit", hard_hexagon),
        ("8 circuit geometry", geometry),
        ("9 unique packing", unique_packing),
        ("10 phase signature", phase_signature),
    ];
    let mut failed = Vec::new();
    for (name, run) in criteria {
        let t = Instant::now();
        let out = run();
        let secs = t.elapsed().as_secs_f64();
        match out {
            Ok(msg) => println!("PASS  criterion {name} ({secs:.1}s): {msg}"),
            Err(msg) => {
                println!("FAIL  criterion {name} ({secs:.1}s): {msg}");
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
