use std::fs;
use std::path::Path;

use thiserror::Error;

use loopon::exact::{
    hard_hexagon_compare, height_pushforward_check, loop_length_check, parse_ratio, peierls_check,
    ratio_to_f64, rational_partition_function, unique_packing_check, unique_packing_rect,
    EnumOptions, EnumeratedMeasure,
};
use loopon::io;
use loopon::lattice::HexCoord;
use loopon::loopcfg::{BoundaryCondition, Domain, EdgeWeight, ModelParams};
use loopon::mcmc::{merged_tsv, run_chains, Observable, RunConfig};
use loopon::par::Execution;
use loopon::render::{render_svg, RenderStyle};
use loopon::spinint::{identity_report, report_tsv, McOptions};
use loopon::structure::repair_sweep;
use loopon::Error;

use crate::args::{BcSpec, Check, DomainArgs, ExactArgs, RectSpec, SampleArgs, Shape, SpinintArgs};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("check failed: {0}")]
    CheckFailed(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::CheckFailed(_) => 4,
            CliError::Core(e) => match e {
                Error::TooLarge { .. } => 3,
                Error::Io(_) => 1,
                Error::Parse(_)
                | Error::Parity(_)
                | Error::NotADomain(_)
                | Error::NotACircuit(_)
                | Error::Precondition(_)
                | Error::InconsistentBoundary
                | Error::Parameter(_)
                | Error::NonErgodic
                | Error::Dimension { .. } => 2,
                _ => 1,
            },
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Core(Error::Io(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| io_err(path, e))
}

fn build_domain(d: &DomainArgs) -> Result<(Domain, Option<RectSpec>)> {
    if let Some(p) = &d.domain {
        return Ok((io::read_domain(p)?, None));
    }
    if let Some(r) = d.rect {
        let h = match r {
            RectSpec::Typed { w, h, c } => Domain::rect(w, h, c)?,
            RectSpec::Packing { a, b } => Domain::packing_rect(a, b)?,
        };
        return Ok((h, Some(r)));
    }
    match d.shape {
        Some(Shape::Hexagon) => Ok((Domain::hexagon(HexCoord::ORIGIN), None)),
        Some(Shape::Flower) => Ok((Domain::flower(HexCoord::ORIGIN), None)),
        Some(Shape::Ball(r)) => Ok((Domain::ball(HexCoord::ORIGIN, r), None)),
        None => Err(CliError::Usage(
            "one of --domain, --rect or --shape is required".into(),
        )),
    }
}

fn boundary(b: &BcSpec) -> Result<BoundaryCondition> {
    Ok(match b {
        BcSpec::Vacant => BoundaryCondition::Vacant,
        BcSpec::Ground(c) => BoundaryCondition::Ground(*c),
        BcSpec::File(p) => BoundaryCondition::Explicit(io::read_config(p)?),
    })
}

/// A vertex of the face closest to the centre of the domain.
fn central_vertex(h: &Domain) -> Option<loopon::lattice::HexVertex> {
    let faces = h.faces();
    let n = faces.len() as f64;
    let (cx, cy) = faces
        .iter()
        .map(|z| z.position())
        .fold((0.0, 0.0), |(x, y), (a, b)| (x + a / n, y + b / n));
    faces
        .iter()
        .min_by(|p, q| {
            let d = |z: &&HexCoord| {
                let (x, y) = z.position();
                (x - cx).powi(2) + (y - cy).powi(2)
            };
            d(p).total_cmp(&d(q)).then(p.cmp(q))
        })
        .map(|z| z.vertices()[0])
}

pub fn sample(a: &SampleArgs) -> Result<()> {
    let (h, _) = build_domain(&a.domain)?;
    let bc = boundary(&a.bc)?;
    let params = ModelParams::with_weight(a.n, a.x)?;
    if a.chains == 0 {
        return Err(CliError::Usage("--chains must be positive".into()));
    }
    let mut rc = RunConfig::new(a.sweeps, a.burnin, a.thin, a.seed)
        .observe(Observable::EdgeCount)
        .observe(Observable::LoopCount)
        .observe(Observable::FlowerDensity);
    if let Some(u) = central_vertex(&h) {
        if a.kmax >= 6 {
            rc = rc.observe(Observable::SurroundingLoops { u, k_max: a.kmax });
        }
        if bc == BoundaryCondition::Ground(0) {
            rc = rc.observe(Observable::BreakupBoundary { u });
        }
    }
    let results = run_chains(
        &h,
        &bc,
        params,
        &rc,
        a.chains,
        a.allow_noergodic,
        Execution::Parallel,
    )?;
    fs::create_dir_all(&a.out).map_err(|e| io_err(&a.out, e))?;
    let traces: Vec<_> = results.iter().map(|(t, _)| t.clone()).collect();
    let trace = if a.chains == 1 {
        traces[0].to_tsv()
    } else {
        merged_tsv(&traces)
    };
    write(&a.out.join("trace.tsv"), &trace)?;
    for (i, (_, omega)) in results.iter().enumerate() {
        let name = if i == 0 {
            "snapshot.txt".to_string()
        } else {
            format!("snapshot-{i}.txt")
        };
        write(&a.out.join(name), &io::format_config(omega))?;
    }
    write(&a.out.join("domain.txt"), &io::format_domain(&h))?;
    if a.svg {
        write(
            &a.out.join("snapshot.svg"),
            &render_svg(&results[0].1, &h, &RenderStyle::default())?,
        )?;
    }
    let means = traces[0].means();
    let summary: Vec<String> = traces[0]
        .columns
        .iter()
        .zip(&means)
        .map(|(c, m)| format!("{c}={m:.4}"))
        .collect();
    println!(
        "faces={} chains={} {}",
        h.faces().len(),
        a.chains,
        summary.join(" ")
    );
    Ok(())
}

fn exact_params(a: &ExactArgs) -> Result<ModelParams> {
    let x = match parse_ratio(&a.x) {
        Some(r) => EdgeWeight::Finite(ratio_to_f64(&r)),
        None => a.x.parse::<EdgeWeight>()?,
    };
    Ok(ModelParams::with_weight(a.n, x)?)
}

pub fn exact(a: &ExactArgs) -> Result<()> {
    let (h, rect) = build_domain(&a.domain)?;
    let bc = boundary(&a.bc)?;
    let opts = EnumOptions {
        face_cap: a.cap,
        ..EnumOptions::default()
    };
    if let Some(out) = &a.out {
        fs::create_dir_all(out).map_err(|e| io_err(out, e))?;
    }
    let save = |name: &str, text: &str| -> Result<()> {
        match &a.out {
            Some(out) => write(&out.join(name), text),
            None => Ok(()),
        }
    };

    // packing and x = inf need no finite parameters
    if a.check == Some(Check::Packing) {
        let r = match rect {
            Some(RectSpec::Packing { a, b }) => unique_packing_rect(a, b, opts)?,
            _ => unique_packing_check(&h, opts)?,
        };
        let text = format!(
            "faces={} max_edges={} optimal={} unique={} fully_packed={}\n",
            h.faces().len(),
            r.max_edges,
            r.optimal,
            r.unique(),
            r.fully_packed()
        );
        print!("{text}");
        save("packing.txt", &text)?;
        return if r.unique() {
            Ok(())
        } else {
            Err(CliError::CheckFailed("packing is not unique".into()))
        };
    }

    let params = exact_params(a)?;
    let mu = EnumeratedMeasure::build(&h, &bc, params, opts)?;
    println!(
        "faces={} configs={} n={} x={} Z={:.9}",
        h.faces().len(),
        mu.enumeration.len(),
        a.n,
        params.x,
        mu.log_partition().exp()
    );
    if let (Some(xr), Some(nr)) = (parse_ratio(&a.x), parse_ratio(&a.n.to_string())) {
        println!(
            "Z_exact={}",
            rational_partition_function(&mu.enumeration, &nr, &xr)
        );
    }
    save("measure.tsv", &mu.report_tsv())?;

    let Some(check) = a.check else {
        return Ok(());
    };
    match check {
        Check::Peierls => {
            let r = peierls_check(&h, &bc, &params, opts)?;
            let mut text = format!(
                "peierls\tchecked={}\tviolations={}\tmax_ratio={:.6}\n",
                r.checked,
                r.violations.len(),
                r.max_ratio
            );
            let mut bad = r.violations.len();
            if let Some(u) = central_vertex(&h) {
                for b in loop_length_check(&mu, u)? {
                    text.push_str(&format!(
                        "loop_length\t{}\t{:.9e}\t{:.9e}\n",
                        b.k, b.probability, b.bound
                    ));
                    if b.probability > b.bound {
                        bad += 1;
                    }
                }
            }
            print!("{text}");
            save("peierls.tsv", &text)?;
            if bad > 0 {
                return Err(CliError::CheckFailed(format!("{bad} bound violations")));
            }
        }
        Check::Vbad | Check::Repair => {
            let s = repair_sweep(&h, opts, check == Check::Repair)?;
            let text = if check == Check::Vbad {
                let v = s.violations.get("vbad").copied().unwrap_or(0);
                format!("vbad\tconfigs={}\tviolations={v}\n", s.configs)
            } else {
                s.summary()
            };
            print!("{text}");
            save(
                if check == Check::Vbad {
                    "vbad.tsv"
                } else {
                    "repair.tsv"
                },
                &text,
            )?;
            if let Some(d) = &s.diagnostics {
                save("structure.tsv", d)?;
            }
            let failed = if check == Check::Vbad {
                s.violations.contains_key("vbad")
            } else {
                !s.all_hold()
            };
            if failed {
                return Err(CliError::CheckFailed("identity violations".into()));
            }
        }
        Check::Hardhex => {
            let tv = hard_hexagon_compare(&h, a.n, a.lambda, opts)?;
            let text = format!("hardhex\tn={}\tlambda={}\ttv={tv:.9}\n", a.n, a.lambda);
            print!("{text}");
            save("hardhex.tsv", &text)?;
        }
        Check::Height => {
            if a.n.fract() != 0.0 || a.n < 1.0 {
                return Err(CliError::Usage("--check height needs an integer n".into()));
            }
            let x = parse_ratio(&a.x)
                .ok_or_else(|| CliError::Usage("--check height needs a rational x".into()))?;
            let r = height_pushforward_check(&h, a.n as u32, &x, opts)?;
            let text = format!(
                "height\tn={}\theight_functions={}\tconfigurations={}\texact_match={}\n",
                r.n,
                r.height_functions,
                r.configurations,
                r.exact_match()
            );
            print!("{text}");
            save("height.tsv", &text)?;
            if !r.exact_match() {
                return Err(CliError::CheckFailed(
                    "pushforward differs from the loop measure".into(),
                ));
            }
        }
        Check::Packing => unreachable!("handled above"),
    }
    Ok(())
}

pub fn spinint(a: &SpinintArgs) -> Result<()> {
    let rows = identity_report(&a.dims, McOptions::new(a.samples, a.seed))?;
    let text = report_tsv(&rows);
    match &a.out {
        Some(p) => write(p, &text)?,
        None => print!("{text}"),
    }
    let misses = rows.iter().filter(|r| r.z().abs() > 4.0).count();
    if misses > 0 {
        return Err(CliError::CheckFailed(format!(
            "{misses} estimates beyond 4 standard errors"
        )));
    }
    Ok(())
}
