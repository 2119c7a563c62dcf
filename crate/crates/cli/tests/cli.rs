use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use loopon::io;
use loopon::lattice::HexCoord;
use loopon::loopcfg::{Domain, LoopConfig};

fn loopon(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_loopon"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write_domain(dir: &Path, name: &str, h: &Domain) -> String {
    let p = dir.join(name);
    io::write_domain(&p, h).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn single_hexagon_partition_function() {
    let dir = tempfile::tempdir().unwrap();
    let d = write_domain(dir.path(), "h1.txt", &Domain::hexagon(HexCoord::ORIGIN));
    let out = dir.path().join("out");
    let o = loopon(&[
        "exact",
        "--domain",
        &d,
        "--n",
        "8",
        "--x",
        "0.5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("Z=1.125000000"), "{s}");
    assert!(s.contains("Z_exact=9/8"), "{s}");
    let tsv = fs::read_to_string(out.join("measure.tsv")).unwrap();
    assert_eq!(tsv.lines().count(), 3);
    assert!(tsv.starts_with("config\to\tL\tlog_weight\tprobability\n"));
}

#[test]
fn exit_codes() {
    assert_eq!(
        loopon(&["exact", "--rect", "9x9-type0"]).status.code(),
        Some(3)
    );
    let too_big = loopon(&["exact", "--rect", "9x9-type0"]);
    assert!(String::from_utf8_lossy(&too_big.stderr).contains("62 faces"));
    assert_eq!(
        loopon(&["exact", "--shape", "hexagon", "--bogus"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(loopon(&["exact"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(
        loopon(&["sample", "--shape", "flower", "--n", "2", "--x", "inf", "--out", out])
            .status
            .code(),
        Some(2)
    );
    let ok = loopon(&[
        "sample",
        "--shape",
        "flower",
        "--n",
        "2",
        "--x",
        "inf",
        "--sweeps",
        "5",
        "--allow-noergodic",
        "--out",
        out,
    ]);
    assert_eq!(ok.status.code(), Some(0));
    let hex = dir.path().join("h.txt");
    fs::write(&hex, "circuit: (0,0) (3,3) (1,1)\n").unwrap();
    assert_eq!(
        loopon(&["exact", "--domain", hex.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn packing_block_is_unique() {
    let o = loopon(&["exact", "--check", "packing", "--rect", "a=2,b=3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("unique=true"));
}

#[test]
fn repair_check_on_small_type_zero_domain() {
    let h =
        Domain::from_hexagons([(0, 0), (1, 1), (2, -1), (2, 2)].map(|(a, b)| HexCoord::new(a, b)))
            .unwrap();
    assert_eq!(h.faces().len(), 5);
    let dir = tempfile::tempdir().unwrap();
    let d = write_domain(dir.path(), "h5.txt", &h);
    let out = dir.path().join("r");
    let o = loopon(&[
        "exact",
        "--domain",
        &d,
        "--check",
        "repair",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert!(stdout(&o).contains("all identities hold"));
    let diag = fs::read_to_string(out.join("structure.tsv")).unwrap();
    assert_eq!(diag.matches("config\t").count(), 32);
    assert_eq!(diag.matches("sizes\t").count(), 32);
}

#[test]
fn other_checks_run() {
    for args in [
        &[
            "exact", "--shape", "flower", "--check", "peierls", "--n", "8", "--x", "2",
        ][..],
        &[
            "exact", "--shape", "flower", "--check", "height", "--n", "1", "--x", "1/2",
        ],
        &[
            "exact", "--shape", "hexagon", "--check", "height", "--n", "2", "--x", "2/3",
        ],
        &["exact", "--shape", "hexagon", "--check", "vbad"],
    ] {
        let o = loopon(args);
        assert_eq!(
            o.status.code(),
            Some(0),
            "{args:?}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
    }
    assert_eq!(
        loopon(&["exact", "--shape", "flower", "--check", "vbad"])
            .status
            .code(),
        Some(2)
    );
    let o = loopon(&[
        "exact", "--shape", "flower", "--check", "hardhex", "--n", "10000", "--lambda", "1",
    ]);
    assert!(stdout(&o).contains("tv=0.00"));
}

fn sample_into(dir: &Path, extra: &[&str]) -> Output {
    let mut args = vec![
        "sample", "--shape", "flower", "--n", "8", "--x", "2", "--seed", "7", "--sweeps", "300",
        "--thin", "3",
    ];
    args.extend_from_slice(extra);
    args.extend_from_slice(&["--out", dir.to_str().unwrap(), "--svg"]);
    loopon(&args)
}

#[test]
fn same_seed_gives_identical_files() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert_eq!(
        sample_into(a.path(), &["--bc", "gnd0"]).status.code(),
        Some(0)
    );
    assert_eq!(
        sample_into(b.path(), &["--bc", "gnd0"]).status.code(),
        Some(0)
    );
    for f in ["trace.tsv", "snapshot.txt", "snapshot.svg", "domain.txt"] {
        assert_eq!(
            fs::read(a.path().join(f)).unwrap(),
            fs::read(b.path().join(f)).unwrap(),
            "{f}"
        );
    }
    let trace = fs::read_to_string(a.path().join("trace.tsv")).unwrap();
    assert!(trace.starts_with("step\to\tloops\trho0\trho1\trho2\tbreakup\n"));
    assert_eq!(trace.lines().count(), 101);
}

#[test]
fn threads_do_not_change_output() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let run = |dir: &Path, threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_loopon"))
            .env("LOOPON_THREADS", threads)
            .args([
                "sample", "--shape", "flower", "--n", "2", "--x", "1", "--sweeps", "50",
                "--chains", "3",
            ])
            .args(["--out", dir.to_str().unwrap()])
            .output()
            .unwrap()
    };
    assert_eq!(run(a.path(), "1").status.code(), Some(0));
    assert_eq!(run(b.path(), "3").status.code(), Some(0));
    for f in [
        "trace.tsv",
        "snapshot.txt",
        "snapshot-1.txt",
        "snapshot-2.txt",
    ] {
        assert_eq!(
            fs::read(a.path().join(f)).unwrap(),
            fs::read(b.path().join(f)).unwrap(),
            "{f}"
        );
    }
    assert!(fs::read_to_string(a.path().join("trace.tsv"))
        .unwrap()
        .starts_with("chain\tstep\t"));
    assert_eq!(run(a.path(), "many").status.code(), Some(2));
}

#[test]
fn zero_sweeps_keep_the_initial_configuration() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = loopon(&[
        "sample", "--shape", "flower", "--n", "8", "--x", "2", "--bc", "gnd0", "--sweeps", "0",
        "--out", out,
    ]);
    assert_eq!(o.status.code(), Some(0));
    let snap = io::read_config(&dir.path().join("snapshot.txt")).unwrap();
    let h = Domain::flower(HexCoord::ORIGIN);
    let touching = h.vertices().iter().map(|v| v.hexagon_of_color(0));
    assert_eq!(snap, LoopConfig::ground_state(0, touching));
    assert_eq!(io::read_domain(&dir.path().join("domain.txt")).unwrap(), h);
    assert_eq!(
        fs::read_to_string(dir.path().join("trace.tsv"))
            .unwrap()
            .lines()
            .count(),
        1
    );
}

#[test]
fn explicit_boundary_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let xi = LoopConfig::trivial_loops([HexCoord::new(0, 3)]).unwrap();
    let p = dir.path().join("xi.txt");
    io::write_config(&p, &xi).unwrap();
    let bc = format!("file:{}", p.display());
    let out = dir.path().join("o");
    let o = loopon(&[
        "sample",
        "--shape",
        "flower",
        "--n",
        "1",
        "--x",
        "1",
        "--bc",
        &bc,
        "--sweeps",
        "10",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    fs::write(&p, "(0,0)-(1,0)\n").unwrap();
    assert_eq!(
        loopon(&[
            "sample",
            "--shape",
            "flower",
            "--n",
            "1",
            "--x",
            "1",
            "--bc",
            &bc,
            "--out",
            out.to_str().unwrap()
        ])
        .status
        .code(),
        Some(2)
    );
}

#[test]
fn svg_matches_golden_file() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(sample_into(dir.path(), &[]).status.code(), Some(0));
    let got = fs::read_to_string(dir.path().join("snapshot.svg")).unwrap();
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/flower_seed7.svg");
    if std::env::var_os("LOOPON_BLESS").is_some() {
        fs::write(&golden, &got).unwrap();
    }
    assert_eq!(got, fs::read_to_string(golden).unwrap());
}

#[test]
fn spin_identities_report() {
    let o = loopon(&[
        "spinint",
        "--dims",
        "1,2",
        "--samples",
        "20000",
        "--seed",
        "3",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.starts_with("identity\tn\tsamples\testimate\tstderr\ttarget\tz\n"));
    assert!(s.contains("fourth-moment\t1\t20000\t1.000000\t0.000000\t1.000000\t0.000"));
}
