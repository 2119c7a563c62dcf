use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use loopon::loopcfg::EdgeWeight;

#[derive(Debug, Parser)]
#[command(
    name = "loopon",
    version,
    about = "Loop O(n) model on the hexagonal lattice"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run Glauber dynamics and write a trace and the final configuration.
    Sample(SampleArgs),
    /// Enumerate a small domain exactly and optionally run a check.
    Exact(ExactArgs),
    /// Monte Carlo checks of the sphere-integral identities.
    Spinint(SpinintArgs),
}

#[derive(Debug, Args)]
pub struct DomainArgs {
    /// Domain file with a `circuit:` line.
    #[arg(long, conflicts_with_all = ["rect", "shape"])]
    pub domain: Option<PathBuf>,
    /// `WxH-typeC` for a domain of type C, or `a=A,b=B` for a packing block.
    #[arg(long, conflicts_with = "shape")]
    pub rect: Option<RectSpec>,
    /// Built-in shape: `hexagon`, `flower` or `ball:R`.
    #[arg(long)]
    pub shape: Option<Shape>,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long)]
    pub n: f64,
    /// Edge weight, a positive number or `inf`.
    #[arg(long)]
    pub x: EdgeWeight,
    #[command(flatten)]
    pub domain: DomainArgs,
    /// `vacant`, `gnd0`, `gnd1`, `gnd2` or `file:PATH`.
    #[arg(long, default_value = "vacant")]
    pub bc: BcSpec,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 1000)]
    pub sweeps: u64,
    #[arg(long, default_value_t = 0)]
    pub burnin: u64,
    #[arg(long, default_value_t = 1)]
    pub thin: u64,
    /// Output directory, created if missing.
    #[arg(long)]
    pub out: PathBuf,
    /// Permit infinite edge weight, where the chain is not ergodic.
    #[arg(long)]
    pub allow_noergodic: bool,
    #[arg(long, default_value_t = 1)]
    pub chains: usize,
    /// Also write `snapshot.svg`.
    #[arg(long)]
    pub svg: bool,
    /// Record loops of length up to K surrounding a central vertex.
    #[arg(long, default_value_t = 0)]
    pub kmax: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Check {
    Peierls,
    Vbad,
    Repair,
    Hardhex,
    Height,
    Packing,
}

#[derive(Debug, Args)]
pub struct ExactArgs {
    #[arg(long, default_value_t = 1.0)]
    pub n: f64,
    /// Edge weight: a number, a ratio `p/q`, or `inf`.
    #[arg(long, default_value = "1")]
    pub x: String,
    #[command(flatten)]
    pub domain: DomainArgs,
    #[arg(long, default_value = "vacant")]
    pub bc: BcSpec,
    #[arg(long, value_enum)]
    pub check: Option<Check>,
    /// Fugacity for `--check hardhex`.
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    /// Largest number of faces to enumerate.
    #[arg(long, default_value_t = loopon::exact::DEFAULT_FACE_CAP)]
    pub cap: usize,
    /// Output directory for `measure.tsv` and check reports.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SpinintArgs {
    /// Comma-separated sphere dimensions.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    pub dims: Vec<usize>,
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Report file; printed to stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RectSpec {
    Typed { w: u32, h: u32, c: u8 },
    Packing { a: u32, b: u32 },
}

impl FromStr for RectSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let bad = || format!("expected `WxH-typeC` or `a=A,b=B`, got `{s}`");
        if s.contains('=') {
            let mut a = None;
            let mut b = None;
            for part in s.split(',') {
                let (k, v) = part.split_once('=').ok_or_else(bad)?;
                let v: u32 = v.trim().parse().map_err(|_| bad())?;
                match k.trim() {
                    "a" => a = Some(v),
                    "b" => b = Some(v),
                    _ => return Err(bad()),
                }
            }
            return Ok(RectSpec::Packing {
                a: a.ok_or_else(bad)?,
                b: b.ok_or_else(bad)?,
            });
        }
        let (dims, ty) = match s.split_once('-') {
            Some((d, t)) => (d, Some(t)),
            None => (s, None),
        };
        let (w, h) = dims.split_once('x').ok_or_else(bad)?;
        let c = match ty {
            None => 0,
            Some(t) => t
                .strip_prefix("type")
                .unwrap_or(t)
                .parse()
                .map_err(|_| bad())?,
        };
        if c > 2 {
            return Err(bad());
        }
        Ok(RectSpec::Typed {
            w: w.parse().map_err(|_| bad())?,
            h: h.parse().map_err(|_| bad())?,
            c,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BcSpec {
    Vacant,
    Ground(u8),
    File(PathBuf),
}

impl FromStr for BcSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "vacant" => Ok(BcSpec::Vacant),
            "gnd0" => Ok(BcSpec::Ground(0)),
            "gnd1" => Ok(BcSpec::Ground(1)),
            "gnd2" => Ok(BcSpec::Ground(2)),
            _ => s
                .strip_prefix("file:")
                .map(|p| BcSpec::File(PathBuf::from(p)))
                .ok_or_else(|| format!("unknown boundary condition `{s}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shape {
    Hexagon,
    Flower,
    Ball(i32),
}

impl FromStr for Shape {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "hexagon" => Ok(Shape::Hexagon),
            "flower" => Ok(Shape::Flower),
            _ => s
                .strip_prefix("ball:")
                .and_then(|r| r.parse().ok())
                .filter(|r: &i32| *r >= 0)
                .map(Shape::Ball)
                .ok_or_else(|| format!("unknown shape `{s}`")),
        }
    }
}
