use thiserror::Error;

use crate::lattice::{HexCoord, HexVertex};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("malformed coordinate `{0}`")]
    Coord(String),
    #[error("malformed edge `{0}`")]
    Edge(String),
    #[error("hexagons in `{0}` are not adjacent")]
    NotAdjacent(String),
    #[error("line {line}: {msg}")]
    Line { line: usize, msg: String },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("vertex {0} has odd degree")]
    Parity(HexVertex),
    #[error("not a domain: {0}")]
    NotADomain(String),
    #[error("not a circuit: {0}")]
    NotACircuit(String),
    #[error("circuits do not overlap")]
    NoOverlap,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("domain has {faces} faces, above the cap of {cap}")]
    TooLarge { faces: usize, cap: usize },
    #[error("boundary condition admits no completion inside the domain")]
    InconsistentBoundary,
    #[error("no path joins the two marked vertices")]
    NoPath,
    #[error("configuration differs from the ground state at the window rim")]
    Window,
    #[error("functional is not invariant: {0}")]
    Invariance(String),
    #[error("identity violated: {0}")]
    Identity(String),
    #[error("parameter out of range: {0}")]
    Parameter(String),
    #[error("hexagon {0} is not a flower")]
    NotAFlower(HexCoord),
    #[error("infinite edge weight needs an explicit override")]
    NonErgodic,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
