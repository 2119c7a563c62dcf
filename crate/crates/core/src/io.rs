//! Text files for domains and configurations.
//!
//! A domain file holds one line `circuit: (a1,b1) (a2,b2) ...` giving the
//! hexagons of its circuit; `#` starts a comment. A configuration file holds
//! one edge `(a1,b1)-(a2,b2)` per line in canonical order.

use std::fs;
use std::path::Path;

use crate::circuits::Circuit;
use crate::error::{Error, ParseError, Result};
use crate::lattice::HexCoord;
use crate::loopcfg::{Domain, LoopConfig};

fn parenthesised(s: &str) -> Result<Vec<HexCoord>, ParseError> {
    let mut out = Vec::new();
    let mut rest = s.trim();
    while !rest.is_empty() {
        let close = rest
            .find(')')
            .ok_or_else(|| ParseError::Coord(rest.to_string()))?;
        out.push(rest[..=close].parse()?);
        rest = rest[close + 1..].trim_start_matches(|c: char| c.is_whitespace() || c == ',');
    }
    Ok(out)
}

pub fn parse_circuit(s: &str) -> Result<Circuit> {
    for (i, raw) in s.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let body = line
            .strip_prefix("circuit:")
            .ok_or_else(|| ParseError::Line {
                line: i + 1,
                msg: "expected `circuit:`".into(),
            })?;
        let hexes = parenthesised(body).map_err(|e| ParseError::Line {
            line: i + 1,
            msg: e.to_string(),
        })?;
        return Circuit::new(hexes);
    }
    Err(ParseError::Line {
        line: 0,
        msg: "no `circuit:` line".into(),
    }
    .into())
}

pub fn parse_domain(s: &str) -> Result<Domain> {
    Ok(Domain::from_circuit(&parse_circuit(s)?))
}

pub fn format_domain(h: &Domain) -> String {
    format!("circuit: {}\n", h.circuit())
}

pub fn format_config(omega: &LoopConfig) -> String {
    omega.to_string()
}

pub fn read_domain(path: &Path) -> Result<Domain> {
    parse_domain(&fs::read_to_string(path)?)
}

pub fn write_domain(path: &Path, h: &Domain) -> Result<()> {
    Ok(fs::write(path, format_domain(h))?)
}

pub fn read_config(path: &Path) -> Result<LoopConfig> {
    fs::read_to_string(path)?.parse()
}

pub fn write_config(path: &Path, omega: &LoopConfig) -> Result<()> {
    Ok(fs::write(path, format_config(omega))?)
}

/// Read a file, mapping a missing file to an I/O error naming the path.
pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}
