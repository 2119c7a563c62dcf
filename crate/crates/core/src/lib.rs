//! Loop O(n) model on the hexagonal lattice.
//!
//! Exhaustive enumeration on small domains, the cluster structure behind
//! the repair map, single-face Glauber dynamics and Monte Carlo estimates of
//! sphere integrals. Data-parallel sweeps use rayon when the `parallel`
//! feature is on (the default) and run sequentially otherwise.

pub mod circuits;
pub mod error;
pub mod exact;
pub mod io;
pub mod lattice;
pub mod loopcfg;
pub mod mcmc;
pub mod par;
pub mod render;
pub mod spinint;
pub mod structure;

mod local;

pub use error::{Error, Result};
