//! Jaynes-Cummings-Hubbard chain solvers.
//!
//! - [`jc`]: single-cavity dressed states and the zero-hopping filling rule.
//! - [`bloch`]: one-polariton / one-hole Bloch blocks for arbitrary 1D unit cells.
//! - [`phase`]: excitation gaps, Mott-lobe boundaries and tips, gap maps.
//! - [`meanfield`]: decoupled single-site order parameter and its boundary.
//! - [`ed`]: exact diagonalization of finite chains and rings.
//!
//! The crate is `no_std` with `alloc`. The `rayon` feature parallelizes grid
//! sweeps.
#![no_std]

extern crate alloc;
#[cfg(any(test, feature = "std"))]
extern crate std;

pub mod bloch;
pub mod ed;
pub mod error;
pub mod jc;
pub mod linalg;
pub mod meanfield;
pub mod optimize;
pub mod phase;

pub use bloch::{BlochBlock, Band, Sector, UnitCell};
pub use error::{Error, Result};
pub use jc::{Branch, DressedState, SiteParams};
