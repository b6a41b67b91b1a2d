//! Weighted simplicial complexes, their spectral and coboundary expansion,
//! cones, local-to-global decompositions and unique games over group actions.

pub mod builders;
pub mod cochain;
pub mod complex;
pub mod cones;
pub mod error;
pub mod expansion;
pub mod gk;
pub mod group;
pub mod io;
pub mod rational;
pub mod rng;
pub mod spectral;
pub mod suites;
pub mod ug;

pub use error::{HdxError, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
