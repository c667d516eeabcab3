//! Seed-bank metapopulation model: the individual-based process, its occupancy
//! projection, the BOA bounding process and the oriented percolation used to
//! locate its critical extinction probability.

pub mod error;
pub mod experiments;
pub mod extinction;
pub mod lattice;
pub mod occupancy;
pub mod params;
pub mod percolation;
pub mod rng;
pub mod stats;
pub mod wfsb;

pub use error::{Error, Result};
pub use extinction::{sample_extinction_field, ExtinctionField};
pub use lattice::{Domain, Window};
pub use params::{validate_params, Params, RawParams, Topology};
