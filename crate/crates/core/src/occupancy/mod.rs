//! Occupancy projection of the seed bank and the BOA process that bounds it.

mod coupled;
mod diagnostics;
mod spom;

pub use coupled::{
    coupled_run, deviation_scan, write_trajectory_rows, CoupledRun, DeviationEvent, DeviationReport, GenerationEvents,
    TRAJECTORY_CSV_HEADER,
};
pub use diagnostics::{
    a_sequence, age_census, default_epsilon, make_theorem1_initial, par_bound, window_w, InitialOccupancy, PatchSpec,
};
pub use spom::{boa_step, derive_occupancy, BoaState, OccupancyState, SpomState};
