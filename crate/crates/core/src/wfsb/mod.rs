//! The finite-M, finite-k individual-based seed-bank process.
//!
//! One generation: every patch germinates ⌊gM⌋ distinct compartments, extinction
//! events hit patches independently, each germinated compartment is refilled by the
//! max over k potential parents drawn from the patch and its two neighbours, and the
//! remaining seeds age by one generation.

mod offspring;
mod state;
mod step;

pub use offspring::{isolated_offspring_law, OffspringLaw};
pub use state::{viable_type1_census, write_state_rows, SeedBankState, STATE_CSV_HEADER};
pub use step::{
    choose_parent_offsets, covers_all_plants, germination_sample, refill_compartment, wfsb_step, ParentDraws,
    ParentPatch,
};

pub(crate) use step::step_with_germination;
