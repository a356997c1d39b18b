//! Set specifications, finite sums, materialization on grids and planted
//! instance generators.

mod fs;
mod ground;
mod parse;
mod plant;
mod spec;

pub use fs::{finite_sums, subset_sums, FSSeed, MAX_SEED_LEN};
pub use ground::{materialize, GroundSet};
pub use parse::{parse_setspec, print_setspec};
pub use plant::{plant_broken_ip, plant_broken_syndetic};
pub use spec::SetSpec;
