//! Monte Carlo uplink simulator for hierarchical cell-free (HCF), cell-free
//! (CF) and cellular massive MIMO.
//!
//! The pipeline per drop is: [`scenario`] places nodes and users and builds
//! the spatial correlation matrices, [`channel`] draws small-scale fading and
//! MMSE estimates, [`combining`] builds receive combiners (and optional
//! max-min power control), and [`performance`] turns them into SINRs and
//! spectral efficiencies. [`harness`] runs seeded campaigns over many drops
//! and [`cost`] prices each scheme in multiplications and fronthaul load.

pub mod channel;
pub mod combining;
pub mod cost;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod performance;
pub mod scenario;
pub mod validate;

pub use combining::{CombinerSet, Mode, Scheme};
pub use error::{Error, Result};
pub use scenario::{Architecture, Drop, SystemConfig};
