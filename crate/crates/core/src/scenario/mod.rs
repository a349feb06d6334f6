//! Network layouts and large-scale channel statistics.

mod config;
mod layout;
mod pathloss;
mod scattering;

pub use config::{default_split, Architecture, PilotPolicy, PrefactorConvention, SystemConfig};
pub use layout::{build_layout, Drop, Layout, Node, NodeKind};
pub use pathloss::{db_to_linear, path_loss_db, PathLossModel};
pub use scattering::local_scattering_covariance;
