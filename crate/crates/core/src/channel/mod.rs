//! Small-scale fading, pilot observations and channel estimation.

mod estimation;
mod pilots;

pub use estimation::{
    mmse_estimate, pilot_covariance, pilot_observation, sample_channel, stack_nodes, ChannelState,
    ChannelStatistics, Estimates,
};
pub use pilots::{assign_pilots, PilotAssignment};
