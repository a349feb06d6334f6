//! SINR, spectral efficiency and the symbol-level LSFD path.

mod lsfd;
mod se;
mod sinr;

pub use lsfd::{lsfd_soft_estimate, synthesize_uplink};
pub use se::{se_per_user, se_with_prefactor, SeReport};
pub use sinr::{
    centralized_coefficients, error_aggregate, sinr_centralized, sinr_centralized_with, sinr_hierarchical, LsfdMoments,
    SinrBreakdown,
    DEFAULT_MIN_INNER_SAMPLES,
};
