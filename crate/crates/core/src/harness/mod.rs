//! Seeded, parallel Monte Carlo campaigns and their persistence.

mod campaign;
mod export;
mod spec;
mod stats;

pub use campaign::{
    run_campaign, run_campaign_with_workers, simulate_variant_drop, CampaignResult, Diagnostics, VariantResult,
};
pub use export::{export_results, read_summary, sanitize_name, write_cdf, CampaignSummary, VariantSummary};
pub use spec::{CampaignSpec, Split, Variant};
pub use stats::{empirical_cdf, percentile};
