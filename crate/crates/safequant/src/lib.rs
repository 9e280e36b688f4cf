//! Sampling-based quantification and validation of safe operating regions
//! for black-box discrete-time stochastic systems.
//!
//! The core loop certifies a union of grid cells in which scenario runs stay
//! safe and covered: failures prune cells together with the recorded history
//! that reached them, safe runs extend the covering to newly visited cells,
//! and a consecutive-safe-run counter converts scenario sampling into a
//! probabilistic guarantee (failure mass at most epsilon with confidence at
//! least 1 - beta). A brute-force Monte Carlo oracle provides independent
//! ground truth for benchmarking, and set-agreement metrics plus SVG
//! heatmaps make campaigns comparable and inspectable.
//!
//! Entry points:
//! - [`quantify::quantify`] runs a certification campaign.
//! - [`validate::validate`] re-tests a candidate set with fresh scenarios.
//! - [`oracle::oracle_safe_set`] sweeps the grid by brute force.
//! - [`cli::run`] exposes both plus comparison and plotting as subcommands.

pub mod artifacts;
pub mod cli;
pub mod config;
pub mod error;
pub mod oracle;
pub mod oss;
pub mod plot;
pub mod quantify;
pub mod scenario;
pub mod systems;
pub mod validate;

pub use error::{Error, Result};
pub use oss::{
    CellKey, CentroidId, ContDim, CoveringSet, DeltaVector, DiscDim, OssSpec, StatePoint,
};
pub use quantify::{quantify, sample_count, CampaignReport, QuantifyConfig, Verdict};
pub use scenario::{run_scenario, Outcome, ScenarioRun, SystemModel};
pub use validate::{validate, ValidationOutcome, ValidationVerdict};
