pub mod build;
pub mod satellites;
pub mod scenarios;
pub mod subsample;
pub mod targets;

pub use build::{derive_seed, generate_instance, generate_instance_with};
pub use scenarios::{custom_template, enumerate_all, enumerate_specific, enumerate_standard, find_template, ScenarioTemplate};
pub use subsample::{subsample_instance, SubsampleRanges, SubsampleRequest};
pub use targets::{Distribution, TargetPool};
