//! Scenario generation, instance model, feasibility, descriptors and metrics for
//! Earth-observation satellite scheduling.

pub mod astro;
pub mod characterise;
pub mod error;
pub mod feasibility;
pub mod generator;
pub mod io;
pub mod kinematics;
pub mod metrics;
pub mod model;
pub mod num;
pub mod synthetic;
pub mod validate;

pub use error::{Error, Result};
pub use kinematics::{transition_time, AgilityProfile, Profile, ProfileName};
pub use model::*;
pub use num::Scalar;

pub type Exact = num_rational::Rational64;
pub type Descriptors = characterise::DescriptorReport<f64>;
pub type ExactDescriptors = characterise::DescriptorReport<Exact>;
