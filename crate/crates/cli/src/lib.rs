//! Benchmark driver: campaigns, reports and scene export on top of the core and solver crates.

pub mod campaign;
pub mod cli;
pub mod report;
pub mod scene;
pub mod util;
