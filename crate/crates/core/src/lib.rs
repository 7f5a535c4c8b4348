pub mod counterexamples;
pub mod error;
pub mod gf2;
pub mod network;
pub mod oracle;
pub mod reduction;
pub mod report;
pub mod scenario;
pub mod strategy;
pub mod universal;
pub mod views;

pub use error::{Error, Result};
