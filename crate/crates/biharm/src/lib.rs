pub mod audit;
pub mod cert;
pub mod cli;
pub mod config;
pub mod dd;
pub mod error;
pub mod integrator;
pub mod manifest;
pub mod manifold;
pub mod ode;
pub mod profile;
pub mod regions;

pub use error::{Error, Result};
