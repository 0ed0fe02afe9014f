//! Unstable manifold of the origin for d = 5: chart, seeding circle,
//! orbit classification and heteroclinic shooting.

pub mod chart;
pub mod classify;
pub mod decay;
pub mod shoot;

pub use chart::{seed_state, theta0, LocalChart, SeedSpec};
pub use classify::{classify_grid, classify_orbit, ClassificationResult, Outcome, HETEROCLINIC_TOL};
pub use decay::{verify_unstable_decay, DecayReport};
pub use shoot::{find_heteroclinic, Heteroclinic, ShootConfig};
