//! Classifies seeds on the circle of radius ε₀ and counts sign changes of g.

use std::f64::consts::FRAC_PI_2;

use biharm::integrator::IntegrationConfig;
use biharm::manifold::classify::{sign_changes, theta_grid};
use biharm::manifold::{classify_grid, theta0};

fn main() -> biharm::Result<()> {
    let eps0 = 1e-3;
    let t0 = theta0(eps0)?;
    let res = classify_grid(eps0, &theta_grid(-FRAC_PI_2, t0, 200), &IntegrationConfig::default())?;
    println!("theta0 = {t0}, sign changes of g on [-pi/2, theta0]: {}", sign_changes(&res));
    for w in res.windows(2).filter(|w| w[0].g != w[1].g) {
        println!("g flips between {:.6} and {:.6}", w[0].theta, w[1].theta);
    }
    Ok(())
}
