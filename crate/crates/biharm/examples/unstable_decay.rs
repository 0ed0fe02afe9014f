//! Integrates seeds backwards and fits the decay rates along the two
//! unstable eigendirections of the origin.

use biharm::integrator::IntegrationConfig;
use biharm::manifold::{verify_unstable_decay, SeedSpec};

fn main() -> biharm::Result<()> {
    let cfg = IntegrationConfig::default();
    for theta in [0.3, 1.0, std::f64::consts::FRAC_PI_2] {
        let r = verify_unstable_decay(SeedSpec::new(1e-3, theta)?, &cfg)?;
        println!("theta {theta:.3}: rate1 {:.6}, rate2 {:?}, min norm {:.2e}", r.rate1, r.rate2, r.min_norm);
    }
    // A smaller seed and tighter tolerances push the backward orbit further in.
    let tight = cfg.with_tolerances(1e-13, 1e-22).with_span(12.0);
    let r = verify_unstable_decay(SeedSpec::new(1e-6, 1.0)?, &tight)?;
    println!("eps0 1e-6: min norm {:.2e} at sigma = {:.2}", r.min_norm, r.min_norm_at);
    Ok(())
}
