//! Bisects the seeding angle until the orbit shadows the heteroclinic
//! connection to (π/2, 0, 0, 0).

use std::f64::consts::FRAC_PI_2;

use biharm::manifold::{find_heteroclinic, theta0, ShootConfig};

fn main() -> biharm::Result<()> {
    let cfg = ShootConfig::default();
    let t0 = theta0(cfg.eps0)?;
    let h = find_heteroclinic((-FRAC_PI_2, t0 + 0.05), 1e-10, &cfg)?;
    println!("theta* = {:.17}, width {:.2e}, {} iterations", h.theta_star, h.width, h.iterations);
    println!("{:?}, distance to target at s = {}: {:.2e}", h.classification.outcome, cfg.span, h.classification.end_distance());
    Ok(())
}
