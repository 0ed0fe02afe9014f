//! Rescaled variables λ, v₁, v₂, ζ along a blowup orbit and the affine
//! fit of 1/λ that locates the blowup time.

use biharm::integrator::{integrate, IntegrationConfig};
use biharm::ode::{c_star, Dimension, State};
use biharm::profile::blowup_diagnostics;

fn main() -> biharm::Result<()> {
    for n in [5, 6, 7] {
        let d = Dimension::new(n)?;
        let x0 = State::new(0.5, 0.2, c_star(d)? + 0.1, 0.3);
        let t = integrate(d, x0, 0.0, &IntegrationConfig::default(), &[])?;
        let g = blowup_diagnostics(&t)?;
        println!(
            "d = {n}: s_f ~ {:.8} (last s {:.8}), R^2 {:.8}, v1 {:?}, v2 {:?}, zeta {:?}",
            g.s_f_estimate,
            t.last().s,
            g.r_squared,
            g.v1_range,
            g.v2_range,
            g.zeta_range
        );
    }
    Ok(())
}
