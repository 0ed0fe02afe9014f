//! Region 𝒞, the tangent-frame and ξ systems, the cone 𝒦, the
//! sum-of-squares identity and the growth sandwich behind blowup.

use biharm::integrator::{integrate, IntegrationConfig};
use biharm::ode::{Dimension, State};
use biharm::regions::*;

fn main() -> biharm::Result<()> {
    for (x, y) in [(1.0, 0.5), (1.0, 5.0), (-0.5, -2.0)] {
        println!("(phi, phi'') = ({x}, {y}): C {:?}, -C {:?}, cone {}", in_region_c(x, y, BOUNDARY_TOL), in_minus_c(x, y, BOUNDARY_TOL), in_cone_k(x, y));
    }
    println!("phi_max(0.5) = {}", phi_max(0.5));
    let t = integrate(Dimension::FIVE, State::new(0.4, -0.3, 0.8, 0.2), 0.0, &IntegrationConfig::default().with_span(2.0), &[])?;
    println!("w-system residual {:.2e}, xi-system residual {:.2e}", w_system_residual(0.3, &t)?, xi_system_residual(&t)?);
    let (l, r) = sos_identity_check(1.3, -0.7);
    println!("sum of squares: {l} vs {r}");
    for d in [5, 6, 7] {
        println!("{:?}", growth_bound_check(Dimension::new(d)?, 10_000)?);
    }
    Ok(())
}
