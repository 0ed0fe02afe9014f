//! Energy conservation for d = 4 and monotonicity for d = 5 along random
//! orbits, plus the analytic rate against finite differences.

use biharm::audit::{energy_audit, energy_rate_check, EnergyMode};
use biharm::integrator::IntegrationConfig;
use biharm::ode::Dimension;

fn main() -> biharm::Result<()> {
    let cfg = IntegrationConfig::default().with_span(10.0);
    let c = energy_audit(Dimension::new(4)?, EnergyMode::Conservation, 20, &cfg, 1)?;
    let m = energy_audit(Dimension::FIVE, EnergyMode::Monotonicity, 20, &cfg, 1)?;
    println!("d = 4 worst conservation defect {:.2e}", c.worst);
    println!("d = 5 most negative energy increment {:.2e}", m.worst);
    println!("rate vs differences, worst relative error {:.2e}", energy_rate_check(Dimension::FIVE, 1000, 2));
    Ok(())
}
