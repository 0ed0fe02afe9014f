//! Integrates one orbit with the adaptive integrator, stopping where
//! |φ″| first reaches c⋆, and prints the dense output at a few points.

use biharm::integrator::{integrate, EventKind, IntegrationConfig};
use biharm::ode::{Dimension, State};

fn main() -> biharm::Result<()> {
    let cfg = IntegrationConfig::default();
    let watch = [EventKind::SecondDerivUp, EventKind::SecondDerivDown];
    let t = integrate(Dimension::FIVE, State::new(0.2, 0.4, 0.1, 0.0), 0.0, &cfg, &watch)?;
    println!("{} steps, termination {:?}", t.samples.len() - 1, t.termination);
    let (a, b) = t.span();
    for i in 0..=4 {
        let s = a + (b - a) * i as f64 / 4.0;
        println!("s = {s:.4}: {:?}", t.sample_at(s)?);
    }
    t.write_csv(std::io::stdout().lock())
}
